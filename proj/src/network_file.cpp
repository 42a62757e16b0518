#include "elnet/network_file.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "elnet/errors.hpp"
#include "elnet/generators.hpp"

namespace elnet {

using nlohmann::json;

bool NetworkFile::affine() const {
  return std::all_of(delays.begin(), delays.end(), [](const Delay& d) { return d.is_affine(); });
}

AffineGame NetworkFile::affine_game() const {
  if (!affine()) throw ParseError("network has non-affine delays");
  AffineGame game{network, {}, {}, throughput};
  for (const auto& d : delays) {
    game.a.push_back(d.a());
    game.b.push_back(d.b());
  }
  return game;
}

GeneralGame NetworkFile::general_game() const { return GeneralGame{network, delays, throughput}; }

NetworkFile NetworkFile::from_game(const AffineGame& game) {
  NetworkFile file{game.network, game.m, {}, std::nullopt};
  for (LinkId e = 0; e < game.a.size(); ++e) file.delays.push_back(Delay::affine(game.a[e], game.b[e]));
  return file;
}

NetworkFile NetworkFile::from_game(const GeneralGame& game) {
  for (const auto& d : game.delays)
    if (!d.is_polynomial()) throw ParseError("only polynomial delays can be written to a file");
  return NetworkFile{game.network, game.m, game.delays, std::nullopt};
}

namespace {

template <class T>
T field(const json& object, const char* key, const std::string& where) {
  if (!object.contains(key)) throw ParseError(fmt::format("{}: missing field '{}'", where, key));
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ParseError(fmt::format("{}: field '{}': {}", where, key, ex.what()));
  }
}

template <class T>
T field_or(const json& object, const char* key, T fallback, const std::string& where) {
  return object.contains(key) ? field<T>(object, key, where) : fallback;
}

Delay parse_delay(const json& d, const std::string& where) {
  if (!d.is_object()) throw ParseError(fmt::format("{}: delay must be an object", where));
  const auto kind = field<std::string>(d, "kind", where);
  const double a = field<double>(d, "a", where);
  const double b = field_or<double>(d, "b", 0.0, where);
  if (!(a > 0.0)) throw ParseError(fmt::format("{}: a must be positive", where));
  if (!(b >= 0.0)) throw ParseError(fmt::format("{}: b must be nonnegative", where));
  if (kind == "affine") return Delay::affine(a, b);
  if (kind == "polynomial") {
    const int degree = field<int>(d, "degree", where);
    if (degree < 1) throw ParseError(fmt::format("{}: degree must be at least 1", where));
    return Delay::polynomial(a, b, degree);
  }
  throw ParseError(fmt::format("{}: unknown delay kind '{}'", where, kind));
}

NetworkFile generate_from(const json& spec) {
  const std::string where = "generator";
  if (!spec.is_object()) throw ParseError("generator must be an object");
  const auto kind = field<std::string>(spec, "kind", where);
  NetworkFile file;
  try {
    if (kind == "square_grid") {
      file = NetworkFile::from_game(square_grid(field<int>(spec, "side", where)));
    } else if (kind == "cube_grid") {
      file = NetworkFile::from_game(cube_grid(field<int>(spec, "side", where)));
    } else if (kind == "ring") {
      file = NetworkFile::from_game(ring(field<int>(spec, "n", where)));
    } else if (kind == "double_tree") {
      file = NetworkFile::from_game(double_tree(field<int>(spec, "depth", where)));
    } else if (kind == "wheatstone") {
      file = NetworkFile::from_game(wheatstone());
    } else if (kind == "example1") {
      file = NetworkFile::from_game(example1());
    } else if (kind == "la_highway") {
      const auto E = la_highway().link_count();
      const auto a = field_or<std::vector<double>>(spec, "a", std::vector<double>(E, 1.0), where);
      const auto b = field_or<std::vector<double>>(spec, "b", std::vector<double>(E, 0.0), where);
      file = NetworkFile::from_game(la_quartic(a, b, field_or<double>(spec, "m", 1.0, where)));
    } else if (kind == "random_series_parallel") {
      DelayRanges r;
      r.a_min = field_or<double>(spec, "a_min", r.a_min, where);
      r.a_max = field_or<double>(spec, "a_max", r.a_max, where);
      r.b_min = field_or<double>(spec, "b_min", r.b_min, where);
      r.b_max = field_or<double>(spec, "b_max", r.b_max, where);
      r.m_min = field_or<double>(spec, "m_min", r.m_min, where);
      r.m_max = field_or<double>(spec, "m_max", r.m_max, where);
      file = NetworkFile::from_game(random_series_parallel(
          field<std::uint64_t>(spec, "seed", where), field<int>(spec, "depth", where), r));
    } else {
      throw ParseError(fmt::format("unknown generator kind '{}'", kind));
    }
  } catch (const std::invalid_argument& ex) {
    throw ParseError(fmt::format("generator '{}': {}", kind, ex.what()));
  }
  if (spec.contains("throughput")) file.throughput = field<double>(spec, "throughput", where);
  file.generator = spec.dump();
  return file;
}

}  // namespace

NetworkFile parse_network_file(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ParseError(fmt::format("malformed JSON: {}", ex.what()));
  }
  if (!doc.is_object()) throw ParseError("network file must be a JSON object");

  if (!doc.contains("links")) {
    if (!doc.contains("generator")) throw ParseError("network file needs 'links' or 'generator'");
    auto file = generate_from(doc.at("generator"));
    if (doc.contains("throughput")) file.throughput = field<double>(doc, "throughput", "file");
    if (!(file.throughput > 0.0)) throw ParseError("throughput must be positive");
    return file;
  }

  const auto nodes = field<std::size_t>(doc, "nodes", "file");
  const auto origin = field<NodeId>(doc, "origin", "file");
  const auto destination = field<NodeId>(doc, "destination", "file");
  const auto throughput = field<double>(doc, "throughput", "file");
  if (!(throughput > 0.0)) throw ParseError("throughput must be positive");
  const auto& records = doc.at("links");
  if (!records.is_array()) throw ParseError("'links' must be an array");

  std::vector<Link> links(records.size());
  std::vector<Delay> delays(records.size());
  std::vector<bool> seen(records.size(), false);
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    const std::string where = fmt::format("link record {}", k);
    if (!r.is_object()) throw ParseError(where + ": must be an object");
    const auto id = field_or<std::size_t>(r, "id", k, where);
    if (id >= records.size() || seen[id])
      throw ParseError(fmt::format("{}: id {} is out of range or repeated", where, id));
    seen[id] = true;
    links[id] = {field<NodeId>(r, "tail", where), field<NodeId>(r, "head", where)};
    if (!r.contains("delay")) throw ParseError(where + ": missing field 'delay'");
    delays[id] = parse_delay(r.at("delay"), where);
  }
  NetworkFile file{DirectedNetwork(nodes, std::move(links), origin, destination), throughput,
                   std::move(delays), std::nullopt};
  if (const auto issues = validate(file.network); !issues.empty())
    throw ParseError(fmt::format("invalid network: {}", issues.front()));
  if (doc.contains("generator")) file.generator = doc.at("generator").dump();
  return file;
}

NetworkFile load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_network_file(text.str());
}

std::string serialize(const NetworkFile& file) {
  json doc = json::object();
  doc["nodes"] = file.network.node_count();
  doc["origin"] = file.network.origin();
  doc["destination"] = file.network.destination();
  doc["throughput"] = file.throughput;
  json links = json::array();
  for (LinkId e = 0; e < file.network.link_count(); ++e) {
    const auto& d = file.delays[e];
    json delay = d.is_affine() ? json{{"kind", "affine"}, {"a", d.a()}, {"b", d.b()}}
                               : json{{"kind", "polynomial"},
                                      {"degree", d.degree()},
                                      {"a", d.a()},
                                      {"b", d.b()}};
    links.push_back({{"id", e},
                     {"tail", file.network.link(e).tail},
                     {"head", file.network.link(e).head},
                     {"delay", std::move(delay)}});
  }
  doc["links"] = std::move(links);
  if (file.generator) doc["generator"] = json::parse(*file.generator);
  return doc.dump(2) + "\n";
}

NetworkFile generate_network(std::string_view spec_json) {
  json spec;
  try {
    spec = json::parse(spec_json);
  } catch (const json::parse_error& ex) {
    throw ParseError(fmt::format("malformed generator spec: {}", ex.what()));
  }
  return generate_from(spec);
}

}  // namespace elnet

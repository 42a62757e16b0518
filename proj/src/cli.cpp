#include "elnet/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "elnet/errors.hpp"
#include "elnet/localres.hpp"
#include "elnet/ndp.hpp"
#include "elnet/network_file.hpp"
#include "elnet/parallel.hpp"
#include "elnet/walks.hpp"

namespace elnet {

namespace {

class ModeMisuse : public Error {
 public:
  using Error::Error;
};

class InvariantBreach : public Error {
 public:
  using Error::Error;
};

std::string num(double x) {
  if (std::isnan(x)) return "";
  if (x == 0.0) return "0";
  return fmt::format("{:.12g}", x);
}

std::string num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

void header(std::ostream& out, const std::string& command, const std::vector<std::string>& args,
            std::uint64_t seed) {
  out << "# elnet " << kVersion << ' ' << command << '\n';
  out << "# args:";
  for (const auto& a : args) out << ' ' << a;
  out << "\n# seed: " << seed << '\n';
}

/// Conductance 1/a_e on every link, using the leading coefficient of each
/// delay.
ResistorNet conductance_view(const NetworkFile& file) {
  std::vector<WeightedEdge> edges;
  for (LinkId e = 0; e < file.network.link_count(); ++e) {
    const auto& l = file.network.link(e);
    edges.push_back({l.tail, l.head, 1.0 / file.delays[e].a()});
  }
  return ResistorNet::from_conductances(file.network.node_count(), edges);
}

std::vector<std::pair<NodeId, NodeId>> select_links(const ResistorNet& rn, const std::string& spec) {
  std::vector<std::pair<NodeId, NodeId>> out;
  if (spec == "all") {
    for (const auto& l : rn.links()) out.emplace_back(l.i, l.j);
    return out;
  }
  std::stringstream items(spec);
  std::string item;
  while (std::getline(items, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw ParseError(fmt::format("link '{}' is not of the form i-j", item));
    try {
      const NodeId i = std::stoul(item.substr(0, dash));
      const NodeId j = std::stoul(item.substr(dash + 1));
      if (i >= rn.node_count() || j >= rn.node_count() || !rn.graph().adjacent(i, j))
        throw ParseError(fmt::format("{}-{} is not a resistor link", i, j));
      out.emplace_back(std::min(i, j), std::max(i, j));
    } catch (const std::logic_error&) {
      throw ParseError(fmt::format("link '{}' is not of the form i-j", item));
    }
  }
  return out;
}

std::vector<int> parse_distances(const std::string& spec) {
  std::vector<int> out;
  try {
    if (const auto dots = spec.find(".."); dots != std::string::npos) {
      const int lo = std::stoi(spec.substr(0, dots));
      const int hi = std::stoi(spec.substr(dots + 2));
      for (int d = lo; d <= hi; ++d) out.push_back(d);
    } else {
      std::stringstream items(spec);
      std::string item;
      while (std::getline(items, item, ',')) out.push_back(std::stoi(item));
    }
  } catch (const std::logic_error&) {
    throw ParseError(fmt::format("distance '{}' is not d, a..b or a comma list", spec));
  }
  if (out.empty()) throw ParseError("no distance given");
  for (int d : out)
    if (d < 1) throw ParseError("distances must be at least 1");
  return out;
}

InterventionCost parse_cost(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream items(spec);
  std::string item;
  while (std::getline(items, item, ':')) parts.push_back(item);
  try {
    if (parts.size() == 2 && parts[0] == "linear") return InterventionCost::linear(std::stod(parts[1]));
    if (parts.size() == 3 && parts[0] == "power") {
      const double c = std::stod(parts[1]);
      const double p = std::stod(parts[2]);
      if (!(c >= 0.0) || !(p > 0.0)) throw ParseError("power cost needs c >= 0 and p > 0");
      return InterventionCost::custom([c, p](double u) { return c * std::pow(u, p); });
    }
  } catch (const std::logic_error&) {
  }
  throw ParseError(fmt::format("cost '{}' is not linear:c or power:c:p", spec));
}

// --- commands -----------------------------------------------------------------

void cmd_equilibrium(const NetworkFile& file, double tol, std::ostream& out) {
  std::vector<LinkId> kept;
  Equilibrium eq;
  double cost = 0.0;
  const auto general = prune(file.general_game(), &kept);
  std::vector<double> delay_at(kept.size());
  if (file.affine()) {
    const auto game = prune(file.affine_game());
    eq = solve_affine(game);
    cost = social_cost(eq, game);
  } else {
    eq = solve_convex(general, tol);
    cost = social_cost(eq, general);
  }
  std::vector<std::optional<std::size_t>> row_of(file.network.link_count());
  for (std::size_t k = 0; k < kept.size(); ++k) row_of[kept[k]] = k;

  out << "link,tail,head,flow,delay,lambda,status\n";
  for (LinkId e = 0; e < file.network.link_count(); ++e) {
    const auto& l = file.network.link(e);
    out << e << ',' << l.tail << ',' << l.head << ',';
    if (const auto k = row_of[e]) {
      out << num(eq.f[*k]) << ',' << num(general.delays[*k](eq.f[*k])) << ',' << num(eq.lambda[*k])
          << ',' << (eq.unused(*k) ? "unused" : "used") << '\n';
    } else {
      out << "0," << num(file.delays[e](0.0)) << ",,pruned\n";
    }
  }
  out << "\nnode,gamma\n";
  for (NodeId n = 0; n < file.network.node_count(); ++n) out << n << ',' << num(eq.gamma[n]) << '\n';
  out << "\nquantity,value\nsocial_cost," << num(cost) << '\n';
}

void cmd_resistance(const NetworkFile& file, const std::optional<std::string>& distance,
                    bool exact, const std::string& links, unsigned jobs, std::ostream& out) {
  if (!distance && !exact) throw ParseError("resistance needs --distance, --exact or both");
  const auto rn = conductance_view(file);
  const auto pairs = select_links(rn, links);
  std::vector<double> r;
  if (exact) r = effective_resistances(rn, pairs, jobs);
  const std::vector<int> ds = distance ? parse_distances(*distance) : std::vector<int>{0};

  out << "d,i,j,conductance,lower,upper,exact,gap,upper_relative,lower_relative,centrality\n";
  for (int d : ds) {
    std::vector<std::optional<ResistanceBounds>> bounds(pairs.size());
    if (d > 0)
      parallel_for(pairs.size(), jobs, [&](std::size_t k) {
        bounds[k] = resistance_bounds(rn, pairs[k].first, pairs[k].second, d);
      });
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      const double w = rn.conductance(i, j);
      std::optional<double> lower, upper, gap, r_exact, up_rel, lo_rel, centrality;
      if (bounds[k]) {
        lower = bounds[k]->lower;
        upper = bounds[k]->upper;
        gap = bounds[k]->gap();
      }
      if (exact) {
        r_exact = r[k];
        centrality = r[k] * w;
        if (bounds[k]) {
          up_rel = (*upper - r[k]) / r[k];
          lo_rel = (r[k] - *lower) / r[k];
        }
      }
      out << (d > 0 ? std::to_string(d) : std::string()) << ',' << i << ',' << j << ','
          << num(w) << ',' << num(lower) << ',' << num(upper) << ',' << num(r_exact) << ','
          << num(gap) << ',' << num(up_rel) << ',' << num(lo_rel) << ',' << num(centrality)
          << '\n';
    }
  }
}

struct NdpFlags {
  std::string mode = "algorithm1";
  int distance = 1;
  double alpha = 0.0;
  double umax = 100.0;
  std::string h = "linear:1";
  std::optional<double> u;
  bool approx = false;
  bool check = false;
};

void cmd_ndp(const NetworkFile& file, const NdpFlags& flags, unsigned jobs, std::ostream& out) {
  if (flags.mode != "exact" && flags.mode != "electrical" && flags.mode != "algorithm1")
    throw ParseError(fmt::format("unknown mode '{}'", flags.mode));
  if (flags.distance < 1) throw ParseError("distance must be at least 1");
  if (flags.u && !(*flags.u >= 0.0)) throw ParseError("--u must be nonnegative");
  const bool affine = file.affine();
  if (!affine && flags.mode != "exact" && !flags.approx)
    throw ModeMisuse("nonlinear delays need --approx for electrical and algorithm1 modes");

  InterventionCostModel model;
  model.alpha = flags.alpha;
  model.u_max = flags.umax;
  model.fallback = parse_cost(flags.h);
  NdpOptions options;
  options.exact_resistance = flags.mode == "electrical";
  options.fixed_u = flags.u;
  options.check_assumption = flags.check && affine;
  options.jobs = jobs;

  std::vector<LinkId> kept;
  NdpResult result;
  if (affine) {
    const auto game = prune(file.affine_game(), &kept);
    result = flags.mode == "exact" ? exact_ndp(game, model, options)
                                   : algorithm1(game, model, flags.distance, options);
  } else {
    const auto game = prune(file.general_game(), &kept);
    result = flags.mode == "exact" ? exact_ndp(game, model, options)
                                   : algorithm1_nonlinear(game, model, flags.distance, options);
  }

  out << "link,candidate,flow,current,slope,lower,upper,resistance,u,gain,objective,"
         "relative_bound,gain_floor,assumption_holds\n";
  for (const auto& row : result.links) {
    out << kept[row.link] << ',' << (row.candidate ? 1 : 0) << ',' << num(row.flow) << ',';
    if (flags.mode == "exact") {
      out << ",,,,,";
    } else if (row.candidate) {
      out << num(row.current) << ',' << num(row.slope) << ',' << num(row.lower) << ','
          << num(row.upper) << ',' << num(row.resistance) << ',';
    } else {
      out << ",,,,,";
    }
    out << num(row.magnitude) << ',' << num(row.gain) << ',' << num(row.objective) << ',';
    if (flags.mode == "exact" || !row.candidate || row.magnitude == 0.0)
      out << ",,";
    else
      out << num(row.relative_bound) << ',' << num(row.gain_floor) << ',';
    if (row.assumption_holds) out << (*row.assumption_holds ? 1 : 0);
    out << '\n';
  }
  out << "\nchosen_link,u,objective,approximate,mode\n";
  if (result.chosen_link)
    out << kept[*result.chosen_link] << ',' << num(result.chosen_magnitude) << ','
        << num(result.objective);
  else
    out << ",,";
  out << ',' << (result.approximate ? 1 : 0) << ',' << flags.mode << '\n';
}

int cmd_gapscan(const NetworkFile& file, int dmax, unsigned jobs, std::ostream& out,
                std::ostream& err) {
  if (dmax < 1) throw ParseError("--dmax must be at least 1");
  const auto rn = conductance_view(file);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (const auto& l : rn.links()) pairs.emplace_back(l.i, l.j);
  const auto exact = effective_resistances(rn, pairs, jobs);

  out << "d,average_relative_gap,max_relative_gap\n";
  double previous = INFINITY;
  for (int d = 1; d <= dmax; ++d) {
    auto scan = scan_all_links(rn, d, jobs);
    if (!scan.errors.empty()) throw Error(scan.errors.front());
    const double average = average_relative_gap(scan.bounds, exact);
    double worst = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k)
      worst = std::max(worst, scan.bounds[k].gap() / exact[k]);
    out << d << ',' << num(average) << ',' << num(worst) << '\n';
    if (average > previous + 1e-12 * std::max(1.0, previous)) {
      err << fmt::format("average relative gap increased from {} to {} at d={}\n", num(previous),
                         num(average), d);
      return kExitInvariant;
    }
    previous = average;
  }
  return kExitOk;
}

int cmd_walks(const NetworkFile& file, const std::string& link, const std::string& distance,
              std::ostream& out, std::ostream& err) {
  const auto rn = conductance_view(file);
  auto dash = link;
  std::replace(dash.begin(), dash.end(), ',', '-');
  const auto pairs = select_links(rn, dash);
  if (pairs.size() != 1) throw ParseError("--link takes exactly one pair i,j");
  // Keep the orientation the user asked for.
  const auto comma = link.find(',');
  const NodeId i = std::stoul(link.substr(0, comma));
  const NodeId j = std::stoul(link.substr(comma + 1));

  out << "d,term1,term2,gap_rhs,measured_gap\n";
  for (int d : parse_distances(distance)) {
    const double t1 = term1(rn, i, j, d);
    const double t2 = term2(rn, i, j, d);
    const double rhs = gap_rhs(rn, i, j, d);
    const double gap = resistance_bounds(rn, i, j, d).gap();
    out << d << ',' << num(t1) << ',' << num(t2) << ',' << num(rhs) << ',' << num(gap) << '\n';
    if (gap > rhs + 1e-9 * std::max(1.0, rhs)) {
      err << fmt::format("measured gap {} exceeds the bound {} at d={}\n", num(gap), num(rhs), d);
      return kExitInvariant;
    }
  }
  return kExitOk;
}

struct GenerateFlags {
  std::string kind;
  std::optional<int> side, n, depth;
  std::optional<double> throughput;
  std::optional<std::string> output;
};

void cmd_generate(const GenerateFlags& flags, std::uint64_t seed, std::ostream& out) {
  nlohmann::json spec{{"kind", flags.kind}};
  if (flags.side) spec["side"] = *flags.side;
  if (flags.n) spec["n"] = *flags.n;
  if (flags.depth) spec["depth"] = *flags.depth;
  if (flags.kind == "random_series_parallel") spec["seed"] = seed;
  if (flags.throughput) spec["throughput"] = *flags.throughput;
  const auto text = serialize(generate_network(spec.dump()));
  if (flags.output) {
    std::ofstream file(*flags.output);
    if (!file) throw ParseError(fmt::format("cannot write '{}'", *flags.output));
    file << text;
  } else {
    out << text;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-link network design on associated resistor networks", "elnet"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  unsigned jobs = 0;
  app.add_option("--seed", seed, "seed for every random draw")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads (0 = all cores)")->capture_default_str();
  app.set_help_flag("--help", "print help");
  app.set_version_flag("--version", kVersion);

  std::string input;
  auto* equilibrium = app.add_subcommand("equilibrium", "Wardrop equilibrium, multipliers, social cost");
  double tol = 1e-10;
  equilibrium->add_option("input", input, "network file")->required();
  equilibrium->add_option("--tol", tol, "relative duality gap for nonlinear delays")
      ->capture_default_str();

  auto* resistance = app.add_subcommand("resistance", "exact and local effective resistances");
  std::optional<std::string> distance;
  bool exact = false;
  std::string links = "all";
  resistance->add_option("input", input, "network file")->required();
  resistance->add_option("--distance", distance, "d, a..b or a comma list");
  resistance->add_flag("--exact", exact, "also solve the full network");
  resistance->add_option("--links", links, "'all' or a list such as 0-1,4-5")->capture_default_str();

  auto* ndp = app.add_subcommand("ndp", "single-link network design");
  NdpFlags nf;
  ndp->add_option("input", input, "network file")->required();
  ndp->add_option("--mode", nf.mode, "exact | electrical | algorithm1")->capture_default_str();
  ndp->add_option("--distance", nf.distance, "cut/short distance d")->capture_default_str();
  ndp->add_option("--alpha", nf.alpha, "cost tradeoff")->capture_default_str();
  ndp->add_option("--umax", nf.umax, "upper end of the magnitude search")->capture_default_str();
  ndp->add_option("--h", nf.h, "intervention cost: linear:c or power:c:p")->capture_default_str();
  ndp->add_option("--u", nf.u, "evaluate every link at this magnitude");
  ndp->add_flag("--approx", nf.approx, "accept nonlinear delays");
  ndp->add_flag("--check-assumption", nf.check, "re-solve to test that the used links are unchanged");

  auto* gapscan = app.add_subcommand("gapscan", "average relative bound gap for d = 1..dmax");
  int dmax = 5;
  gapscan->add_option("input", input, "network file")->required();
  gapscan->add_option("--dmax", dmax, "largest distance")->capture_default_str();

  auto* walks = app.add_subcommand("walks", "hitting-probability decomposition of the bound gap");
  std::string link;
  std::string distances = "1";
  walks->add_option("input", input, "network file")->required();
  walks->add_option("--link", link, "endpoints i,j")->required();
  walks->add_option("--distance", distances, "d, a..b or a comma list")->capture_default_str();

  auto* generate = app.add_subcommand("generate", "write a generated network file");
  GenerateFlags gf;
  generate->add_option("--kind", gf.kind, "generator kind")->required();
  generate->add_option("--side", gf.side, "grid side");
  generate->add_option("--n", gf.n, "ring size");
  generate->add_option("--depth", gf.depth, "tree or composition depth");
  generate->add_option("--throughput", gf.throughput, "override throughput");
  generate->add_option("--output,-o", gf.output, "file to write instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (generate->parsed()) {
      cmd_generate(gf, seed, out);
      return kExitOk;
    }
    const auto file = load_network_file(input);
    std::ostringstream body;
    int code = kExitOk;
    std::string command;
    if (equilibrium->parsed()) {
      command = "equilibrium";
      cmd_equilibrium(file, tol, body);
    } else if (resistance->parsed()) {
      command = "resistance";
      cmd_resistance(file, distance, exact, links, jobs, body);
    } else if (ndp->parsed()) {
      command = "ndp";
      cmd_ndp(file, nf, jobs, body);
    } else if (gapscan->parsed()) {
      command = "gapscan";
      code = cmd_gapscan(file, dmax, jobs, body, err);
    } else if (walks->parsed()) {
      command = "walks";
      code = cmd_walks(file, link, distances, body, err);
    }
    header(out, command, args, seed);
    out << body.str();
    return code;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ModeMisuse& e) {
    err << "mode error: " << e.what() << '\n';
    return kExitMode;
  } catch (const InvariantBreach& e) {
    err << "invariant breach: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitParse;
  }
}

}  // namespace elnet

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elnet/delay.hpp"
#include "elnet/wardrop.hpp"

namespace elnet {

/// In-memory form of a network file: a routing game whose delays are all
/// polynomial (affine being degree 1), plus the generator spec it came from.
struct NetworkFile {
  DirectedNetwork network;
  double throughput = 1.0;
  std::vector<Delay> delays;
  std::optional<std::string> generator;  // canonical JSON of the spec

  bool affine() const;
  AffineGame affine_game() const;  // throws ParseError if some delay is not affine
  GeneralGame general_game() const;

  static NetworkFile from_game(const AffineGame& game);
  static NetworkFile from_game(const GeneralGame& game);
};

/// Parses the JSON grammar documented in the README. Throws ParseError.
NetworkFile parse_network_file(std::string_view text);
NetworkFile load_network_file(const std::string& path);

/// Canonical text: explicit link records in id order, then the generator spec.
std::string serialize(const NetworkFile& file);

/// Builds a network from a generator spec such as
/// {"kind": "square_grid", "side": 41}. Throws ParseError.
NetworkFile generate_network(std::string_view spec_json);

}  // namespace elnet

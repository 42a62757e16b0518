#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "elnet/resistor.hpp"
#include "elnet/wardrop.hpp"

namespace elnet {

/// Uniform draws built directly on std::mt19937_64, whose output sequence is
/// fixed by the standard (the distribution classes are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

// --- lattices and rings -------------------------------------------------------

/// side×side lattice, links pointing east and north, unit slope, no free-flow
/// time, unit throughput from the south-west to the north-east corner.
AffineGame square_grid(int side);
NodeId grid_node(int side, int x, int y);
/// The link from the central node to its eastern neighbour (odd side).
std::pair<NodeId, NodeId> grid_central_link(int side);

AffineGame cube_grid(int side);

/// Cycle 0..n-1; both arcs from node 0 are oriented toward node n/2.
AffineGame ring(int n);

/// Two complete binary trees of the given depth rooted at nodes 0 and 1 and
/// joined by the link 0→1, which is also the origin-destination pair.
AffineGame double_tree(int depth);

/// Unit-conductance resistor view of any generated game.
ResistorNet unit_resistors(const AffineGame& game);

// --- networks from the figures ---------------------------------------------------

/// Two parallel links, a = (1, 1), b = (1, 1.5), m = 1.
AffineGame wheatstone();
/// Links e1, e2 parallel from o to n and e3 from n to d; a = (3, 2, 1), b = 0, m = 3.
AffineGame example1();
/// Los Angeles highway topology: 17 nodes, 28 links, origin 0, destination 16.
DirectedNetwork la_highway();
/// Quartic delays a_e x^4 + b_e on la_highway.
GeneralGame la_quartic(const std::vector<double>& a, const std::vector<double>& b, double m);

// --- random corpora ---------------------------------------------------------------

struct DelayRanges {
  double a_min = 0.5;
  double a_max = 2.0;
  double b_min = 0.0;
  double b_max = 0.0;
  double m_min = 1.0;
  double m_max = 10.0;
};

/// Random recursive series/parallel composition; depth 1 is a single link.
AffineGame random_series_parallel(std::uint64_t seed, int depth, const DelayRanges& ranges = {});

/// Random spanning tree plus `extra` distinct extra edges, conductances drawn
/// from [w_min, w_max].
ResistorNet random_connected(std::uint64_t seed, std::size_t n, std::size_t extra,
                             double w_min = 0.5, double w_max = 2.0);

/// Unit square lattice with a fraction of edges deleted, keeping it connected.
ResistorNet grid_with_deletions(std::uint64_t seed, int side, double fraction);

}  // namespace elnet

#include <catch_amalgamated.hpp>

#include <algorithm>

#include "elnet/errors.hpp"
#include "elnet/generators.hpp"
#include "elnet/localres.hpp"
#include "elnet/walks.hpp"
#include "oracles.hpp"

using namespace elnet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("hitting probabilities match a dense harmonic solve") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rn = random_connected(seed, 20, 15);
    const std::vector<NodeId> a{0, 5}, b{7};
    const auto p = hit_before_all(rn, a, b, 0);
    const auto ref = oracle::hitting_dense(20, rn.links(), a, b);
    for (NodeId x = 0; x < 20; ++x) CHECK_THAT(p[x], WithinAbs(ref[x], 1e-12));
    CHECK_THAT(hit_before(rn, {11, a, b}), WithinAbs(ref[11], 1e-12));
  }
  const auto split = ResistorNet::from_conductances(4, std::vector<WeightedEdge>{{0, 1, 1}, {2, 3, 1}});
  CHECK_THROWS_AS(hit_before(split, {2, {0}, {1}}), Unreachable);
}

TEST_CASE("gambler's ruin on a path") {
  // Path 0..10: p_k(T_10 < T_0) = k/10.
  std::vector<WeightedEdge> path;
  for (NodeId k = 0; k < 10; ++k) path.push_back({k, k + 1, 1.0});
  const auto rn = ResistorNet::from_conductances(11, path);
  const auto p = hit_before_all(rn, {10}, {0}, 0);
  for (NodeId k = 0; k <= 10; ++k) CHECK_THAT(p[k], WithinAbs(k / 10.0, 1e-14));
}

TEST_CASE("ring decomposition terms") {
  for (int d = 1; d <= 8; ++d) {
    const int n = 4 * d + 8;
    const auto rn = unit_resistors(ring(n));
    const auto shell = distance_shell(rn, 0, 1, d);
    CHECK(shell == std::vector<NodeId>{static_cast<NodeId>(1 + d), static_cast<NodeId>(n - d)});

    // Shorted ring is a cycle of 2d+3 nodes; from the i-side shell node the
    // walk needs d steps to i and d+2 to j the other way round.
    const auto shorted = short_at_distance(rn, 0, 1, d);
    const auto p = hit_before_all(shorted.net, {shorted.i}, {shorted.j}, shorted.i);
    auto local = [&](NodeId original) {
      return static_cast<std::size_t>(
          std::find(shorted.original.begin(), shorted.original.end(), original) - shorted.original.begin());
    };
    CHECK_THAT(p[local(n - d)], WithinAbs((d + 2.0) / (2.0 * d + 2.0), 1e-12));
    CHECK_THAT(p[local(1 + d)], WithinAbs(d / (2.0 * d + 2.0), 1e-12));

    CHECK_THAT(term1(rn, 0, 1, d), WithinAbs(1.0 / (d + 1.0), 1e-12));
    CHECK_THAT(term2(rn, 0, 1, d), WithinAbs(d / (2.0 * d + 2.0), 1e-12));
    CHECK_THAT(gap_rhs(rn, 0, 1, d), WithinAbs(d / ((d + 1.0) * (d + 1.0)), 1e-12));
    CHECK_THAT(resistance_bounds(rn, 0, 1, d).gap(), WithinAbs(1.0 / (2.0 * d + 3.0), 1e-12));
  }
}

TEST_CASE("term1 decreases along the grid") {
  const auto rn = unit_resistors(square_grid(31));
  const auto [i, j] = grid_central_link(31);
  double previous = 1.0;
  for (int d = 1; d <= 6; ++d) {
    const double t = term1(rn, i, j, d);
    CHECK(t < previous);
    CHECK(resistance_bounds(rn, i, j, d).gap() <= gap_rhs(rn, i, j, d) + 1e-12);
    previous = t;
  }
}

TEST_CASE("empty shell gives zero terms") {
  const std::vector<WeightedEdge> tri{{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}};
  const auto rn = ResistorNet::from_conductances(3, tri);
  CHECK(distance_shell(rn, 0, 1, 2).empty());
  CHECK(term1(rn, 0, 1, 2) == 0.0);
  CHECK(term2(rn, 0, 1, 2) == 0.0);
}

TEST_CASE("double tree lower bound three ways") {
  for (int d = 1; d <= 7; ++d) {
    const double closed = double_tree_lower_closed_form(d);
    CHECK_THAT(double_tree_lower_recursion(d), WithinAbs(closed, 1e-13));
    const auto rn = unit_resistors(double_tree(d + 2));
    const auto b = resistance_bounds(rn, 0, 1, d);
    CHECK_THAT(b.lower, WithinAbs(closed, 1e-11));
    CHECK_THAT(b.upper, WithinAbs(1.0, 1e-12));
  }
  CHECK_THAT(double_tree_lower_closed_form(1), WithinAbs(0.6, 1e-15));
  CHECK_THAT(1.0 - double_tree_lower_closed_form(40), WithinAbs(1.0 / 3.0, 1e-9));
}

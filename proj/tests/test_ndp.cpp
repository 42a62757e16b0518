#include <catch_amalgamated.hpp>

#include <cmath>

#include "elnet/errors.hpp"
#include "elnet/generators.hpp"
#include "elnet/ndp.hpp"

using namespace elnet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Gains on the three-link network, derived by hand: e1, e2 split the flow m
// in proportion 1/a1 : 1/a2 and e3 carries all of it.
double example1_gain(LinkId e, double u) {
  const double a1 = 3, a2 = 2, m = 3;
  switch (e) {
    case 0: return m * m * a1 * a2 * a2 * u / ((a1 + a2) * (a1 + (u + 1) * a2));
    case 1: return m * m * a1 * a1 * a2 * u / ((a1 + a2) * ((u + 1) * a1 + a2));
    default: return m * m * 1.0 * u / (u + 1);
  }
}

}  // namespace

TEST_CASE("three-link gains, exact and electrical") {
  const auto game = example1();
  const auto eq = solve_affine(game);
  const auto rn = ResistorNet::from_affine(game, eq.support_complement);
  const auto volt = solve_voltage(rn, 0, 2, game.m);
  for (double u : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0})
    for (LinkId e = 0; e < 3; ++e) {
      const auto [t, h] = rn.link_map(e);
      const double r = effective_resistance(rn, t, h);
      CHECK_THAT(delta_cost_exact(game, eq, {e, u}).delta, WithinRel(example1_gain(e, u), 1e-10));
      CHECK_THAT(delta_cost_electrical(game, eq, volt, r, {e, u}), WithinRel(example1_gain(e, u), 1e-10));
      CHECK_FALSE(delta_cost_exact(game, eq, {e, u}).support_changed);
    }
  CHECK_THAT(example1_gain(0, 1.0), WithinAbs(108.0 / 35.0, 1e-14));
  CHECK_THAT(delta_cost_derivative(game, eq, volt, 2), WithinAbs(9.0, 1e-12));
  CHECK_THAT(delta_cost_derivative(game, eq, volt, 1), WithinAbs(6.48, 1e-12));
}

TEST_CASE("gains on unused links") {
  const auto game = wheatstone();
  auto skewed = game;
  skewed.b[1] = 5.0;
  const auto eq = solve_affine(skewed);
  REQUIRE(eq.unused(1));
  const auto rn = ResistorNet::from_affine(skewed, eq.support_complement);
  const auto volt = solve_voltage(rn, 0, 1, skewed.m);
  CHECK_THROWS_AS(delta_cost_electrical(skewed, eq, volt, 1.0, {1, 1.0}), LinkUnsupported);
  CHECK(delta_cost_derivative(skewed, eq, volt, 1) == 0.0);
  CHECK(delta_cost_exact(skewed, eq, {1, 0.5}).delta == 0.0);
  CHECK(check_assumption1(skewed, {1, 0.5}));
  CHECK_FALSE(check_assumption1(game, {0, 2.0}));
}

TEST_CASE("error bound formulas") {
  const auto eb = error_bound(2.0, 1.5, 1.5, 3.0, 0.8, 1.0, 4.0);
  const double eps = 0.2 / 2.0;
  CHECK_THAT(eb.relative_bound, WithinRel(eps / (2.0 * (1.0 / 3.0 + 0.9 / 2.0)), 1e-14));
  CHECK_THAT(eb.gain_floor, WithinRel(2.0 * 1.5 * 1.5 / (1.0 / 3.0 + 1.0 / 2.0), 1e-14));
  CHECK_THAT(eb.coarse_bound, WithinRel(eps / (2.0 * (1.0 / 3.0 + 1.0 / 8.0)), 1e-14));
  CHECK(eb.coarse_bound >= eb.relative_bound);
  CHECK_THROWS_AS(error_bound(1, 1, 1, 0.0, 0.5, 1, 1), std::invalid_argument);
}

TEST_CASE("single-link optimizer against a grid search") {
  const double a = 1.5, f = 2.0, y = 2.0, lo = 0.4, hi = 0.6;
  auto objective = [&](double u, double alpha, const InterventionCost& h) {
    return a * f * y / (1.0 / u + (lo + hi) / (2.0 * a)) - alpha * h(u);
  };
  for (double alpha : {0.1, 0.5, 2.0, 10.0}) {
    for (const auto& h : {InterventionCost::linear(1.0),
                          InterventionCost::custom([](double u) { return u * u; }),
                          InterventionCost::custom([](double u) { return std::sqrt(u); })}) {
      InterventionCostModel model;
      model.alpha = alpha;
      model.u_max = 20.0;
      const double u = optimize_single_link(a, f, y, lo, hi, h, model);
      double best = 0.0;
      for (int k = 1; k <= 200000; ++k) best = std::max(best, objective(k * 1e-4, alpha, h));
      const double got = u > 0.0 ? objective(u, alpha, h) : 0.0;
      CHECK(got >= best - 1e-7 * std::max(1.0, best));
    }
  }
  InterventionCostModel free;
  CHECK(optimize_single_link(a, f, y, lo, hi, InterventionCost::linear(1.0), free) == free.u_max);
}

TEST_CASE("bounded-resistance design picks the three-link crossing") {
  const auto game = example1();
  InterventionCostModel model;
  model.u_max = 10.0;
  CHECK(algorithm1(game, model, 1).chosen_link == LinkId{1});
  CHECK(exact_ndp(game, model).chosen_link == LinkId{1});
  model.u_max = 0.5;
  CHECK(algorithm1(game, model, 1).chosen_link == LinkId{2});
  CHECK(exact_ndp(game, model).chosen_link == LinkId{2});
}

TEST_CASE("modes agree on series-parallel games") {
  InterventionCostModel model;
  model.alpha = 0.3;
  model.u_max = 20.0;
  NdpOptions exact_r;
  exact_r.exact_resistance = true;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto game = prune(random_series_parallel(seed, 5));
    const auto electrical = algorithm1(game, model, 1, exact_r);
    const auto oracle = exact_ndp(game, model);
    CHECK(electrical.chosen_link == oracle.chosen_link);
    CHECK_THAT(electrical.objective, WithinRel(oracle.objective, 1e-5));
    for (const auto& est : electrical.links) {
      const double exact = delta_cost_exact(game, {est.link, est.magnitude}).delta;
      CHECK_THAT(est.gain, WithinAbs(exact, 1e-7 * std::max(1.0, exact)));
    }
    // The pick made with bounded resistances is worth no more than the oracle's.
    const auto bounded = algorithm1(game, model, 1);
    REQUIRE(bounded.chosen_link);
    const double realised = delta_cost_exact(game, {*bounded.chosen_link, bounded.chosen_magnitude}).delta -
                            model.alpha * bounded.chosen_magnitude;
    CHECK(realised <= oracle.objective * (1 + 1e-7) + 1e-12);
  }
}

TEST_CASE("nonlinear pipeline reduces to the affine one when b = 0") {
  const auto game = prune(random_series_parallel(3, 5));
  InterventionCostModel model;
  NdpOptions options;
  options.fixed_u = 2.0;
  options.exact_resistance = true;
  const auto affine = algorithm1(game, model, 2, options);
  const auto general = algorithm1_nonlinear(GeneralGame::from_affine(game), model, 2, options);
  CHECK(general.approximate);
  CHECK_FALSE(affine.approximate);
  for (std::size_t e = 0; e < affine.links.size(); ++e)
    CHECK_THAT(general.links[e].gain, WithinRel(affine.links[e].gain, 1e-6));
}

TEST_CASE("intervention cost model validation") {
  InterventionCostModel model;
  CHECK(model.validate(3).empty());
  model.alpha = -1.0;
  CHECK_FALSE(model.validate(3).empty());
  model.alpha = 1.0;
  model.h = {InterventionCost::custom([](double u) { return 1.0 + u; })};
  CHECK_FALSE(model.validate(3).empty());
}

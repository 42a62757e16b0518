#include "elnet/ndp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "elnet/errors.hpp"
#include "elnet/parallel.hpp"

namespace elnet {

InterventionCost InterventionCost::linear(double rate) {
  if (!(rate >= 0.0)) throw std::invalid_argument("intervention cost rate must be nonnegative");
  InterventionCost c;
  c.rate_ = rate;
  return c;
}

InterventionCost InterventionCost::custom(std::function<double(double)> h) {
  if (!h) throw std::invalid_argument("intervention cost needs a callable");
  InterventionCost c;
  c.h_ = std::move(h);
  return c;
}

std::vector<std::string> InterventionCostModel::validate(std::size_t link_count) const {
  std::vector<std::string> issues;
  if (!(alpha >= 0.0)) issues.emplace_back("alpha must be nonnegative");
  if (!(u_max > 0.0)) issues.emplace_back("u_max must be positive");
  auto check = [&](const InterventionCost& h, const std::string& name) {
    if (std::abs(h(0.0)) > 1e-12) {
      issues.push_back(fmt::format("{}(0) is not zero", name));
      return;
    }
    double previous = 0.0;
    for (int k = 1; k <= 16; ++k) {
      const double value = h(u_max * k / 16.0);
      if (value < previous) {
        issues.push_back(fmt::format("{} decreases", name));
        return;
      }
      previous = value;
    }
  };
  for (LinkId e = 0; e < std::min(h.size(), link_count); ++e) check(h[e], fmt::format("h[{}]", e));
  if (h.size() < link_count) check(fallback, "h");
  return issues;
}

namespace {

double gain_formula(double k, double u, double r, double a) {
  return u > 0.0 ? k / (1.0 / u + r / a) : 0.0;
}

void require_valid(const InterventionCostModel& model, std::size_t links) {
  if (const auto issues = model.validate(links); !issues.empty())
    throw std::invalid_argument(fmt::format("invalid intervention cost model: {}", issues.front()));
}

/// Maximizes `objective` on [0, hi] by Brent's method, also trying both ends.
template <class F>
double maximize_on_interval(F objective, double hi) {
  constexpr int kBits = std::numeric_limits<double>::digits / 2;
  const auto [u, neg] = boost::math::tools::brent_find_minima(
      [&](double x) { return -objective(x); }, 0.0, hi, kBits);
  double best_u = 0.0;
  double best = objective(0.0);
  for (double candidate : {u, hi}) {
    const double value = candidate == u ? -neg : objective(candidate);
    if (value > best) {
      best = value;
      best_u = candidate;
    }
  }
  return best_u;
}

struct PipelineInput {
  const ResistorNet* rn;
  const VoltageSolution* volt;
  std::vector<double> flow;
  std::vector<bool> candidate;
};

NdpResult run_pipeline(const PipelineInput& in, const InterventionCostModel& model, int d,
                       const NdpOptions& options) {
  const auto& rn = *in.rn;
  const auto E = in.flow.size();

  std::map<std::pair<NodeId, NodeId>, ResistanceBounds> bounds;
  {
    auto scan = scan_all_links(rn, d, options.jobs);
    if (!scan.errors.empty()) throw Error(scan.errors.front());
    for (auto& b : scan.bounds) bounds.emplace(std::make_pair(b.i, b.j), std::move(b));
  }
  if (options.exact_resistance) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (const auto& [pair, b] : bounds) pairs.push_back(pair);
    const auto exact = effective_resistances(rn, pairs, options.jobs);
    for (std::size_t k = 0; k < pairs.size(); ++k) bounds.at(pairs[k]).exact = exact[k];
  }

  NdpResult result;
  result.links.resize(E);
  parallel_for(E, options.jobs, [&](std::size_t e) {
    auto& row = result.links[e];
    row.link = e;
    row.flow = in.flow[e];
    row.candidate = in.candidate[e];
    if (!row.candidate) return;
    const auto [t, h] = rn.link_map(e);
    const auto& b = bounds.at({std::min(t, h), std::max(t, h)});
    row.current = in.volt->y[e];
    row.slope = rn.link_slope(e);
    row.lower = b.lower;
    row.upper = b.upper;
    row.exact_resistance = b.exact;
    row.resistance = b.exact ? *b.exact : 0.5 * (b.lower + b.upper);
    const double lo = b.exact ? *b.exact : b.lower;
    const double hi = b.exact ? *b.exact : b.upper;
    const auto& cost = model.cost(e);
    row.magnitude = options.fixed_u
                        ? *options.fixed_u
                        : optimize_single_link(row.slope, row.flow, row.current, lo, hi, cost, model);
    const double k = row.slope * row.flow * row.current;
    row.gain = gain_formula(k, row.magnitude, row.resistance, row.slope);
    row.objective = row.gain - model.alpha * cost(row.magnitude);
    if (row.magnitude > 0.0) {
      const auto bound = error_bound(row.slope, row.flow, row.current, row.magnitude, row.lower,
                                     row.upper, rn.max_degree());
      row.relative_bound = bound.relative_bound;
      row.gain_floor = bound.gain_floor;
    }
  });
  return result;
}

void choose(NdpResult& result) {
  for (const auto& row : result.links) {
    if (!row.candidate) continue;
    if (!result.chosen_link || row.objective > result.objective) {
      result.chosen_link = row.link;
      result.chosen_magnitude = row.magnitude;
      result.objective = row.objective;
    }
  }
}

ExactGain compare(const Equilibrium& base, const Equilibrium& after) {
  return {base.social_cost - after.social_cost, base.support_complement != after.support_complement};
}

template <class Game, class Solve>
NdpResult exact_ndp_impl(const Game& game, const InterventionCostModel& model,
                         const NdpOptions& options, Solve solve) {
  require_valid(model, game.network.link_count());
  const auto base = solve(game);
  NdpResult result;
  result.links.resize(game.network.link_count());
  parallel_for(result.links.size(), options.jobs, [&](std::size_t e) {
    auto& row = result.links[e];
    row.link = e;
    row.candidate = true;
    row.flow = base.f[e];
    const auto& cost = model.cost(e);
    auto gain_at = [&](double u) {
      if (u <= 0.0) return ExactGain{};
      return compare(base, solve(with_intervention(game, e, u)));
    };
    row.magnitude = options.fixed_u ? *options.fixed_u
                                    : maximize_on_interval(
                                          [&](double u) {
                                            return gain_at(u).delta - model.alpha * cost(u);
                                          },
                                          model.u_max);
    const auto gain = gain_at(row.magnitude);
    row.gain = gain.delta;
    row.objective = gain.delta - model.alpha * cost(row.magnitude);
    if (options.check_assumption) row.assumption_holds = !gain.support_changed;
  });
  choose(result);
  return result;
}

}  // namespace

double delta_cost_electrical(const AffineGame& game, const Equilibrium& eq,
                             const VoltageSolution& volt, double r_e, const Intervention& iv) {
  const LinkId e = iv.link;
  if (iv.magnitude < 0.0) throw std::invalid_argument("intervention magnitude must be nonnegative");
  if (eq.unused(e))
    throw LinkUnsupported(fmt::format("link {} carries no flow at equilibrium", e));
  return gain_formula(game.a.at(e) * eq.f.at(e) * volt.y.at(e), iv.magnitude, r_e, game.a[e]);
}

ExactGain delta_cost_exact(const AffineGame& game, const Equilibrium& base, const Intervention& iv) {
  if (iv.magnitude == 0.0) return {};
  return compare(base, solve_affine(with_intervention(game, iv.link, iv.magnitude)));
}

ExactGain delta_cost_exact(const AffineGame& game, const Intervention& iv) {
  if (iv.magnitude == 0.0) return {};
  return delta_cost_exact(game, solve_affine(game), iv);
}

ExactGain delta_cost_exact(const GeneralGame& game, const Equilibrium& base, const Intervention& iv,
                           double tol) {
  if (iv.magnitude == 0.0) return {};
  return compare(base, solve_convex(with_intervention(game, iv.link, iv.magnitude), tol));
}

ExactGain delta_cost_exact(const GeneralGame& game, const Intervention& iv, double tol) {
  if (iv.magnitude == 0.0) return {};
  return delta_cost_exact(game, solve_convex(game, tol), iv, tol);
}

double delta_cost_derivative(const AffineGame& game, const Equilibrium& eq,
                             const VoltageSolution& volt, LinkId e) {
  const double eps = support_tolerance(game.m);
  for (LinkId k = 0; k < eq.f.size(); ++k)
    if (eq.f[k] <= eps && eq.lambda[k] <= eps)
      throw Degenerate(fmt::format("link {} has zero flow and zero multiplier", k));
  if (eq.lambda.at(e) > eps) return 0.0;
  return game.a.at(e) * eq.f[e] * volt.y.at(e);
}

ErrorBound error_bound(double a_e, double f_e, double y_e, double u_e, double lower, double upper,
                       double w_star) {
  if (!(u_e > 0.0)) throw std::invalid_argument("error bound needs u > 0");
  const double eps = (upper - lower) / a_e;
  ErrorBound out;
  out.relative_bound = eps / (2.0 * (1.0 / u_e + (upper + lower) / (2.0 * a_e)));
  out.gain_floor = a_e * f_e * y_e / (1.0 / u_e + upper / a_e);
  out.coarse_bound = eps / (2.0 * (1.0 / u_e + 1.0 / (w_star * a_e)));
  return out;
}

double optimize_single_link(double a_e, double f_e, double y_e, double lower, double upper,
                            const InterventionCost& h, const InterventionCostModel& model) {
  const double k = a_e * f_e * y_e;
  if (!(k > 0.0)) return 0.0;
  const double rho = (upper + lower) / (2.0 * a_e);
  if (model.alpha == 0.0) return model.u_max;
  if (const auto rate = h.linear_rate()) {
    const double price = model.alpha * *rate;
    if (price == 0.0) return model.u_max;
    if (k <= price) return 0.0;
    return std::clamp((std::sqrt(k / price) - 1.0) / rho, 0.0, model.u_max);
  }
  return maximize_on_interval(
      [&](double u) { return k * u / (1.0 + rho * u) - model.alpha * h(u); }, model.u_max);
}

NdpResult algorithm1(const AffineGame& game, const InterventionCostModel& model, int d,
                     const NdpOptions& options) {
  require_valid(model, game.network.link_count());
  const auto eq = solve_affine(game);
  const auto rn = ResistorNet::from_affine(game, eq.support_complement);
  const auto volt = solve_voltage(rn, game.network.origin(), game.network.destination(), game.m);
  PipelineInput in{&rn, &volt, eq.f, std::vector<bool>(eq.f.size())};
  for (LinkId e = 0; e < eq.f.size(); ++e) in.candidate[e] = !eq.unused(e);
  auto result = run_pipeline(in, model, d, options);
  if (options.check_assumption) {
    parallel_for(result.links.size(), options.jobs, [&](std::size_t e) {
      auto& row = result.links[e];
      if (row.candidate) row.assumption_holds = check_assumption1(game, {e, row.magnitude});
    });
  }
  choose(result);
  return result;
}

NdpResult algorithm1_nonlinear(const GeneralGame& game, const InterventionCostModel& model, int d,
                               const NdpOptions& options) {
  require_valid(model, game.network.link_count());
  const auto eq = solve_convex(game, 1e-12);
  const double eps = support_tolerance(game.m);
  std::vector<LinkId> excluded;
  for (LinkId e = 0; e < eq.f.size(); ++e)
    if (eq.f[e] <= eps) excluded.push_back(e);
  const auto rn = ResistorNet::from_nonlinear(eq, game, excluded);
  const auto volt = solve_voltage(rn, game.network.origin(), game.network.destination(), game.m);
  PipelineInput in{&rn, &volt, eq.f, std::vector<bool>(eq.f.size(), true)};
  for (LinkId e : excluded) in.candidate[e] = false;
  auto result = run_pipeline(in, model, d, options);
  result.approximate = true;
  choose(result);
  return result;
}

NdpResult exact_ndp(const AffineGame& game, const InterventionCostModel& model,
                    const NdpOptions& options) {
  return exact_ndp_impl(game, model, options, [](const AffineGame& g) { return solve_affine(g); });
}

NdpResult exact_ndp(const GeneralGame& game, const InterventionCostModel& model,
                    const NdpOptions& options) {
  return exact_ndp_impl(game, model, options,
                        [](const GeneralGame& g) { return solve_convex(g, 1e-12); });
}

bool check_assumption1(const AffineGame& game, const Intervention& iv) {
  return !delta_cost_exact(game, iv).support_changed;
}

}  // namespace elnet

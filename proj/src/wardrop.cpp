#include "elnet/wardrop.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <queue>

#include <fmt/format.h>

#include "elnet/errors.hpp"
#include "elnet/linsolve.hpp"

namespace elnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using HeapItem = std::pair<double, NodeId>;
using MinHeap = std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>>;

/// Cheapest cost from each node to the labelled nodes, moving along links.
/// `label` holds the starting values; nodes with `fixed` set keep them.
std::vector<double> distances_to_labels(const DirectedNetwork& net, const std::vector<double>& cost,
                                        std::vector<double> label, const std::vector<bool>& fixed) {
  std::vector<std::vector<LinkId>> in(net.node_count());
  for (LinkId e = 0; e < net.link_count(); ++e) in[net.link(e).head].push_back(e);
  MinHeap heap;
  for (NodeId n = 0; n < net.node_count(); ++n)
    if (label[n] < kInf) heap.emplace(label[n], n);
  std::vector<bool> done(net.node_count(), false);
  while (!heap.empty()) {
    const auto [dist, u] = heap.top();
    heap.pop();
    if (done[u] || dist > label[u]) continue;
    done[u] = true;
    for (LinkId e : in[u]) {
      const NodeId t = net.link(e).tail;
      if (fixed[t]) continue;
      const double candidate = dist + cost[e];
      if (candidate < label[t]) {
        label[t] = candidate;
        heap.emplace(candidate, t);
      }
    }
  }
  return label;
}

struct PathTree {
  std::vector<double> dist;
  std::vector<LinkId> pred;
};

constexpr LinkId kNoLink = static_cast<LinkId>(-1);

PathTree shortest_paths_from(const DirectedNetwork& net, const std::vector<double>& cost,
                             NodeId source) {
  std::vector<std::vector<LinkId>> out(net.node_count());
  for (LinkId e = 0; e < net.link_count(); ++e) out[net.link(e).tail].push_back(e);
  PathTree tree{std::vector<double>(net.node_count(), kInf),
                std::vector<LinkId>(net.node_count(), kNoLink)};
  tree.dist[source] = 0.0;
  MinHeap heap;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [dist, u] = heap.top();
    heap.pop();
    if (dist > tree.dist[u]) continue;
    for (LinkId e : out[u]) {
      const NodeId h = net.link(e).head;
      const double candidate = dist + cost[e];
      if (candidate < tree.dist[h]) {
        tree.dist[h] = candidate;
        tree.pred[h] = e;
        heap.emplace(candidate, h);
      }
    }
  }
  return tree;
}

void require_path(const DirectedNetwork& net) {
  const auto issues = validate(net);
  if (!issues.empty()) throw std::invalid_argument(fmt::format("invalid network: {}", issues.front()));
  std::vector<double> unit(net.link_count(), 1.0);
  const auto tree = shortest_paths_from(net, unit, net.origin());
  if (tree.dist[net.destination()] == kInf)
    throw NoPath(fmt::format("destination {} unreachable from origin {}", net.destination(),
                             net.origin()));
}

std::vector<LinkId> classify_unused(const std::vector<double>& f, const std::vector<double>& lambda,
                                    double eps) {
  std::vector<LinkId> out;
  for (LinkId e = 0; e < f.size(); ++e)
    if (f[e] < eps && lambda[e] > eps) out.push_back(e);
  return out;
}

/// Completes γ off the support component with free-flow shortest distances and
/// derives λ; returns the assembled equilibrium.
Equilibrium assemble_affine(const AffineGame& game, const SupportSolution& sol, double tolerance) {
  const auto& net = game.network;
  std::vector<bool> fixed(net.node_count(), false);
  std::vector<double> label(net.node_count(), kInf);
  for (NodeId n = 0; n < net.node_count(); ++n) {
    if (!std::isnan(sol.gamma[n])) {
      fixed[n] = true;
      label[n] = sol.gamma[n];
    }
  }
  auto gamma = distances_to_labels(net, game.b, label, fixed);
  for (auto& g : gamma)
    if (g == kInf) g = 0.0;  // isolated node: no constraint touches it

  Equilibrium eq;
  eq.f.assign(net.link_count(), 0.0);
  eq.lambda.assign(net.link_count(), 0.0);
  for (LinkId e = 0; e < net.link_count(); ++e) {
    const auto& l = net.link(e);
    if (sol.active[e]) {
      eq.f[e] = sol.f[e];
    } else {
      eq.lambda[e] = game.b[e] + gamma[l.head] - gamma[l.tail];
    }
  }
  eq.gamma = std::move(gamma);
  eq.tolerance = tolerance;
  return eq;
}

void finalize(Equilibrium& eq, double m, double social) {
  const double eps = support_tolerance(m);
  eq.support_complement = classify_unused(eq.f, eq.lambda, eps);
  eq.social_cost = social;
}

double affine_cost(const AffineGame& game, const std::vector<double>& f) {
  double total = 0.0;
  for (LinkId e = 0; e < f.size(); ++e) total += f[e] * (game.a[e] * f[e] + game.b[e]);
  return total;
}

/// Re-solves the KKT system on the support of `eq`; keeps `eq` unless the
/// polished point is feasible.
Equilibrium polish(const AffineGame& game, Equilibrium eq) {
  std::vector<bool> support(game.network.link_count());
  const double eps = support_tolerance(game.m);
  for (LinkId e = 0; e < support.size(); ++e) support[e] = eq.f[e] > eps;
  try {
    const auto sol = solve_support_system(game, support);
    auto refined = assemble_affine(game, sol, 1e-9);
    const double slack = 1e-9 * std::max(1.0, game.m);
    for (LinkId e = 0; e < support.size(); ++e) {
      if (refined.f[e] < -slack || refined.lambda[e] < -slack) return eq;
    }
    for (auto& x : refined.f) x = std::max(0.0, x);
    for (auto& x : refined.lambda) x = std::max(0.0, x);
    finalize(refined, game.m, affine_cost(game, refined.f));
    return refined;
  } catch (const SingularSystem&) {
    return eq;
  }
}

}  // namespace

GeneralGame GeneralGame::from_affine(const AffineGame& game) {
  GeneralGame out{game.network, {}, game.m};
  out.delays.reserve(game.a.size());
  for (LinkId e = 0; e < game.a.size(); ++e) out.delays.push_back(Delay::affine(game.a[e], game.b[e]));
  return out;
}

std::vector<std::string> validate(const AffineGame& game) {
  auto issues = validate(game.network);
  const auto E = game.network.link_count();
  if (game.a.size() != E || game.b.size() != E)
    issues.push_back(fmt::format("expected {} delay coefficients, got a={} b={}", E, game.a.size(),
                                 game.b.size()));
  for (LinkId e = 0; e < std::min(game.a.size(), E); ++e)
    if (!(game.a[e] > 0.0)) issues.push_back(fmt::format("a[{}] must be positive", e));
  for (LinkId e = 0; e < std::min(game.b.size(), E); ++e)
    if (!(game.b[e] >= 0.0)) issues.push_back(fmt::format("b[{}] must be nonnegative", e));
  if (!(game.m > 0.0)) issues.emplace_back("throughput must be positive");
  return issues;
}

std::vector<std::string> validate(const GeneralGame& game) {
  auto issues = validate(game.network);
  if (game.delays.size() != game.network.link_count())
    issues.push_back(fmt::format("expected {} delays, got {}", game.network.link_count(),
                                 game.delays.size()));
  if (!(game.m > 0.0)) issues.emplace_back("throughput must be positive");
  for (LinkId e = 0; e < game.delays.size(); ++e) {
    double previous = game.delays[e](0.0);
    if (!(previous >= 0.0)) issues.push_back(fmt::format("delay {} is negative at 0", e));
    for (int k = 1; k <= 8; ++k) {
      const double value = game.delays[e](game.m * k / 4.0);
      if (!(value > previous)) {
        issues.push_back(fmt::format("delay {} is not strictly increasing", e));
        break;
      }
      previous = value;
    }
  }
  return issues;
}

AffineGame prune(const AffineGame& game, std::vector<LinkId>* kept) {
  auto pruned = prune_with_map(game.network);
  AffineGame out{pruned.network, {}, {}, game.m};
  for (LinkId e : pruned.kept) {
    out.a.push_back(game.a[e]);
    out.b.push_back(game.b[e]);
  }
  if (kept) *kept = std::move(pruned.kept);
  return out;
}

GeneralGame prune(const GeneralGame& game, std::vector<LinkId>* kept) {
  auto pruned = prune_with_map(game.network);
  GeneralGame out{pruned.network, {}, game.m};
  for (LinkId e : pruned.kept) out.delays.push_back(game.delays[e]);
  if (kept) *kept = std::move(pruned.kept);
  return out;
}

AffineGame with_intervention(const AffineGame& game, LinkId e, double u) {
  if (u < 0.0) throw std::invalid_argument("intervention magnitude must be nonnegative");
  AffineGame out = game;
  out.a.at(e) /= 1.0 + u;
  return out;
}

GeneralGame with_intervention(const GeneralGame& game, LinkId e, double u) {
  GeneralGame out = game;
  out.delays.at(e) = game.delays.at(e).scaled_congestion(u);
  return out;
}

bool Equilibrium::unused(LinkId e) const {
  return std::binary_search(support_complement.begin(), support_complement.end(), e);
}

SupportSolution solve_support_system(const AffineGame& game, const std::vector<bool>& support) {
  const auto& net = game.network;
  std::vector<WeightedEdge> edges;
  for (LinkId e = 0; e < net.link_count(); ++e)
    if (support[e]) edges.push_back({net.link(e).tail, net.link(e).head, 1.0 / game.a[e]});
  const UndirectedGraph graph(net.node_count(), edges);
  const GroundedLaplacian q(graph, net.destination());
  if (!q.contains(net.origin()))
    throw SingularSystem("candidate support does not connect origin and destination");

  SupportSolution sol;
  sol.active.assign(net.link_count(), false);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.node_count()));
  rhs[static_cast<Eigen::Index>(net.origin())] += game.m;
  for (LinkId e = 0; e < net.link_count(); ++e) {
    if (!support[e] || !q.contains(net.link(e).tail)) continue;
    sol.active[e] = true;
    const double drift = game.b[e] / game.a[e];
    rhs[static_cast<Eigen::Index>(net.link(e).tail)] += drift;
    rhs[static_cast<Eigen::Index>(net.link(e).head)] -= drift;
  }
  const Eigen::VectorXd gamma = q.solve(rhs);
  sol.gamma.assign(gamma.data(), gamma.data() + gamma.size());
  sol.f.assign(net.link_count(), 0.0);
  for (LinkId e = 0; e < net.link_count(); ++e) {
    if (!sol.active[e]) continue;
    const auto& l = net.link(e);
    sol.f[e] = (sol.gamma[l.tail] - sol.gamma[l.head] - game.b[e]) / game.a[e];
  }
  return sol;
}

Equilibrium solve_affine(const AffineGame& game) {
  if (const auto issues = validate(game); !issues.empty())
    throw std::invalid_argument(fmt::format("invalid game: {}", issues.front()));
  require_path(game.network);
  const auto E = game.network.link_count();
  const double flow_slack = 1e-12 * game.m;

  std::vector<bool> support(E, true);
  const std::size_t cap = std::max<std::size_t>(E * E, 4);
  try {
    for (std::size_t iter = 0; iter < cap; ++iter) {
      const auto sol = solve_support_system(game, support);
      for (LinkId e = 0; e < E; ++e) support[e] = sol.active[e];

      LinkId worst = kNoLink;
      double worst_flow = -flow_slack;
      for (LinkId e = 0; e < E; ++e) {
        if (sol.active[e] && sol.f[e] < worst_flow) {
          worst_flow = sol.f[e];
          worst = e;
        }
      }
      if (worst != kNoLink) {
        support[worst] = false;
        continue;
      }

      auto eq = assemble_affine(game, sol, 1e-9);
      const double cost_slack = 1e-12 * std::max(1.0, std::abs(eq.gamma[game.network.origin()]));
      LinkId readd = kNoLink;
      double worst_lambda = -cost_slack;
      for (LinkId e = 0; e < E; ++e) {
        if (!support[e] && eq.lambda[e] < worst_lambda) {
          worst_lambda = eq.lambda[e];
          readd = e;
        }
      }
      if (readd != kNoLink) {
        support[readd] = true;
        continue;
      }
      for (auto& x : eq.f) x = std::max(0.0, x);
      for (auto& x : eq.lambda) x = std::max(0.0, x);
      finalize(eq, game.m, affine_cost(game, eq.f));
      return eq;
    }
  } catch (const SingularSystem&) {
    // fall through to the convex solver
  }
  auto eq = solve_convex(GeneralGame::from_affine(game), 1e-13, 1000000);
  return polish(game, std::move(eq));
}

Equilibrium solve_convex(const GeneralGame& game, double tol, std::size_t max_iter) {
  if (const auto issues = validate(game.network); !issues.empty())
    throw std::invalid_argument(fmt::format("invalid network: {}", issues.front()));
  if (game.delays.size() != game.network.link_count())
    throw std::invalid_argument("delay count does not match link count");
  require_path(game.network);
  const auto& net = game.network;
  const auto E = net.link_count();
  const NodeId o = net.origin();
  const NodeId d = net.destination();

  struct Atom {
    std::vector<LinkId> links;  // sorted
    double flow = 0.0;
  };
  std::vector<Atom> atoms;
  std::map<std::vector<LinkId>, std::size_t> atom_index;
  std::vector<double> f(E, 0.0);
  std::vector<double> cost(E);

  auto refresh_costs = [&] {
    for (LinkId e = 0; e < E; ++e) cost[e] = game.delays[e](f[e]);
  };
  auto shortest_path = [&](double& length) {
    const auto tree = shortest_paths_from(net, cost, o);
    std::vector<LinkId> path;
    for (NodeId n = d; n != o; n = net.link(tree.pred[n]).tail) path.push_back(tree.pred[n]);
    std::sort(path.begin(), path.end());
    length = tree.dist[d];
    return path;
  };
  auto path_cost = [&](const std::vector<LinkId>& links) {
    double total = 0.0;
    for (LinkId e : links) total += game.delays[e](f[e]);
    return total;
  };
  auto intern = [&](std::vector<LinkId> links) {
    auto [it, inserted] = atom_index.try_emplace(links, atoms.size());
    if (inserted) atoms.push_back({std::move(links), 0.0});
    return it->second;
  };

  refresh_costs();
  double length = 0.0;
  {
    const auto first = intern(shortest_path(length));
    atoms[first].flow = game.m;
    for (LinkId e : atoms[first].links) f[e] = game.m;
  }

  double gap = kInf;
  double social = 0.0;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    // Rebuild link flows from path flows to keep rounding from accumulating.
    std::fill(f.begin(), f.end(), 0.0);
    for (const auto& atom : atoms)
      for (LinkId e : atom.links) f[e] += atom.flow;
    refresh_costs();

    const auto best_links = shortest_path(length);
    social = 0.0;
    gap = 0.0;
    for (const auto& atom : atoms) {
      if (atom.flow <= 0.0) continue;
      const double c = path_cost(atom.links);
      social += atom.flow * c;
      gap += atom.flow * (c - length);
    }
    if (gap <= tol * std::max(social, std::numeric_limits<double>::min())) break;

    const auto s = intern(best_links);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if (k == s || atoms[k].flow <= 0.0) continue;
      std::vector<LinkId> gain, loss;  // s \ k and k \ s
      std::set_difference(atoms[s].links.begin(), atoms[s].links.end(), atoms[k].links.begin(),
                          atoms[k].links.end(), std::back_inserter(gain));
      std::set_difference(atoms[k].links.begin(), atoms[k].links.end(), atoms[s].links.begin(),
                          atoms[s].links.end(), std::back_inserter(loss));
      auto slope = [&](double t) {
        double value = 0.0;
        for (LinkId e : gain) value += game.delays[e](f[e] + t);
        for (LinkId e : loss) value -= game.delays[e](f[e] - t);
        return value;
      };
      if (slope(0.0) >= 0.0) continue;
      const double limit = atoms[k].flow;
      double t = limit;
      if (slope(limit) > 0.0) {
        bool all_affine = true;
        double curvature = 0.0;
        for (LinkId e : gain) {
          all_affine = all_affine && game.delays[e].is_affine();
          curvature += game.delays[e].a();
        }
        for (LinkId e : loss) {
          all_affine = all_affine && game.delays[e].is_affine();
          curvature += game.delays[e].a();
        }
        if (all_affine && curvature > 0.0) {
          t = std::clamp(-slope(0.0) / curvature, 0.0, limit);
        } else {
          double lo = 0.0, hi = limit;
          for (int step = 0; step < 200 && hi - lo > 1e-17 * std::max(1.0, limit); ++step) {
            const double mid = 0.5 * (lo + hi);
            (slope(mid) > 0.0 ? hi : lo) = mid;
          }
          t = 0.5 * (lo + hi);
        }
      }
      if (t <= 0.0) continue;
      for (LinkId e : gain) f[e] += t;
      for (LinkId e : loss) f[e] -= t;
      atoms[s].flow += t;
      atoms[k].flow = (t >= limit) ? 0.0 : atoms[k].flow - t;
    }
    // Drop emptied atoms.
    std::vector<Atom> kept;
    for (auto& atom : atoms)
      if (atom.flow > 0.0) kept.push_back(std::move(atom));
    atoms = std::move(kept);
    atom_index.clear();
    for (std::size_t k = 0; k < atoms.size(); ++k) atom_index.emplace(atoms[k].links, k);
  }
  if (iter == max_iter)
    throw NotConverged(fmt::format("relative duality gap {:.3g} above {:.3g} after {} iterations",
                                   gap / std::max(social, std::numeric_limits<double>::min()), tol,
                                   max_iter));

  Equilibrium eq;
  eq.f = f;
  std::vector<double> label(net.node_count(), kInf);
  std::vector<bool> fixed(net.node_count(), false);
  label[d] = 0.0;
  fixed[d] = true;
  eq.gamma = distances_to_labels(net, cost, label, fixed);
  for (auto& g : eq.gamma)
    if (g == kInf) g = 0.0;
  eq.lambda.assign(E, 0.0);
  for (LinkId e = 0; e < E; ++e) {
    const auto& l = net.link(e);
    eq.lambda[e] = std::max(0.0, cost[e] + eq.gamma[l.head] - eq.gamma[l.tail]);
  }
  eq.tolerance = tol;
  double total = 0.0;
  for (LinkId e = 0; e < E; ++e) total += f[e] * cost[e];
  finalize(eq, game.m, total);
  return eq;
}

double social_cost(const Equilibrium& eq, const AffineGame& game) {
  const double direct = affine_cost(game, eq.f);
  const double potential =
      game.m * (eq.gamma[game.network.origin()] - eq.gamma[game.network.destination()]);
  if (std::abs(direct - potential) > 10.0 * eq.tolerance * std::max(1.0, std::abs(direct)))
    throw InconsistentMultipliers(
        fmt::format("social cost {:.12g} from flows, {:.12g} from multipliers", direct, potential));
  return direct;
}

double social_cost(const Equilibrium& eq, const GeneralGame& game) {
  double direct = 0.0;
  for (LinkId e = 0; e < eq.f.size(); ++e) direct += eq.f[e] * game.delays[e](eq.f[e]);
  const double potential =
      game.m * (eq.gamma[game.network.origin()] - eq.gamma[game.network.destination()]);
  if (std::abs(direct - potential) > 10.0 * eq.tolerance * std::max(1.0, std::abs(direct)))
    throw InconsistentMultipliers(
        fmt::format("social cost {:.12g} from flows, {:.12g} from multipliers", direct, potential));
  return direct;
}

ThroughputThreshold min_throughput(const AffineGame& game) {
  if (!is_series_parallel(game.network))
    throw NotSeriesParallel("throughput threshold requires a series-parallel network");
  const auto& net = game.network;
  std::vector<WeightedEdge> edges;
  for (LinkId e = 0; e < net.link_count(); ++e)
    edges.push_back({net.link(e).tail, net.link(e).head, 1.0 / game.a[e]});
  const UndirectedGraph graph(net.node_count(), edges);
  const GroundedLaplacian q(graph, net.destination());

  Eigen::VectorXd drift = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.node_count()));
  for (LinkId e = 0; e < net.link_count(); ++e) {
    drift[static_cast<Eigen::Index>(net.link(e).tail)] += game.b[e] / game.a[e];
    drift[static_cast<Eigen::Index>(net.link(e).head)] -= game.b[e] / game.a[e];
  }
  const Eigen::VectorXd x = q.solve(drift);
  const Eigen::VectorXd v = q.solve_dipole(net.origin(), 1.0);

  ThroughputThreshold out;
  out.per_link.resize(net.link_count());
  double overall = 0.0;
  for (LinkId e = 0; e < net.link_count(); ++e) {
    const auto t = static_cast<Eigen::Index>(net.link(e).tail);
    const auto h = static_cast<Eigen::Index>(net.link(e).head);
    const double numerator = game.b[e] - (x[t] - x[h]);
    const double rise = v[t] - v[h];
    double threshold;
    if (rise > 0.0)
      threshold = numerator / rise;
    else
      threshold = numerator > 0.0 ? kInf : -kInf;
    out.per_link[e] = threshold;
    overall = std::max(overall, threshold);
  }
  out.overall = overall;
  return out;
}

namespace {

double kkt_residual_impl(const Equilibrium& eq, const DirectedNetwork& net, double m,
                         const std::function<double(LinkId, double)>& tau) {
  std::vector<double> balance(net.node_count(), 0.0);
  balance[net.origin()] -= m;
  balance[net.destination()] += m;
  double worst = 0.0;
  for (LinkId e = 0; e < net.link_count(); ++e) {
    const auto& l = net.link(e);
    balance[l.tail] += eq.f[e];
    balance[l.head] -= eq.f[e];
    const double stationarity = tau(e, eq.f[e]) + eq.gamma[l.head] - eq.gamma[l.tail] - eq.lambda[e];
    worst = std::max({worst, std::abs(stationarity), std::abs(eq.lambda[e] * eq.f[e]),
                      std::max(0.0, -eq.f[e]), std::max(0.0, -eq.lambda[e])});
  }
  for (double r : balance) worst = std::max(worst, std::abs(r));
  return worst;
}

}  // namespace

double kkt_residual(const Equilibrium& eq, const AffineGame& game) {
  return kkt_residual_impl(eq, game.network, game.m,
                           [&](LinkId e, double x) { return game.a[e] * x + game.b[e]; });
}

double kkt_residual(const Equilibrium& eq, const GeneralGame& game) {
  return kkt_residual_impl(eq, game.network, game.m,
                           [&](LinkId e, double x) { return game.delays[e](x); });
}

}  // namespace elnet

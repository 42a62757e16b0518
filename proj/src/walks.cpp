#include "elnet/walks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "elnet/errors.hpp"
#include "elnet/linsolve.hpp"
#include "elnet/localres.hpp"

namespace elnet {

std::vector<double> hit_before_all(const ResistorNet& rn, const std::vector<NodeId>& a,
                                   const std::vector<NodeId>& b, NodeId anchor) {
  const auto& graph = rn.graph();
  const auto n = rn.node_count();
  enum : char { kInterior, kTargetA, kTargetB, kOutside };
  std::vector<char> role(n, kOutside);
  const auto dist = bfs_distances(graph, anchor);
  for (NodeId v = 0; v < n; ++v)
    if (dist[v] != kUnreached) role[v] = kInterior;
  bool touches = false;
  for (NodeId v : a) {
    if (role.at(v) == kTargetB) throw std::invalid_argument("target sets overlap");
    if (role[v] != kOutside) {
      role[v] = kTargetA;
      touches = true;
    }
  }
  for (NodeId v : b) {
    if (role.at(v) == kTargetA) throw std::invalid_argument("target sets overlap");
    if (role[v] != kOutside) {
      role[v] = kTargetB;
      touches = true;
    }
  }
  if (!touches)
    throw Unreachable(fmt::format("component of node {} contains no target node", anchor));

  std::vector<Eigen::Index> index(n, -1);
  Eigen::Index size = 0;
  for (NodeId v = 0; v < n; ++v)
    if (role[v] == kInterior) index[v] = size++;

  std::vector<Eigen::Triplet<double>> entries;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
  for (NodeId v = 0; v < n; ++v) {
    if (index[v] < 0) continue;
    double diagonal = 0.0;
    for (const auto& nb : graph.neighbors(v)) {
      diagonal += nb.weight;
      if (role[nb.node] == kInterior)
        entries.emplace_back(index[v], index[nb.node], -nb.weight);
      else if (role[nb.node] == kTargetA)
        rhs[index[v]] += nb.weight;
    }
    entries.emplace_back(index[v], index[v], diagonal);
  }
  Eigen::SparseMatrix<double> system(size, size);
  system.setFromTriplets(entries.begin(), entries.end());
  const Eigen::VectorXd h = SpdSolver(system).solve(rhs);

  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  for (NodeId v = 0; v < n; ++v) {
    if (role[v] == kInterior) out[v] = h[index[v]];
    if (role[v] == kTargetA) out[v] = 1.0;
    if (role[v] == kTargetB) out[v] = 0.0;
  }
  return out;
}

double hit_before(const ResistorNet& rn, const HittingQuery& q) {
  if (std::find(q.a.begin(), q.a.end(), q.start) != q.a.end()) return 1.0;
  if (std::find(q.b.begin(), q.b.end(), q.start) != q.b.end()) return 0.0;
  return hit_before_all(rn, q.a, q.b, q.start)[q.start];
}

double return_escape(const ResistorNet& rn, NodeId i, NodeId j) {
  if (i == j) throw std::invalid_argument("escape probability needs two distinct nodes");
  const auto h = hit_before_all(rn, {j}, {i}, i);
  if (std::isnan(h[j])) throw Unreachable(fmt::format("node {} cannot reach node {}", i, j));
  double total = 0.0;
  for (const auto& nb : rn.graph().neighbors(i)) total += nb.weight * h[nb.node];
  return total / rn.degree(i);
}

std::vector<NodeId> distance_shell(const ResistorNet& rn, NodeId i, NodeId j, int d) {
  std::vector<NodeId> shell;
  for (const auto& [node, dist] : ball_around_link(rn.graph(), i, j, d))
    if (dist == d) shell.push_back(node);
  std::sort(shell.begin(), shell.end());
  return shell;
}

double term1(const ResistorNet& rn, NodeId i, NodeId j, int d) {
  if (d < 1) throw std::invalid_argument("distance must be at least 1");
  // Every walk from i that leaves the d-ball crosses the shell first, so the
  // cut network gives the full-network probability.
  const auto cut = cut_at_distance(rn, i, j, d);
  std::vector<NodeId> shell;
  const auto ball = ball_around_link(rn.graph(), i, j, d);
  for (NodeId k = 0; k < ball.size(); ++k)
    if (ball[k].second == d) shell.push_back(k);
  if (shell.empty()) return 0.0;
  return hit_before(cut.net, {cut.i, shell, {cut.j}});
}

double term2(const ResistorNet& rn, NodeId i, NodeId j, int d) {
  const auto cut = cut_at_distance(rn, i, j, d);
  const auto shorted = short_at_distance(rn, i, j, d);
  const auto ball = ball_around_link(rn.graph(), i, j, d);
  const auto upper = hit_before_all(cut.net, {cut.i}, {cut.j}, cut.i);
  const auto lower = hit_before_all(shorted.net, {shorted.i}, {shorted.j}, shorted.i);
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  // Local numbering follows the ball order in both constructions.
  for (NodeId k = 0; k < ball.size(); ++k) {
    if (ball[k].second != d) continue;
    any = true;
    best = std::max(best, upper[k] - lower[k]);
  }
  return any ? best : 0.0;
}

double gap_rhs(const ResistorNet& rn, NodeId i, NodeId j, int d) {
  const double t1 = term1(rn, i, j, d);
  if (t1 == 0.0) return 0.0;
  const double w = rn.conductance(i, j);
  return rn.degree(i) / (w * w) * t1 * term2(rn, i, j, d);
}

double double_tree_lower_closed_form(int d) {
  if (d < 1) throw std::invalid_argument("distance must be at least 1");
  const double p = std::ldexp(1.0, d);
  return (2.0 * p - 1.0) / (2.0 * p + p - 1.0);
}

double double_tree_lower_recursion(int d) {
  if (d < 1) throw std::invalid_argument("distance must be at least 1");
  double r = 3.0;
  for (int n = 1; n <= d - 1; ++n) r = 2.0 + r / 2.0;
  return 1.0 / (1.0 + 2.0 / r);
}

}  // namespace elnet

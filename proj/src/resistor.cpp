#include "elnet/resistor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "elnet/errors.hpp"
#include "elnet/linsolve.hpp"
#include "elnet/parallel.hpp"

namespace elnet {

void ResistorNet::finish() {
  const auto n = graph_.node_count();
  degree_.assign(n, 0.0);
  for (NodeId i = 0; i < n; ++i)
    for (const auto& nb : graph_.neighbors(i)) degree_[i] += nb.weight;
  max_degree_ = degree_.empty() ? 0.0 : *std::max_element(degree_.begin(), degree_.end());
}

ResistorNet ResistorNet::from_conductances(std::size_t node_count,
                                           std::span<const WeightedEdge> edges) {
  for (const auto& e : edges) {
    if (e.i >= node_count || e.j >= node_count)
      throw std::invalid_argument("resistor endpoint out of range");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw std::invalid_argument(fmt::format("conductance of {{{}, {}}} must be positive and finite",
                                              e.i, e.j));
  }
  ResistorNet rn;
  rn.graph_ = UndirectedGraph(node_count, edges);
  rn.finish();
  return rn;
}

ResistorNet ResistorNet::from_network(const DirectedNetwork& network) {
  std::vector<WeightedEdge> edges;
  ResistorNet rn;
  for (const auto& l : network.links()) {
    edges.push_back({l.tail, l.head, 1.0});
    rn.endpoints_.emplace_back(l.tail, l.head);
    rn.slope_.emplace_back(1.0);
  }
  rn.graph_ = UndirectedGraph(network.node_count(), edges);
  rn.origin_ = network.origin();
  rn.destination_ = network.destination();
  rn.finish();
  return rn;
}

namespace {

void require_joined(const ResistorNet& rn) {
  const auto dist = bfs_distances(rn.graph(), rn.origin());
  if (dist[rn.destination()] == kUnreached)
    throw Disconnected(fmt::format("links in scope do not join origin {} and destination {}",
                                   rn.origin(), rn.destination()));
}

}  // namespace

ResistorNet ResistorNet::from_affine(const AffineGame& game, const std::vector<LinkId>& excluded) {
  const auto& net = game.network;
  std::vector<bool> skip(net.link_count(), false);
  for (LinkId e : excluded) skip.at(e) = true;
  ResistorNet rn;
  std::vector<WeightedEdge> edges;
  for (LinkId e = 0; e < net.link_count(); ++e) {
    const auto& l = net.link(e);
    rn.endpoints_.emplace_back(l.tail, l.head);
    if (skip[e]) {
      rn.slope_.emplace_back();
      continue;
    }
    rn.slope_.emplace_back(game.a[e]);
    edges.push_back({l.tail, l.head, 1.0 / game.a[e]});
  }
  rn.graph_ = UndirectedGraph(net.node_count(), edges);
  rn.origin_ = net.origin();
  rn.destination_ = net.destination();
  rn.finish();
  require_joined(rn);
  return rn;
}

ResistorNet ResistorNet::from_nonlinear(const Equilibrium& eq, const GeneralGame& game,
                                        const std::vector<LinkId>& excluded) {
  const auto& net = game.network;
  std::vector<bool> skip(net.link_count(), false);
  for (LinkId e : excluded) skip.at(e) = true;
  const double eps = support_tolerance(game.m);
  ResistorNet rn;
  std::vector<WeightedEdge> edges;
  for (LinkId e = 0; e < net.link_count(); ++e) {
    const auto& l = net.link(e);
    rn.endpoints_.emplace_back(l.tail, l.head);
    if (skip[e]) {
      rn.slope_.emplace_back();
      continue;
    }
    if (!(eq.f[e] > eps))
      throw ZeroFlowLink(fmt::format("link {} carries flow {:.3g}; exclude it first", e, eq.f[e]));
    const double surrogate = game.delays[e](eq.f[e]) / eq.f[e];
    rn.slope_.emplace_back(surrogate);
    edges.push_back({l.tail, l.head, 1.0 / surrogate});
  }
  rn.graph_ = UndirectedGraph(net.node_count(), edges);
  rn.origin_ = net.origin();
  rn.destination_ = net.destination();
  rn.finish();
  require_joined(rn);
  return rn;
}

std::vector<std::pair<std::pair<NodeId, NodeId>, std::vector<LinkId>>>
ResistorNet::transport_groups() const {
  std::map<std::pair<NodeId, NodeId>, std::vector<LinkId>> groups;
  for (LinkId e = 0; e < slope_.size(); ++e) {
    if (!slope_[e]) continue;
    auto [t, h] = endpoints_[e];
    groups[{std::min(t, h), std::max(t, h)}].push_back(e);
  }
  return {groups.begin(), groups.end()};
}

VoltageSolution solve_voltage(const ResistorNet& rn, NodeId source, NodeId sink, double current) {
  if (source == sink) throw std::invalid_argument("source and sink coincide");
  const GroundedLaplacian lap(rn.graph(), sink);
  const Eigen::VectorXd v = lap.solve_dipole(source, current);
  VoltageSolution out;
  out.v.assign(v.data(), v.data() + v.size());
  out.y.assign(rn.transport_link_count(), 0.0);
  for (LinkId e = 0; e < rn.transport_link_count(); ++e) {
    if (!rn.in_scope(e)) continue;
    const auto [t, h] = rn.link_map(e);
    out.y[e] = (out.v[t] - out.v[h]) / rn.link_slope(e);
  }
  out.source = source;
  out.sink = sink;
  out.current = current;
  return out;
}

double effective_resistance(const ResistorNet& rn, NodeId i, NodeId j) {
  return effective_resistance(rn.graph(), i, j);
}

std::vector<double> effective_resistances(const ResistorNet& rn,
                                          std::span<const std::pair<NodeId, NodeId>> pairs,
                                          unsigned jobs) {
  const auto& graph = rn.graph();
  const auto label = connected_components(graph);
  // One grounded factorization per component, grounded at its lowest node.
  std::map<std::size_t, std::unique_ptr<GroundedLaplacian>> factor;
  for (const auto& [i, j] : pairs) {
    if (label.at(i) != label.at(j))
      throw Disconnected(fmt::format("nodes {} and {} lie in different components", i, j));
    if (!factor.contains(label[i])) factor.emplace(label[i], nullptr);
  }
  for (auto& [component, lap] : factor) {
    const auto ground = static_cast<NodeId>(
        std::find(label.begin(), label.end(), component) - label.begin());
    lap = std::make_unique<GroundedLaplacian>(graph, ground);
  }
  std::vector<double> out(pairs.size(), 0.0);
  parallel_for(pairs.size(), jobs, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    if (i == j) return;
    const auto& lap = *factor.at(label[i]);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lap.reduced_size());
    const auto ri = lap.reduced_index(i);
    const auto rj = lap.reduced_index(j);
    if (ri >= 0) rhs[ri] += 1.0;
    if (rj >= 0) rhs[rj] -= 1.0;
    const Eigen::VectorXd x = lap.solve_reduced(rhs);
    out[k] = (ri >= 0 ? x[ri] : 0.0) - (rj >= 0 ? x[rj] : 0.0);
  });
  return out;
}

double spanning_tree_centrality(const ResistorNet& rn, LinkId e) {
  if (!rn.in_scope(e)) throw std::invalid_argument(fmt::format("link {} is not in scope", e));
  const auto [t, h] = rn.link_map(e);
  return effective_resistance(rn, t, h) / rn.link_slope(e);
}

Eigen::MatrixXd greens_function(const ResistorNet& rn, NodeId killed) {
  const auto n = static_cast<Eigen::Index>(rn.node_count());
  const GroundedLaplacian lap(rn.graph(), killed);
  if (lap.component().size() != rn.node_count())
    throw SingularSystem("Green's function requires a connected network");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (NodeId j = 0; j < rn.node_count(); ++j) {
    if (j == killed) continue;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lap.reduced_size());
    rhs[lap.reduced_index(j)] = rn.degree(j);
    const Eigen::VectorXd column = lap.solve_reduced(rhs);
    for (NodeId i = 0; i < rn.node_count(); ++i) {
      if (i == killed) continue;
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = column[lap.reduced_index(i)];
    }
  }
  return g;
}

}  // namespace elnet

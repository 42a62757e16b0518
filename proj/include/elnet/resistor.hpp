#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "elnet/netcore.hpp"
#include "elnet/wardrop.hpp"

namespace elnet {

/// Undirected conductance network, optionally remembering which transport
/// link maps onto which resistor link.
class ResistorNet {
 public:
  ResistorNet() = default;

  static ResistorNet from_conductances(std::size_t node_count, std::span<const WeightedEdge> edges);
  /// Every link of the network with unit conductance, mapped one-to-one.
  static ResistorNet from_network(const DirectedNetwork& network);
  /// Conductance 1/a_e aggregated over links outside `excluded`. Throws
  /// Disconnected if the remaining links do not join origin and destination.
  static ResistorNet from_affine(const AffineGame& game, const std::vector<LinkId>& excluded);
  /// Conductance f_e/τ_e(f_e) over links outside `excluded`; the surrogate
  /// slope is τ_e(f_e)/f_e. Throws ZeroFlowLink for an included link with no
  /// flow.
  static ResistorNet from_nonlinear(const Equilibrium& eq, const GeneralGame& game,
                                    const std::vector<LinkId>& excluded);
  static ResistorNet from_nonlinear(const Equilibrium& eq, const GeneralGame& game) {
    return from_nonlinear(eq, game, eq.support_complement);
  }

  std::size_t node_count() const { return graph_.node_count(); }
  const UndirectedGraph& graph() const { return graph_; }
  double conductance(NodeId i, NodeId j) const { return graph_.weight(i, j); }
  /// w_i = Σ_j W_ij.
  double degree(NodeId i) const { return degree_[i]; }
  const std::vector<double>& degrees() const { return degree_; }
  /// w* = max_i w_i.
  double max_degree() const { return max_degree_; }
  /// The resistor link set, each pair once with i < j.
  std::vector<WeightedEdge> links() const { return graph_.edges(); }

  std::size_t transport_link_count() const { return slope_.size(); }
  bool in_scope(LinkId e) const { return slope_.at(e).has_value(); }
  /// (tail, head) of transport link e.
  std::pair<NodeId, NodeId> link_map(LinkId e) const { return endpoints_.at(e); }
  /// a_e, or the nonlinear surrogate.
  double link_slope(LinkId e) const { return slope_.at(e).value(); }
  /// Transport links grouped per resistor pair (i < j), each list sorted.
  std::vector<std::pair<std::pair<NodeId, NodeId>, std::vector<LinkId>>> transport_groups() const;

  NodeId origin() const { return origin_; }
  NodeId destination() const { return destination_; }

 private:
  void finish();

  UndirectedGraph graph_;
  std::vector<double> degree_;
  double max_degree_ = 0.0;
  std::vector<std::pair<NodeId, NodeId>> endpoints_;
  std::vector<std::optional<double>> slope_;
  NodeId origin_ = 0;
  NodeId destination_ = 0;
};

struct VoltageSolution {
  std::vector<double> v;  // v[sink] == 0, NaN off the sink's component
  std::vector<double> y;  // per transport link, zero when out of scope
  NodeId source = 0;
  NodeId sink = 0;
  double current = 0.0;
};

/// Potentials for `current` injected at source and extracted at sink.
VoltageSolution solve_voltage(const ResistorNet& rn, NodeId source, NodeId sink, double current);

double effective_resistance(const ResistorNet& rn, NodeId i, NodeId j);

/// Exact resistance of each listed pair, grouped by ground node so that one
/// factorization serves every pair sharing it. Runs on up to `jobs` threads.
std::vector<double> effective_resistances(const ResistorNet& rn,
                                          std::span<const std::pair<NodeId, NodeId>> pairs,
                                          unsigned jobs = 1);

/// r_{M(e)}/a_e, in (0, 1] and equal to 1 on bridges.
double spanning_tree_centrality(const ResistorNet& rn, LinkId e);

/// (I − kP)^{-1} of the jump chain killed at k; row and column k are zero.
Eigen::MatrixXd greens_function(const ResistorNet& rn, NodeId killed);

}  // namespace elnet

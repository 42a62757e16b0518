#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

namespace elnet {

using NodeId = std::size_t;
using LinkId = std::size_t;

struct Link {
  NodeId tail;
  NodeId head;

  friend bool operator==(const Link&, const Link&) = default;
};

/// Directed multigraph with a single origin/destination pair. Parallel links
/// are distinct entries of the ordered link list.
class DirectedNetwork {
 public:
  DirectedNetwork() = default;
  DirectedNetwork(std::size_t node_count, std::vector<Link> links, NodeId origin,
                  NodeId destination);

  std::size_t node_count() const { return node_count_; }
  std::size_t link_count() const { return links_.size(); }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId e) const { return links_.at(e); }
  NodeId origin() const { return origin_; }
  NodeId destination() const { return destination_; }

  friend bool operator==(const DirectedNetwork&, const DirectedNetwork&) = default;

 private:
  std::size_t node_count_ = 0;
  std::vector<Link> links_;
  NodeId origin_ = 0;
  NodeId destination_ = 0;
};

/// Empty iff the network is well formed (indices in range, no self-loops,
/// origin distinct from destination).
std::vector<std::string> validate(const DirectedNetwork& network);

/// Links that lie on some directed origin-destination walk.
std::vector<bool> links_on_od_paths(const DirectedNetwork& network);

struct PrunedNetwork {
  DirectedNetwork network;
  std::vector<LinkId> kept;  // kept[k] = original id of pruned link k
};

/// Drops every link not on a directed o->d path; node set is preserved.
/// Throws NoPath when the destination is unreachable.
PrunedNetwork prune_with_map(const DirectedNetwork& network);
DirectedNetwork prune(const DirectedNetwork& network);

/// Node-link incidence matrix: +1 at the tail row, -1 at the head row.
class IncidenceMatrix {
 public:
  explicit IncidenceMatrix(const DirectedNetwork& network);

  Eigen::Index rows() const { return matrix_.rows(); }
  Eigen::Index cols() const { return matrix_.cols(); }
  int at(NodeId n, LinkId e) const;
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  /// Same matrix with row `dropped` removed (the destination row in KKT use).
  Eigen::SparseMatrix<double> reduced(NodeId dropped) const;

 private:
  Eigen::SparseMatrix<double> matrix_;
};

IncidenceMatrix incidence(const DirectedNetwork& network);

/// Two-terminal series-parallel recognition by exhaustive series/parallel
/// reduction. Expects a pruned network.
bool is_series_parallel(const DirectedNetwork& network);

// --- undirected views -------------------------------------------------------

struct WeightedEdge {
  NodeId i;
  NodeId j;
  double weight;
};

struct Neighbor {
  NodeId node;
  double weight;
};

/// Compressed adjacency of an undirected weighted simple graph. Parallel
/// edges are merged by summing weights; self-loops are dropped.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  UndirectedGraph(std::size_t node_count, std::span<const WeightedEdge> edges);

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const Neighbor> neighbors(NodeId n) const {
    return {adjacency_.data() + offsets_[n], offsets_[n + 1] - offsets_[n]};
  }
  /// Zero when i and j are not adjacent.
  double weight(NodeId i, NodeId j) const;
  bool adjacent(NodeId i, NodeId j) const { return weight(i, j) > 0.0; }
  /// Each edge once with i < j, in (i, j) lexicographic order.
  std::vector<WeightedEdge> edges() const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
};

/// Undirected view of a directed network, unit weight per node pair.
UndirectedGraph undirected_view(const DirectedNetwork& network);

inline constexpr int kUnreached = -1;

/// Hop distance of every node from the link {i, j}: min of the BFS distances
/// to i and to j. Unreachable nodes get kUnreached.
std::vector<int> hop_distance_from_link(const UndirectedGraph& graph, NodeId i, NodeId j);
std::vector<int> hop_distance_from_link(const DirectedNetwork& network, NodeId i, NodeId j);

/// Same distances restricted to the nodes within `radius` hops, in BFS order.
/// Work is proportional to the size of the ball, not of the graph.
std::vector<std::pair<NodeId, int>> ball_around_link(const UndirectedGraph& graph, NodeId i,
                                                     NodeId j, int radius);

/// Single-source BFS hop distances (kUnreached where unreachable).
std::vector<int> bfs_distances(const UndirectedGraph& graph, NodeId source);

/// Component label per node, labels dense from 0 in order of lowest node.
std::vector<std::size_t> connected_components(const UndirectedGraph& graph);

}  // namespace elnet

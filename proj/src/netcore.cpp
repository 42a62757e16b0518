#include "elnet/netcore.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "elnet/errors.hpp"

namespace elnet {

DirectedNetwork::DirectedNetwork(std::size_t node_count, std::vector<Link> links, NodeId origin,
                                 NodeId destination)
    : node_count_(node_count),
      links_(std::move(links)),
      origin_(origin),
      destination_(destination) {}

std::vector<std::string> validate(const DirectedNetwork& network) {
  std::vector<std::string> issues;
  const auto n = network.node_count();
  if (n < 1) issues.emplace_back("network has no nodes");
  if (network.origin() >= n) issues.push_back(fmt::format("origin {} out of range", network.origin()));
  if (network.destination() >= n)
    issues.push_back(fmt::format("destination {} out of range", network.destination()));
  if (network.origin() == network.destination()) issues.emplace_back("origin equals destination");
  for (LinkId e = 0; e < network.link_count(); ++e) {
    const auto& l = network.link(e);
    if (l.tail >= n || l.head >= n) issues.push_back(fmt::format("link {} endpoint out of range", e));
    if (l.tail == l.head) issues.push_back(fmt::format("self-loop at link {}", e));
  }
  return issues;
}

namespace {

std::vector<bool> reachable(std::size_t n, const std::vector<Link>& links, NodeId start,
                            bool forward) {
  std::vector<std::vector<NodeId>> adj(n);
  for (const auto& l : links) {
    if (forward)
      adj[l.tail].push_back(l.head);
    else
      adj[l.head].push_back(l.tail);
  }
  std::vector<bool> seen(n, false);
  std::vector<NodeId> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

std::vector<bool> links_on_od_paths(const DirectedNetwork& network) {
  const auto from_o = reachable(network.node_count(), network.links(), network.origin(), true);
  const auto to_d = reachable(network.node_count(), network.links(), network.destination(), false);
  std::vector<bool> on_path(network.link_count());
  for (LinkId e = 0; e < network.link_count(); ++e) {
    const auto& l = network.link(e);
    on_path[e] = from_o[l.tail] && to_d[l.head];
  }
  return on_path;
}

PrunedNetwork prune_with_map(const DirectedNetwork& network) {
  const auto from_o = reachable(network.node_count(), network.links(), network.origin(), true);
  if (!from_o[network.destination()])
    throw NoPath(fmt::format("destination {} unreachable from origin {}", network.destination(),
                             network.origin()));
  const auto keep = links_on_od_paths(network);
  PrunedNetwork out;
  std::vector<Link> links;
  for (LinkId e = 0; e < network.link_count(); ++e) {
    if (keep[e]) {
      links.push_back(network.link(e));
      out.kept.push_back(e);
    }
  }
  out.network = DirectedNetwork(network.node_count(), std::move(links), network.origin(),
                                network.destination());
  return out;
}

DirectedNetwork prune(const DirectedNetwork& network) { return prune_with_map(network).network; }

IncidenceMatrix::IncidenceMatrix(const DirectedNetwork& network)
    : matrix_(static_cast<Eigen::Index>(network.node_count()),
              static_cast<Eigen::Index>(network.link_count())) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * network.link_count());
  for (LinkId e = 0; e < network.link_count(); ++e) {
    const auto& l = network.link(e);
    const auto col = static_cast<Eigen::Index>(e);
    entries.emplace_back(static_cast<Eigen::Index>(l.tail), col, 1.0);
    entries.emplace_back(static_cast<Eigen::Index>(l.head), col, -1.0);
  }
  matrix_.setFromTriplets(entries.begin(), entries.end());
}

int IncidenceMatrix::at(NodeId n, LinkId e) const {
  return static_cast<int>(
      matrix_.coeff(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(e)));
}

Eigen::SparseMatrix<double> IncidenceMatrix::reduced(NodeId dropped) const {
  const auto d = static_cast<Eigen::Index>(dropped);
  Eigen::SparseMatrix<double> out(matrix_.rows() - 1, matrix_.cols());
  std::vector<Eigen::Triplet<double>> entries;
  for (Eigen::Index c = 0; c < matrix_.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix_, c); it; ++it) {
      if (it.row() == d) continue;
      entries.emplace_back(it.row() < d ? it.row() : it.row() - 1, c, it.value());
    }
  }
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

IncidenceMatrix incidence(const DirectedNetwork& network) { return IncidenceMatrix(network); }

bool is_series_parallel(const DirectedNetwork& network) {
  std::vector<Link> links = network.links();
  std::vector<bool> alive(links.size(), true);
  std::size_t alive_count = links.size();
  const NodeId o = network.origin();
  const NodeId d = network.destination();

  bool changed = true;
  while (changed && alive_count > 1) {
    changed = false;

    // Parallel merges: keep the first link of each (tail, head) class.
    std::map<std::pair<NodeId, NodeId>, LinkId> first;
    for (LinkId e = 0; e < links.size(); ++e) {
      if (!alive[e]) continue;
      auto [it, inserted] = first.try_emplace({links[e].tail, links[e].head}, e);
      if (!inserted) {
        alive[e] = false;
        --alive_count;
        changed = true;
      }
    }

    // Series merges through interior nodes with one in-link and one out-link.
    std::vector<std::vector<LinkId>> in(network.node_count()), out(network.node_count());
    for (LinkId e = 0; e < links.size(); ++e) {
      if (!alive[e]) continue;
      out[links[e].tail].push_back(e);
      in[links[e].head].push_back(e);
    }
    for (NodeId v = 0; v < network.node_count(); ++v) {
      if (v == o || v == d) continue;
      if (in[v].size() != 1 || out[v].size() != 1) continue;
      const LinkId e1 = in[v].front();
      const LinkId e2 = out[v].front();
      if (!alive[e1] || !alive[e2] || links[e1].head != v || links[e2].tail != v) continue;
      if (links[e1].tail == links[e2].head) return false;  // would close a directed cycle
      links[e1].head = links[e2].head;
      alive[e2] = false;
      --alive_count;
      changed = true;
      // Adjacency of the far endpoints is stale now; finish this pass.
      break;
    }
  }
  if (alive_count != 1) return false;
  for (LinkId e = 0; e < links.size(); ++e)
    if (alive[e]) return links[e].tail == o && links[e].head == d;
  return false;
}

UndirectedGraph::UndirectedGraph(std::size_t node_count, std::span<const WeightedEdge> edges) {
  std::vector<std::vector<Neighbor>> lists(node_count);
  for (const auto& e : edges) {
    if (e.i == e.j) continue;
    lists[e.i].push_back({e.j, e.weight});
    lists[e.j].push_back({e.i, e.weight});
  }
  offsets_.assign(node_count + 1, 0);
  for (NodeId n = 0; n < node_count; ++n) {
    auto& list = lists[n];
    std::sort(list.begin(), list.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < list.size(); ++r) {
      if (w > 0 && list[w - 1].node == list[r].node)
        list[w - 1].weight += list[r].weight;
      else
        list[w++] = list[r];
    }
    list.resize(w);
    offsets_[n + 1] = offsets_[n] + w;
  }
  adjacency_.reserve(offsets_.back());
  for (auto& list : lists) adjacency_.insert(adjacency_.end(), list.begin(), list.end());
}

double UndirectedGraph::weight(NodeId i, NodeId j) const {
  const auto nb = neighbors(i);
  auto it = std::lower_bound(nb.begin(), nb.end(), j,
                             [](const Neighbor& a, NodeId key) { return a.node < key; });
  return (it != nb.end() && it->node == j) ? it->weight : 0.0;
}

std::vector<WeightedEdge> UndirectedGraph::edges() const {
  std::vector<WeightedEdge> out;
  for (NodeId i = 0; i < node_count(); ++i)
    for (const auto& nb : neighbors(i))
      if (i < nb.node) out.push_back({i, nb.node, nb.weight});
  return out;
}

UndirectedGraph undirected_view(const DirectedNetwork& network) {
  std::vector<WeightedEdge> edges;
  for (const auto& l : network.links()) edges.push_back({l.tail, l.head, 1.0});
  UndirectedGraph merged(network.node_count(), edges);
  // Parallel links collapse to a single unit-weight neighbor pair.
  auto unit = merged.edges();
  for (auto& e : unit) e.weight = 1.0;
  return UndirectedGraph(network.node_count(), unit);
}

std::vector<int> bfs_distances(const UndirectedGraph& graph, NodeId source) {
  std::vector<int> dist(graph.node_count(), kUnreached);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (const auto& nb : graph.neighbors(u)) {
      if (dist[nb.node] == kUnreached) {
        dist[nb.node] = dist[u] + 1;
        queue.push_back(nb.node);
      }
    }
  }
  return dist;
}

std::vector<int> hop_distance_from_link(const UndirectedGraph& graph, NodeId i, NodeId j) {
  if (!graph.adjacent(i, j))
    throw std::invalid_argument(fmt::format("nodes {} and {} are not adjacent", i, j));
  std::vector<int> dist(graph.node_count(), kUnreached);
  std::deque<NodeId> queue{i, j};
  dist[i] = 0;
  dist[j] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (const auto& nb : graph.neighbors(u)) {
      if (dist[nb.node] == kUnreached) {
        dist[nb.node] = dist[u] + 1;
        queue.push_back(nb.node);
      }
    }
  }
  return dist;
}

std::vector<int> hop_distance_from_link(const DirectedNetwork& network, NodeId i, NodeId j) {
  return hop_distance_from_link(undirected_view(network), i, j);
}

std::vector<std::pair<NodeId, int>> ball_around_link(const UndirectedGraph& graph, NodeId i,
                                                     NodeId j, int radius) {
  if (!graph.adjacent(i, j))
    throw std::invalid_argument(fmt::format("nodes {} and {} are not adjacent", i, j));
  std::unordered_map<NodeId, int> seen{{i, 0}, {j, 0}};
  std::vector<std::pair<NodeId, int>> order{{i, 0}, {j, 0}};
  for (std::size_t head = 0; head < order.size(); ++head) {
    const auto [u, du] = order[head];
    if (du == radius) continue;
    for (const auto& nb : graph.neighbors(u)) {
      if (seen.try_emplace(nb.node, du + 1).second) order.emplace_back(nb.node, du + 1);
    }
  }
  return order;
}

std::vector<std::size_t> connected_components(const UndirectedGraph& graph) {
  constexpr auto kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(graph.node_count(), kNone);
  std::size_t next = 0;
  for (NodeId s = 0; s < graph.node_count(); ++s) {
    if (label[s] != kNone) continue;
    label[s] = next;
    std::vector<NodeId> stack{s};
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (const auto& nb : graph.neighbors(u)) {
        if (label[nb.node] == kNone) {
          label[nb.node] = next;
          stack.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  return label;
}

}  // namespace elnet

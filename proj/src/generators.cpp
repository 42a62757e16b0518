#include "elnet/generators.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace elnet {

namespace {

AffineGame unit_game(std::size_t nodes, std::vector<Link> links, NodeId o, NodeId d) {
  const auto E = links.size();
  return AffineGame{DirectedNetwork(nodes, std::move(links), o, d), std::vector<double>(E, 1.0),
                    std::vector<double>(E, 0.0), 1.0};
}

}  // namespace

NodeId grid_node(int side, int x, int y) { return static_cast<NodeId>(y * side + x); }

AffineGame square_grid(int side) {
  if (side < 3) throw std::invalid_argument("grid side must be at least 3");
  std::vector<Link> links;
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      if (x + 1 < side) links.push_back({grid_node(side, x, y), grid_node(side, x + 1, y)});
      if (y + 1 < side) links.push_back({grid_node(side, x, y), grid_node(side, x, y + 1)});
    }
  }
  const auto n = static_cast<std::size_t>(side) * side;
  return unit_game(n, std::move(links), 0, n - 1);
}

std::pair<NodeId, NodeId> grid_central_link(int side) {
  const int c = side / 2;
  return {grid_node(side, c, c), grid_node(side, c + 1, c)};
}

AffineGame cube_grid(int side) {
  if (side < 3) throw std::invalid_argument("grid side must be at least 3");
  auto id = [side](int x, int y, int z) { return static_cast<NodeId>((z * side + y) * side + x); };
  std::vector<Link> links;
  for (int z = 0; z < side; ++z) {
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        if (x + 1 < side) links.push_back({id(x, y, z), id(x + 1, y, z)});
        if (y + 1 < side) links.push_back({id(x, y, z), id(x, y + 1, z)});
        if (z + 1 < side) links.push_back({id(x, y, z), id(x, y, z + 1)});
      }
    }
  }
  const auto n = static_cast<std::size_t>(side) * side * side;
  return unit_game(n, std::move(links), 0, n - 1);
}

AffineGame ring(int n) {
  if (n < 4) throw std::invalid_argument("ring needs at least 4 nodes");
  const auto N = static_cast<NodeId>(n);
  const NodeId half = N / 2;
  std::vector<Link> links;
  for (NodeId k = 0; k < half; ++k) links.push_back({k, k + 1});
  for (NodeId k = N; k > half; --k) links.push_back({k % N, k - 1});
  return unit_game(N, std::move(links), 0, half);
}

AffineGame double_tree(int depth) {
  if (depth < 1) throw std::invalid_argument("double tree depth must be at least 1");
  std::vector<Link> links{{0, 1}};
  NodeId next = 2;
  for (NodeId root : {NodeId{0}, NodeId{1}}) {
    std::vector<NodeId> level{root};
    for (int k = 0; k < depth; ++k) {
      std::vector<NodeId> children;
      for (NodeId parent : level) {
        for (int c = 0; c < 2; ++c) {
          const NodeId child = next++;
          // Edges point toward node 0 in its tree and away from node 1 in the other.
          links.push_back(root == 0 ? Link{child, parent} : Link{parent, child});
          children.push_back(child);
        }
      }
      level = std::move(children);
    }
  }
  return unit_game(next, std::move(links), 0, 1);
}

ResistorNet unit_resistors(const AffineGame& game) { return ResistorNet::from_network(game.network); }

AffineGame wheatstone() {
  return AffineGame{DirectedNetwork(2, {{0, 1}, {0, 1}}, 0, 1), {1.0, 1.0}, {1.0, 1.5}, 1.0};
}

AffineGame example1() {
  return AffineGame{DirectedNetwork(3, {{0, 1}, {0, 1}, {1, 2}}, 0, 2), {3.0, 2.0, 1.0},
                    {0.0, 0.0, 0.0}, 3.0};
}

DirectedNetwork la_highway() {
  // Figure numbering is 1-based; links l1..l28 in order.
  static constexpr std::pair<int, int> kLinks[] = {
      {1, 2},   {2, 3},   {3, 4},   {4, 5},   {1, 6},   {6, 7},   {7, 8},
      {8, 9},   {9, 13},  {2, 7},   {3, 8},   {3, 9},   {4, 9},   {5, 14},
      {6, 10},  {10, 11}, {10, 15}, {7, 10},  {8, 11},  {9, 12},  {11, 12},
      {12, 13}, {13, 14}, {11, 15}, {13, 17}, {14, 17}, {15, 16}, {16, 17}};
  std::vector<Link> links;
  for (const auto& [t, h] : kLinks)
    links.push_back({static_cast<NodeId>(t - 1), static_cast<NodeId>(h - 1)});
  return DirectedNetwork(17, std::move(links), 0, 16);
}

GeneralGame la_quartic(const std::vector<double>& a, const std::vector<double>& b, double m) {
  GeneralGame game{la_highway(), {}, m};
  if (a.size() != game.network.link_count() || b.size() != game.network.link_count())
    throw std::invalid_argument("one coefficient per highway link is required");
  for (LinkId e = 0; e < a.size(); ++e) game.delays.push_back(Delay::polynomial(a[e], b[e], 4));
  return game;
}

AffineGame random_series_parallel(std::uint64_t seed, int depth, const DelayRanges& ranges) {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  Rng rng(seed);
  std::vector<Link> links;
  NodeId nodes = 2;
  auto compose = [&](auto&& self, NodeId s, NodeId t, int level) -> void {
    if (level <= 1) {
      links.push_back({s, t});
      return;
    }
    int first = level - 1;
    int second = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(level - 1)));
    if (rng.below(2) == 0) std::swap(first, second);
    if (rng.below(2) == 0) {
      const NodeId v = nodes++;
      self(self, s, v, first);
      self(self, v, t, second);
    } else {
      self(self, s, t, first);
      self(self, s, t, second);
    }
  };
  compose(compose, 0, 1, depth);
  AffineGame game{DirectedNetwork(nodes, std::move(links), 0, 1), {}, {}, 1.0};
  for (LinkId e = 0; e < game.network.link_count(); ++e) {
    game.a.push_back(rng.uniform(ranges.a_min, ranges.a_max));
    game.b.push_back(rng.uniform(ranges.b_min, ranges.b_max));
  }
  game.m = rng.uniform(ranges.m_min, ranges.m_max);
  return game;
}

ResistorNet random_connected(std::uint64_t seed, std::size_t n, std::size_t extra, double w_min,
                             double w_max) {
  if (n < 2) throw std::invalid_argument("need at least two nodes");
  Rng rng(seed);
  std::set<std::pair<NodeId, NodeId>> present;
  std::vector<WeightedEdge> edges;
  for (NodeId k = 1; k < n; ++k) {
    const NodeId parent = rng.below(k);
    present.emplace(parent, k);
    edges.push_back({parent, k, rng.uniform(w_min, w_max)});
  }
  const std::size_t possible = n * (n - 1) / 2;
  const std::size_t target = std::min(extra, possible - edges.size());
  for (std::size_t added = 0, attempts = 0; added < target && attempts < 100 * (target + 1);
       ++attempts) {
    NodeId i = rng.below(n), j = rng.below(n);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    if (!present.emplace(i, j).second) continue;
    edges.push_back({i, j, rng.uniform(w_min, w_max)});
    ++added;
  }
  return ResistorNet::from_conductances(n, edges);
}

ResistorNet grid_with_deletions(std::uint64_t seed, int side, double fraction) {
  const auto game = square_grid(side);
  std::vector<WeightedEdge> edges;
  for (const auto& l : game.network.links()) edges.push_back({l.tail, l.head, 1.0});
  Rng rng(seed);
  std::vector<std::size_t> order(edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);

  const auto n = game.network.node_count();
  const auto goal = static_cast<std::size_t>(fraction * static_cast<double>(edges.size()));
  std::vector<bool> removed(edges.size(), false);
  std::size_t count = 0;
  for (std::size_t k : order) {
    if (count >= goal) break;
    removed[k] = true;
    std::vector<WeightedEdge> kept;
    for (std::size_t q = 0; q < edges.size(); ++q)
      if (!removed[q]) kept.push_back(edges[q]);
    const auto dist = bfs_distances(UndirectedGraph(n, kept), 0);
    if (std::find(dist.begin(), dist.end(), kUnreached) != dist.end())
      removed[k] = false;
    else
      ++count;
  }
  std::vector<WeightedEdge> kept;
  for (std::size_t q = 0; q < edges.size(); ++q)
    if (!removed[q]) kept.push_back(edges[q]);
  return ResistorNet::from_conductances(n, kept);
}

}  // namespace elnet

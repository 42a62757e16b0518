#include "elnet/localres.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "elnet/errors.hpp"
#include "elnet/linsolve.hpp"
#include "elnet/parallel.hpp"

namespace elnet {

namespace {

void require_link(const ResistorNet& rn, NodeId i, NodeId j, int d) {
  if (d < 1) throw std::invalid_argument("distance must be at least 1");
  if (i >= rn.node_count() || j >= rn.node_count() || !rn.graph().adjacent(i, j))
    throw std::invalid_argument(fmt::format("{{{}, {}}} is not a resistor link", i, j));
}

LocalNetwork build_local(const ResistorNet& rn, NodeId i, NodeId j, int d, bool shorted) {
  require_link(rn, i, j, d);
  const auto& graph = rn.graph();
  const auto ball = ball_around_link(graph, i, j, shorted ? d + 1 : d);

  LocalNetwork local;
  std::unordered_map<NodeId, NodeId> index;
  bool outer = false;
  for (const auto& [node, dist] : ball) {
    if (dist <= d) {
      index.emplace(node, local.original.size());
      local.original.push_back(node);
    } else {
      outer = true;
    }
  }
  const NodeId s = local.original.size();
  if (outer) local.supernode = s;

  std::vector<WeightedEdge> edges;
  for (NodeId u = 0; u < local.original.size(); ++u) {
    for (const auto& nb : graph.neighbors(local.original[u])) {
      const auto it = index.find(nb.node);
      if (it != index.end()) {
        if (u < it->second) edges.push_back({u, it->second, nb.weight});
      } else if (outer) {
        edges.push_back({u, s, nb.weight});
      }
    }
  }
  local.net = ResistorNet::from_conductances(s + (outer ? 1 : 0), edges);
  local.i = 0;
  local.j = 1;
  return local;
}

ResistanceBounds bounds_for(const ResistorNet& rn, NodeId i, NodeId j, int d,
                            const std::vector<LinkId>& mapped) {
  const auto cut = cut_at_distance(rn, i, j, d);
  const auto shorted = short_at_distance(rn, i, j, d);
  ResistanceBounds out;
  out.i = i;
  out.j = j;
  out.d = d;
  out.upper = effective_resistance(cut.net, cut.i, cut.j);
  out.lower = shorted.supernode ? effective_resistance(shorted.net, shorted.i, shorted.j) : out.upper;
  for (LinkId e : mapped) out.epsilon.emplace_back(e, out.gap() / rn.link_slope(e));
  return out;
}

std::map<std::pair<NodeId, NodeId>, std::vector<LinkId>> groups_by_pair(const ResistorNet& rn) {
  std::map<std::pair<NodeId, NodeId>, std::vector<LinkId>> out;
  for (auto& [pair, links] : rn.transport_groups()) out.emplace(pair, std::move(links));
  return out;
}

}  // namespace

LocalNetwork cut_at_distance(const ResistorNet& rn, NodeId i, NodeId j, int d) {
  return build_local(rn, i, j, d, false);
}

LocalNetwork short_at_distance(const ResistorNet& rn, NodeId i, NodeId j, int d) {
  return build_local(rn, i, j, d, true);
}

ResistanceBounds resistance_bounds(const ResistorNet& rn, NodeId i, NodeId j, int d) {
  const auto groups = groups_by_pair(rn);
  const auto it = groups.find({std::min(i, j), std::max(i, j)});
  return bounds_for(rn, i, j, d, it == groups.end() ? std::vector<LinkId>{} : it->second);
}

LinkScan scan_all_links(const ResistorNet& rn, int d, unsigned jobs) {
  const auto links = rn.links();
  const auto groups = groups_by_pair(rn);
  const std::vector<LinkId> none;
  LinkScan scan;
  scan.bounds.resize(links.size());
  std::vector<std::string> failure(links.size());
  parallel_for(links.size(), jobs, [&](std::size_t k) {
    const auto& l = links[k];
    const auto it = groups.find({l.i, l.j});
    try {
      scan.bounds[k] = bounds_for(rn, l.i, l.j, d, it == groups.end() ? none : it->second);
    } catch (const std::exception& ex) {
      scan.bounds[k].i = l.i;
      scan.bounds[k].j = l.j;
      scan.bounds[k].d = d;
      failure[k] = fmt::format("{}-{}: {}", l.i, l.j, ex.what());
    }
  });
  for (auto& message : failure)
    if (!message.empty()) scan.errors.push_back(std::move(message));
  return scan;
}

double average_relative_gap(const std::vector<ResistanceBounds>& bounds,
                            const std::vector<double>& exact) {
  if (bounds.size() != exact.size())
    throw std::invalid_argument("one exact resistance per bound is required");
  if (bounds.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < bounds.size(); ++k) total += bounds[k].gap() / exact[k];
  return total / static_cast<double>(bounds.size());
}

double average_relative_gap(const ResistorNet& rn, int d, const std::vector<double>& exact,
                            unsigned jobs) {
  auto scan = scan_all_links(rn, d, jobs);
  if (!scan.errors.empty()) throw Error(scan.errors.front());
  return average_relative_gap(scan.bounds, exact);
}

}  // namespace elnet

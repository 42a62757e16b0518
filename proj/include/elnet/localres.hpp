#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elnet/resistor.hpp"

namespace elnet {

/// A network built around the resistor link {i, j}, with its own node
/// numbering. `original[k]` is the node of the source network that local
/// node k stands for; the supernode, when present, is the last local node.
struct LocalNetwork {
  ResistorNet net;
  NodeId i = 0;
  NodeId j = 0;
  std::vector<NodeId> original;
  std::optional<NodeId> supernode;

  std::size_t node_count() const { return net.node_count(); }
};

/// Keeps the nodes within hop distance d of {i, j}.
LocalNetwork cut_at_distance(const ResistorNet& rn, NodeId i, NodeId j, int d);
/// Merges every node beyond hop distance d into one supernode. Without such
/// nodes this is the cut network.
LocalNetwork short_at_distance(const ResistorNet& rn, NodeId i, NodeId j, int d);

struct ResistanceBounds {
  NodeId i = 0;
  NodeId j = 0;
  int d = 1;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> exact;
  /// (transport link e, (upper − lower)/a_e) for links mapped onto {i, j}.
  std::vector<std::pair<LinkId, double>> epsilon;

  double gap() const { return upper - lower; }
};

ResistanceBounds resistance_bounds(const ResistorNet& rn, NodeId i, NodeId j, int d);

struct LinkScan {
  std::vector<ResistanceBounds> bounds;  // one per resistor link, in links() order
  std::vector<std::string> errors;       // "i-j: message" for links that failed
};

/// Bounds for every resistor link on up to `jobs` threads (0 = all cores).
LinkScan scan_all_links(const ResistorNet& rn, int d, unsigned jobs = 0);

/// Mean of (upper − lower)/exact over the scanned links.
double average_relative_gap(const std::vector<ResistanceBounds>& bounds,
                            const std::vector<double>& exact);
double average_relative_gap(const ResistorNet& rn, int d, const std::vector<double>& exact,
                            unsigned jobs = 0);

}  // namespace elnet

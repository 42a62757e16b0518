#pragma once

#include <vector>

#include "elnet/resistor.hpp"

namespace elnet {

/// p_start(T_A < T_B) on the jump chain with P = I_w^{-1} W.
struct HittingQuery {
  NodeId start = 0;
  std::vector<NodeId> a;
  std::vector<NodeId> b;
};

/// Throws Unreachable if start's component touches neither set.
double hit_before(const ResistorNet& rn, const HittingQuery& q);

/// p_i(T_A < T_B) for every node, NaN off the component of `anchor`.
std::vector<double> hit_before_all(const ResistorNet& rn, const std::vector<NodeId>& a,
                                   const std::vector<NodeId>& b, NodeId anchor);

/// p_i(T_j < T_i⁺), the escape probability from i to j.
double return_escape(const ResistorNet& rn, NodeId i, NodeId j);

/// Nodes whose hop distance from i or from j is exactly d and from the other
/// endpoint at least d.
std::vector<NodeId> distance_shell(const ResistorNet& rn, NodeId i, NodeId j, int d);

/// p_i(T_{N_d} < T_j) on the full network; 0 when the shell is empty.
double term1(const ResistorNet& rn, NodeId i, NodeId j, int d);

/// max over g in N_d of p^cut_g(T_i < T_j) − p^short_g(T_i < T_j); 0 when the
/// shell is empty.
double term2(const ResistorNet& rn, NodeId i, NodeId j, int d);

/// (w_i / W_ij²)·term1·term2, an upper bound on r^U − r^L.
double gap_rhs(const ResistorNet& rn, NodeId i, NodeId j, int d);

/// Lower resistance bound of the double tree at distance d, closed form.
double double_tree_lower_closed_form(int d);
/// Same quantity through r(0) = 3, r(n) = 2 + r(n−1)/2, (1 + 2/r(d−1))^{-1}.
double double_tree_lower_recursion(int d);

}  // namespace elnet

#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "elnet/netcore.hpp"

namespace elnet {

/// Symmetric positive definite sparse solver: simplicial LDLT below
/// kDirectLimit unknowns, incomplete-Cholesky CG above.
class SpdSolver {
 public:
  static constexpr Eigen::Index kDirectLimit = 10000;
  static constexpr double kIterativeTolerance = 1e-10;

  explicit SpdSolver(const Eigen::SparseMatrix<double>& matrix);

  Eigen::Index size() const { return size_; }
  bool direct() const { return direct_ != nullptr; }
  /// Throws SingularSystem when the iterative path fails to converge.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  using Direct = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>;
  using Iterative = Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                             Eigen::IncompleteCholesky<double>>;

  Eigen::Index size_ = 0;
  // The iterative solver keeps a reference to the matrix it was given.
  Eigen::SparseMatrix<double> matrix_;
  std::unique_ptr<Direct> direct_;
  std::unique_ptr<Iterative> iterative_;
  // Eigen's iterative solvers record statistics in mutable members.
  mutable std::mutex iterative_mutex_;
};

/// Laplacian of the connected component of `ground`, with the ground row and
/// column removed. Potentials are reported on the full node set, with the
/// ground at 0 and nodes outside the component set to NaN.
class GroundedLaplacian {
 public:
  /// Throws SingularSystem if the component has a zero-conductance edge.
  GroundedLaplacian(const UndirectedGraph& graph, NodeId ground);

  NodeId ground() const { return ground_; }
  bool contains(NodeId n) const { return index_[n] >= 0 || n == ground_; }
  /// Nodes of the ground component, ground included, in increasing order.
  const std::vector<NodeId>& component() const { return component_; }

  /// Solves L v = injection on the component; injection entries outside the
  /// component are ignored.
  Eigen::VectorXd solve(const Eigen::VectorXd& injection) const;
  /// Potentials for `current` injected at source and extracted at the ground.
  Eigen::VectorXd solve_dipole(NodeId source, double current) const;
  /// Reduced-system solve; the vector is indexed by reduced_index.
  Eigen::VectorXd solve_reduced(const Eigen::VectorXd& rhs) const { return solver_->solve(rhs); }
  /// Position of n in the reduced system, -1 for the ground and outsiders.
  Eigen::Index reduced_index(NodeId n) const { return index_[n]; }
  Eigen::Index reduced_size() const { return static_cast<Eigen::Index>(component_.size()) - 1; }

 private:
  std::size_t node_count_;
  NodeId ground_;
  std::vector<NodeId> component_;
  std::vector<Eigen::Index> index_;
  std::unique_ptr<SpdSolver> solver_;
};

/// Two-terminal effective resistance between i and j (Disconnected if they lie
/// in different components).
double effective_resistance(const UndirectedGraph& graph, NodeId i, NodeId j);

}  // namespace elnet

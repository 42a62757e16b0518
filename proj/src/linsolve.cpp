#include "elnet/linsolve.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "elnet/errors.hpp"

namespace elnet {

SpdSolver::SpdSolver(const Eigen::SparseMatrix<double>& matrix) : size_(matrix.rows()) {
  if (matrix.rows() != matrix.cols()) throw SingularSystem("matrix is not square");
  if (size_ == 0) return;
  if (size_ < kDirectLimit) {
    direct_ = std::make_unique<Direct>(matrix);
    if (direct_->info() != Eigen::Success) throw SingularSystem("sparse factorization failed");
    const auto& diag = direct_->vectorD();
    const double largest = diag.cwiseAbs().maxCoeff();
    if (!(diag.minCoeff() > 1e-14 * largest))
      throw SingularSystem("reduced Laplacian is singular or indefinite");
  } else {
    matrix_ = matrix;
    iterative_ = std::make_unique<Iterative>();
    iterative_->setTolerance(kIterativeTolerance);
    iterative_->setMaxIterations(std::max<Eigen::Index>(1000, 20 * size_));
    iterative_->compute(matrix_);
    if (iterative_->info() != Eigen::Success)
      throw SingularSystem("incomplete Cholesky preconditioner failed");
  }
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& rhs) const {
  if (size_ == 0) return {};
  if (direct_) return direct_->solve(rhs);
  std::lock_guard lock(iterative_mutex_);
  Eigen::VectorXd x = iterative_->solve(rhs);
  if (iterative_->info() != Eigen::Success)
    throw SingularSystem(fmt::format("conjugate gradient stalled at residual {:.3g} after {} iterations",
                                     iterative_->error(), iterative_->iterations()));
  return x;
}

GroundedLaplacian::GroundedLaplacian(const UndirectedGraph& graph, NodeId ground)
    : node_count_(graph.node_count()), ground_(ground), index_(graph.node_count(), -1) {
  const auto dist = bfs_distances(graph, ground);
  for (NodeId n = 0; n < node_count_; ++n)
    if (dist[n] != kUnreached) component_.push_back(n);
  Eigen::Index next = 0;
  for (NodeId n : component_)
    if (n != ground) index_[n] = next++;

  std::vector<Eigen::Triplet<double>> entries;
  for (NodeId n : component_) {
    const auto row = index_[n];
    if (row < 0) continue;
    double diagonal = 0.0;
    for (const auto& nb : graph.neighbors(n)) {
      diagonal += nb.weight;
      const auto col = index_[nb.node];
      if (col >= 0) entries.emplace_back(row, col, -nb.weight);
    }
    entries.emplace_back(row, row, diagonal);
  }
  Eigen::SparseMatrix<double> reduced(next, next);
  reduced.setFromTriplets(entries.begin(), entries.end());
  solver_ = std::make_unique<SpdSolver>(reduced);
}

Eigen::VectorXd GroundedLaplacian::solve(const Eigen::VectorXd& injection) const {
  Eigen::VectorXd rhs(reduced_size());
  for (NodeId n : component_)
    if (index_[n] >= 0) rhs[index_[n]] = injection[static_cast<Eigen::Index>(n)];
  const Eigen::VectorXd x = solver_->solve(rhs);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(node_count_),
                                                std::numeric_limits<double>::quiet_NaN());
  for (NodeId n : component_) v[static_cast<Eigen::Index>(n)] = index_[n] >= 0 ? x[index_[n]] : 0.0;
  return v;
}

Eigen::VectorXd GroundedLaplacian::solve_dipole(NodeId source, double current) const {
  if (!contains(source))
    throw Disconnected(fmt::format("node {} is not connected to node {}", source, ground_));
  Eigen::VectorXd injection = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(node_count_));
  if (source != ground_) injection[static_cast<Eigen::Index>(source)] = current;
  return solve(injection);
}

double effective_resistance(const UndirectedGraph& graph, NodeId i, NodeId j) {
  if (i == j) return 0.0;
  const GroundedLaplacian lap(graph, j);
  return lap.solve_dipole(i, 1.0)[static_cast<Eigen::Index>(i)];
}

}  // namespace elnet

#include "glvortex/poisson.hpp"

#include "glvortex/errors.hpp"

#include <cmath>
#include <sstream>

namespace glv {

PoissonSolver::PoissonSolver(const Eigen::SparseMatrix<double>& op, Eigen::VectorXd weights)
    : op_(op), weights_(std::move(weights)) {
  const Eigen::Index n = op_.rows();
  if (n < 2 || op_.cols() != n || weights_.size() != n) throw DomainError("PoissonSolver: bad operator size");
  const Eigen::SparseMatrix<double> reduced = op_.bottomRightCorner(n - 1, n - 1);
  ldlt_.compute(reduced);
  if (ldlt_.info() != Eigen::Success) throw NumericalError("PoissonSolver: factorization failed");
}

Eigen::VectorXd PoissonSolver::solve(const Eigen::VectorXd& rhs, double residualTolerance) const {
  const Eigen::Index n = op_.rows();
  if (rhs.size() != n) throw DomainError("PoissonSolver: rhs size mismatch");
  const double scale = rhs.cwiseAbs().sum();
  if (std::abs(rhs.sum()) > 1e-8 * (1.0 + scale)) {
    std::ostringstream msg;
    msg << "Poisson right-hand side does not integrate to zero (sum = " << rhs.sum() << ")";
    throw SolvabilityError(msg.str());
  }

  // Orthogonal projection onto the range (constants are the kernel).
  const Eigen::VectorXd projected = rhs.array() - rhs.mean();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  x.tail(n - 1) = ldlt_.solve(projected.tail(n - 1));
  if (ldlt_.info() != Eigen::Success) throw NumericalError("PoissonSolver: back substitution failed");
  x.array() -= weights_.dot(x) / weights_.sum();

  const double denom = rhs.norm();
  if (denom > 0.0) {
    const double residual = (op_ * x - projected).norm() / denom;
    if (!(residual <= residualTolerance)) {
      std::ostringstream msg;
      msg << "Poisson solve residual " << residual << " exceeds " << residualTolerance;
      throw NumericalError(msg.str());
    }
  }
  return x;
}

} // namespace glv

#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace glv {

// Factorized solver for a symmetric positive semi-definite operator whose
// kernel is exactly the constants (a graph Laplacian on a connected mesh).
//
// The first unknown is pinned during factorization; solutions are shifted
// afterwards to have zero weighted mean. The right-hand side must sum to zero.
class PoissonSolver {
public:
  PoissonSolver(const Eigen::SparseMatrix<double>& op, Eigen::VectorXd weights);

  // Solve op * x = rhs with weights . x = 0. Throws SolvabilityError when
  // |sum(rhs)| exceeds 1e-8 * (1 + |rhs|_1) and NumericalError when the
  // relative residual exceeds residualTolerance.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, double residualTolerance = 1e-10) const;

  const Eigen::SparseMatrix<double>& op() const { return op_; }
  const Eigen::VectorXd& weights() const { return weights_; }

private:
  Eigen::SparseMatrix<double> op_;
  Eigen::VectorXd weights_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

} // namespace glv

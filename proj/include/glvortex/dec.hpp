#pragma once

#include "glvortex/mesh.hpp"
#include "glvortex/poisson.hpp"

#include <Eigen/SparseCore>

#include <numbers>

namespace glv {

// Angle wrapped to (-pi, pi].
inline double wrap_angle(double x) {
  double y = std::remainder(x, 2.0 * std::numbers::pi);
  if (y <= -std::numbers::pi) y += 2.0 * std::numbers::pi;
  return y;
}

// Discrete exterior derivatives with edges oriented v0 -> v1 and faces
// oriented by their vertex order.
Eigen::SparseMatrix<double> d0(const SurfaceMesh& mesh); // |E| x |V|
Eigen::SparseMatrix<double> d1(const SurfaceMesh& mesh); // |F| x |E|

// Diagonal primal-to-dual Hodge star on edges (the cotan weights).
Eigen::VectorXd hodge1(const SurfaceMesh& mesh);

// Laplacian on faces (dual vertices), d1 * hodge1^{-1} * d1^T, with face
// areas as weights. Throws GeometryError when a cotan weight is not positive.
PoissonSolver face_poisson_solver(const SurfaceMesh& mesh);

// Co-exact one-form hodge1^{-1} d1^T beta from a face potential.
Eigen::VectorXd coexact_form(const SurfaceMesh& mesh, const Eigen::VectorXd& facePotential);

// Sum of a one-form around each face, and its weighted divergence at each vertex.
Eigen::VectorXd face_circulation(const SurfaceMesh& mesh, const Eigen::VectorXd& form);
Eigen::VectorXd vertex_divergence(const SurfaceMesh& mesh, const Eigen::VectorXd& form);

} // namespace glv

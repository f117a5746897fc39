#pragma once

#include "glvortex/mesh.hpp"
#include "glvortex/tensor.hpp"

#include <Eigen/Core>

#include <complex>
#include <memory>
#include <vector>

namespace glv {

// Discrete hermitian line bundle: one transport angle per edge and one
// curvature value per face.
//
// rho(i -> j) transports the fiber at i to the fiber at j: a covariantly
// constant section satisfies u_j = exp(i rho(i -> j)) u_i. Angles are stored
// once per edge for the v0 -> v1 direction, so rho(j -> i) = -rho(i -> j)
// holds exactly.
class DiscreteBundle {
public:
  DiscreteBundle(std::shared_ptr<const SurfaceMesh> mesh, int rank, std::vector<double> edgeRho,
                 std::vector<double> faceCurvature);

  const SurfaceMesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const SurfaceMesh>& mesh_ptr() const { return mesh_; }
  int rank() const { return rank_; }

  double rho_edge(int e) const { return edgeRho_[e]; }
  double rho_halfedge(int h) const { return mesh_->he_sign(h) * edgeRho_[mesh_->he_edge(h)]; }
  // Throws IndexError when i and j are not adjacent.
  double rho(int i, int j) const;

  double face_curvature(int f) const { return faceCurvature_[f]; }
  const std::vector<double>& face_curvatures() const { return faceCurvature_; }
  double total_curvature() const { return totalCurvature_; }
  int euler_number() const { return eulerNumber_; }

  // Each face curvature split equally among its three vertices.
  Eigen::VectorXd vertex_curvature() const;

private:
  std::shared_ptr<const SurfaceMesh> mesh_;
  int rank_ = 1;
  std::vector<double> edgeRho_;
  std::vector<double> faceCurvature_;
  double totalCurvature_ = 0.0;
  int eulerNumber_ = 0;
};

// Levi-Civita transport of the vertex charts raised to the k-th power
// (the bundle of rank-k symmetric traceless tensors). k >= 1.
DiscreteBundle levi_civita_connection(std::shared_ptr<const SurfaceMesh> mesh, int k);

// Flat product bundle: rho = 0, zero curvature, rank 0.
DiscreteBundle trivial_bundle(std::shared_ptr<const SurfaceMesh> mesh);

// exp(i rho(i -> j)) z. Throws IndexError when i and j are not adjacent.
std::complex<double> transport(const DiscreteBundle& bundle, int i, int j, std::complex<double> z);

// Sum of the three transport angles around face f, wrapped to (-pi, pi].
double face_holonomy(const DiscreteBundle& bundle, int f);

// Rotates the frame at each vertex v by beta[v]; the section coordinates of
// the new frames are exp(-i k beta) times the old ones.
DiscreteBundle gauge_transform(const DiscreteBundle& bundle, const std::vector<double>& beta);
Section gauge_transform_section(const DiscreteBundle& bundle, const Section& u, const std::vector<double>& beta);

// Harmonic one-forms (per edge, oriented v0 -> v1) dual to a basis of
// homology loops.
struct HarmonicBasis {
  std::vector<Eigen::VectorXd> forms;
  Eigen::MatrixXd gram;
  // Closed vertex loops; front() == back().
  std::vector<std::vector<int>> generators;
};

// Tree-cotree generators and their harmonic Poincare duals:
// the integral of any closed form over generator l equals its weighted inner
// product with form l. Empty for genus 0.
HarmonicBasis harmonic_basis(const DiscreteBundle& bundle);

// Signed edge counts of a closed vertex loop (front() == back()).
Eigen::VectorXd loop_cochain(const SurfaceMesh& mesh, const std::vector<int>& loop);
double loop_integral(const SurfaceMesh& mesh, const Eigen::VectorXd& form, const std::vector<int>& loop);

// Weighted L2 inner product of two edge one-forms.
double form_inner(const SurfaceMesh& mesh, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

} // namespace glv

#pragma once

#include "glvortex/connection.hpp"

#include <Eigen/Core>

#include <vector>

namespace glv {

// Singular points snapped to mesh vertices; pairwise distinct.
struct Configuration {
  std::vector<int> points;

  int d() const { return static_cast<int>(points.size()); }
};

// Validates range and distinctness.
Configuration make_configuration(const SurfaceMesh& mesh, std::vector<int> vertices);
// Nearest vertex to each point. Throws GeometryError when two points snap to
// the same vertex.
Configuration snap_configuration(const SurfaceMesh& mesh, const std::vector<Vec3>& points);

// Real one-form with one value per edge in the v0 -> v1 direction.
struct OneForm {
  Eigen::VectorXd edge;

  double along(const SurfaceMesh& mesh, int h) const { return mesh.he_sign(h) * edge[mesh.he_edge(h)]; }
};

struct CanonicalSection {
  Section u;
  OneForm omega;
  Eigen::VectorXd fluxes;
  Configuration config;
  int root = 0;
};

// Cotan Poisson solve L psi = 2 pi sum_j delta_{b_j} - Omega with zero
// area-weighted mean. Throws SolvabilityError when d != |euler number|.
Eigen::VectorXd solve_psi(const DiscreteBundle& bundle, const Configuration& config);

// Unit section with a degree +1 singularity at each configuration vertex.
// The phase is integrated along a BFS tree of the graph with the singular
// vertices removed, starting from root (first admissible vertex when < 0).
// fluxes holds one coefficient per harmonic form of harmonic_basis(bundle).
// Throws InconsistencyError when the fluxes violate the lattice condition.
CanonicalSection canonical_harmonic_section(const DiscreteBundle& bundle, const Configuration& config,
                                            const Eigen::VectorXd& fluxes, int root = -1);
// Same, with a precomputed basis.
CanonicalSection canonical_harmonic_section(const DiscreteBundle& bundle, const Configuration& config,
                                            const Eigen::VectorXd& fluxes, const HarmonicBasis& basis,
                                            int root = -1);

struct FluxCandidate {
  Eigen::VectorXd fluxes;
  Eigen::VectorXi offsets;
  // Phi^T gram Phi.
  double normSquared = 0.0;
};

// All flux vectors gram^{-1} (zeta + 2 pi n) with |n_i| <= window, sorted by
// their gram norm. zeta holds the holonomy defects of the flux-free section
// around the generator loops. Throws NumericalError for an ill-conditioned gram.
std::vector<FluxCandidate> lattice_offsets(const DiscreteBundle& bundle, const Configuration& config,
                                           const HarmonicBasis& basis, int window = 2);

struct RenormalizedEnergy {
  double value = 0.0;
  double errorEstimate = 0.0;
  std::vector<double> radii;
  // Truncated energy plus pi d log(rho) at each radius.
  std::vector<double> levels;
};

// Limit of (1/2) int_{outside balls} |omega|^2 + pi d log(rho) from the radii
// rho0, rho0/2, rho0/4 by first-order Richardson extrapolation. Balls are
// Euclidean. rho0 <= 0 selects a quarter of the smallest pairwise distance.
// Throws GeometryError when rho0 exceeds half of that distance.
RenormalizedEnergy renormalized_energy_limit(const DiscreteBundle& bundle, const CanonicalSection& section,
                                             const Configuration& config, double rho0 = -1.0);

// Dirichlet energy (1/2) sum_e w_e omega_e^2 of the part of the mesh outside
// the Euclidean balls of the given radius about the configuration vertices.
double truncated_dirichlet_energy(const SurfaceMesh& mesh, const OneForm& omega, const Configuration& config,
                                  double radius);

} // namespace glv

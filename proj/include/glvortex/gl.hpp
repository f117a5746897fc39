#pragma once

#include "glvortex/connection.hpp"
#include "glvortex/harmonic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace glv {

// Discrete Ginzburg-Landau energy
//   (1/2) sum_e w_e |u_i - exp(i rho(j -> i)) u_j|^2 + sum_v A_v / (4 eps^2) (1 - |u_v|^2)^2.
double gl_energy(const DiscreteBundle& bundle, const Section& u, double epsilon);

// Gradient with respect to (Re u, Im u), packed as Re + i Im.
Section gl_gradient(const DiscreteBundle& bundle, const Section& u, double epsilon);

struct GLParams {
  // Strictly decreasing continuation values of epsilon.
  std::vector<double> schedule;
  int maxIters = 4000;
  // Stop a stage once the max-norm of the gradient drops below this.
  double gradTol = 1e-7;
  uint64_t seed = 0;
  int restartEvery = 50;
};

// Geometric schedule starting at half the circumradius with ratio 0.56.
std::vector<double> default_schedule(const SurfaceMesh& mesh, int stages = 5, double ratio = 0.56);
// Geometric schedule from start to end inclusive.
std::vector<double> geometric_schedule(double start, double end, int stages);

struct IterationRecord {
  int stage = 0;
  int iter = 0;
  double energy = 0.0;
  double gradNorm = 0.0;
};

struct StageReport {
  double epsilon = 0.0;
  int iterations = 0;
  double energy = 0.0;
  double gradNorm = 0.0;
  bool converged = false;
};

struct MinimizeResult {
  Section u;
  std::vector<StageReport> stages;
  std::vector<IterationRecord> history;
  std::vector<std::string> warnings;
};

// Values uniform in the unit disk.
Section random_section(int n, uint64_t seed);

// Polak-Ribiere nonlinear conjugate gradients with Armijo backtracking per
// stage, warm-started across the schedule. Directions are preconditioned by
// the covariant Laplacian shifted by A_v / (2 eps^2). A random start is drawn from
// params.seed when init is empty. Throws StagnationError when a steepest
// descent step cannot decrease the energy.
MinimizeResult minimize(const DiscreteBundle& bundle, const GLParams& params,
                        const std::optional<Section>& init = std::nullopt);

// Degree-one radial profile f on [0, R], f(0) = 0, sampled on a uniform grid.
struct RadialProfile {
  double radius = 0.0;
  double step = 0.0;
  std::vector<double> values;
  double energy = 0.0;

  // Linear interpolation; the far-field expansion beyond the grid.
  double operator()(double r) const;
};

// Minimizer of pi int (f'^2 + f^2 / r^2 + (1 - f^2)^2 / 2) r dr by Newton's
// method on a uniform grid. Throws NumericalError if Newton fails.
RadialProfile radial_profile(double radius, double step);

// E(R) - pi log R plus the far-field tail, for one grid.
double bbh_gamma_at(double radius, double step);
// Core energy constant of the degree-one vortex: R = 100, grid 0.01 with
// Richardson extrapolation in the grid step.
double bbh_gamma();
// Shared profile (R = 50, step 0.01) used by build_test_section.
const RadialProfile& standard_profile();

// Canonical phase with modulus f(r / eps) inside radius sqrt(eps) of each
// singular vertex, linear in r on [sqrt(eps), 2 sqrt(eps)] up to 1, and 1
// outside. r is the Euclidean distance to the nearest singular vertex.
// Throws GeometryError when the sqrt(eps) balls overlap.
Section build_test_section(const DiscreteBundle& bundle, const CanonicalSection& canonical, double epsilon);

} // namespace glv

#pragma once

#include "glvortex/connection.hpp"
#include "glvortex/harmonic.hpp"
#include "glvortex/poisson.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <vector>

namespace glv {

// -2 pi sum_{i<j} log |a_i - a_j| with chord distances. Throws
// SingularityError for coincident points.
double sphere_W(const std::vector<Vec3>& points);
// Tangential gradient of sphere_W at unit points.
std::vector<Vec3> sphere_W_gradient(const std::vector<Vec3>& points);

// Additive constant of the zero-mean Green function of the unit sphere:
// G(x, y) = -log|x - y| / (2 pi) + c.
double sphere_green_constant();
// sphere_W with zero-mean Green functions, i.e. plus 2 pi^2 c d^2.
double normalized_sphere_W(const std::vector<Vec3>& points);

struct GreenTable {
  int source = -1;
  Eigen::VectorXd values;
  double regularPart = 0.0;
};

// Solves L G = e_s - A / |M| with zero area-weighted mean. The regular part
// is the mean of G + log(r) / (2 pi) over the second and third vertex rings
// around the source; closer vertices carry the discretization error of the
// singularity.
GreenTable discrete_green(const SurfaceMesh& mesh, int source);
// Same with a prefactored cotan Laplacian (area weights).
GreenTable discrete_green(const SurfaceMesh& mesh, const PoissonSolver& laplacian, int source);

// Read-shared cache of Green tables for one mesh; thread-safe.
class GreenCache {
public:
  explicit GreenCache(std::shared_ptr<const SurfaceMesh> mesh);
  std::shared_ptr<const GreenTable> get(int source);
  size_t size() const;
  const SurfaceMesh& mesh() const { return *mesh_; }

private:
  std::shared_ptr<const SurfaceMesh> mesh_;
  PoissonSolver laplacian_;
  mutable std::shared_mutex mutex_;
  std::map<int, std::shared_ptr<const GreenTable>> tables_;
};

struct Psi0 {
  Eigen::VectorXd psi0;
  double energy = 0.0;
};

// L psi0 = -(Omega_v - A_v kbar) with zero area-weighted mean, and its
// Dirichlet energy (1/2) psi0^T L psi0.
Psi0 psi0_and_energy(const DiscreteBundle& bundle);

struct WBreakdown {
  double pairTerm = 0.0;
  double selfTerm = 0.0;
  double psi0Term = 0.0;
  double fluxTerm = 0.0;
  double total = 0.0;
};

// 4 pi^2 sum_{i<j} G(b_i, b_j) + 2 pi^2 sum H(b_i, b_i)
//   + 2 pi sum psi0(b_i) + (1/2) int |d psi0|^2 + (1/2) Phi^T gram Phi.
// Optional cache and precomputed psi0 avoid repeated solves.
WBreakdown general_W(const DiscreteBundle& bundle, const Configuration& config, const Eigen::VectorXd& fluxes,
                     GreenCache* cache = nullptr, const Psi0* psi0 = nullptr);

struct SeedRun {
  uint64_t seed = 0;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<Vec3> points;
};

struct OptimizeResult {
  std::vector<Vec3> points;
  double value = 0.0;
  size_t bestSeed = 0;
  bool converged = false;
  std::vector<SeedRun> runs;
};

struct SphereOptions {
  int seeds = 20;
  uint64_t masterSeed = 1;
  int maxIters = 20000;
  double gradTol = 1e-11;
  int threads = 0; // 0 = hardware concurrency
};

// Projected gradient descent on (S^2)^d with normalize retraction and
// Armijo backtracking, from uniformly random starts.
OptimizeResult optimize_sphere_configuration(int d, const SphereOptions& options = {});

struct MeshOptions {
  int seeds = 4;
  uint64_t masterSeed = 1;
  int maxIters = 2000;
};

struct MeshOptimizeResult {
  Configuration config;
  double value = 0.0;
  bool converged = false;
  std::vector<SeedRun> runs;
};

// Hill descent on the vertex graph: repeatedly moves one point to the best
// neighbouring vertex while the energy decreases.
MeshOptimizeResult optimize_mesh_configuration(const SurfaceMesh& mesh, int d,
                                               const std::function<double(const Configuration&)>& energy,
                                               const MeshOptions& options = {});

} // namespace glv

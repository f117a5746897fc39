#include "glvortex/renorm.hpp"

#include "glvortex/errors.hpp"
#include "glvortex/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <queue>
#include <sstream>
#include <thread>

namespace glv {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Vec3> retract(const std::vector<Vec3>& a, const std::vector<Vec3>& dir, double step) {
  std::vector<Vec3> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = (a[i] + step * dir[i]).normalized();
  return out;
}

double sq_norm(const std::vector<Vec3>& g) {
  double s = 0.0;
  for (const Vec3& v : g) s += v.squaredNorm();
  return s;
}

double max_norm(const std::vector<Vec3>& g) {
  double s = 0.0;
  for (const Vec3& v : g) s = std::max(s, v.norm());
  return s;
}

SeedRun sphere_descent(int d, uint64_t seed, const SphereOptions& options) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01;
  std::vector<Vec3> a(d);
  for (Vec3& p : a) p = Vec3(n01(gen), n01(gen), n01(gen)).normalized();

  SeedRun run;
  run.seed = seed;
  double value = sphere_W(a);
  std::vector<Vec3> g = sphere_W_gradient(a);
  double step = 0.01;
  int it = 0;
  for (; it < options.maxIters; ++it) {
    if (max_norm(g) < options.gradTol) {
      run.converged = true;
      break;
    }
    const double gg = sq_norm(g);
    std::vector<Vec3> dir(d);
    for (int i = 0; i < d; ++i) dir[i] = -g[i];
    bool accepted = false;
    std::vector<Vec3> trial;
    double trialValue = value;
    for (int halving = 0; halving < 60; ++halving) {
      trial = retract(a, dir, step);
      trialValue = sphere_W(trial);
      if (trialValue <= value - 1e-4 * step * gg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Round-off floor reached.
      run.converged = max_norm(g) < 1e3 * options.gradTol;
      break;
    }
    std::vector<Vec3> gNew = sphere_W_gradient(trial);
    // Barzilai-Borwein step for the next iteration.
    double sy = 0.0, ss = 0.0;
    for (int i = 0; i < d; ++i) {
      const Vec3 s = trial[i] - a[i];
      ss += s.squaredNorm();
      sy += s.dot(gNew[i] - g[i]);
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-6, 10.0) : std::min(2.0 * step, 10.0);
    a = std::move(trial);
    value = trialValue;
    g = std::move(gNew);
  }
  run.value = value;
  run.iterations = it;
  run.points = std::move(a);
  return run;
}

template <class Fn> void parallel_for(size_t count, int threads, Fn&& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<size_t>(threads, count));
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (size_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

} // namespace

double sphere_W(const std::vector<Vec3>& points) {
  double s = 0.0;
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j) {
      const double dist = (points[i] - points[j]).norm();
      if (!(dist > 0.0)) throw SingularityError("points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      s += std::log(dist);
    }
  return -2.0 * kPi * s;
}

std::vector<Vec3> sphere_W_gradient(const std::vector<Vec3>& points) {
  const size_t d = points.size();
  std::vector<Vec3> g(d, Vec3::Zero());
  for (size_t i = 0; i < d; ++i)
    for (size_t j = i + 1; j < d; ++j) {
      const Vec3 diff = points[i] - points[j];
      const double r2 = diff.squaredNorm();
      if (!(r2 > 0.0)) throw SingularityError("points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      g[i] -= 2.0 * kPi * diff / r2;
      g[j] += 2.0 * kPi * diff / r2;
    }
  for (size_t i = 0; i < d; ++i) {
    const Vec3 n = points[i].normalized();
    g[i] -= g[i].dot(n) * n;
  }
  return g;
}

double sphere_green_constant() { return (std::log(2.0) - 0.5) / (2.0 * kPi); }

double normalized_sphere_W(const std::vector<Vec3>& points) {
  const double d = static_cast<double>(points.size());
  return sphere_W(points) + 2.0 * kPi * kPi * sphere_green_constant() * d * d;
}

GreenTable discrete_green(const SurfaceMesh& mesh, int source) {
  const PoissonSolver solver(cotan_laplacian(mesh), vertex_areas(mesh));
  return discrete_green(mesh, solver, source);
}

GreenTable discrete_green(const SurfaceMesh& mesh, const PoissonSolver& laplacian, int source) {
  const int n = mesh.num_vertices();
  if (source < 0 || source >= n) throw IndexError("Green source " + std::to_string(source) + " out of range");
  Eigen::VectorXd rhs = -vertex_areas(mesh) / mesh.total_area();
  rhs[source] += 1.0;
  GreenTable table;
  table.source = source;
  table.values = laplacian.solve(rhs, 1e-9);

  // Graph rings around the source.
  std::vector<int> ring(n, -1);
  std::queue<int> q;
  q.push(source);
  ring[source] = 0;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    if (ring[v] >= 3) continue;
    for (int h : mesh.outgoing(v)) {
      const int w = mesh.he_head(h);
      if (ring[w] >= 0) continue;
      ring[w] = ring[v] + 1;
      q.push(w);
    }
  }
  double sum = 0.0;
  int count = 0;
  for (int v = 0; v < n; ++v) {
    if (ring[v] < 2) continue;
    sum += table.values[v] + std::log((mesh.position(v) - mesh.position(source)).norm()) / (2.0 * kPi);
    ++count;
  }
  if (count == 0) throw GeometryError("mesh too small for the ring average");
  table.regularPart = sum / count;
  return table;
}

GreenCache::GreenCache(std::shared_ptr<const SurfaceMesh> mesh)
    : mesh_(std::move(mesh)), laplacian_(cotan_laplacian(*mesh_), vertex_areas(*mesh_)) {}

std::shared_ptr<const GreenTable> GreenCache::get(int source) {
  {
    std::shared_lock lock(mutex_);
    auto it = tables_.find(source);
    if (it != tables_.end()) return it->second;
  }
  auto table = std::make_shared<const GreenTable>(discrete_green(*mesh_, laplacian_, source));
  std::unique_lock lock(mutex_);
  return tables_.try_emplace(source, std::move(table)).first->second;
}

size_t GreenCache::size() const {
  std::shared_lock lock(mutex_);
  return tables_.size();
}

Psi0 psi0_and_energy(const DiscreteBundle& bundle) {
  const SurfaceMesh& m = bundle.mesh();
  const Eigen::VectorXd areas = vertex_areas(m);
  const Eigen::VectorXd kappa = bundle.vertex_curvature();
  const double kbar = kappa.sum() / areas.sum();
  const Eigen::VectorXd rhs = -(kappa - kbar * areas);
  const Eigen::SparseMatrix<double> lap = cotan_laplacian(m);
  const PoissonSolver solver(lap, areas);
  Psi0 out;
  out.psi0 = rhs.norm() > 0.0 ? solver.solve(rhs, 1e-9) : Eigen::VectorXd::Zero(m.num_vertices());
  out.energy = 0.5 * out.psi0.dot(lap * out.psi0);
  return out;
}

WBreakdown general_W(const DiscreteBundle& bundle, const Configuration& config, const Eigen::VectorXd& fluxes,
                     GreenCache* cache, const Psi0* psi0) {
  const SurfaceMesh& m = bundle.mesh();
  if (fluxes.size() != 2 * m.genus()) throw DomainError("flux vector size must be twice the genus");
  std::vector<int> pts = make_configuration(m, config.points).points;
  std::sort(pts.begin(), pts.end());

  std::unique_ptr<GreenCache> local;
  if (!cache || &cache->mesh() != &m) {
    local = std::make_unique<GreenCache>(bundle.mesh_ptr());
    cache = local.get();
  }
  std::vector<std::shared_ptr<const GreenTable>> tables;
  for (int b : pts) tables.push_back(cache->get(b));

  WBreakdown w;
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j)
      w.pairTerm += 0.5 * (tables[i]->values[pts[j]] + tables[j]->values[pts[i]]);
    w.selfTerm += tables[i]->regularPart;
  }
  w.pairTerm *= 4.0 * kPi * kPi;
  w.selfTerm *= 2.0 * kPi * kPi;

  Psi0 ownPsi0;
  if (!psi0) {
    ownPsi0 = psi0_and_energy(bundle);
    psi0 = &ownPsi0;
  }
  for (int b : pts) w.psi0Term += 2.0 * kPi * psi0->psi0[b];
  w.psi0Term += psi0->energy;

  if (fluxes.size() > 0) {
    const HarmonicBasis basis = harmonic_basis(bundle);
    w.fluxTerm = 0.5 * fluxes.dot(basis.gram * fluxes);
  }
  w.total = w.pairTerm + w.selfTerm + w.psi0Term + w.fluxTerm;
  return w;
}

OptimizeResult optimize_sphere_configuration(int d, const SphereOptions& options) {
  if (d < 2) throw DomainError("configuration optimization needs d >= 2, got " + std::to_string(d));
  if (options.seeds < 1) throw DomainError("need at least one seed");
  OptimizeResult result;
  result.runs.resize(options.seeds);
  parallel_for(static_cast<size_t>(options.seeds), options.threads, [&](size_t i) {
    result.runs[i] = sphere_descent(d, derive_seed(options.masterSeed, i), options);
  });
  for (size_t i = 0; i < result.runs.size(); ++i)
    if (i == 0 || result.runs[i].value < result.runs[result.bestSeed].value) result.bestSeed = i;
  const SeedRun& best = result.runs[result.bestSeed];
  result.points = best.points;
  result.value = best.value;
  result.converged = best.converged;
  return result;
}

MeshOptimizeResult optimize_mesh_configuration(const SurfaceMesh& mesh, int d,
                                               const std::function<double(const Configuration&)>& energy,
                                               const MeshOptions& options) {
  if (d < 2) throw DomainError("configuration optimization needs d >= 2, got " + std::to_string(d));
  if (d > mesh.num_vertices()) throw DomainError("more points than vertices");
  if (options.seeds < 1) throw DomainError("need at least one seed");
  MeshOptimizeResult result;
  bool haveBest = false;
  for (int s = 0; s < options.seeds; ++s) {
    std::mt19937_64 gen = stream_engine(options.masterSeed, static_cast<uint64_t>(s));
    std::uniform_int_distribution<int> pick(0, mesh.num_vertices() - 1);
    std::vector<int> pts;
    while (static_cast<int>(pts.size()) < d) {
      const int v = pick(gen);
      if (std::find(pts.begin(), pts.end(), v) == pts.end()) pts.push_back(v);
    }
    Configuration config{pts};
    double value = energy(config);
    SeedRun run;
    run.seed = static_cast<uint64_t>(s);
    int it = 0;
    for (; it < options.maxIters; ++it) {
      double bestValue = value;
      Configuration bestMove;
      for (int i = 0; i < d; ++i)
        for (int h : mesh.outgoing(config.points[i])) {
          const int w = mesh.he_head(h);
          if (std::find(config.points.begin(), config.points.end(), w) != config.points.end()) continue;
          Configuration trial = config;
          trial.points[i] = w;
          const double v = energy(trial);
          if (v < bestValue) {
            bestValue = v;
            bestMove = std::move(trial);
          }
        }
      if (bestMove.points.empty()) {
        run.converged = true;
        break;
      }
      config = std::move(bestMove);
      value = bestValue;
    }
    run.value = value;
    run.iterations = it;
    for (int b : config.points) run.points.push_back(mesh.position(b));
    result.runs.push_back(run);
    if (!haveBest || value < result.value) {
      haveBest = true;
      result.value = value;
      result.config = config;
      result.converged = run.converged;
    }
  }
  return result;
}

} // namespace glv

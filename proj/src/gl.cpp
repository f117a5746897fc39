#include "glvortex/gl.hpp"

#include "glvortex/errors.hpp"
#include "glvortex/rng.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace glv {

namespace {

using cd = std::complex<double>;

double max_abs(const Section& g) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) m = std::max(m, std::abs(g[i]));
  return m;
}

double real_dot(const Section& a, const Section& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return s;
}

void check_section(const DiscreteBundle& bundle, const Section& u, double epsilon) {
  if (u.size() != bundle.mesh().num_vertices()) throw DomainError("section size does not match the mesh");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
}

// Covariant Laplacian plus area / (2 eps^2) on the diagonal, factored once per
// stage and used to precondition the conjugate gradient directions.
class Preconditioner {
public:
  Preconditioner(const DiscreteBundle& bundle, double epsilon) {
    const SurfaceMesh& m = bundle.mesh();
    std::vector<Eigen::Triplet<cd>> trips;
    trips.reserve(4 * m.num_edges() + m.num_vertices());
    for (int e = 0; e < m.num_edges(); ++e) {
      const int i = m.edge(e)[0], j = m.edge(e)[1];
      const double w = m.cotan_weight(e);
      const cd t = std::polar(1.0, -bundle.rho_edge(e));
      trips.emplace_back(i, i, w);
      trips.emplace_back(j, j, w);
      trips.emplace_back(i, j, -w * t);
      trips.emplace_back(j, i, -w * std::conj(t));
    }
    for (int v = 0; v < m.num_vertices(); ++v) trips.emplace_back(v, v, m.vertex_area(v) / (2.0 * epsilon * epsilon));
    Eigen::SparseMatrix<cd> h(m.num_vertices(), m.num_vertices());
    h.setFromTriplets(trips.begin(), trips.end());
    ldlt_.compute(h);
    ok_ = ldlt_.info() == Eigen::Success;
  }

  Section apply(const Section& g) const { return ok_ ? Section(ldlt_.solve(g)) : g; }

private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<cd>> ldlt_;
  bool ok_ = false;
};

// Edge data shared by every energy and gradient evaluation of one bundle.
struct EdgeCache {
  explicit EdgeCache(const DiscreteBundle& bundle) {
    const SurfaceMesh& m = bundle.mesh();
    tail.resize(m.num_edges());
    head.resize(m.num_edges());
    weight.resize(m.num_edges());
    transport.resize(m.num_edges());
    area.resize(m.num_vertices());
    for (int e = 0; e < m.num_edges(); ++e) {
      tail[e] = m.edge(e)[0];
      head[e] = m.edge(e)[1];
      weight[e] = m.cotan_weight(e);
      transport[e] = std::polar(1.0, -bundle.rho_edge(e));
    }
    for (int v = 0; v < m.num_vertices(); ++v) area[v] = m.vertex_area(v);
  }

  double energy(const Section& u, double epsilon) const {
    double dirichlet = 0.0;
    for (size_t e = 0; e < weight.size(); ++e) dirichlet += weight[e] * std::norm(u[tail[e]] - transport[e] * u[head[e]]);
    double potential = 0.0;
    for (size_t v = 0; v < area.size(); ++v) {
      const double t = 1.0 - std::norm(u[v]);
      potential += area[v] * t * t;
    }
    return 0.5 * dirichlet + potential / (4.0 * epsilon * epsilon);
  }

  Section gradient(const Section& u, double epsilon) const {
    Section g = Section::Zero(u.size());
    for (size_t e = 0; e < weight.size(); ++e) {
      const cd diff = weight[e] * (u[tail[e]] - transport[e] * u[head[e]]);
      g[tail[e]] += diff;
      g[head[e]] -= std::conj(transport[e]) * diff;
    }
    const double c = 1.0 / (epsilon * epsilon);
    for (size_t v = 0; v < area.size(); ++v) g[v] -= c * area[v] * (1.0 - std::norm(u[v])) * u[v];
    return g;
  }

  std::vector<int> tail, head;
  std::vector<double> weight, area;
  std::vector<cd> transport;
};

} // namespace

double gl_energy(const DiscreteBundle& bundle, const Section& u, double epsilon) {
  check_section(bundle, u, epsilon);
  return EdgeCache(bundle).energy(u, epsilon);
}

Section gl_gradient(const DiscreteBundle& bundle, const Section& u, double epsilon) {
  check_section(bundle, u, epsilon);
  return EdgeCache(bundle).gradient(u, epsilon);
}

std::vector<double> geometric_schedule(double start, double end, int stages) {
  if (stages < 1 || !(start > 0.0) || !(end > 0.0)) throw DomainError("bad epsilon schedule");
  if (stages == 1) return {end};
  if (!(end < start)) throw DomainError("epsilon schedule must decrease");
  std::vector<double> s(stages);
  const double ratio = std::pow(end / start, 1.0 / (stages - 1));
  for (int i = 0; i < stages; ++i) s[i] = start * std::pow(ratio, i);
  s.back() = end;
  return s;
}

std::vector<double> default_schedule(const SurfaceMesh& mesh, int stages, double ratio) {
  if (stages < 1 || !(ratio > 0.0 && ratio < 1.0)) throw DomainError("bad epsilon schedule");
  std::vector<double> s(stages);
  s[0] = 0.5 * mesh.circumradius();
  for (int i = 1; i < stages; ++i) s[i] = s[i - 1] * ratio;
  return s;
}

Section random_section(int n, uint64_t seed) {
  std::mt19937_64 gen = stream_engine(seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Section u(n);
  for (int v = 0; v < n; ++v) {
    const double r = std::sqrt(unit(gen));
    const double a = 2.0 * std::numbers::pi * unit(gen);
    u[v] = std::polar(r, a);
  }
  return u;
}

MinimizeResult minimize(const DiscreteBundle& bundle, const GLParams& params, const std::optional<Section>& init) {
  const SurfaceMesh& m = bundle.mesh();
  if (params.schedule.empty()) throw DomainError("epsilon schedule is empty");
  for (size_t i = 0; i < params.schedule.size(); ++i) {
    if (!(params.schedule[i] > 0.0)) throw DomainError("epsilon values must be positive");
    if (i > 0 && !(params.schedule[i] < params.schedule[i - 1]))
      throw DomainError("epsilon schedule must be strictly decreasing");
  }
  if (params.maxIters < 1 || !(params.gradTol > 0.0) || params.restartEvery < 1)
    throw DomainError("bad optimizer parameters");

  MinimizeResult result;
  if (params.schedule.back() < m.mean_edge_length()) {
    std::ostringstream msg;
    msg << "final epsilon " << params.schedule.back() << " is below the mean edge length " << m.mean_edge_length()
        << "; vortex cores are not resolved";
    result.warnings.push_back(msg.str());
  }
  result.u = init ? *init : random_section(m.num_vertices(), params.seed);
  if (result.u.size() != m.num_vertices()) throw DomainError("initial section size does not match the mesh");

  Section& u = result.u;
  const EdgeCache edges(bundle);
  for (size_t stage = 0; stage < params.schedule.size(); ++stage) {
    const double eps = params.schedule[stage];
    double energy = edges.energy(u, eps);
    const Preconditioner precond(bundle, eps);
    Section g = edges.gradient(u, eps);
    Section z = precond.apply(g);
    Section p = -z;
    bool steepest = true;
    double gnorm = max_abs(g);
    double alpha = 1.0;
    StageReport report;
    report.epsilon = eps;
    int it = 0;
    for (; it < params.maxIters; ++it) {
      result.history.push_back({static_cast<int>(stage), it, energy, gnorm});
      if (gnorm < params.gradTol) {
        report.converged = true;
        break;
      }
      double slope = real_dot(g, p);
      if (!(slope < 0.0)) {
        p = -z;
        slope = -real_dot(g, z);
        steepest = true;
      }

      // Armijo backtracking; a failed conjugate direction falls back to -g.
      bool accepted = false;
      Section trial;
      double trialEnergy = energy;
      double a = alpha;
      for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
        for (int halving = 0; halving < 60; ++halving) {
          trial = u + a * p;
          trialEnergy = edges.energy(trial, eps);
          if (trialEnergy < energy && trialEnergy <= energy + 1e-4 * a * slope) {
            accepted = true;
            break;
          }
          a *= 0.5;
        }
        if (!accepted && !steepest) {
          p = -z;
          slope = -real_dot(g, z);
          steepest = true;
          a = alpha;
        } else if (!accepted) {
          break;
        }
      }
      if (!accepted) {
        const double predicted = alpha * std::abs(slope);
        if (predicted < 1e-12 * (1.0 + std::abs(energy))) {
          std::ostringstream msg;
          msg << "stage " << stage << " stopped at round-off level, gradient max-norm " << gnorm;
          result.warnings.push_back(msg.str());
          break;
        }
        std::ostringstream msg;
        msg << "line search failed at stage " << stage << " (epsilon " << eps << "), iteration " << it
            << ": energy " << energy << ", gradient max-norm " << gnorm << ", slope " << slope;
        throw StagnationError(msg.str());
      }

      u = std::move(trial);
      energy = trialEnergy;
      Section gNew = edges.gradient(u, eps);
      Section zNew = precond.apply(gNew);
      double beta = 0.0;
      if ((it + 1) % params.restartEvery != 0) beta = std::max(0.0, real_dot(gNew, zNew - z) / real_dot(g, z));
      const double oldSlope = slope;
      p = -zNew + beta * p;
      steepest = beta == 0.0;
      g = std::move(gNew);
      z = std::move(zNew);
      gnorm = max_abs(g);
      const double newSlope = real_dot(g, p);
      alpha = newSlope < 0.0 ? std::min(1e3, a * oldSlope / newSlope) : a;
      alpha = std::max(alpha, 1e-8);
    }
    report.iterations = it;
    report.energy = energy;
    report.gradNorm = gnorm;
    result.stages.push_back(report);
  }
  return result;
}

Section build_test_section(const DiscreteBundle& bundle, const CanonicalSection& canonical, double epsilon) {
  const SurfaceMesh& m = bundle.mesh();
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (canonical.u.size() != m.num_vertices()) throw DomainError("section size does not match the mesh");
  const auto& pts = canonical.config.points;
  const double core = std::sqrt(epsilon);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      const double dist = (m.position(pts[i]) - m.position(pts[j])).norm();
      if (dist < 2.0 * core) {
        std::ostringstream msg;
        msg << "core balls of radius " << core << " overlap (points " << pts[i] << " and " << pts[j] << " at distance "
            << dist << ")";
        throw GeometryError(msg.str());
      }
    }

  const RadialProfile& f = standard_profile();
  const double edge = f(core / epsilon);
  Section out(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) {
    double r = std::numeric_limits<double>::infinity();
    for (int b : pts) r = std::min(r, (m.position(v) - m.position(b)).norm());
    double modulus = 1.0;
    if (r < core)
      modulus = f(r / epsilon);
    else if (r < 2.0 * core)
      modulus = edge + (1.0 - edge) * (r - core) / core;
    const double a = std::abs(canonical.u[v]);
    out[v] = a > 0.0 ? modulus * canonical.u[v] / a : cd(0.0, 0.0);
  }
  return out;
}

} // namespace glv

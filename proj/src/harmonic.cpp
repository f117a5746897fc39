#include "glvortex/harmonic.hpp"

#include "glvortex/dec.hpp"
#include "glvortex/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>

namespace glv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<char> singular_mask(const SurfaceMesh& mesh, const Configuration& config) {
  std::vector<char> mask(mesh.num_vertices(), 0);
  for (int b : config.points) {
    if (b < 0 || b >= mesh.num_vertices()) throw IndexError("configuration vertex " + std::to_string(b) + " out of range");
    mask[b] = 1;
  }
  return mask;
}

void require_degree_match(const DiscreteBundle& bundle, const Configuration& config) {
  if (config.d() != std::abs(bundle.euler_number())) {
    std::ostringstream msg;
    msg << "configuration has " << config.d() << " points but the bundle has Euler number " << bundle.euler_number();
    throw SolvabilityError(msg.str());
  }
}

// Co-exact part of omega: its curl is -Omega_f plus the 2 pi of each singular
// vertex spread over its star in proportion to the corner angles.
Eigen::VectorXd base_form(const DiscreteBundle& bundle, const Configuration& config) {
  const SurfaceMesh& m = bundle.mesh();
  const auto mask = singular_mask(m, config);
  Eigen::VectorXd curl(m.num_faces());
  for (int f = 0; f < m.num_faces(); ++f) curl[f] = -bundle.face_curvature(f);
  for (int b : config.points) {
    double total = 0.0;
    for (int h : m.outgoing(b)) total += m.corner_angle(h);
    for (int h : m.outgoing(b)) curl[m.he_face(h)] += kTwoPi * m.corner_angle(h) / total;
  }
  if (std::abs(curl.sum()) < 1e-9 * (1.0 + curl.cwiseAbs().sum())) curl.array() -= curl.mean();
  const PoissonSolver solver = face_poisson_solver(m);
  return coexact_form(m, solver.solve(curl, 1e-9));
}

struct PhaseField {
  Eigen::VectorXd theta;
  std::vector<char> treeEdge;
  int root = 0;
};

PhaseField integrate_phase(const DiscreteBundle& bundle, const std::vector<char>& singular,
                           const Eigen::VectorXd& omega, int root) {
  const SurfaceMesh& m = bundle.mesh();
  const int n = m.num_vertices();
  if (root < 0) {
    root = 0;
    while (root < n && singular[root]) ++root;
  }
  if (root >= n || singular[root]) throw DomainError("phase root must be a non-singular vertex");

  PhaseField out;
  out.root = root;
  out.theta = Eigen::VectorXd::Zero(n);
  out.treeEdge.assign(m.num_edges(), 0);
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(root);
  seen[root] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int h : m.outgoing(v)) {
      const int w = m.he_head(h);
      if (seen[w] || singular[w]) continue;
      seen[w] = 1;
      ++reached;
      out.treeEdge[m.he_edge(h)] = 1;
      out.theta[w] = out.theta[v] + bundle.rho_halfedge(h) + m.he_sign(h) * omega[m.he_edge(h)];
      q.push(w);
    }
  }
  int admissible = 0;
  for (int v = 0; v < n; ++v) admissible += singular[v] ? 0 : 1;
  if (reached != admissible) throw GeometryError("singular vertices disconnect the mesh");
  return out;
}

// Walks a closed loop around singular vertices along their links.
std::vector<int> reroute_loop(const SurfaceMesh& m, const std::vector<char>& singular, std::vector<int> loop) {
  loop.pop_back();
  for (int guard = 0; guard < 4 * m.num_vertices(); ++guard) {
    auto it = std::find_if(loop.begin(), loop.end(), [&](int v) { return singular[v] != 0; });
    if (it == loop.end()) break;
    const size_t p = static_cast<size_t>(it - loop.begin());
    const size_t len = loop.size();
    const int b = loop[p];
    const int a = loop[(p + len - 1) % len];
    const int c = loop[(p + 1) % len];
    if (singular[a] || singular[c]) throw GeometryError("generator loop passes through adjacent singular vertices");

    std::vector<int> link;
    for (int h : m.outgoing(b)) link.push_back(m.he_head(h));
    const size_t ia = std::find(link.begin(), link.end(), a) - link.begin();
    const size_t ic = std::find(link.begin(), link.end(), c) - link.begin();
    std::vector<int> path;
    for (size_t i = ia;; i = (i + 1) % link.size()) {
      path.push_back(link[i]);
      if (i == ic) break;
    }
    for (size_t i = 1; i + 1 < path.size(); ++i)
      if (singular[path[i]]) throw GeometryError("link of a singular vertex contains another singular vertex");

    // Rotate so b sits at index 1, then splice the inner path between a and c.
    std::rotate(loop.begin(), loop.begin() + static_cast<long>((p + len - 1) % len), loop.end());
    std::vector<int> next;
    if (a != c) {
      next.push_back(a);
      next.insert(next.end(), path.begin() + 1, path.end() - 1);
    }
    next.insert(next.end(), loop.begin() + 2, loop.end());
    if (next.empty()) next.push_back(a);
    loop = std::move(next);
  }
  loop.push_back(loop.front());
  return loop;
}

void check_flux_size(const SurfaceMesh& m, const Eigen::VectorXd& fluxes) {
  if (fluxes.size() != 2 * m.genus()) {
    std::ostringstream msg;
    msg << "expected " << 2 * m.genus() << " flux coefficients, got " << fluxes.size();
    throw DomainError(msg.str());
  }
}

double point_to_ball_fraction(const Vec3& p0, const Vec3& p1, const Vec3& p2, const std::vector<Vec3>& centers,
                              double radius) {
  const Vec3 centroid = (p0 + p1 + p2) / 3.0;
  const double reach = std::max({(p0 - centroid).norm(), (p1 - centroid).norm(), (p2 - centroid).norm()});
  bool near = false;
  for (const Vec3& c : centers)
    if ((c - centroid).norm() < radius + reach) near = true;
  if (!near) return 1.0;

  constexpr int N = 16;
  int outside = 0;
  auto test = [&](double s, double t) {
    const Vec3 x = p0 + s * (p1 - p0) + t * (p2 - p0);
    for (const Vec3& c : centers)
      if ((x - c).norm() < radius) return;
    ++outside;
  };
  for (int i = 0; i < N; ++i)
    for (int j = 0; i + j < N; ++j) {
      test((i + 1.0 / 3.0) / N, (j + 1.0 / 3.0) / N);
      if (i + j + 1 < N) test((i + 2.0 / 3.0) / N, (j + 2.0 / 3.0) / N);
    }
  return static_cast<double>(outside) / (N * N);
}

} // namespace

Configuration make_configuration(const SurfaceMesh& mesh, std::vector<int> vertices) {
  std::set<int> seen;
  for (int v : vertices) {
    if (v < 0 || v >= mesh.num_vertices()) throw IndexError("configuration vertex " + std::to_string(v) + " out of range");
    if (!seen.insert(v).second) throw GeometryError("configuration repeats vertex " + std::to_string(v));
  }
  return Configuration{std::move(vertices)};
}

Configuration snap_configuration(const SurfaceMesh& mesh, const std::vector<Vec3>& points) {
  std::vector<int> verts;
  for (const Vec3& p : points) {
    int best = 0;
    double bestDist = std::numeric_limits<double>::infinity();
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const double dist = (mesh.position(v) - p).squaredNorm();
      if (dist < bestDist) {
        bestDist = dist;
        best = v;
      }
    }
    verts.push_back(best);
  }
  return make_configuration(mesh, std::move(verts));
}

Eigen::VectorXd solve_psi(const DiscreteBundle& bundle, const Configuration& config) {
  const SurfaceMesh& m = bundle.mesh();
  require_degree_match(bundle, config);
  singular_mask(m, config);
  Eigen::VectorXd rhs = -bundle.vertex_curvature();
  for (int b : config.points) rhs[b] += kTwoPi;
  const PoissonSolver solver(cotan_laplacian(m), vertex_areas(m));
  return solver.solve(rhs, 1e-10);
}

CanonicalSection canonical_harmonic_section(const DiscreteBundle& bundle, const Configuration& config,
                                            const Eigen::VectorXd& fluxes, int root) {
  check_flux_size(bundle.mesh(), fluxes);
  if (fluxes.size() == 0) return canonical_harmonic_section(bundle, config, fluxes, HarmonicBasis{}, root);
  return canonical_harmonic_section(bundle, config, fluxes, harmonic_basis(bundle), root);
}

CanonicalSection canonical_harmonic_section(const DiscreteBundle& bundle, const Configuration& config,
                                            const Eigen::VectorXd& fluxes, const HarmonicBasis& basis, int root) {
  const SurfaceMesh& m = bundle.mesh();
  require_degree_match(bundle, config);
  check_flux_size(m, fluxes);
  if (static_cast<Eigen::Index>(basis.forms.size()) != fluxes.size())
    throw DomainError("harmonic basis does not match the flux vector");
  const auto singular = singular_mask(m, config);

  Eigen::VectorXd omega = base_form(bundle, config);
  for (Eigen::Index k = 0; k < fluxes.size(); ++k) omega += fluxes[k] * basis.forms[k];

  const PhaseField phase = integrate_phase(bundle, singular, omega, root);

  double worst = 0.0;
  int worstEdge = -1;
  for (int e = 0; e < m.num_edges(); ++e) {
    const int i = m.edge(e)[0], j = m.edge(e)[1];
    if (singular[i] || singular[j]) continue;
    const double r = std::abs(wrap_angle(phase.theta[j] - phase.theta[i] - bundle.rho_edge(e) - omega[e]));
    if (r > worst) {
      worst = r;
      worstEdge = e;
    }
  }
  if (worst > 1e-6) {
    std::ostringstream msg;
    msg << "flux vector violates the lattice condition: holonomy defect " << worst << " rad on edge ("
        << m.edge(worstEdge)[0] << ", " << m.edge(worstEdge)[1] << ")";
    throw InconsistencyError(msg.str());
  }

  CanonicalSection out;
  out.u = Section(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) out.u[v] = singular[v] ? 0.0 : std::polar(1.0, phase.theta[v]);
  out.omega.edge = std::move(omega);
  out.fluxes = fluxes;
  out.config = config;
  out.root = phase.root;
  return out;
}

std::vector<FluxCandidate> lattice_offsets(const DiscreteBundle& bundle, const Configuration& config,
                                           const HarmonicBasis& basis, int window) {
  const SurfaceMesh& m = bundle.mesh();
  if (m.genus() < 1) throw DomainError("flux lattice needs genus >= 1");
  if (window < 0) throw DomainError("window must be nonnegative");
  require_degree_match(bundle, config);
  const int n = static_cast<int>(basis.forms.size());
  if (n != 2 * m.genus() || basis.gram.rows() != n) throw DomainError("harmonic basis does not match the mesh");

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.gram);
  const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
  if (!(cond < 1e12)) {
    std::ostringstream msg;
    msg << "gram matrix is ill-conditioned (condition number " << cond << ")";
    throw NumericalError(msg.str());
  }

  const auto singular = singular_mask(m, config);
  const Eigen::VectorXd omega = base_form(bundle, config);
  const PhaseField phase = integrate_phase(bundle, singular, omega, -1);

  Eigen::VectorXd zeta(n);
  for (int k = 0; k < n; ++k) {
    const auto loop = reroute_loop(m, singular, basis.generators[k]);
    double s = 0.0;
    for (size_t p = 0; p + 1 < loop.size(); ++p) {
      const int i = loop[p], j = loop[p + 1];
      const int h = m.find_halfedge(i, j);
      s += wrap_angle(phase.theta[j] - phase.theta[i] - bundle.rho_halfedge(h) - m.he_sign(h) * omega[m.he_edge(h)]);
    }
    zeta[k] = s;
  }

  const Eigen::LDLT<Eigen::MatrixXd> gramSolver(basis.gram);
  std::vector<FluxCandidate> out;
  Eigen::VectorXi offsets = Eigen::VectorXi::Constant(n, -window);
  while (true) {
    FluxCandidate c;
    c.offsets = offsets;
    c.fluxes = gramSolver.solve(zeta + kTwoPi * offsets.cast<double>());
    c.normSquared = c.fluxes.dot(basis.gram * c.fluxes);
    out.push_back(std::move(c));
    int k = 0;
    while (k < n && offsets[k] == window) offsets[k++] = -window;
    if (k == n) break;
    ++offsets[k];
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FluxCandidate& a, const FluxCandidate& b) { return a.normSquared < b.normSquared; });
  return out;
}

double truncated_dirichlet_energy(const SurfaceMesh& mesh, const OneForm& omega, const Configuration& config,
                                  double radius) {
  std::vector<Vec3> centers;
  for (int b : config.points) centers.push_back(mesh.position(b));
  double energy = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    double faceEnergy = 0.0;
    for (int c = 0; c < 3; ++c) {
      const int h = 3 * f + c;
      const double opposite = mesh.corner_angle(mesh.he_prev(h));
      const double w = omega.edge[mesh.he_edge(h)];
      faceEnergy += 0.25 * (std::cos(opposite) / std::sin(opposite)) * w * w;
    }
    if (radius > 0.0 && !centers.empty()) {
      const auto& t = mesh.face(f);
      faceEnergy *= point_to_ball_fraction(mesh.position(t[0]), mesh.position(t[1]), mesh.position(t[2]), centers, radius);
    }
    energy += faceEnergy;
  }
  return energy;
}

RenormalizedEnergy renormalized_energy_limit(const DiscreteBundle& bundle, const CanonicalSection& section,
                                             const Configuration& config, double rho0) {
  const SurfaceMesh& m = bundle.mesh();
  if (section.omega.edge.size() != m.num_edges()) throw DomainError("section does not match the bundle mesh");
  const int d = config.d();
  RenormalizedEnergy out;
  if (d == 0) {
    out.value = truncated_dirichlet_energy(m, section.omega, config, 0.0);
    out.radii = {0.0};
    out.levels = {out.value};
    return out;
  }

  double minDist = 2.0 * m.circumradius();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      minDist = std::min(minDist, (m.position(config.points[i]) - m.position(config.points[j])).norm());
  if (rho0 <= 0.0) rho0 = 0.25 * minDist;
  if (rho0 > 0.5 * minDist) {
    std::ostringstream msg;
    msg << "balls of radius " << rho0 << " overlap (smallest point distance " << minDist << ")";
    throw GeometryError(msg.str());
  }

  for (double rho : {rho0, rho0 / 2.0, rho0 / 4.0}) {
    out.radii.push_back(rho);
    out.levels.push_back(truncated_dirichlet_energy(m, section.omega, config, rho) +
                         std::numbers::pi * d * std::log(rho));
  }
  const double r1 = 2.0 * out.levels[1] - out.levels[0];
  const double r2 = 2.0 * out.levels[2] - out.levels[1];
  out.value = r2;
  out.errorEstimate = std::abs(r2 - r1);
  return out;
}

} // namespace glv

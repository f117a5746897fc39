#include "glvortex/connection.hpp"
#include "glvortex/errors.hpp"
#include "glvortex/gl.hpp"
#include "glvortex/harmonic.hpp"
#include "glvortex/renorm.hpp"
#include "glvortex/vortex.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>
#include <queue>
#include <random>

using namespace glv;

namespace {

// Energy evaluated edge by edge through transport().
double energy_oracle(const DiscreteBundle& b, const Section& u, double eps, const std::vector<bool>* onlyEdgesIn = nullptr) {
  const SurfaceMesh& m = b.mesh();
  double e = 0.0;
  for (int k = 0; k < m.num_edges(); ++k) {
    const auto [i, j] = m.edge(k);
    if (onlyEdgesIn && !((*onlyEdgesIn)[i] && (*onlyEdgesIn)[j])) continue;
    e += 0.5 * m.cotan_weight(k) * std::norm(u[j] - transport(b, i, j, u[i]));
  }
  if (onlyEdgesIn) return e;
  for (int v = 0; v < m.num_vertices(); ++v) {
    const double s = 1.0 - std::norm(u[v]);
    e += m.vertex_area(v) / (4.0 * eps * eps) * s * s;
  }
  return e;
}

// Unit section obtained by transporting 1 from a seed vertex through the
// patch; covariantly constant when the patch is flat.
Section transported_constant(const DiscreteBundle& b, const std::vector<bool>& patch) {
  const SurfaceMesh& m = b.mesh();
  Section u = Section::Ones(m.num_vertices());
  std::vector<bool> seen(m.num_vertices(), false);
  int seed = 0;
  while (!patch[seed]) ++seed;
  std::queue<int> q;
  q.push(seed);
  seen[seed] = true;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int h : m.outgoing(v)) {
      const int w = m.he_head(h);
      if (!patch[w] || seen[w]) continue;
      u[w] = transport(b, v, w, u[v]);
      seen[w] = true;
      q.push(w);
    }
  }
  return u;
}

double directional_fd(const DiscreteBundle& b, const Section& u, const Section& dir, double eps, double h) {
  return (gl_energy(b, u + h * dir, eps) - gl_energy(b, u - h * dir, eps)) / (2.0 * h);
}

double directional_grad(const Section& g, const Section& dir) {
  double s = 0.0;
  for (Eigen::Index v = 0; v < g.size(); ++v) s += g[v].real() * dir[v].real() + g[v].imag() * dir[v].imag();
  return s;
}

Configuration tetra_config(const SurfaceMesh& m) {
  return snap_configuration(m, reference_polyhedron("tetrahedron").vertices);
}

} // namespace

TEST_CASE("energy of the zero section is the potential only") {
  auto mesh = testutil::share(build_icosphere(3));
  const DiscreteBundle b = levi_civita_connection(mesh, 2);
  for (double eps : {0.1, 0.5}) {
    const double e = gl_energy(b, Section::Zero(mesh->num_vertices()), eps);
    CHECK(e == doctest::Approx(mesh->total_area() / (4.0 * eps * eps)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(gl_energy(b, Section::Zero(3), 0.1), DomainError);
  CHECK_THROWS_AS(gl_energy(b, Section::Zero(mesh->num_vertices()), 0.0), DomainError);
}

TEST_CASE("energy matches the edge-by-edge transport formula") {
  auto mesh = testutil::share(build_icosphere(2));
  const DiscreteBundle b = levi_civita_connection(mesh, 3);
  const Section u = random_section(mesh->num_vertices(), 77);
  CHECK(gl_energy(b, u, 0.3) == doctest::Approx(energy_oracle(b, u, 0.3)).epsilon(1e-12));
}

TEST_CASE("covariantly constant section on a flat patch") {
  auto mesh = testutil::share(testutil::build_cube(6));
  const auto patch = testutil::cube_top_interior(*mesh);
  const DiscreteBundle b = levi_civita_connection(mesh, 2);
  const Section u = transported_constant(b, patch);

  CHECK(energy_oracle(b, u, 0.1, &patch) < 1e-24);
  CHECK(gl_energy(b, u, 0.1) == doctest::Approx(energy_oracle(b, u, 0.1)).epsilon(1e-12));

  const Section g = gl_gradient(b, u, 0.1);
  int interior = 0;
  for (int v = 0; v < mesh->num_vertices(); ++v) {
    if (!patch[v]) continue;
    bool allIn = true;
    for (int h : mesh->outgoing(v)) allIn = allIn && patch[mesh->he_head(h)];
    if (!allIn) continue;
    ++interior;
    CHECK(std::abs(g[v]) < 1e-12);
  }
  CHECK(interior == 9);

  // No vortices inside the patch.
  const VortexSet vs = detect_vortices(b, u);
  for (const Vortex& x : vs.items) {
    const auto& t = mesh->face(x.face);
    CHECK_FALSE((patch[t[0]] && patch[t[1]] && patch[t[2]]));
  }
  CHECK(vs.totalDegree == b.euler_number());
}

TEST_CASE("gradient against central differences") {
  auto mesh = testutil::share(build_icosphere(2));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + trial % 3;
    const DiscreteBundle b = levi_civita_connection(mesh, k);
    const double eps = 0.2 + 0.3 * std::abs(unif(rng));
    Section u(mesh->num_vertices()), dir(mesh->num_vertices());
    for (auto& z : u) z = {unif(rng), unif(rng)};
    for (auto& z : dir) z = {unif(rng), unif(rng)};
    const double fd = directional_fd(b, u, dir, eps, 1e-5);
    const double an = directional_grad(gl_gradient(b, u, eps), dir);
    worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("gradient is phase equivariant and energy is gauge invariant") {
  auto mesh = testutil::share(build_icosphere(2));
  const DiscreteBundle b = levi_civita_connection(mesh, 2);
  const Section u = random_section(mesh->num_vertices(), 5);
  const std::complex<double> ph = std::polar(1.0, 0.9);
  const Section g = gl_gradient(b, u, 0.3);
  const Section g2 = gl_gradient(b, ph * u, 0.3);
  CHECK((g2 - ph * g).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(gl_energy(b, ph * u, 0.3) == doctest::Approx(gl_energy(b, u, 0.3)).epsilon(1e-13));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> a(-std::numbers::pi, std::numbers::pi);
  std::vector<double> beta(mesh->num_vertices());
  for (double& x : beta) x = a(rng);
  const DiscreteBundle gb = gauge_transform(b, beta);
  const Section gu = gauge_transform_section(b, u, beta);
  CHECK(std::abs(gl_energy(gb, gu, 0.3) - gl_energy(b, u, 0.3)) < 1e-12);
}

TEST_CASE("schedules") {
  const SurfaceMesh m = build_icosphere(2);
  const auto s = default_schedule(m);
  REQUIRE(s.size() == 5);
  CHECK(s[0] == doctest::Approx(0.5 * m.circumradius()));
  for (size_t i = 1; i < s.size(); ++i) CHECK(s[i] == doctest::Approx(0.56 * s[i - 1]));
  const auto g = geometric_schedule(0.5, 0.05, 5);
  CHECK(g.front() == 0.5);
  CHECK(g.back() == 0.05);
  CHECK_THROWS_AS(geometric_schedule(0.05, 0.5, 3), DomainError);
  CHECK_THROWS_AS(geometric_schedule(0.5, -1.0, 3), DomainError);
}

TEST_CASE("random sections") {
  const Section a = random_section(1000, 3);
  const Section b = random_section(1000, 3);
  CHECK(a == b);
  CHECK(a.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(random_section(1000, 4) != a);
}

TEST_CASE("minimizer basics") {
  auto mesh = testutil::share(build_icosphere(3));
  const DiscreteBundle b = levi_civita_connection(mesh, 2);
  GLParams p;
  p.schedule = geometric_schedule(0.5, 0.2, 3);
  p.gradTol = 1e-5;
  p.maxIters = 1000;
  p.seed = 42;

  const MinimizeResult r1 = minimize(b, p);
  const MinimizeResult r2 = minimize(b, p);
  REQUIRE(r1.history.size() == r2.history.size());
  for (size_t i = 0; i < r1.history.size(); ++i) {
    CHECK(r1.history[i].energy == r2.history[i].energy);
    CHECK(r1.history[i].gradNorm == r2.history[i].gradNorm);
  }
  CHECK(r1.u == r2.u);

  // Accepted steps decrease the energy within each stage.
  for (size_t i = 1; i < r1.history.size(); ++i)
    if (r1.history[i].stage == r1.history[i - 1].stage) CHECK(r1.history[i].energy < r1.history[i - 1].energy);

  CHECK(r1.stages.size() == 3);
  CHECK(r1.stages.back().energy == doctest::Approx(gl_energy(b, r1.u, 0.2)).epsilon(1e-12));
  CHECK(r1.warnings.empty());

  SUBCASE("warm start from a given section") {
    GLParams q = p;
    q.schedule = {0.2};
    const MinimizeResult r3 = minimize(b, q, r1.u);
    CHECK(r3.stages.back().energy <= r1.stages.back().energy + 1e-9);
  }
  SUBCASE("bad parameters") {
    GLParams q = p;
    q.schedule = {0.1, 0.2};
    CHECK_THROWS_AS(minimize(b, q), DomainError);
    q.schedule = {};
    CHECK_THROWS_AS(minimize(b, q), DomainError);
  }
  SUBCASE("small epsilon warns") {
    GLParams q = p;
    q.schedule = {0.5, 0.05};
    q.maxIters = 5;
    const MinimizeResult r = minimize(b, q);
    CHECK_FALSE(r.warnings.empty());
  }
}

TEST_CASE("total degree of minimizers over ten seeds") {
  auto mesh = testutil::share(build_icosphere(3));
  const DiscreteBundle b = levi_civita_connection(mesh, 2);
  GLParams p;
  p.schedule = geometric_schedule(0.5, 0.2, 3);
  p.gradTol = 1e-5;
  for (uint64_t s = 0; s < 10; ++s) {
    p.seed = s;
    const MinimizeResult r = minimize(b, p);
    CHECK(detect_vortices(b, r.u).totalDegree == 4);
  }
}

TEST_CASE("minimizer on icosphere(5) has four vortices") {
  auto mesh = testutil::share(build_icosphere(5));
  const DiscreteBundle b = levi_civita_connection(mesh, 2);
  GLParams p;
  p.schedule = geometric_schedule(0.5, 0.05, 5);
  p.gradTol = 1e-5;
  p.maxIters = 1000;
  p.seed = 1;
  const MinimizeResult r = minimize(b, p);
  const VortexSet vs = detect_vortices(b, r.u);
  CHECK(vs.items.size() == 4);
  CHECK(vs.totalDegree == 4);
  for (const Vortex& x : vs.items) CHECK(x.degree == 1);

  // Energy within 10% of pi d log(1/eps) + d gamma + W.
  const int d = 4;
  const double eps = p.schedule.back();
  const Configuration config = tetra_config(*mesh);
  std::vector<Vec3> pts;
  for (int v : config.points) pts.push_back(mesh->position(v));
  const double target = std::numbers::pi * d * std::log(1.0 / eps) + d * bbh_gamma() + normalized_sphere_W(pts);
  CHECK(std::abs(r.stages.back().energy - target) / target < 0.10);
}

TEST_CASE("torus minimizer stays bounded as epsilon decreases") {
  auto mesh = testutil::share(build_torus(1.0, 0.4, 40, 16));
  const DiscreteBundle b = levi_civita_connection(mesh, 1);
  GLParams p;
  p.schedule = geometric_schedule(0.4, 0.1, 3);
  p.gradTol = 1e-6;
  p.seed = 3;
  const MinimizeResult r = minimize(b, p);
  CHECK(detect_vortices(b, r.u).totalDegree == 0);
  // A log divergence would add about 2 pi log 2 per halving per vortex pair.
  const double first = r.stages.front().energy;
  const double last = r.stages.back().energy;
  CHECK(last < first + 2.0 * std::numbers::pi * std::log(2.0));
  // Started from the best unit harmonic section, the minimizer only lowers its energy
  // and keeps it free of vortices.
  const HarmonicBasis basis = harmonic_basis(b);
  const auto cand = lattice_offsets(b, Configuration{}, basis, 1);
  const CanonicalSection cs = canonical_harmonic_section(b, Configuration{}, cand.front().fluxes, basis);
  GLParams q = p;
  q.schedule = {0.1};
  const MinimizeResult warm = minimize(b, q, cs.u);
  CHECK(warm.stages.back().energy <= gl_energy(b, cs.u, 0.1) + 1e-12);
  CHECK(detect_vortices(b, warm.u).items.empty());
}

TEST_CASE("radial profile and core constant") {
  const RadialProfile& f = standard_profile();
  CHECK(f(0.0) == 0.0);
  for (size_t i = 1; i < f.values.size(); ++i) CHECK(f.values[i] > f.values[i - 1]);
  CHECK(f.values.back() < 1.0);
  // Far field 1 - 1 / (2 r^2).
  CHECK(std::abs(f(50.0) - (1.0 - 1.0 / 5000.0)) < 1e-5);
  CHECK(f(1e6) == doctest::Approx(1.0));

  const double g50 = bbh_gamma_at(50.0, 0.01);
  const double g100 = bbh_gamma_at(100.0, 0.01);
  CHECK(std::abs(g50 - g100) < 1e-6);
  const double gamma = bbh_gamma();
  CHECK(gamma > 0.0);
  // Independent collocation solve of the same boundary value problem.
  CHECK(std::abs(gamma - 1.1965757) < 1e-6);
  CHECK_THROWS_AS(radial_profile(0.5, 0.01), DomainError);
}

TEST_CASE("test section") {
  auto mesh = testutil::share(build_icosphere(4));
  const DiscreteBundle b = levi_civita_connection(mesh, 2);
  const Configuration config = tetra_config(*mesh);
  const CanonicalSection cs = canonical_harmonic_section(b, config, Eigen::VectorXd());
  const double eps = 0.05;
  const Section u = build_test_section(b, cs, eps);
  for (int v = 0; v < mesh->num_vertices(); ++v) {
    double r = 1e9;
    for (int p : config.points) r = std::min(r, (mesh->position(v) - mesh->position(p)).norm());
    if (r > 2.0 * std::sqrt(eps)) CHECK(std::abs(std::abs(u[v]) - 1.0) < 1e-14);
    else CHECK(std::abs(u[v]) <= 1.0 + 1e-14);
    if (r > 0.0) CHECK(std::abs(std::arg(u[v] / cs.u[v])) < 1e-12);
  }
  for (int p : config.points) CHECK(std::abs(u[p]) == 0.0);
  // Balls of radius sqrt(0.9) around tetrahedron vertices overlap.
  CHECK_THROWS_AS(build_test_section(b, cs, 0.9), GeometryError);
}

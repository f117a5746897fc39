#include "glvortex/errors.hpp"
#include "glvortex/mesh.hpp"
#include "support.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <doctest.h>

#include <numbers>

using namespace glv;

namespace {

double gauss_bonnet_gap(const SurfaceMesh& m) {
  double s = 0.0;
  for (int v = 0; v < m.num_vertices(); ++v) s += m.angle_defect(v);
  return std::abs(s - 2.0 * std::numbers::pi * (2 - 2 * m.genus()));
}

// Smallest nonzero eigenvalue of L x = lambda M x by shifted inverse
// iteration with the constants projected out.
double first_eigenvalue_sparse(const SurfaceMesh& m) {
  const Eigen::SparseMatrix<double> L = cotan_laplacian(m);
  const Eigen::VectorXd area = vertex_areas(m);
  Eigen::SparseMatrix<double> A = L;
  for (int v = 0; v < m.num_vertices(); ++v) A.coeffRef(v, v) += area[v];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  REQUIRE(solver.info() == Eigen::Success);
  Eigen::VectorXd x(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) x[v] = m.position(v).z() + 0.3 * m.position(v).x() + 0.1 * std::sin(7.0 * v);
  for (int it = 0; it < 200; ++it) {
    x.array() -= area.dot(x) / area.sum();
    const Eigen::VectorXd rhs = area.cwiseProduct(x);
    x = solver.solve(rhs);
    x /= std::sqrt(x.dot(area.asDiagonal() * x));
  }
  x.array() -= area.dot(x) / area.sum();
  return x.dot(L * x) / x.dot(area.asDiagonal() * x);
}

double first_eigenvalue_dense(const SurfaceMesh& m) {
  const Eigen::MatrixXd L = Eigen::MatrixXd(cotan_laplacian(m));
  const Eigen::MatrixXd M = vertex_areas(m).asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(L, M);
  REQUIRE(es.info() == Eigen::Success);
  return es.eigenvalues()[1];
}

} // namespace

TEST_CASE("icosphere combinatorics") {
  const SurfaceMesh m0 = build_icosphere(0);
  CHECK(m0.num_vertices() == 12);
  CHECK(m0.num_faces() == 20);
  CHECK(m0.num_edges() == 30);
  const SurfaceMesh m1 = build_icosphere(1);
  CHECK(m1.num_vertices() == 42);
  CHECK(m1.num_faces() == 80);
  CHECK(m1.num_edges() == 120);
  for (int s = 0; s <= 4; ++s) {
    const SurfaceMesh m = build_icosphere(s);
    CHECK(m.num_vertices() == 10 * (1 << (2 * s)) + 2);
    CHECK(m.genus() == 0);
    for (const Vec3& p : m.positions()) CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(build_icosphere(-1), DomainError);
}

TEST_CASE("icosphere(3) area is close to the sphere") {
  const SurfaceMesh m = build_icosphere(3);
  double area = 0.0;
  for (int f = 0; f < m.num_faces(); ++f) {
    const auto& t = m.face(f);
    area += 0.5 * (m.position(t[1]) - m.position(t[0])).cross(m.position(t[2]) - m.position(t[0])).norm();
  }
  CHECK(area == doctest::Approx(m.total_area()).epsilon(1e-12));
  CHECK(std::abs(area - 4.0 * std::numbers::pi) / (4.0 * std::numbers::pi) < 0.01);
}

TEST_CASE("load torus OBJ") {
  const SurfaceMesh m = load_mesh(testutil::data_path("torus.obj"));
  CHECK(m.num_vertices() == 96);
  CHECK(m.euler_characteristic() == 0);
  CHECK(m.genus() == 1);
  CHECK(gauss_bonnet_gap(m) < 1e-9);
}

TEST_CASE("OBJ with a boundary names the edge") {
  try {
    load_mesh(testutil::data_path("open_tetra.obj"));
    FAIL("expected a boundary error");
  } catch (const BoundaryEdgeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("boundary edge") != std::string::npos);
    const bool named = msg.find("(0, 2)") != std::string::npos || msg.find("(2, 3)") != std::string::npos ||
                       msg.find("(0, 3)") != std::string::npos;
    CHECK(named);
  }
}

TEST_CASE("icosahedron OBJ matches icosphere(0)") {
  const SurfaceMesh a = load_mesh(testutil::data_path("icosahedron.obj"));
  const SurfaceMesh b = build_icosphere(0);
  CHECK(a.num_vertices() == b.num_vertices());
  CHECK(a.num_edges() == b.num_edges());
  CHECK(a.num_faces() == b.num_faces());
  CHECK(a.genus() == b.genus());
  CHECK(a.total_area() == doctest::Approx(b.total_area()).epsilon(1e-12));
  CHECK(a.mean_edge_length() == doctest::Approx(b.mean_edge_length()).epsilon(1e-12));
  for (int v = 0; v < a.num_vertices(); ++v) {
    CHECK(a.angle_defect(v) == doctest::Approx(4.0 * std::numbers::pi / 12.0).epsilon(1e-12));
    CHECK(a.degree(v) == 5);
  }
}

TEST_CASE("mesh validation errors") {
  std::vector<Vec3> p{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  // Consistent tetrahedron for reference.
  CHECK_NOTHROW(SurfaceMesh::from_triangles(p, {{{0, 2, 1}}, {{0, 1, 3}}, {{1, 2, 3}}, {{0, 3, 2}}}));
  CHECK_THROWS_AS(SurfaceMesh::from_triangles(p, {{{0, 2, 1}}, {{0, 1, 3}}, {{1, 2, 3}}}), BoundaryEdgeError);
  CHECK_THROWS_AS(SurfaceMesh::from_triangles(p, {{{0, 1, 2}}, {{0, 1, 3}}, {{1, 2, 3}}, {{0, 3, 2}}}), OrientationError);
  CHECK_THROWS_AS(SurfaceMesh::from_triangles(p, {{{0, 2, 1}}, {{0, 1, 3}}, {{1, 2, 3}}, {{0, 3, 7}}}), IndexError);
  CHECK_THROWS_AS(load_mesh(testutil::write_text("quad.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")),
                  NonTriangleFaceError);
  CHECK_THROWS_AS(load_mesh(testutil::write_text("bad.obj", "v 0 0\n")), ParseError);
  CHECK_THROWS_AS(load_mesh(testutil::temp_path("does_not_exist.obj")), ParseError);
}

TEST_CASE("discrete Gauss-Bonnet") {
  for (int s = 0; s <= 5; ++s) CHECK(gauss_bonnet_gap(build_icosphere(s)) < 1e-9);
  CHECK(gauss_bonnet_gap(build_torus(1.0, 0.4, 40, 16)) < 1e-9);
  CHECK(gauss_bonnet_gap(build_torus(3.0, 1.0, 12, 8)) < 1e-9);
  CHECK(gauss_bonnet_gap(testutil::build_cube(4)) < 1e-9);
  CHECK(gauss_bonnet_gap(load_mesh(testutil::data_path("torus.obj"))) < 1e-9);
}

TEST_CASE("cotan Laplacian") {
  const SurfaceMesh m = build_icosphere(3);
  const Eigen::SparseMatrix<double> L = cotan_laplacian(m);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.num_vertices());
  CHECK((L * ones).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::SparseMatrix<double> Lt = L.transpose();
  CHECK((L - Lt).norm() == 0.0);

  SUBCASE("linear functions on a flat patch") {
    const SurfaceMesh cube = testutil::build_cube(6);
    const auto inside = testutil::cube_top_interior(cube);
    const Eigen::SparseMatrix<double> Lc = cotan_laplacian(cube);
    Eigen::VectorXd f(cube.num_vertices());
    for (int v = 0; v < cube.num_vertices(); ++v) f[v] = 2.0 * cube.position(v).x() - 0.5 * cube.position(v).y();
    const Eigen::VectorXd lf = Lc * f;
    int count = 0;
    for (int v = 0; v < cube.num_vertices(); ++v)
      if (inside[v]) {
        CHECK(std::abs(lf[v]) < 1e-12);
        ++count;
      }
    CHECK(count == 25);
  }
}

TEST_CASE("first Laplacian eigenvalue of the sphere") {
  const SurfaceMesh coarse = build_icosphere(3);
  const double dense = first_eigenvalue_dense(coarse);
  CHECK(first_eigenvalue_sparse(coarse) == doctest::Approx(dense).epsilon(1e-8));
  const SurfaceMesh fine = build_icosphere(4);
  const double lambda = first_eigenvalue_sparse(fine) * fine.total_area() / (4.0 * std::numbers::pi);
  CHECK(std::abs(lambda - 2.0) / 2.0 < 0.05);
}

TEST_CASE("frames") {
  const SurfaceMesh a = build_icosphere(2);
  const SurfaceMesh b = build_icosphere(2);
  for (int v = 0; v < a.num_vertices(); ++v) {
    const TangentFrame& f = a.frame(v);
    CHECK(f.e1 == b.frame(v).e1);
    CHECK(f.e2 == b.frame(v).e2);
    CHECK(std::abs(f.e1.dot(f.e2)) < 1e-14);
    CHECK(std::abs(f.e1.dot(f.normal)) < 1e-14);
    CHECK(f.e1.cross(f.e2).dot(f.normal) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.normal.dot(a.position(v)) > 0.0);
    // The chart angle sum closes exactly.
    double turn = 0.0;
    const auto out = a.outgoing(v);
    for (int h : out) turn += a.corner_angle(h) + a.angle_defect(v) / a.degree(v);
    CHECK(turn == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-13));
    CHECK(a.halfedge_angle(out[0]) == 0.0);
  }
}

TEST_CASE("torus builder") {
  const SurfaceMesh t = build_torus(1.0, 0.4, 40, 16);
  CHECK(t.genus() == 1);
  CHECK(t.num_vertices() == 640);
  for (int e = 0; e < t.num_edges(); ++e) CHECK(t.cotan_weight(e) > 0.0);
  CHECK_THROWS_AS(build_torus(1.0, 0.4, 40, 15), DomainError);
  CHECK_THROWS_AS(build_torus(0.3, 0.4, 40, 16), DomainError);
}

TEST_CASE("OBJ round trip") {
  const SurfaceMesh m = build_icosphere(1);
  const std::string path = testutil::temp_path("ico1.obj");
  save_obj(m, path);
  const SurfaceMesh r = load_mesh(path);
  REQUIRE(r.num_vertices() == m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) CHECK(r.position(v) == m.position(v));
  CHECK(r.faces() == m.faces());
}

#include "glvortex/connection.hpp"
#include "glvortex/dec.hpp"
#include "glvortex/errors.hpp"
#include "glvortex/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace glv;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

} // namespace

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 2.0}) CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("section JSON round trip") {
  auto mesh = testutil::share(build_icosphere(1));
  Section u(mesh->num_vertices());
  for (int v = 0; v < mesh->num_vertices(); ++v) u[v] = {std::sin(0.3 * v), std::cos(1.7 * v) / 3.0};
  Eigen::VectorXd flux(2);
  flux << 0.25, -1.0 / 7.0;
  const Configuration c = make_configuration(*mesh, {3, 9, 1});

  const std::string path = testutil::temp_path("section.json");
  write_json(path, section_to_json(u, flux, c));
  std::ifstream in(path);
  const nlohmann::json j = nlohmann::json::parse(in);
  REQUIRE(j["values"].size() == static_cast<size_t>(mesh->num_vertices()));
  for (int v = 0; v < mesh->num_vertices(); ++v) {
    CHECK(j["values"][v][0].get<double>() == u[v].real());
    CHECK(j["values"][v][1].get<double>() == u[v].imag());
  }
  CHECK(j["fluxes"][1].get<double>() == flux[1]);
  CHECK(j["config"].get<std::vector<int>>() == std::vector<int>{3, 9, 1});
}

TEST_CASE("vortex JSON") {
  VortexSet s;
  Vortex v;
  v.face = 7;
  v.degree = -1;
  v.position = Vec3(0.5, 0.25, 0.0);
  s.items.push_back(v);
  s.totalDegree = -1;
  const nlohmann::json j = vortices_to_json(s);
  CHECK(j["total_degree"] == -1);
  CHECK(j["vortices"][0]["face"] == 7);
  CHECK(j["vortices"][0]["position"][1].get<double>() == 0.25);
  CHECK(vec3_list_to_json({Vec3(1, 2, 3)}).dump() == "[[1.0,2.0,3.0]]");
}

TEST_CASE("CSV outputs") {
  const std::string conv = testutil::temp_path("conv.csv");
  write_convergence_csv(conv, {{0, 0, 1.5, 0.25}, {1, 3, 1.0 / 3.0, 1e-8}});
  const auto lines = read_lines(conv);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "stage,iter,energy,gradnorm");
  CHECK(lines[1] == "0,0,1.5,0.25");
  CHECK(lines[2] == "1,3,0.33333333333333331,1e-08");

  auto mesh = testutil::share(build_icosphere(0));
  const std::string conn = testutil::temp_path("conn.csv");
  write_connection_csv(conn, levi_civita_connection(mesh, 2));
  const auto rows = read_lines(conn);
  CHECK(rows[0] == "tail,head,rho");
  CHECK(static_cast<int>(rows.size()) == 1 + mesh->num_halfedges());
}

TEST_CASE("PLY output") {
  auto mesh = testutil::share(build_icosphere(0));
  const int n = mesh->num_vertices();
  const std::string path = testutil::temp_path("field.ply");
  write_ply(path, *mesh, {{"modulus", std::vector<double>(n, 0.5)}}, {{"dir0", std::vector<Vec3>(n, Vec3(1, 0, 0))}});
  const auto lines = read_lines(path);
  const std::vector<std::string> header{"ply",
                                        "format ascii 1.0",
                                        "element vertex 12",
                                        "property double x",
                                        "property double y",
                                        "property double z",
                                        "property double modulus",
                                        "property double dir0_x",
                                        "property double dir0_y",
                                        "property double dir0_z",
                                        "element face 20",
                                        "property list uchar int vertex_indices",
                                        "end_header"};
  REQUIRE(lines.size() == header.size() + 12 + 20);
  for (size_t i = 0; i < header.size(); ++i) CHECK(lines[i] == header[i]);
  std::istringstream row(lines[header.size()]);
  double x, y, z, m, dx;
  row >> x >> y >> z >> m >> dx;
  CHECK(x == mesh->position(0).x());
  CHECK(m == 0.5);
  CHECK(dx == 1.0);
  CHECK(lines.back().rfind("3 ", 0) == 0);

  CHECK_THROWS_AS(write_ply(path, *mesh, {{"bad", {1.0}}}, {}), DomainError);
}

TEST_CASE("rosy directions") {
  auto mesh = testutil::share(build_icosphere(1));
  CHECK(rosy_directions(trivial_bundle(mesh), Section::Ones(mesh->num_vertices())).empty());

  for (int k : {1, 2, 4}) {
    const DiscreteBundle b = levi_civita_connection(mesh, k);
    Section u = Section::Ones(mesh->num_vertices());
    u[0] = 0.0;
    const auto dirs = rosy_directions(b, u);
    REQUIRE(static_cast<int>(dirs.size()) == k);
    for (int i = 0; i < k; ++i) {
      CHECK(dirs[i][0].norm() == 0.0);
      for (int v = 1; v < mesh->num_vertices(); ++v) {
        CHECK(dirs[i][v].norm() == doctest::Approx(1.0));
        CHECK(std::abs(dirs[i][v].dot(mesh->frame(v).normal)) < 1e-12);
      }
    }
    // Directions are spaced by 2 pi / k, and a phase alpha turns them by alpha / k.
    const TangentFrame& fr = mesh->frame(1);
    auto angle = [&](const Vec3& d) { return std::atan2(d.dot(fr.e2), d.dot(fr.e1)); };
    for (int i = 1; i < k; ++i)
      CHECK(std::abs(wrap_angle(angle(dirs[i][1]) - angle(dirs[0][1]) - 2.0 * std::numbers::pi * i / k)) < 1e-12);
    const auto turned = rosy_directions(b, std::polar(1.0, 0.6) * u);
    CHECK(std::abs(wrap_angle(k * (angle(turned[0][1]) - angle(dirs[0][1])) - 0.6)) < 1e-12);
  }
}

TEST_CASE("config file parsing") {
  const std::set<std::string> allowed{"rank", "seeds", "out"};
  const auto m = parse_config_text("# comment\n\nrank = 2\n  seeds=5   # trailing\nout = dir with spaces\n", allowed);
  CHECK(m.size() == 3);
  CHECK(m.at("rank") == "2");
  CHECK(m.at("seeds") == "5");
  CHECK(m.at("out") == "dir with spaces");

  CHECK_THROWS_AS(parse_config_text("bogus = 1\n", allowed), ParseError);
  CHECK_THROWS_AS(parse_config_text("rank = 1\nrank = 2\n", allowed), ParseError);
  CHECK_THROWS_AS(parse_config_text("rank 2\n", allowed), ParseError);
  CHECK_THROWS_AS(parse_config_text(" = 2\n", allowed), ParseError);

  const std::string path = testutil::write_text("run.cfg", "seeds = 3\n");
  CHECK(parse_config_file(path, allowed).at("seeds") == "3");
  CHECK_THROWS_AS(parse_config_file(testutil::temp_path("missing.cfg"), allowed), Error);
}

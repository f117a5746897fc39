#pragma once

#include "glvortex/mesh.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace testutil {

using glv::Vec3;

// Closed surface of the cube [-1, 1]^3 with an n x n grid on each side, each
// square split along one diagonal. Vertices inside a side have zero defect.
inline glv::SurfaceMesh build_cube(int n) {
  std::vector<Vec3> pos;
  std::map<std::array<long, 3>, int> index;
  auto vid = [&](const Vec3& p) {
    const std::array<long, 3> key{std::lround(p.x() * 1e6), std::lround(p.y() * 1e6), std::lround(p.z() * 1e6)};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    pos.push_back(p);
    index[key] = static_cast<int>(pos.size()) - 1;
    return static_cast<int>(pos.size()) - 1;
  };
  std::vector<std::array<int, 3>> faces;
  for (int axis = 0; axis < 3; ++axis)
    for (int side : {-1, 1}) {
      const int a = (axis + 1) % 3, b = (axis + 2) % 3;
      auto point = [&](int i, int j) {
        Vec3 p;
        p[axis] = side;
        p[a] = -1.0 + 2.0 * i / n;
        p[b] = -1.0 + 2.0 * j / n;
        return p;
      };
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          int v00 = vid(point(i, j)), v10 = vid(point(i + 1, j)), v11 = vid(point(i + 1, j + 1)),
              v01 = vid(point(i, j + 1));
          // (a, b, axis) is right-handed, so CCW in (a, b) faces +axis.
          if (side > 0) {
            faces.push_back({v00, v10, v11});
            faces.push_back({v00, v11, v01});
          } else {
            faces.push_back({v00, v11, v10});
            faces.push_back({v00, v01, v11});
          }
        }
    }
  return glv::SurfaceMesh::from_triangles(std::move(pos), std::move(faces));
}

// Vertices strictly inside the +z side of build_cube.
inline std::vector<bool> cube_top_interior(const glv::SurfaceMesh& m) {
  std::vector<bool> in(m.num_vertices(), false);
  for (int v = 0; v < m.num_vertices(); ++v) {
    const Vec3& p = m.position(v);
    in[v] = std::abs(p.z() - 1.0) < 1e-12 && std::abs(p.x()) < 1.0 - 1e-9 && std::abs(p.y()) < 1.0 - 1e-9;
  }
  return in;
}

inline std::shared_ptr<const glv::SurfaceMesh> share(glv::SurfaceMesh m) {
  return std::make_shared<const glv::SurfaceMesh>(std::move(m));
}

inline std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "glvortex_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

inline std::string write_text(const std::string& name, const std::string& text) {
  const std::string path = temp_path(name);
  std::ofstream(path) << text;
  return path;
}

inline std::string data_path(const std::string& name) { return std::string(GLVORTEX_TEST_DATA) + "/" + name; }

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 p(n(rng), n(rng), n(rng));
  return p.normalized();
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

// Vertex whose position is closest to p.
inline int nearest_vertex(const glv::SurfaceMesh& m, const Vec3& p) {
  int best = 0;
  for (int v = 1; v < m.num_vertices(); ++v)
    if ((m.position(v) - p).squaredNorm() < (m.position(best) - p).squaredNorm()) best = v;
  return best;
}

} // namespace testutil

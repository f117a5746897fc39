#include "glvortex/vortex.hpp"

#include "glvortex/errors.hpp"
#include "glvortex/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace glv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_angle(const std::vector<Vec3>& p, const std::vector<Vec3>& q, const Eigen::Matrix3d& r,
                 const std::vector<int>& perm) {
  double worst = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const Vec3 a = p[i].normalized();
    const Vec3 b = (r * q[perm[i]]).normalized();
    worst = std::max(worst, std::atan2(a.cross(b).norm(), a.dot(b)));
  }
  return worst;
}

std::vector<Vec3> permuted(const std::vector<Vec3>& q, const std::vector<int>& perm) {
  std::vector<Vec3> out(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) out[i] = q[perm[i]];
  return out;
}

Eigen::Matrix3d random_rotation(std::mt19937_64& gen) {
  std::normal_distribution<double> n01;
  Eigen::Quaterniond q(n01(gen), n01(gen), n01(gen), n01(gen));
  q.normalize();
  return q.toRotationMatrix();
}

} // namespace

VortexSet detect_vortices(const DiscreteBundle& bundle, const Section& u) {
  const SurfaceMesh& m = bundle.mesh();
  if (u.size() != m.num_vertices()) throw DomainError("section size does not match the mesh");
  VortexSet set;
  for (int f = 0; f < m.num_faces(); ++f) {
    double winding = bundle.face_curvature(f);
    for (int c = 0; c < 3; ++c) {
      const int h = 3 * f + c;
      const int i = m.he_tail(h), j = m.he_head(h);
      if (u[i] == 0.0 || u[j] == 0.0)
        throw AmbiguityError("face " + std::to_string(f) + " has a vertex with zero section value");
      winding += std::arg(u[j] * std::conj(u[i]) * std::polar(1.0, -bundle.rho_halfedge(h)));
    }
    const double raw = winding / kTwoPi;
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) > 0.2) set.flaggedFaces.push_back(f);
    const int degree = static_cast<int>(rounded);
    if (degree != 0) {
      set.items.push_back({f, degree, m.face_barycenter(f), raw});
      set.totalDegree += degree;
    }
  }
  return set;
}

Section apply_modulus_floor(const Section& u, double floor) {
  Section out = u;
  for (Eigen::Index v = 0; v < out.size(); ++v)
    if (std::abs(out[v]) < floor) out[v] = floor;
  return out;
}

ReferencePolyhedron reference_polyhedron(const std::string& name) {
  ReferencePolyhedron p;
  p.name = name;
  if (name == "tetrahedron") {
    const double s = 1.0 / std::sqrt(3.0);
    p.vertices = {Vec3(s, s, s), Vec3(s, -s, -s), Vec3(-s, s, -s), Vec3(-s, -s, s)};
  } else if (name == "cross-polytope") {
    p.vertices = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)};
  } else if (name == "icosahedron") {
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    for (double a : {-1.0, 1.0})
      for (double b : {-phi, phi}) {
        p.vertices.emplace_back(0.0, a, b);
        p.vertices.emplace_back(a, b, 0.0);
        p.vertices.emplace_back(b, 0.0, a);
      }
    for (Vec3& v : p.vertices) v.normalize();
  } else {
    throw DomainError("unknown reference polyhedron '" + name + "'");
  }
  return p;
}

ReferencePolyhedron reference_for_count(int n) {
  switch (n) {
  case 4: return reference_polyhedron("tetrahedron");
  case 6: return reference_polyhedron("cross-polytope");
  case 12: return reference_polyhedron("icosahedron");
  default: return {};
  }
}

Eigen::Matrix3d kabsch_rotation(const std::vector<Vec3>& p, const std::vector<Vec3>& q) {
  if (p.size() != q.size()) throw DomainError("kabsch needs equal point counts");
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (size_t i = 0; i < p.size(); ++i) cov += p[i] * q[i].transpose();
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw DomainError("hungarian needs a square cost matrix");
  // Potentials formulation with 1-based sentinel column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> uu(n + 1, 0.0), vv(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - uu[i0] - vv[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          uu[match[j]] += delta;
          vv[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> result(n, -1);
  for (int j = 1; j <= n; ++j) result[match[j] - 1] = j - 1;
  return result;
}

double configuration_distance(const std::vector<Vec3>& points, const ReferencePolyhedron& ref, uint64_t seed) {
  const size_t n = points.size();
  if (n != ref.vertices.size()) {
    throw DomainError("configuration has " + std::to_string(n) + " points but the reference " + ref.name + " has " +
                      std::to_string(ref.vertices.size()));
  }
  if (n == 0) return 0.0;
  std::vector<Vec3> p(n);
  for (size_t i = 0; i < n; ++i) p[i] = points[i].normalized();

  double best = std::numeric_limits<double>::infinity();
  if (n <= 6) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      const Eigen::Matrix3d r = kabsch_rotation(p, permuted(ref.vertices, perm));
      best = std::min(best, max_angle(p, ref.vertices, r, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }

  std::mt19937_64 gen = stream_engine(seed, 0);
  for (int restart = 0; restart < 50; ++restart) {
    Eigen::Matrix3d r = random_rotation(gen);
    std::vector<int> perm;
    for (int iter = 0; iter < 100; ++iter) {
      Eigen::MatrixXd cost(n, n);
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) cost(i, j) = -p[i].dot(r * ref.vertices[j]);
      std::vector<int> next = hungarian(cost);
      r = kabsch_rotation(p, permuted(ref.vertices, next));
      if (next == perm) break;
      perm = std::move(next);
    }
    best = std::min(best, max_angle(p, ref.vertices, r, perm));
  }
  return best;
}

} // namespace glv

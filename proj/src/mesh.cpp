#include "glvortex/mesh.hpp"

#include "glvortex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace glv {

namespace {

uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

double angle_between(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

} // namespace

SurfaceMesh SurfaceMesh::from_triangles(std::vector<Vec3> positions, std::vector<std::array<int, 3>> faces) {
  SurfaceMesh mesh;
  mesh.positions_ = std::move(positions);
  mesh.faces_ = std::move(faces);
  mesh.build_connectivity();
  mesh.build_geometry();
  return mesh;
}

void SurfaceMesh::build_connectivity() {
  const int nV = num_vertices();
  const int nF = num_faces();
  if (nF == 0) throw MeshValidationError("mesh has no faces");

  for (int f = 0; f < nF; ++f) {
    const auto& t = faces_[f];
    for (int c = 0; c < 3; ++c) {
      if (t[c] < 0 || t[c] >= nV)
        throw IndexError("face " + std::to_string(f) + " references missing vertex " + std::to_string(t[c]));
    }
    if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0])
      throw MeshValidationError("face " + std::to_string(f) + " repeats a vertex");
  }

  // Group halfedges by undirected edge, in first-seen order.
  std::unordered_map<uint64_t, int> edgeIndex;
  edgeIndex.reserve(3 * nF);
  std::vector<std::vector<int>> edgeHalfedges;
  heEdge_.assign(3 * nF, -1);
  for (int h = 0; h < 3 * nF; ++h) {
    const uint64_t key = edge_key(he_tail(h), he_head(h));
    auto [it, inserted] = edgeIndex.try_emplace(key, static_cast<int>(edgeHalfedges.size()));
    if (inserted) edgeHalfedges.emplace_back();
    edgeHalfedges[it->second].push_back(h);
    heEdge_[h] = it->second;
  }

  const int nE = static_cast<int>(edgeHalfedges.size());
  edges_.resize(nE);
  edgeHalfedge_.assign(nE, -1);
  twin_.assign(3 * nF, -1);
  for (int e = 0; e < nE; ++e) {
    const auto& hs = edgeHalfedges[e];
    const int a = std::min(he_tail(hs[0]), he_head(hs[0]));
    const int b = std::max(he_tail(hs[0]), he_head(hs[0]));
    edges_[e] = {a, b};
    if (hs.size() == 1) throw BoundaryEdgeError(a, b);
    if (hs.size() > 2) throw NonManifoldEdgeError(a, b, static_cast<int>(hs.size()));
    if (he_tail(hs[0]) == he_tail(hs[1])) throw OrientationError(he_tail(hs[0]), he_head(hs[0]));
    twin_[hs[0]] = hs[1];
    twin_[hs[1]] = hs[0];
    edgeHalfedge_[e] = he_tail(hs[0]) == a ? hs[0] : hs[1];
  }

  // Counter-clockwise outgoing fans, starting at the lowest outgoing halfedge.
  std::vector<int> firstOut(nV, -1), outCount(nV, 0);
  for (int h = 0; h < 3 * nF; ++h) {
    const int v = he_tail(h);
    ++outCount[v];
    if (firstOut[v] < 0) firstOut[v] = h;
  }
  outgoingStart_.assign(nV + 1, 0);
  for (int v = 0; v < nV; ++v) {
    if (outCount[v] == 0) throw NonManifoldVertexError(v);
    outgoingStart_[v + 1] = outgoingStart_[v] + outCount[v];
  }
  outgoing_.assign(outgoingStart_[nV], -1);
  for (int v = 0; v < nV; ++v) {
    int h = firstOut[v];
    int k = 0;
    do {
      if (k >= outCount[v]) throw NonManifoldVertexError(v);
      outgoing_[outgoingStart_[v] + k++] = h;
      h = twin_[he_prev(h)];
    } while (h != firstOut[v]);
    if (k != outCount[v]) throw NonManifoldVertexError(v);
  }
}

void SurfaceMesh::build_geometry() {
  const int nV = num_vertices();
  const int nF = num_faces();
  const int nE = num_edges();

  faceArea_.resize(nF);
  faceNormal_.resize(nF);
  cornerAngle_.resize(3 * nF);
  for (int f = 0; f < nF; ++f) {
    const auto& t = faces_[f];
    const Vec3 n = (positions_[t[1]] - positions_[t[0]]).cross(positions_[t[2]] - positions_[t[0]]);
    const double area = 0.5 * n.norm();
    if (!(area >= 1e-14)) throw GeometryError("degenerate triangle " + std::to_string(f) + " (area < 1e-14)");
    faceArea_[f] = area;
    faceNormal_[f] = n.normalized();
    for (int c = 0; c < 3; ++c) {
      const Vec3& p = positions_[t[c]];
      cornerAngle_[3 * f + c] =
          angle_between(positions_[t[(c + 1) % 3]] - p, positions_[t[(c + 2) % 3]] - p);
    }
  }

  cotanWeight_.assign(nE, 0.0);
  double edgeLengthSum = 0.0;
  for (int e = 0; e < nE; ++e) {
    const int h0 = edgeHalfedge_[e];
    for (int h : {h0, twin_[h0]}) {
      // Opposite corner sits at the tail of prev(h).
      const int opp = he_tail(he_prev(h));
      const Vec3 a = positions_[he_tail(h)] - positions_[opp];
      const Vec3 b = positions_[he_head(h)] - positions_[opp];
      cotanWeight_[e] += 0.5 * a.dot(b) / a.cross(b).norm();
    }
    edgeLengthSum += (positions_[edges_[e][1]] - positions_[edges_[e][0]]).norm();
  }
  meanEdgeLength_ = edgeLengthSum / nE;

  vertexArea_.assign(nV, 0.0);
  angleDefect_.assign(nV, 2.0 * std::numbers::pi);
  std::vector<Vec3> normals(nV, Vec3::Zero());
  totalArea_ = 0.0;
  for (int f = 0; f < nF; ++f) {
    totalArea_ += faceArea_[f];
    for (int c = 0; c < 3; ++c) {
      const int v = faces_[f][c];
      vertexArea_[v] += faceArea_[f] / 3.0;
      angleDefect_[v] -= cornerAngle_[3 * f + c];
      normals[v] += faceArea_[f] * faceNormal_[f];
    }
  }

  frames_.resize(nV);
  heAngle_.assign(3 * nF, 0.0);
  for (int v = 0; v < nV; ++v) {
    TangentFrame& fr = frames_[v];
    fr.normal = normals[v].normalized();
    const auto out = outgoing(v);
    const Vec3 d = positions_[he_head(out[0])] - positions_[v];
    fr.e1 = (d - d.dot(fr.normal) * fr.normal).normalized();
    fr.e2 = fr.normal.cross(fr.e1);

    const double share = angleDefect_[v] / static_cast<double>(out.size());
    double phi = 0.0;
    for (size_t m = 0; m < out.size(); ++m) {
      heAngle_[out[m]] = phi;
      phi += cornerAngle_[out[m]] + share;
    }
  }
}

int SurfaceMesh::find_halfedge(int i, int j) const {
  if (i < 0 || i >= num_vertices()) return -1;
  for (int h : outgoing(i))
    if (he_head(h) == j) return h;
  return -1;
}

Vec3 SurfaceMesh::face_barycenter(int f) const {
  const auto& t = faces_[f];
  return (positions_[t[0]] + positions_[t[1]] + positions_[t[2]]) / 3.0;
}

Vec3 SurfaceMesh::tangent_direction(int v, double angle) const {
  const TangentFrame& fr = frames_[v];
  return std::cos(angle) * fr.e1 + std::sin(angle) * fr.e2;
}

double SurfaceMesh::circumradius() const {
  Vec3 c = Vec3::Zero();
  for (const auto& p : positions_) c += p;
  c /= static_cast<double>(positions_.size());
  double r = 0.0;
  for (const auto& p : positions_) r = std::max(r, (p - c).norm());
  return r;
}

SurfaceMesh build_icosphere(int subdivisions) {
  if (subdivisions < 0) throw DomainError("icosphere subdivisions must be nonnegative");
  if (subdivisions > 8) throw SizeError("icosphere subdivisions " + std::to_string(subdivisions) + " exceed the limit 8");

  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pos = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : pos) p.normalize();
  std::vector<std::array<int, 3>> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::unordered_map<uint64_t, int> midpoint;
    auto mid = [&](int a, int b) {
      const uint64_t key = edge_key(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      pos.push_back((0.5 * (pos[a] + pos[b])).normalized());
      const int id = static_cast<int>(pos.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * faces.size());
    for (const auto& f : faces) {
      const int a = mid(f[0], f[1]);
      const int b = mid(f[1], f[2]);
      const int c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
  }
  return SurfaceMesh::from_triangles(std::move(pos), std::move(faces));
}

SurfaceMesh build_torus(double majorRadius, double minorRadius, int majorSteps, int minorSteps) {
  if (!(majorRadius > minorRadius && minorRadius > 0.0))
    throw DomainError("torus needs major radius > minor radius > 0");
  if (majorSteps < 3 || minorSteps < 4) throw DomainError("torus needs at least 3 major and 4 minor steps");
  if (minorSteps % 2 != 0) throw DomainError("torus needs an even number of minor steps");

  // Odd rows are shifted by half a major step, so the triangles are isosceles
  // instead of right-angled.
  std::vector<Vec3> pos;
  pos.reserve(static_cast<size_t>(majorSteps) * minorSteps);
  for (int i = 0; i < majorSteps; ++i) {
    for (int j = 0; j < minorSteps; ++j) {
      const double u = 2.0 * std::numbers::pi * (i + 0.5 * (j % 2)) / majorSteps;
      const double v = 2.0 * std::numbers::pi * j / minorSteps;
      const double rho = majorRadius + minorRadius * std::cos(v);
      pos.emplace_back(rho * std::cos(u), rho * std::sin(u), minorRadius * std::sin(v));
    }
  }
  auto id = [&](int i, int j) { return ((i + majorSteps) % majorSteps) * minorSteps + (j + minorSteps) % minorSteps; };
  std::vector<std::array<int, 3>> faces;
  faces.reserve(2 * static_cast<size_t>(majorSteps) * minorSteps);
  for (int i = 0; i < majorSteps; ++i) {
    for (int j = 0; j < minorSteps; ++j) {
      if (j % 2 == 0) {
        faces.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
        faces.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
      } else {
        faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      }
    }
  }
  return SurfaceMesh::from_triangles(std::move(pos), std::move(faces));
}

SurfaceMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file '" + path + "'");

  std::vector<Vec3> pos;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw ParseError(path + ":" + std::to_string(lineNo) + ": malformed vertex");
      pos.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> ids;
      std::string tok;
      while (ls >> tok) {
        const auto slash = tok.find('/');
        int idx = 0;
        try {
          idx = std::stoi(tok.substr(0, slash));
        } catch (const std::exception&) {
          throw ParseError(path + ":" + std::to_string(lineNo) + ": malformed face index '" + tok + "'");
        }
        if (idx < 0) idx = static_cast<int>(pos.size()) + idx + 1;
        ids.push_back(idx - 1);
      }
      if (ids.size() != 3) throw NonTriangleFaceError(static_cast<int>(faces.size()), static_cast<int>(ids.size()));
      faces.push_back({ids[0], ids[1], ids[2]});
    }
  }
  return SurfaceMesh::from_triangles(std::move(pos), std::move(faces));
}

void save_obj(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  char buf[128];
  for (const auto& p : mesh.positions()) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out << buf;
  }
  for (const auto& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

Eigen::SparseMatrix<double> cotan_laplacian(const SurfaceMesh& mesh) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto [i, j] = mesh.edge(e);
    const double w = mesh.cotan_weight(e);
    trips.emplace_back(i, j, -w);
    trips.emplace_back(j, i, -w);
    trips.emplace_back(i, i, w);
    trips.emplace_back(j, j, w);
  }
  Eigen::SparseMatrix<double> L(mesh.num_vertices(), mesh.num_vertices());
  L.setFromTriplets(trips.begin(), trips.end());
  return L;
}

Eigen::VectorXd vertex_areas(const SurfaceMesh& mesh) {
  Eigen::VectorXd a(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) a[v] = mesh.vertex_area(v);
  return a;
}

} // namespace glv

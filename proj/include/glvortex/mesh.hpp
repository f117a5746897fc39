#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SparseCore>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace glv {

using Vec3 = Eigen::Vector3d;

// Ordered orthonormal tangent pair with e1 x e2 along the outward normal.
struct TangentFrame {
  Vec3 e1;
  Vec3 e2;
  Vec3 normal;
};

// Closed, consistently oriented triangle mesh. Immutable after construction.
//
// Halfedge h = 3 * f + c runs from faces[f][c] to faces[f][(c + 1) % 3].
// Edges are stored once with v0 < v1; edge_halfedge(e) runs v0 -> v1.
//
// Every outgoing halfedge carries a polar angle in its tail vertex chart. The
// chart measures consecutive (counter-clockwise) outgoing halfedges by their
// corner angle plus an equal share of the vertex angle defect, so that a full
// turn is exactly 2*pi. The first outgoing halfedge has angle 0 and also
// defines the extrinsic frame vector e1.
class SurfaceMesh {
public:
  static SurfaceMesh from_triangles(std::vector<Vec3> positions, std::vector<std::array<int, 3>> faces);

  int num_vertices() const { return static_cast<int>(positions_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_halfedges() const { return 3 * num_faces(); }

  const std::vector<Vec3>& positions() const { return positions_; }
  const Vec3& position(int v) const { return positions_[v]; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  const std::array<int, 3>& face(int f) const { return faces_[f]; }
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }

  int he_tail(int h) const { return faces_[h / 3][h % 3]; }
  int he_head(int h) const { return faces_[h / 3][(h % 3 + 1) % 3]; }
  int he_face(int h) const { return h / 3; }
  int he_next(int h) const { return 3 * (h / 3) + (h % 3 + 1) % 3; }
  int he_prev(int h) const { return 3 * (h / 3) + (h % 3 + 2) % 3; }
  int he_twin(int h) const { return twin_[h]; }
  int he_edge(int h) const { return heEdge_[h]; }
  // +1 when h runs v0 -> v1 of its edge, -1 otherwise.
  int he_sign(int h) const { return he_tail(h) == edges_[heEdge_[h]][0] ? 1 : -1; }
  int edge_halfedge(int e) const { return edgeHalfedge_[e]; }

  // Outgoing halfedges of v in counter-clockwise order.
  std::span<const int> outgoing(int v) const {
    return {outgoing_.data() + outgoingStart_[v], static_cast<size_t>(outgoingStart_[v + 1] - outgoingStart_[v])};
  }
  int degree(int v) const { return outgoingStart_[v + 1] - outgoingStart_[v]; }
  // Halfedge i -> j, or -1.
  int find_halfedge(int i, int j) const;

  // Interior angle of face he_face(h) at vertex he_tail(h).
  double corner_angle(int h) const { return cornerAngle_[h]; }
  // Polar angle of h in the chart of he_tail(h), in [0, 2*pi).
  double halfedge_angle(int h) const { return heAngle_[h]; }
  double face_area(int f) const { return faceArea_[f]; }
  const Vec3& face_normal(int f) const { return faceNormal_[f]; }
  Vec3 face_barycenter(int f) const;
  double vertex_area(int v) const { return vertexArea_[v]; }
  const TangentFrame& frame(int v) const { return frames_[v]; }
  double cotan_weight(int e) const { return cotanWeight_[e]; }
  // 2*pi minus the sum of incident corner angles.
  double angle_defect(int v) const { return angleDefect_[v]; }
  // Tangent direction of a chart angle at v.
  Vec3 tangent_direction(int v, double angle) const;

  int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }
  int genus() const { return (2 - euler_characteristic()) / 2; }
  double total_area() const { return totalArea_; }
  double mean_edge_length() const { return meanEdgeLength_; }
  // Largest distance from the vertex centroid.
  double circumradius() const;

private:
  SurfaceMesh() = default;
  void build_connectivity();
  void build_geometry();

  std::vector<Vec3> positions_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<int> twin_, heEdge_, edgeHalfedge_;
  std::vector<int> outgoing_, outgoingStart_;

  std::vector<double> cornerAngle_, heAngle_, faceArea_, vertexArea_, cotanWeight_, angleDefect_;
  std::vector<Vec3> faceNormal_;
  std::vector<TangentFrame> frames_;
  double totalArea_ = 0.0;
  double meanEdgeLength_ = 0.0;
};

// Subdivided icosahedron projected to the unit sphere: 10 * 4^s + 2 vertices.
SurfaceMesh build_icosphere(int subdivisions);

// Torus of revolution with major radius R and minor radius r sampled on a
// majorSteps x minorSteps grid with every other ring shifted by half a step.
// minorSteps must be even. All angles are acute when the minor step exceeds
// half the outer major step.
SurfaceMesh build_torus(double majorRadius, double minorRadius, int majorSteps, int minorSteps);

// Triangle-only Wavefront OBJ ("v x y z", "f i j k" with optional /vt/vn).
SurfaceMesh load_mesh(const std::string& path);
void save_obj(const SurfaceMesh& mesh, const std::string& path);

// Positive semi-definite cotan Laplacian: L_ii = sum_j w_ij, L_ij = -w_ij.
Eigen::SparseMatrix<double> cotan_laplacian(const SurfaceMesh& mesh);

// Diagonal of barycentric vertex areas.
Eigen::VectorXd vertex_areas(const SurfaceMesh& mesh);

} // namespace glv

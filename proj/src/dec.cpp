#include "glvortex/dec.hpp"

#include "glvortex/errors.hpp"

namespace glv {

Eigen::SparseMatrix<double> d0(const SurfaceMesh& mesh) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    trips.emplace_back(e, mesh.edge(e)[0], -1.0);
    trips.emplace_back(e, mesh.edge(e)[1], 1.0);
  }
  Eigen::SparseMatrix<double> m(mesh.num_edges(), mesh.num_vertices());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Eigen::SparseMatrix<double> d1(const SurfaceMesh& mesh) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.num_halfedges());
  for (int h = 0; h < mesh.num_halfedges(); ++h) trips.emplace_back(mesh.he_face(h), mesh.he_edge(h), mesh.he_sign(h));
  Eigen::SparseMatrix<double> m(mesh.num_faces(), mesh.num_edges());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Eigen::VectorXd hodge1(const SurfaceMesh& mesh) {
  Eigen::VectorXd w(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) w[e] = mesh.cotan_weight(e);
  return w;
}

PoissonSolver face_poisson_solver(const SurfaceMesh& mesh) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const double w = mesh.cotan_weight(e);
    if (!(w > 0.0))
      throw GeometryError("edge (" + std::to_string(mesh.edge(e)[0]) + ", " + std::to_string(mesh.edge(e)[1]) +
                          ") has non-positive cotan weight; the face Laplacian needs a Delaunay mesh");
    const int h = mesh.edge_halfedge(e);
    const int fl = mesh.he_face(h);
    const int fr = mesh.he_face(mesh.he_twin(h));
    trips.emplace_back(fl, fl, 1.0 / w);
    trips.emplace_back(fr, fr, 1.0 / w);
    trips.emplace_back(fl, fr, -1.0 / w);
    trips.emplace_back(fr, fl, -1.0 / w);
  }
  Eigen::SparseMatrix<double> op(mesh.num_faces(), mesh.num_faces());
  op.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd areas(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) areas[f] = mesh.face_area(f);
  return PoissonSolver(op, std::move(areas));
}

Eigen::VectorXd coexact_form(const SurfaceMesh& mesh, const Eigen::VectorXd& facePotential) {
  Eigen::VectorXd form(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const int h = mesh.edge_halfedge(e);
    form[e] = (facePotential[mesh.he_face(h)] - facePotential[mesh.he_face(mesh.he_twin(h))]) / mesh.cotan_weight(e);
  }
  return form;
}

Eigen::VectorXd face_circulation(const SurfaceMesh& mesh, const Eigen::VectorXd& form) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(mesh.num_faces());
  for (int h = 0; h < mesh.num_halfedges(); ++h) c[mesh.he_face(h)] += mesh.he_sign(h) * form[mesh.he_edge(h)];
  return c;
}

Eigen::VectorXd vertex_divergence(const SurfaceMesh& mesh, const Eigen::VectorXd& form) {
  Eigen::VectorXd div = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const double flux = mesh.cotan_weight(e) * form[e];
    div[mesh.edge(e)[0]] -= flux;
    div[mesh.edge(e)[1]] += flux;
  }
  return div;
}

} // namespace glv

#include "glvortex/connection.hpp"

#include "glvortex/dec.hpp"
#include "glvortex/errors.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

namespace glv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

DiscreteBundle::DiscreteBundle(std::shared_ptr<const SurfaceMesh> mesh, int rank, std::vector<double> edgeRho,
                               std::vector<double> faceCurvature)
    : mesh_(std::move(mesh)), rank_(rank), edgeRho_(std::move(edgeRho)), faceCurvature_(std::move(faceCurvature)) {
  if (!mesh_) throw DomainError("bundle needs a mesh");
  if (rank_ < 0) throw DomainError("bundle rank must be nonnegative");
  if (static_cast<int>(edgeRho_.size()) != mesh_->num_edges()) throw DomainError("one transport angle per edge");
  if (static_cast<int>(faceCurvature_.size()) != mesh_->num_faces()) throw DomainError("one curvature per face");
  totalCurvature_ = 0.0;
  for (double o : faceCurvature_) totalCurvature_ += o;
  eulerNumber_ = static_cast<int>(std::lround(totalCurvature_ / kTwoPi));
}

double DiscreteBundle::rho(int i, int j) const {
  const int n = mesh_->num_vertices();
  if (i < 0 || i >= n || j < 0 || j >= n) throw IndexError("vertex out of range");
  const int h = mesh_->find_halfedge(i, j);
  if (h < 0) throw IndexError("no edge " + std::to_string(i) + " -> " + std::to_string(j));
  return rho_halfedge(h);
}

Eigen::VectorXd DiscreteBundle::vertex_curvature() const {
  Eigen::VectorXd k = Eigen::VectorXd::Zero(mesh_->num_vertices());
  for (int f = 0; f < mesh_->num_faces(); ++f)
    for (int v : mesh_->face(f)) k[v] += faceCurvature_[f] / 3.0;
  return k;
}

DiscreteBundle levi_civita_connection(std::shared_ptr<const SurfaceMesh> mesh, int k) {
  if (k < 1) throw DomainError("connection rank must be >= 1, got " + std::to_string(k));
  if (!mesh) throw DomainError("bundle needs a mesh");
  const SurfaceMesh& m = *mesh;

  std::vector<double> rho(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    const int h = m.edge_halfedge(e);
    const double angle = m.halfedge_angle(m.he_twin(h)) + std::numbers::pi - m.halfedge_angle(h);
    rho[e] = wrap_angle(k * wrap_angle(angle));
  }

  // The chart assigns each corner its angle plus defect / degree, so this
  // split makes every face holonomy equal to the face curvature mod 2 pi.
  std::vector<double> omega(m.num_faces(), 0.0);
  for (int f = 0; f < m.num_faces(); ++f) {
    double s = 0.0;
    for (int v : m.face(f)) s += m.angle_defect(v) / m.degree(v);
    omega[f] = k * s;
  }
  return DiscreteBundle(std::move(mesh), k, std::move(rho), std::move(omega));
}

DiscreteBundle trivial_bundle(std::shared_ptr<const SurfaceMesh> mesh) {
  if (!mesh) throw DomainError("bundle needs a mesh");
  const int nE = mesh->num_edges();
  const int nF = mesh->num_faces();
  return DiscreteBundle(std::move(mesh), 0, std::vector<double>(nE, 0.0), std::vector<double>(nF, 0.0));
}

std::complex<double> transport(const DiscreteBundle& bundle, int i, int j, std::complex<double> z) {
  return std::polar(1.0, bundle.rho(i, j)) * z;
}

double face_holonomy(const DiscreteBundle& bundle, int f) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) s += bundle.rho_halfedge(3 * f + c);
  return wrap_angle(s);
}

DiscreteBundle gauge_transform(const DiscreteBundle& bundle, const std::vector<double>& beta) {
  const SurfaceMesh& m = bundle.mesh();
  if (static_cast<int>(beta.size()) != m.num_vertices()) throw DomainError("one gauge angle per vertex");
  std::vector<double> rho(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e)
    rho[e] = wrap_angle(bundle.rho_edge(e) + bundle.rank() * (beta[m.edge(e)[0]] - beta[m.edge(e)[1]]));
  return DiscreteBundle(bundle.mesh_ptr(), bundle.rank(), std::move(rho), bundle.face_curvatures());
}

Section gauge_transform_section(const DiscreteBundle& bundle, const Section& u, const std::vector<double>& beta) {
  if (u.size() != static_cast<Eigen::Index>(beta.size())) throw DomainError("one gauge angle per vertex");
  Section out(u.size());
  for (Eigen::Index v = 0; v < u.size(); ++v) out[v] = std::polar(1.0, -bundle.rank() * beta[v]) * u[v];
  return out;
}

Eigen::VectorXd loop_cochain(const SurfaceMesh& mesh, const std::vector<int>& loop) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(mesh.num_edges());
  if (loop.size() < 2 || loop.front() != loop.back()) throw DomainError("loop must be closed");
  for (size_t i = 0; i + 1 < loop.size(); ++i) {
    const int h = mesh.find_halfedge(loop[i], loop[i + 1]);
    if (h < 0) throw IndexError("loop step " + std::to_string(loop[i]) + " -> " + std::to_string(loop[i + 1]) +
                                " is not an edge");
    c[mesh.he_edge(h)] += mesh.he_sign(h);
  }
  return c;
}

double loop_integral(const SurfaceMesh& mesh, const Eigen::VectorXd& form, const std::vector<int>& loop) {
  return loop_cochain(mesh, loop).dot(form);
}

double form_inner(const SurfaceMesh& mesh, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double s = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) s += mesh.cotan_weight(e) * a[e] * b[e];
  return s;
}

HarmonicBasis harmonic_basis(const DiscreteBundle& bundle) {
  const SurfaceMesh& m = bundle.mesh();
  HarmonicBasis basis;
  const int g = m.genus();
  if (g == 0) {
    basis.gram = Eigen::MatrixXd(0, 0);
    return basis;
  }

  // Primal spanning tree by BFS from vertex 0.
  std::vector<int> parent(m.num_vertices(), -1), depth(m.num_vertices(), -1);
  std::vector<char> inTree(m.num_edges(), 0);
  {
    std::queue<int> q;
    q.push(0);
    depth[0] = 0;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int h : m.outgoing(v)) {
        const int w = m.he_head(h);
        if (depth[w] >= 0) continue;
        depth[w] = depth[v] + 1;
        parent[w] = v;
        inTree[m.he_edge(h)] = 1;
        q.push(w);
      }
    }
  }

  // Dual spanning tree over faces, never crossing a primal tree edge.
  std::vector<char> inCotree(m.num_edges(), 0), seen(m.num_faces(), 0);
  {
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
      const int f = q.front();
      q.pop();
      for (int c = 0; c < 3; ++c) {
        const int h = 3 * f + c;
        const int e = m.he_edge(h);
        if (inTree[e]) continue;
        const int nf = m.he_face(m.he_twin(h));
        if (seen[nf]) continue;
        seen[nf] = 1;
        inCotree[e] = 1;
        q.push(nf);
      }
    }
  }

  for (int e = 0; e < m.num_edges(); ++e) {
    if (inTree[e] || inCotree[e]) continue;
    const int a = m.edge(e)[0], b = m.edge(e)[1];
    // a -> b, then b up the tree to the common ancestor, then down to a.
    std::vector<int> up{b}, down{a};
    int x = b, y = a;
    while (x != y) {
      if (depth[x] >= depth[y]) {
        x = parent[x];
        up.push_back(x);
      } else {
        y = parent[y];
        down.push_back(y);
      }
    }
    std::vector<int> loop{a};
    loop.insert(loop.end(), up.begin(), up.end());
    for (auto it = down.rbegin() + 1; it != down.rend(); ++it) loop.push_back(*it);
    basis.generators.push_back(std::move(loop));
  }
  if (static_cast<int>(basis.generators.size()) != 2 * g) {
    std::ostringstream msg;
    msg << "tree-cotree found " << basis.generators.size() << " generators, expected " << 2 * g;
    throw NumericalError(msg.str());
  }

  const PoissonSolver faceSolver = face_poisson_solver(m);
  const Eigen::VectorXd w = hodge1(m);
  for (const auto& loop : basis.generators) {
    const Eigen::VectorXd c = loop_cochain(m, loop);
    const Eigen::VectorXd cw = c.cwiseQuotient(w);
    const Eigen::VectorXd beta = faceSolver.solve(-face_circulation(m, cw), 1e-9);
    basis.forms.push_back(cw + coexact_form(m, beta));
  }

  const int n = 2 * g;
  basis.gram.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) basis.gram(i, j) = basis.gram(j, i) = form_inner(m, basis.forms[i], basis.forms[j]);

  for (const auto& form : basis.forms) {
    const double scale = form.cwiseAbs().maxCoeff();
    const double closure = face_circulation(m, form).cwiseAbs().maxCoeff() / scale;
    const double div = vertex_divergence(m, form).cwiseAbs().maxCoeff() / (scale * w.cwiseAbs().maxCoeff());
    if (closure > 1e-8 || div > 1e-8) {
      std::ostringstream msg;
      msg << "harmonic form residuals too large: closure " << closure << ", divergence " << div;
      throw NumericalError(msg.str());
    }
  }
  return basis;
}

} // namespace glv

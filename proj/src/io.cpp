#include "glvortex/io.hpp"

#include "glvortex/errors.hpp"
#include "glvortex/tensor.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace glv {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json section_to_json(const Section& u, const Eigen::VectorXd& fluxes, const Configuration& config) {
  nlohmann::json j;
  j["values"] = nlohmann::json::array();
  for (Eigen::Index v = 0; v < u.size(); ++v) j["values"].push_back({u[v].real(), u[v].imag()});
  j["fluxes"] = std::vector<double>(fluxes.data(), fluxes.data() + fluxes.size());
  j["config"] = config.points;
  return j;
}

nlohmann::json vortices_to_json(const VortexSet& set) {
  nlohmann::json j;
  j["total_degree"] = set.totalDegree;
  j["vortices"] = nlohmann::json::array();
  for (const Vortex& v : set.items)
    j["vortices"].push_back({{"face", v.face},
                             {"degree", v.degree},
                             {"position", {v.position.x(), v.position.y(), v.position.z()}}});
  j["flagged_faces"] = set.flaggedFaces;
  return j;
}

nlohmann::json vec3_list_to_json(const std::vector<Vec3>& points) {
  nlohmann::json j = nlohmann::json::array();
  for (const Vec3& p : points) j.push_back({p.x(), p.y(), p.z()});
  return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

void write_convergence_csv(const std::string& path, const std::vector<IterationRecord>& history) {
  auto out = open_output(path);
  out << "stage,iter,energy,gradnorm\n";
  for (const auto& r : history)
    out << r.stage << ',' << r.iter << ',' << format_double(r.energy) << ',' << format_double(r.gradNorm) << '\n';
}

void write_connection_csv(const std::string& path, const DiscreteBundle& bundle) {
  const SurfaceMesh& m = bundle.mesh();
  auto out = open_output(path);
  out << "tail,head,rho\n";
  for (int h = 0; h < m.num_halfedges(); ++h)
    out << m.he_tail(h) << ',' << m.he_head(h) << ',' << format_double(bundle.rho_halfedge(h)) << '\n';
}

void write_ply(const std::string& path, const SurfaceMesh& mesh, const std::vector<PlyScalar>& scalars,
               const std::vector<PlyVector>& vectors) {
  const size_t n = static_cast<size_t>(mesh.num_vertices());
  for (const auto& s : scalars)
    if (s.values.size() != n) throw DomainError("PLY scalar '" + s.name + "' has the wrong length");
  for (const auto& v : vectors)
    if (v.values.size() != n) throw DomainError("PLY vector '" + v.name + "' has the wrong length");

  auto out = open_output(path);
  out << "ply\nformat ascii 1.0\nelement vertex " << n << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  for (const auto& s : scalars) out << "property double " << s.name << '\n';
  for (const auto& v : vectors)
    for (const char* c : {"_x", "_y", "_z"}) out << "property double " << v.name << c << '\n';
  out << "element face " << mesh.num_faces() << "\nproperty list uchar int vertex_indices\nend_header\n";
  for (size_t i = 0; i < n; ++i) {
    const Vec3& p = mesh.position(static_cast<int>(i));
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z());
    for (const auto& s : scalars) out << ' ' << format_double(s.values[i]);
    for (const auto& v : vectors)
      for (int c = 0; c < 3; ++c) out << ' ' << format_double(v.values[i][c]);
    out << '\n';
  }
  for (const auto& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

std::vector<std::vector<Vec3>> rosy_directions(const DiscreteBundle& bundle, const Section& u) {
  const SurfaceMesh& m = bundle.mesh();
  const int k = bundle.rank();
  if (k < 1) return {};
  const auto field = section_to_tensor_field(bundle, u, k);
  std::vector<std::vector<Vec3>> dirs(k, std::vector<Vec3>(m.num_vertices(), Vec3::Zero()));
  for (int v = 0; v < m.num_vertices(); ++v) {
    const auto angles = rosy_angles(field[v]);
    const TangentFrame& fr = m.frame(v);
    for (size_t i = 0; i < angles.size(); ++i) dirs[i][v] = std::cos(angles[i]) * fr.e1 + std::sin(angles[i]) * fr.e2;
  }
  return dirs;
}

std::map<std::string, std::string> parse_config_text(const std::string& text, const std::set<std::string>& allowed) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineNo) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("config line " + std::to_string(lineNo) + ": empty key");
    if (!allowed.count(key)) throw ParseError("config line " + std::to_string(lineNo) + ": unknown key '" + key + "'");
    if (!out.emplace(key, value).second)
      throw ParseError("config line " + std::to_string(lineNo) + ": repeated key '" + key + "'");
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path, const std::set<std::string>& allowed) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), allowed);
}

} // namespace glv

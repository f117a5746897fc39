#pragma once

#include "glvortex/connection.hpp"
#include "glvortex/gl.hpp"
#include "glvortex/harmonic.hpp"
#include "glvortex/vortex.hpp"

#include <json.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace glv {

// 17 significant digits.
std::string format_double(double x);

nlohmann::json section_to_json(const Section& u, const Eigen::VectorXd& fluxes, const Configuration& config);
nlohmann::json vortices_to_json(const VortexSet& set);
nlohmann::json vec3_list_to_json(const std::vector<Vec3>& points);
void write_json(const std::string& path, const nlohmann::json& j);

// stage,iter,energy,gradnorm
void write_convergence_csv(const std::string& path, const std::vector<IterationRecord>& history);
// tail,head,rho for every directed edge. Debugging aid; the layout may change.
void write_connection_csv(const std::string& path, const DiscreteBundle& bundle);

struct PlyScalar {
  std::string name;
  std::vector<double> values;
};
struct PlyVector {
  std::string name;
  std::vector<Vec3> values;
};

// ASCII PLY with per-vertex scalar and 3-vector properties
// (a vector named "d" becomes properties d_x, d_y, d_z).
void write_ply(const std::string& path, const SurfaceMesh& mesh, const std::vector<PlyScalar>& scalars,
               const std::vector<PlyVector>& vectors);

// The k unit directions of the rank-k field at every vertex, in world
// coordinates; zero vectors where the section vanishes.
std::vector<std::vector<Vec3>> rosy_directions(const DiscreteBundle& bundle, const Section& u);

// `key = value` lines, `#` comments and blank lines. Throws ParseError on a
// malformed line, a repeated key or a key outside `allowed`.
std::map<std::string, std::string> parse_config_file(const std::string& path, const std::set<std::string>& allowed);
std::map<std::string, std::string> parse_config_text(const std::string& text, const std::set<std::string>& allowed);

} // namespace glv

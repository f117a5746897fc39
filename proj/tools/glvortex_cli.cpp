#include "glvortex/connection.hpp"
#include "glvortex/crosscheck.hpp"
#include "glvortex/errors.hpp"
#include "glvortex/gl.hpp"
#include "glvortex/harmonic.hpp"
#include "glvortex/io.hpp"
#include "glvortex/mesh.hpp"
#include "glvortex/renorm.hpp"
#include "glvortex/rng.hpp"
#include "glvortex/selftest.hpp"
#include "glvortex/vortex.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <set>
#include <string>
#include <vector>

namespace {

using namespace glv;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitTolerance = 3;

class UsageError : public Error {
public:
  using Error::Error;
};

struct MeshSource {
  std::string path;
  int icosphere = -1;
  bool torus = false;
  double torusMajor = 1.0;
  double torusMinor = 0.4;
  int torusU = 40;
  int torusV = 16;
};

void add_mesh_options(CLI::App* sub, MeshSource& src) {
  sub->add_option("--mesh", src.path, "Triangle mesh in OBJ format");
  sub->add_option("--icosphere", src.icosphere, "Use a unit icosphere with this many subdivisions");
  sub->add_flag("--torus", src.torus, "Use a torus of revolution");
  sub->add_option("--torus-major", src.torusMajor, "Torus major radius")->capture_default_str();
  sub->add_option("--torus-minor", src.torusMinor, "Torus minor radius")->capture_default_str();
  sub->add_option("--torus-u", src.torusU, "Torus samples around the major circle")->capture_default_str();
  sub->add_option("--torus-v", src.torusV, "Torus samples around the minor circle")->capture_default_str();
}

std::shared_ptr<const SurfaceMesh> load_source(const MeshSource& src, int defaultIcosphere = -1) {
  const int chosen = (!src.path.empty()) + (src.icosphere >= 0) + src.torus;
  if (chosen > 1) throw UsageError("give only one of --mesh, --icosphere, --torus");
  if (!src.path.empty()) return std::make_shared<const SurfaceMesh>(load_mesh(src.path));
  if (src.torus) return std::make_shared<const SurfaceMesh>(build_torus(src.torusMajor, src.torusMinor, src.torusU, src.torusV));
  const int level = src.icosphere >= 0 ? src.icosphere : defaultIcosphere;
  if (level < 0) throw UsageError("no mesh given; use --mesh, --icosphere or --torus");
  if (level > 8) throw UsageError("icosphere subdivision above 8 is not supported");
  return std::make_shared<const SurfaceMesh>(build_icosphere(level));
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

void write_field_ply(const std::string& path, const DiscreteBundle& bundle, const Section& u) {
  std::vector<double> modulus(u.size());
  for (Eigen::Index v = 0; v < u.size(); ++v) modulus[v] = std::abs(u[v]);
  std::vector<PlyVector> vectors;
  const auto dirs = rosy_directions(bundle, u);
  for (size_t i = 0; i < dirs.size(); ++i) vectors.push_back({"dir" + std::to_string(i), dirs[i]});
  write_ply(path, bundle.mesh(), {{"modulus", modulus}}, vectors);
}

std::vector<Vec3> vortex_positions(const VortexSet& set) {
  std::vector<Vec3> pts;
  for (const Vortex& v : set.items)
    for (int i = 0; i < std::abs(v.degree); ++i) pts.push_back(v.position.normalized());
  return pts;
}

// --- mesh -------------------------------------------------------------------

struct MeshCmd {
  MeshSource src;
  int rank = 0;
  std::string out;
  std::string connectionCsv;
};

int run_mesh(const MeshCmd& c) {
  const auto mesh = load_source(c.src);
  double defects = 0.0;
  for (int v = 0; v < mesh->num_vertices(); ++v) defects += mesh->angle_defect(v);
  nlohmann::ordered_json j;
  j["vertices"] = mesh->num_vertices();
  j["edges"] = mesh->num_edges();
  j["faces"] = mesh->num_faces();
  j["euler_characteristic"] = mesh->euler_characteristic();
  j["genus"] = mesh->genus();
  j["total_area"] = mesh->total_area();
  j["mean_edge_length"] = mesh->mean_edge_length();
  j["gauss_bonnet_error"] = std::abs(defects - 2.0 * std::numbers::pi * mesh->euler_characteristic());
  if (c.rank < 0) throw UsageError("--rank must be non-negative");
  if (c.rank > 0) {
    const DiscreteBundle bundle = levi_civita_connection(mesh, c.rank);
    j["rank"] = c.rank;
    j["euler_number"] = bundle.euler_number();
    if (!c.connectionCsv.empty()) write_connection_csv(c.connectionCsv, bundle);
  } else if (!c.connectionCsv.empty()) {
    throw UsageError("--connection-csv needs --rank >= 1");
  }
  if (!c.out.empty()) save_obj(*mesh, c.out);
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

// --- minimize ---------------------------------------------------------------

struct MinimizeCmd {
  MeshSource src;
  int rank = 0;
  int seeds = 1;
  uint64_t seed = 1;
  double epsStart = -1.0;
  double epsEnd = -1.0;
  int stages = 5;
  int maxIters = 1000;
  double gradTol = 1e-5;
  std::string out;
};

int run_minimize(const MinimizeCmd& c) {
  if (c.rank < 1) throw UsageError("--rank must be at least 1");
  if (c.seeds < 1) throw UsageError("--seeds must be at least 1");
  if (c.stages < 1) throw UsageError("--stages must be at least 1");
  if (c.maxIters < 1) throw UsageError("--max-iters must be at least 1");
  if (!(c.gradTol > 0.0)) throw UsageError("--grad-tol must be positive");
  const auto mesh = load_source(c.src);
  const DiscreteBundle bundle = levi_civita_connection(mesh, c.rank);

  GLParams params;
  const double start = c.epsStart > 0.0 ? c.epsStart : 0.5 * mesh->circumradius();
  const double end = c.epsEnd > 0.0 ? c.epsEnd : 3.0 * mesh->mean_edge_length();
  params.schedule = c.stages == 1 ? std::vector<double>{end} : geometric_schedule(start, end, c.stages);
  params.maxIters = c.maxIters;
  params.gradTol = c.gradTol;
  if (!c.out.empty()) ensure_dir(c.out);

  struct Run {
    uint64_t seed;
    MinimizeResult result;
    VortexSet vortices;
    double energy;
  };
  std::vector<Run> runs;
  bool invariantBroken = false;
  for (int s = 0; s < c.seeds; ++s) {
    params.seed = derive_seed(c.seed, static_cast<uint64_t>(s));
    MinimizeResult res = minimize(bundle, params);
    for (const auto& w : res.warnings) std::cerr << "warning (seed " << s << "): " << w << '\n';
    VortexSet vs = detect_vortices(bundle, apply_modulus_floor(res.u));
    const double energy = res.stages.back().energy;
    std::printf("seed %d energy %.10g vortices %zu total_degree %d flagged %zu\n", s, energy, vs.items.size(),
                vs.totalDegree, vs.flaggedFaces.size());
    if (vs.totalDegree != bundle.euler_number()) {
      std::cerr << "error: total degree " << vs.totalDegree << " differs from Euler number " << bundle.euler_number()
                << '\n';
      invariantBroken = true;
    }
    runs.push_back({params.seed, std::move(res), std::move(vs), energy});
  }

  const auto best = std::min_element(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.energy < b.energy; });
  std::printf("best seed %d energy %.10g vortices %zu\n", static_cast<int>(best - runs.begin()), best->energy,
              best->vortices.items.size());
  if (mesh->genus() == 0) {
    const auto pts = vortex_positions(best->vortices);
    const ReferencePolyhedron ref = reference_for_count(static_cast<int>(pts.size()));
    if (!ref.name.empty())
      std::printf("distance to %s %.6g rad\n", ref.name.c_str(), configuration_distance(pts, ref));
  }

  if (!c.out.empty()) {
    write_json(out_path(c.out, "section.json"), section_to_json(best->result.u, Eigen::VectorXd(), Configuration{}));
    write_json(out_path(c.out, "vortices.json"), vortices_to_json(best->vortices));
    write_convergence_csv(out_path(c.out, "convergence.csv"), best->result.history);
    write_field_ply(out_path(c.out, "field.ply"), bundle, best->result.u);
    auto csv = open_csv(out_path(c.out, "seeds.csv"));
    csv << "seed,energy,vortices,total_degree\n";
    for (const Run& r : runs)
      csv << r.seed << ',' << format_double(r.energy) << ',' << r.vortices.items.size() << ','
          << r.vortices.totalDegree << '\n';
  }
  return invariantBroken ? kExitInvariant : kExitOk;
}

// --- renorm -----------------------------------------------------------------

struct RenormCmd {
  MeshSource src;
  int d = 0;
  int rank = 0;
  int seeds = 20;
  uint64_t seed = 1;
  double tol = 1e-3;
  int maxIters = 20000;
  double gradTol = 1e-11;
  int threads = 0;
  std::string out;
};

int run_renorm(const RenormCmd& c) {
  const bool onMesh = !c.src.path.empty() || c.src.icosphere >= 0 || c.src.torus;
  if (c.seeds < 1) throw UsageError("--seeds must be at least 1");
  if (c.d != 0 && c.rank != 0) throw UsageError("give only one of --d and --rank");
  if (onMesh && c.rank < 1) throw UsageError("a mesh run needs --rank >= 1");
  if (c.rank < 0) throw UsageError("--rank must be positive");

  std::vector<Vec3> points;
  double value = 0.0;
  std::vector<SeedRun> runs;
  int d = 0;
  if (onMesh) {
    const auto mesh = load_source(c.src);
    const DiscreteBundle bundle = levi_civita_connection(mesh, c.rank);
    d = std::abs(bundle.euler_number());
    const HarmonicBasis basis = harmonic_basis(bundle);
    GreenCache cache(mesh);
    const Psi0 psi0 = psi0_and_energy(bundle);
    auto energy = [&](const Configuration& cfg) {
      Eigen::VectorXd fluxes;
      if (!basis.forms.empty()) fluxes = lattice_offsets(bundle, cfg, basis, 1).front().fluxes;
      return general_W(bundle, cfg, fluxes, &cache, &psi0).total;
    };
    MeshOptions mo;
    mo.seeds = c.seeds;
    mo.masterSeed = c.seed;
    const MeshOptimizeResult res = optimize_mesh_configuration(*mesh, d, energy, mo);
    for (int v : res.config.points) points.push_back(mesh->position(v));
    value = res.value;
    runs = res.runs;
  } else {
    d = c.rank > 0 ? 2 * c.rank : c.d;
    if (d < 2) throw UsageError("--d must be at least 2");
    SphereOptions so;
    so.seeds = c.seeds;
    so.masterSeed = c.seed;
    so.maxIters = c.maxIters;
    so.gradTol = c.gradTol;
    so.threads = c.threads;
    const OptimizeResult res = optimize_sphere_configuration(d, so);
    points = res.points;
    value = res.value;
    runs = res.runs;
  }

  std::printf("d %d value %.17g\n", d, value);
  const ReferencePolyhedron ref = onMesh && c.src.torus ? ReferencePolyhedron{} : reference_for_count(d);
  int code = kExitOk;
  double distance = -1.0;
  if (ref.name.empty()) {
    std::printf("no reference polyhedron\n");
  } else {
    std::vector<Vec3> unit;
    for (const Vec3& p : points) unit.push_back(p.normalized());
    distance = configuration_distance(unit, ref);
    std::printf("distance to %s %.6g rad (tolerance %.3g)\n", ref.name.c_str(), distance, c.tol);
    if (!(distance < c.tol)) code = kExitTolerance;
  }

  if (!c.out.empty()) {
    ensure_dir(c.out);
    auto csv = open_csv(out_path(c.out, "seeds.csv"));
    csv << "seed,value,iterations,converged\n";
    for (const SeedRun& r : runs)
      csv << r.seed << ',' << format_double(r.value) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
    nlohmann::ordered_json j;
    j["d"] = d;
    j["value"] = value;
    j["points"] = vec3_list_to_json(points);
    j["reference"] = ref.name;
    if (distance >= 0.0) j["distance"] = distance;
    write_json(out_path(c.out, "best.json"), j);
  }
  return code;
}

// --- harmonic ---------------------------------------------------------------

struct HarmonicCmd {
  MeshSource src;
  int rank = 0;
  std::vector<int> points;
  std::string polyhedron;
  int fluxWindow = 2;
  int fluxIndex = 0;
  double rho0 = -1.0;
  std::string out;
};

int run_harmonic(const HarmonicCmd& c) {
  if (c.rank < 1) throw UsageError("--rank must be at least 1");
  if (!c.points.empty() && !c.polyhedron.empty()) throw UsageError("give only one of --points and --polyhedron");
  const auto mesh = load_source(c.src);
  const DiscreteBundle bundle = levi_civita_connection(mesh, c.rank);
  const int d = std::abs(bundle.euler_number());

  Configuration config;
  if (!c.points.empty()) {
    config = make_configuration(*mesh, c.points);
  } else if (d > 0) {
    const std::string name = !c.polyhedron.empty() ? c.polyhedron : reference_for_count(d).name;
    if (name.empty()) throw UsageError("no default configuration for d = " + std::to_string(d) + "; use --points");
    if (mesh->genus() != 0) throw UsageError("--polyhedron needs a sphere mesh");
    config = snap_configuration(*mesh, reference_polyhedron(name).vertices);
  }

  const HarmonicBasis basis = harmonic_basis(bundle);
  Eigen::VectorXd fluxes;
  if (!basis.forms.empty()) {
    const auto candidates = lattice_offsets(bundle, config, basis, c.fluxWindow);
    if (c.fluxIndex < 0 || c.fluxIndex >= static_cast<int>(candidates.size()))
      throw UsageError("--flux-index outside the candidate list");
    fluxes = candidates[c.fluxIndex].fluxes;
  }
  const CanonicalSection section = canonical_harmonic_section(bundle, config, fluxes, basis);
  const VortexSet vs = detect_vortices(bundle, apply_modulus_floor(section.u));
  const RenormalizedEnergy lim = renormalized_energy_limit(bundle, section, config, c.rho0);
  const WBreakdown w = general_W(bundle, config, fluxes);

  std::printf("d %d genus %d\n", config.d(), mesh->genus());
  for (Eigen::Index i = 0; i < fluxes.size(); ++i) std::printf("flux %d %.10g\n", static_cast<int>(i), fluxes[i]);
  std::printf("vortices %zu total_degree %d flagged %zu\n", vs.items.size(), vs.totalDegree, vs.flaggedFaces.size());
  std::printf("renormalized limit %.10g (error %.3g)\n", lim.value, lim.errorEstimate);
  std::printf("closed form %.10g (pairs %.10g self %.10g psi0 %.10g flux %.10g)\n", w.total, w.pairTerm, w.selfTerm,
              w.psi0Term, w.fluxTerm);

  if (!c.out.empty()) {
    ensure_dir(c.out);
    write_json(out_path(c.out, "section.json"), section_to_json(section.u, fluxes, config));
    write_json(out_path(c.out, "vortices.json"), vortices_to_json(vs));
    write_field_ply(out_path(c.out, "field.ply"), bundle, section.u);
  }
  return vs.totalDegree == bundle.euler_number() ? kExitOk : kExitInvariant;
}

// --- crosscheck -------------------------------------------------------------

struct CrosscheckCmd {
  MeshSource src;
  int rank = 2;
  std::string polyhedron;
  CrosscheckOptions options;
  std::string out;
};

int run_crosscheck_cmd(const CrosscheckCmd& c) {
  if (c.rank < 1) throw UsageError("--rank must be at least 1");
  const auto mesh = load_source(c.src, 5);
  if (mesh->genus() != 0) throw UsageError("crosscheck needs a sphere mesh");
  const DiscreteBundle bundle = levi_civita_connection(mesh, c.rank);
  const int d = std::abs(bundle.euler_number());
  const std::string name = !c.polyhedron.empty() ? c.polyhedron : reference_for_count(d).name;
  if (name.empty()) throw UsageError("no reference polyhedron for d = " + std::to_string(d));
  const ReferencePolyhedron ref = reference_polyhedron(name);
  if (static_cast<int>(ref.vertices.size()) != d)
    throw UsageError(name + " has " + std::to_string(ref.vertices.size()) + " vertices, need " + std::to_string(d));
  const Configuration config = snap_configuration(*mesh, ref.vertices);

  const CrosscheckReport rep = run_crosscheck(bundle, config, c.options);
  std::printf("quantity,value\n");
  std::printf("renormalized_limit,%.10g\n", rep.limit);
  std::printf("limit_error_estimate,%.3g\n", rep.limitError);
  std::printf("closed_form_sphere,%.10g\n", rep.closedForm);
  std::printf("closed_form_mesh,%.10g\n", rep.general.total);
  std::printf("rel_diff_sphere,%.4g\n", rep.limitVsClosed);
  std::printf("rel_diff_mesh,%.4g\n", rep.limitVsGeneral);
  std::printf("gamma,%.10g\n", rep.gamma);
  std::printf("bracket_target,%.10g\n", rep.bracketTarget);
  std::printf("\nepsilon,energy,reduced,rel_gap\n");
  for (const BracketRow& r : rep.bracket)
    std::printf("%.6g,%.10g,%.10g,%.4g\n", r.epsilon, r.energy, r.reduced, r.relativeGap);
  std::printf("\nlimit check: %s\n", rep.limitPassed ? "pass" : "fail");
  std::printf("bracket check: %s%s\n", rep.bracketPassed ? "pass" : "fail",
              rep.bracketDecreasing ? "" : " (not decreasing)");

  if (!c.out.empty()) {
    ensure_dir(c.out);
    auto csv = open_csv(out_path(c.out, "bracket.csv"));
    csv << "epsilon,energy,reduced,rel_gap\n";
    for (const BracketRow& r : rep.bracket)
      csv << format_double(r.epsilon) << ',' << format_double(r.energy) << ',' << format_double(r.reduced) << ','
          << format_double(r.relativeGap) << '\n';
    nlohmann::ordered_json j;
    j["limit"] = rep.limit;
    j["limit_error"] = rep.limitError;
    j["closed_form_sphere"] = rep.closedForm;
    j["closed_form_mesh"] = rep.general.total;
    j["gamma"] = rep.gamma;
    j["bracket_target"] = rep.bracketTarget;
    j["limit_passed"] = rep.limitPassed;
    j["bracket_passed"] = rep.bracketPassed;
    write_json(out_path(c.out, "crosscheck.json"), j);
  }
  return rep.limitPassed && rep.bracketPassed ? kExitOk : kExitTolerance;
}

// --- tensor-selftest --------------------------------------------------------

int run_tensor_selftest() {
  bool ok = true;
  for (const SelftestCheck& c : tensor_selftest()) {
    std::printf("%s %-16s %.3g\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.error);
    ok = ok && c.passed;
  }
  return ok ? kExitOk : kExitTolerance;
}

// --- config file ------------------------------------------------------------

// Pulls `--config FILE` out of args and inserts its keys as `--key=value`
// right after the subcommand, unless the flag is also given directly.
std::vector<std::string> apply_config_file(CLI::App& app, std::vector<std::string> args) {
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file name");
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;

  size_t subPos = args.size();
  CLI::App* sub = nullptr;
  for (size_t i = 0; i < args.size() && !sub; ++i)
    for (CLI::App* s : app.get_subcommands({}))
      if (s->get_name() == args[i]) {
        sub = s;
        subPos = i;
        break;
      }
  if (!sub) throw UsageError("--config needs a subcommand");

  std::set<std::string> allowed;
  for (const CLI::Option* opt : sub->get_options())
    for (const std::string& n : opt->get_lnames())
      if (n != "help") allowed.insert(n);
  const auto entries = parse_config_file(path, allowed);

  std::vector<std::string> injected;
  for (const auto& [key, value] : entries) {
    const std::string flag = "--" + key;
    const bool overridden = std::any_of(args.begin() + subPos + 1, args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!overridden) injected.push_back(flag + "=" + value);
  }
  args.insert(args.begin() + subPos + 1, injected.begin(), injected.end());
  return args;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ginzburg-Landau vortices of tangent tensor fields on triangle meshes"};
  app.require_subcommand(1);
  std::string configDoc;
  app.add_option("--config", configDoc,
                 "File of `key = value` lines (# starts a comment). Keys are the long option names of the "
                 "subcommand without dashes; flags given on the command line win.");

  MeshCmd meshCmd;
  auto* meshSub = app.add_subcommand("mesh", "Build or load a mesh and print its invariants as JSON");
  add_mesh_options(meshSub, meshCmd.src);
  meshSub->add_option("--rank", meshCmd.rank, "Also report the Euler number of the rank-k bundle")->capture_default_str();
  meshSub->add_option("--out", meshCmd.out, "Write the mesh as OBJ");
  meshSub->add_option("--connection-csv", meshCmd.connectionCsv, "Write the connection angles as CSV");

  MinimizeCmd minCmd;
  auto* minSub = app.add_subcommand("minimize", "Minimize the Ginzburg-Landau energy and report vortices");
  add_mesh_options(minSub, minCmd.src);
  minSub->add_option("--rank", minCmd.rank, "Tensor rank k >= 1")->required();
  minSub->add_option("--seeds", minCmd.seeds, "Number of random starts")->capture_default_str();
  minSub->add_option("--seed", minCmd.seed, "Master seed")->capture_default_str();
  minSub->add_option("--eps-start", minCmd.epsStart, "First epsilon (default half the circumradius)");
  minSub->add_option("--eps-end", minCmd.epsEnd, "Last epsilon (default 3 mean edge lengths)");
  minSub->add_option("--stages", minCmd.stages, "Number of epsilon stages")->capture_default_str();
  minSub->add_option("--max-iters", minCmd.maxIters, "Iterations per stage")->capture_default_str();
  minSub->add_option("--grad-tol", minCmd.gradTol, "Gradient max-norm tolerance")->capture_default_str();
  minSub->add_option("--out", minCmd.out, "Output directory for JSON, CSV and PLY artifacts");

  RenormCmd renCmd;
  auto* renSub = app.add_subcommand("renorm", "Minimize the renormalized energy over configurations");
  add_mesh_options(renSub, renCmd.src);
  renSub->add_option("--d", renCmd.d, "Number of points on the unit sphere");
  renSub->add_option("--rank", renCmd.rank, "Tensor rank; d = 2k on the sphere, required with a mesh");
  renSub->add_option("--seeds", renCmd.seeds, "Number of random starts")->capture_default_str();
  renSub->add_option("--seed", renCmd.seed, "Master seed")->capture_default_str();
  renSub->add_option("--tol", renCmd.tol, "Allowed distance to the reference polyhedron (rad)")->capture_default_str();
  renSub->add_option("--max-iters", renCmd.maxIters, "Iterations per start")->capture_default_str();
  renSub->add_option("--grad-tol", renCmd.gradTol, "Tangential gradient tolerance")->capture_default_str();
  renSub->add_option("--threads", renCmd.threads, "Worker threads (0 = all cores)")->capture_default_str();
  renSub->add_option("--out", renCmd.out, "Output directory for seeds.csv and best.json");

  HarmonicCmd harCmd;
  auto* harSub = app.add_subcommand("harmonic", "Build the canonical harmonic section of a configuration");
  add_mesh_options(harSub, harCmd.src);
  harSub->add_option("--rank", harCmd.rank, "Tensor rank k >= 1")->required();
  harSub->add_option("--points", harCmd.points, "Comma-separated vertex indices")->delimiter(',');
  harSub->add_option("--polyhedron", harCmd.polyhedron, "tetrahedron, cross-polytope or icosahedron, snapped to vertices");
  harSub->add_option("--flux-window", harCmd.fluxWindow, "Lattice offsets searched per generator")->capture_default_str();
  harSub->add_option("--flux-index", harCmd.fluxIndex, "Index into the flux candidates sorted by norm")->capture_default_str();
  harSub->add_option("--rho0", harCmd.rho0, "Largest excision radius (default a quarter of the minimum distance)");
  harSub->add_option("--out", harCmd.out, "Output directory for JSON and PLY artifacts");

  CrosscheckCmd ccCmd;
  auto* ccSub = app.add_subcommand("crosscheck", "Compare the renormalized energy definitions and the energy bracket");
  add_mesh_options(ccSub, ccCmd.src);
  ccSub->add_option("--rank", ccCmd.rank, "Tensor rank k >= 1")->capture_default_str();
  ccSub->add_option("--polyhedron", ccCmd.polyhedron, "Reference configuration (default by point count)");
  ccSub->add_option("--rho0", ccCmd.options.rho0, "Largest excision radius (default a quarter of the minimum distance)");
  ccSub->add_option("--eps", ccCmd.options.epsilons, "Comma-separated epsilons, decreasing")->delimiter(',');
  ccSub->add_option("--limit-tol", ccCmd.options.limitTolerance, "Relative tolerance of the limit check")
      ->capture_default_str();
  ccSub->add_option("--bracket-tol", ccCmd.options.bracketTolerance, "Relative tolerance of the bracket check")
      ->capture_default_str();
  ccSub->add_option("--out", ccCmd.out, "Output directory for bracket.csv and crosscheck.json");

  auto* tsSub = app.add_subcommand("tensor-selftest", "Check the tensor algebra against explicit expansions");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config_file(app, std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (meshSub->parsed()) return run_mesh(meshCmd);
    if (minSub->parsed()) return run_minimize(minCmd);
    if (renSub->parsed()) return run_renorm(renCmd);
    if (harSub->parsed()) return run_harmonic(harCmd);
    if (ccSub->parsed()) return run_crosscheck_cmd(ccCmd);
    if (tsSub->parsed()) return run_tensor_selftest();
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const StagnationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const InconsistencyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const AmbiguityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

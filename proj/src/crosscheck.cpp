#include "glvortex/crosscheck.hpp"

#include "glvortex/errors.hpp"
#include "glvortex/gl.hpp"

#include <cmath>
#include <numbers>

namespace glv {

CrosscheckReport run_crosscheck(const DiscreteBundle& bundle, const Configuration& config,
                                const CrosscheckOptions& options) {
  const SurfaceMesh& m = bundle.mesh();
  if (m.genus() != 0) throw DomainError("crosscheck needs a genus-0 mesh");
  if (options.epsilons.empty()) throw DomainError("crosscheck needs at least one epsilon");

  CrosscheckReport rep;
  const Eigen::VectorXd noFlux;
  const CanonicalSection section = canonical_harmonic_section(bundle, config, noFlux);
  const RenormalizedEnergy lim = renormalized_energy_limit(bundle, section, config, options.rho0);
  rep.limit = lim.value;
  rep.limitError = lim.errorEstimate;

  std::vector<Vec3> points;
  for (int v : config.points) points.push_back(m.position(v));
  rep.closedForm = normalized_sphere_W(points);
  rep.general = general_W(bundle, config, noFlux);
  rep.limitVsClosed = std::abs(rep.limit - rep.closedForm) / std::abs(rep.closedForm);
  rep.limitVsGeneral = std::abs(rep.limit - rep.general.total) / std::abs(rep.general.total);
  rep.limitPassed = rep.limitVsClosed < options.limitTolerance && rep.limitVsGeneral < options.limitTolerance;

  const int d = config.d();
  rep.gamma = bbh_gamma();
  rep.bracketTarget = d * rep.gamma + rep.closedForm;
  for (double eps : options.epsilons) {
    BracketRow row;
    row.epsilon = eps;
    row.energy = gl_energy(bundle, build_test_section(bundle, section, eps), eps);
    row.reduced = row.energy - std::numbers::pi * d * std::log(1.0 / eps);
    row.relativeGap = std::abs(row.reduced - rep.bracketTarget) / std::abs(rep.bracketTarget);
    rep.bracket.push_back(row);
  }
  rep.bracketDecreasing = true;
  for (size_t i = 1; i < rep.bracket.size(); ++i)
    if (!(rep.bracket[i].reduced < rep.bracket[i - 1].reduced)) rep.bracketDecreasing = false;
  rep.bracketPassed = rep.bracketDecreasing && rep.bracket.back().relativeGap < options.bracketTolerance;
  return rep;
}

} // namespace glv

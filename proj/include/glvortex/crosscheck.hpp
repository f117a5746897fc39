#pragma once

#include "glvortex/connection.hpp"
#include "glvortex/harmonic.hpp"
#include "glvortex/renorm.hpp"

#include <vector>

namespace glv {

struct CrosscheckOptions {
  double rho0 = -1.0;
  std::vector<double> epsilons{0.2, 0.1, 0.05};
  double limitTolerance = 0.02;
  double bracketTolerance = 0.10;
};

struct BracketRow {
  double epsilon = 0.0;
  double energy = 0.0;
  // energy - pi d log(1 / eps)
  double reduced = 0.0;
  double relativeGap = 0.0;
};

struct CrosscheckReport {
  double limit = 0.0;
  double limitError = 0.0;
  double closedForm = 0.0;      // normalized sphere W of the snapped points
  WBreakdown general;           // Green-function formula on the mesh
  double limitVsClosed = 0.0;   // relative differences
  double limitVsGeneral = 0.0;
  double gamma = 0.0;
  double bracketTarget = 0.0;   // d gamma + closed form
  std::vector<BracketRow> bracket;
  bool bracketDecreasing = false;
  bool limitPassed = false;
  bool bracketPassed = false;
};

// Compares the renormalized energy limit of the canonical section with the
// closed forms, then the energies of build_test_section over the epsilons
// against pi d log(1/eps) + d gamma + W. Genus-0 meshes only; throws
// DomainError otherwise. The bracket passes when the reduced energies
// decrease and the last one is within bracketTolerance of the target.
CrosscheckReport run_crosscheck(const DiscreteBundle& bundle, const Configuration& config,
                                const CrosscheckOptions& options = {});

} // namespace glv

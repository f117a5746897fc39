#pragma once

#include "glvortex/connection.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace glv {

struct Vortex {
  int face = -1;
  int degree = 0;
  Vec3 position = Vec3::Zero();
  // Winding before rounding.
  double rawDegree = 0.0;
};

struct VortexSet {
  std::vector<Vortex> items;
  int totalDegree = 0;
  // Faces whose winding was more than 0.2 away from an integer.
  std::vector<int> flaggedFaces;
};

// Per-face winding of u plus the face curvature, in units of 2 pi.
// Throws AmbiguityError when a vertex of some face has u = 0.
VortexSet detect_vortices(const DiscreteBundle& bundle, const Section& u);

// Replaces values with modulus below floor by the real number floor, so
// singular vertices of a canonical section can be classified.
Section apply_modulus_floor(const Section& u, double floor = 1e-8);

struct ReferencePolyhedron {
  std::string name;
  std::vector<Vec3> vertices;
};

// "tetrahedron", "cross-polytope" or "icosahedron"; unit circumradius.
ReferencePolyhedron reference_polyhedron(const std::string& name);
// Reference with the given vertex count (4, 6, 12); empty name otherwise.
ReferencePolyhedron reference_for_count(int n);

// Smallest max angle (radians) between points and a rotated, relabeled copy
// of the reference. Rotations are fitted with Kabsch; all assignments are
// enumerated for n <= 6, otherwise matching alternates with Kabsch from 50
// seeded random rotations. Throws DomainError on a size mismatch.
double configuration_distance(const std::vector<Vec3>& points, const ReferencePolyhedron& ref, uint64_t seed = 7);

// Rotation R minimizing sum |p_i - R q_i|^2.
Eigen::Matrix3d kabsch_rotation(const std::vector<Vec3>& p, const std::vector<Vec3>& q);

// Minimum-cost perfect matching; result[row] = column.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

} // namespace glv

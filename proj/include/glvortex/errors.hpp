#pragma once

#include <stdexcept>
#include <string>

namespace glv {

// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument value was violated (rank out of range,
// size mismatch, bad parameter).
class DomainError : public Error {
public:
  using Error::Error;
};

// An index or simplex does not exist.
class IndexError : public Error {
public:
  using Error::Error;
};

// Mesh generation was asked for more than the memory guard allows.
class SizeError : public Error {
public:
  using Error::Error;
};

// Degenerate or inconsistent geometry (tiny triangles, overlapping balls, ...).
class GeometryError : public Error {
public:
  using Error::Error;
};

// A linear solve or iterative method failed to reach its tolerance.
class NumericalError : public Error {
public:
  using Error::Error;
};

// Right-hand side of a Poisson problem does not integrate to zero.
class SolvabilityError : public Error {
public:
  using Error::Error;
};

// Flux vector does not satisfy the lattice congruence.
class InconsistencyError : public Error {
public:
  using Error::Error;
};

// Vortex degree cannot be decided because a section vanishes on a face.
class AmbiguityError : public Error {
public:
  using Error::Error;
};

// Line search could not decrease the energy.
class StagnationError : public Error {
public:
  using Error::Error;
};

// Coincident points in a logarithmic energy.
class SingularityError : public Error {
public:
  using Error::Error;
};

// Failed mesh validation; subclasses name the offending simplex.
class MeshValidationError : public Error {
public:
  using Error::Error;
};

class BoundaryEdgeError : public MeshValidationError {
public:
  BoundaryEdgeError(int a, int b)
      : MeshValidationError("boundary edge (" + std::to_string(a) + ", " + std::to_string(b) +
                            ") belongs to a single face"),
        v0(a), v1(b) {}
  int v0, v1;
};

class NonManifoldEdgeError : public MeshValidationError {
public:
  NonManifoldEdgeError(int a, int b, int count)
      : MeshValidationError("non-manifold edge (" + std::to_string(a) + ", " + std::to_string(b) +
                            ") is shared by " + std::to_string(count) + " faces"),
        v0(a), v1(b) {}
  int v0, v1;
};

class NonManifoldVertexError : public MeshValidationError {
public:
  explicit NonManifoldVertexError(int v)
      : MeshValidationError("vertex " + std::to_string(v) + " has a disconnected or missing face fan"),
        vertex(v) {}
  int vertex;
};

class OrientationError : public MeshValidationError {
public:
  OrientationError(int a, int b)
      : MeshValidationError("inconsistent orientation: directed edge (" + std::to_string(a) + ", " +
                            std::to_string(b) + ") appears in two faces"),
        v0(a), v1(b) {}
  int v0, v1;
};

class NonTriangleFaceError : public MeshValidationError {
public:
  NonTriangleFaceError(int faceIndex, int corners)
      : MeshValidationError("face " + std::to_string(faceIndex) + " has " + std::to_string(corners) +
                            " corners, only triangles are supported"),
        face(faceIndex) {}
  int face;
};

class ParseError : public Error {
public:
  using Error::Error;
};

} // namespace glv

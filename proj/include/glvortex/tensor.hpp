#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace glv {

class DiscreteBundle;
using Section = Eigen::VectorXcd;

inline constexpr int kMaxTensorRank = 12;

// Symmetric rank-k tensor over R^2 in the basis h(k, j), j = 0..k, where
// h(k, j) is the sum of the C(k, j) distinct arrangements of j copies of e1
// and k - j copies of e2. The basis is orthogonal but not normalized:
// <h(k, j), h(k, j)> = C(k, j). Rank 0 is a scalar with a single coefficient.
struct SymTensor {
  int rank = 0;
  std::vector<double> coeffs;

  SymTensor() = default;
  SymTensor(int k, std::vector<double> c);
  static SymTensor zero(int k);
};

// Element of ker(tr12) in coordinates (q_o, q_e) of the basis (Q_o(k), Q_e(k)).
struct SymTracelessTensor {
  int rank = 2;
  double q_o = 0.0;
  double q_e = 0.0;

  std::complex<double> as_complex() const { return {q_o, q_e}; }
};

int64_t binomial(int n, int k);

// Inner product induced by the product inner product on the full tensor space.
double inner(const SymTensor& a, const SymTensor& b);

// (k-1) x (k+1) matrix of the contraction in the first two slots; entries are
// 1 at (i, i) and (i, i + 2).
Eigen::MatrixXd trace_matrix(int k);
SymTensor trace12(const SymTensor& t);

// (Q_o(k), Q_e(k)) from the alternating sums over odd and even j.
std::pair<SymTensor, SymTensor> q_basis(int k);
// Same pair built by tensoring with e1, e2 from rank 2 upwards. Throws
// DomainError if a step fails to produce a symmetric tensor.
std::pair<SymTensor, SymTensor> q_basis_recurrence(int k);

SymTensor embed(const SymTracelessTensor& t);
// Rotation of the underlying plane by alpha acts on (q_o, q_e) as rotation by k * alpha.
SymTracelessTensor rotate(const SymTracelessTensor& t, double alpha);

// Angles (in the frame of the tensor) of the k unit directions n whose
// traceless part n^{(x)k} is a positive multiple of t. Empty for t = 0.
std::vector<double> rosy_angles(const SymTracelessTensor& t);

// Per-vertex tensor a Q_o + b Q_e for the section value a + ib, in the
// vertex frame. Throws DomainError on a rank or size mismatch.
std::vector<SymTracelessTensor> section_to_tensor_field(const DiscreteBundle& bundle, const Section& u, int k);

} // namespace glv

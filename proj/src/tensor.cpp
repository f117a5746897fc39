#include "glvortex/tensor.hpp"

#include "glvortex/connection.hpp"
#include "glvortex/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace glv {

namespace {

void require_rank(int k, int lo, int hi) {
  if (k < lo || k > hi)
    throw DomainError("tensor rank " + std::to_string(k) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
}

// e1 (x) t (first = +1) or e2 (x) t contributes to the arrangement with m
// copies of e1 and the given leading factor.
std::vector<double> tensor_with_basis(const SymTensor& withE1, double s1, const SymTensor& withE2, double s2) {
  const int k = withE1.rank;
  std::vector<double> out(k + 2, 0.0);
  for (int m = 0; m <= k + 1; ++m) {
    const bool hasE1Lead = m >= 1;
    const bool hasE2Lead = m <= k;
    const double fromE1 = hasE1Lead ? s1 * withE1.coeffs[m - 1] : 0.0;
    const double fromE2 = hasE2Lead ? s2 * withE2.coeffs[m] : 0.0;
    if (hasE1Lead && hasE2Lead && fromE1 != fromE2)
      throw DomainError("tensor recurrence produced a non-symmetric tensor at rank " + std::to_string(k + 1));
    out[m] = hasE1Lead ? fromE1 : fromE2;
  }
  return out;
}

} // namespace

SymTensor::SymTensor(int k, std::vector<double> c) : rank(k), coeffs(std::move(c)) {
  if (k < 0) throw DomainError("negative tensor rank");
  if (static_cast<int>(coeffs.size()) != k + 1) throw DomainError("SymTensor needs rank + 1 coefficients");
}

SymTensor SymTensor::zero(int k) { return SymTensor(k, std::vector<double>(k + 1, 0.0)); }

int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double inner(const SymTensor& a, const SymTensor& b) {
  if (a.rank != b.rank) throw DomainError("inner product of tensors with different ranks");
  double s = 0.0;
  for (int j = 0; j <= a.rank; ++j) s += a.coeffs[j] * b.coeffs[j] * static_cast<double>(binomial(a.rank, j));
  return s;
}

Eigen::MatrixXd trace_matrix(int k) {
  require_rank(k, 2, kMaxTensorRank);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k - 1, k + 1);
  for (int i = 0; i <= k - 2; ++i) {
    m(i, i) = 1.0;
    m(i, i + 2) = 1.0;
  }
  return m;
}

SymTensor trace12(const SymTensor& t) {
  if (t.rank < 2) throw DomainError("trace12 needs rank >= 2, got " + std::to_string(t.rank));
  const int k = t.rank;
  std::vector<double> out(k - 1, 0.0);
  for (int i = 0; i <= k - 2; ++i) out[i] = t.coeffs[i] + t.coeffs[i + 2];
  return SymTensor(k - 2, std::move(out));
}

std::pair<SymTensor, SymTensor> q_basis(int k) {
  require_rank(k, 2, kMaxTensorRank);
  SymTensor qo = SymTensor::zero(k), qe = SymTensor::zero(k);
  for (int i = 0; 2 * i + 1 <= k; ++i) qo.coeffs[2 * i + 1] = (i % 2 == 0) ? 1.0 : -1.0;
  for (int i = 0; 2 * i <= k; ++i) qe.coeffs[2 * i] = (i % 2 == 0) ? 1.0 : -1.0;
  return {qo, qe};
}

std::pair<SymTensor, SymTensor> q_basis_recurrence(int k) {
  require_rank(k, 2, kMaxTensorRank);
  SymTensor qo(2, {0.0, 1.0, 0.0});
  SymTensor qe(2, {1.0, 0.0, -1.0});
  for (int r = 2; r < k; ++r) {
    // Q_o(r+1) = e1 (x) Q_e(r) + e2 (x) Q_o(r),  Q_e(r+1) = -e1 (x) Q_o(r) + e2 (x) Q_e(r)
    SymTensor nextO(r + 1, tensor_with_basis(qe, 1.0, qo, 1.0));
    SymTensor nextE(r + 1, tensor_with_basis(qo, -1.0, qe, 1.0));
    qo = std::move(nextO);
    qe = std::move(nextE);
  }
  return {qo, qe};
}

SymTensor embed(const SymTracelessTensor& t) {
  const auto [qo, qe] = q_basis(t.rank);
  SymTensor out = SymTensor::zero(t.rank);
  for (int j = 0; j <= t.rank; ++j) out.coeffs[j] = t.q_o * qo.coeffs[j] + t.q_e * qe.coeffs[j];
  return out;
}

SymTracelessTensor rotate(const SymTracelessTensor& t, double alpha) {
  const double c = std::cos(t.rank * alpha);
  const double s = std::sin(t.rank * alpha);
  return {t.rank, c * t.q_o - s * t.q_e, s * t.q_o + c * t.q_e};
}

std::vector<double> rosy_angles(const SymTracelessTensor& t) {
  const std::complex<double> z = t.as_complex();
  if (std::abs(z) == 0.0) return {};
  const int k = t.rank;
  // Traceless part of e1^{(x)k}: its only h(k, k) weight sits in Q_o (k odd) or Q_e (k even).
  const std::complex<double> z0 =
      (k % 2 == 1) ? std::complex<double>((((k - 1) / 2) % 2 == 0) ? 1.0 : -1.0, 0.0)
                   : std::complex<double>(0.0, ((k / 2) % 2 == 0) ? 1.0 : -1.0);
  const double base = std::arg(z / z0);
  std::vector<double> angles(k);
  for (int m = 0; m < k; ++m) angles[m] = (base + 2.0 * std::numbers::pi * m) / k;
  return angles;
}

std::vector<SymTracelessTensor> section_to_tensor_field(const DiscreteBundle& bundle, const Section& u, int k) {
  if (k != bundle.rank())
    throw DomainError("section rank " + std::to_string(k) + " does not match bundle rank " +
                      std::to_string(bundle.rank()));
  require_rank(k, 1, kMaxTensorRank);
  if (u.size() != bundle.mesh().num_vertices()) throw DomainError("section size does not match the mesh");
  std::vector<SymTracelessTensor> out(u.size());
  for (Eigen::Index v = 0; v < u.size(); ++v) out[v] = {k, u[v].real(), u[v].imag()};
  return out;
}

} // namespace glv

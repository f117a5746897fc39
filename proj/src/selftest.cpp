#include "glvortex/selftest.hpp"

#include "glvortex/tensor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

namespace glv {

namespace {

// Full coefficient vector over index tuples in {e1, e2}^k; bit i set means
// slot i holds e2.
Eigen::VectorXd expand(const SymTensor& t) {
  const int k = t.rank;
  Eigen::VectorXd full(1 << k);
  for (int idx = 0; idx < (1 << k); ++idx) {
    const int e1Count = k - __builtin_popcount(static_cast<unsigned>(idx));
    full[idx] = t.coeffs[e1Count];
  }
  return full;
}

Eigen::MatrixXd kron_power(const Eigen::Matrix2d& r, int k) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 0; i < k; ++i) {
    Eigen::MatrixXd next(out.rows() * 2, out.cols() * 2);
    // Slot i is bit i of the index, so the new factor is the outer block.
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) next.block(a * out.rows(), b * out.cols(), out.rows(), out.cols()) = r(a, b) * out;
    out = std::move(next);
  }
  return out;
}

} // namespace

std::vector<SelftestCheck> tensor_selftest() {
  std::vector<SelftestCheck> checks;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  for (int k = 2; k <= 5; ++k) {
    double err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const double alpha = std::numbers::pi * unif(rng);
      const SymTracelessTensor t{k, unif(rng), unif(rng)};
      Eigen::Matrix2d r;
      r << std::cos(alpha), -std::sin(alpha), std::sin(alpha), std::cos(alpha);
      const Eigen::VectorXd brute = kron_power(r, k) * expand(embed(t));
      const Eigen::VectorXd fast = expand(embed(rotate(t, alpha)));
      err = std::max(err, (brute - fast).cwiseAbs().maxCoeff());
    }
    checks.push_back({"rotation k=" + std::to_string(k), err < 1e-12, err});
  }

  for (int k = 2; k <= kMaxTensorRank; ++k) {
    const auto [qo, qe] = q_basis(k);
    double err = 0.0;
    for (const SymTensor* q : {&qo, &qe})
      for (double c : trace12(*q).coeffs) err = std::max(err, std::abs(c));
    checks.push_back({"traceless k=" + std::to_string(k), err == 0.0, err});
  }

  for (int k = 2; k <= kMaxTensorRank; ++k) {
    const auto [qo, qe] = q_basis(k);
    const auto [ro, re] = q_basis_recurrence(k);
    double err = 0.0;
    for (int j = 0; j <= k; ++j)
      err = std::max({err, std::abs(qo.coeffs[j] - ro.coeffs[j]), std::abs(qe.coeffs[j] - re.coeffs[j])});
    checks.push_back({"recurrence k=" + std::to_string(k), err == 0.0, err});
  }

  for (int k = 2; k <= kMaxTensorRank; ++k) {
    const SymTracelessTensor t{k, 0.3, -0.7};
    const SymTracelessTensor r = rotate(t, 2.0 * std::numbers::pi / k);
    const double err = std::max(std::abs(r.q_o - t.q_o), std::abs(r.q_e - t.q_e));
    checks.push_back({"period k=" + std::to_string(k), err < 1e-12, err});
  }
  return checks;
}

} // namespace glv

#include "glvortex/gl.hpp"

#include "glvortex/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace glv {

namespace {

constexpr double kPi = std::numbers::pi;

double far_field(double r) { return 1.0 - 1.0 / (2.0 * r * r) - 9.0 / (8.0 * r * r * r * r); }

struct Interval {
  double energy, g0, g1, h00, h01, h11;
};

// Energy of one grid interval and its derivatives in the two end values.
Interval interval_terms(double fa, double fb, double s, double h) {
  const double a = kPi * s * h;
  const double dfdr = (fb - fa) / h;
  const double fm = 0.5 * (fa + fb);
  const double pot = 1.0 - fm * fm;
  Interval t;
  t.energy = a * (dfdr * dfdr + fm * fm / (s * s) + 0.5 * pot * pot);
  const double gm = a * (fm / (s * s) - fm * pot);
  t.g0 = -2.0 * a * dfdr / h + gm;
  t.g1 = 2.0 * a * dfdr / h + gm;
  const double hm = a * (0.5 / (s * s) - 0.5 * (1.0 - 3.0 * fm * fm));
  t.h00 = 2.0 * a / (h * h) + hm;
  t.h11 = t.h00;
  t.h01 = -2.0 * a / (h * h) + hm;
  return t;
}

double total_energy(const std::vector<double>& f, double h) {
  double e = 0.0;
  for (size_t i = 0; i + 1 < f.size(); ++i) e += interval_terms(f[i], f[i + 1], (i + 0.5) * h, h).energy;
  return e;
}

} // namespace

double RadialProfile::operator()(double r) const {
  if (r <= 0.0) return 0.0;
  if (r >= radius) return far_field(r);
  const double x = r / step;
  const size_t i = static_cast<size_t>(x);
  if (i + 1 >= values.size()) return values.back();
  const double t = x - i;
  return (1.0 - t) * values[i] + t * values[i + 1];
}

RadialProfile radial_profile(double radius, double step) {
  if (!(radius > 1.0) || !(step > 0.0) || step > radius / 10.0) throw DomainError("bad radial profile grid");
  const int n = static_cast<int>(std::lround(radius / step));
  const double h = radius / n;
  std::vector<double> f(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double r = i * h;
    f[i] = r / std::sqrt(r * r + 1.0);
  }
  f[0] = 0.0;
  f[n] = far_field(radius);

  // Newton on the interior unknowns with a tridiagonal Hessian.
  const int m = n - 1;
  std::vector<double> g(m), diag(m), off(m > 0 ? m - 1 : 0), step_(m);
  double energy = total_energy(f, h);
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    std::fill(g.begin(), g.end(), 0.0);
    std::fill(diag.begin(), diag.end(), 0.0);
    std::fill(off.begin(), off.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const Interval t = interval_terms(f[i], f[i + 1], (i + 0.5) * h, h);
      const int a = i - 1, b = i; // unknown indices of f[i], f[i + 1]
      if (a >= 0) {
        g[a] += t.g0;
        diag[a] += t.h00;
      }
      if (b < m) {
        g[b] += t.g1;
        diag[b] += t.h11;
      }
      if (a >= 0 && b < m) off[a] += t.h01;
    }
    // Thomas algorithm on H step = -g.
    std::vector<double> c(m), d(m);
    for (int i = 0; i < m; ++i) {
      const double denom = diag[i] - (i > 0 ? off[i - 1] * c[i - 1] : 0.0);
      if (!(denom > 0.0)) throw NumericalError("radial profile Hessian is not positive definite");
      c[i] = i + 1 < m ? off[i] / denom : 0.0;
      d[i] = (-g[i] - (i > 0 ? off[i - 1] * d[i - 1] : 0.0)) / denom;
    }
    double stepMax = 0.0;
    for (int i = m - 1; i >= 0; --i) {
      step_[i] = d[i] - (i + 1 < m ? c[i] * step_[i + 1] : 0.0);
      stepMax = std::max(stepMax, std::abs(step_[i]));
    }
    if (stepMax < 1e-11) {
      converged = true;
      break;
    }

    double t = 1.0;
    std::vector<double> trial = f;
    while (true) {
      for (int i = 0; i < m; ++i) trial[i + 1] = f[i + 1] + t * step_[i];
      const double e = total_energy(trial, h);
      if (e <= energy || t < 1e-8) {
        energy = e;
        break;
      }
      t *= 0.5;
    }
    if (t < 1e-8) break;
    f = trial;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "radial profile Newton iteration did not converge (R = " << radius << ", h = " << h << ")";
    throw NumericalError(msg.str());
  }
  RadialProfile p;
  p.radius = radius;
  p.step = h;
  p.values = std::move(f);
  p.energy = energy;
  return p;
}

double bbh_gamma_at(double radius, double step) {
  const RadialProfile p = radial_profile(radius, step);
  const double r2 = radius * radius;
  const double tail = kPi * (-1.0 / (4.0 * r2) + 1.0 / (4.0 * r2 * r2));
  return p.energy - kPi * std::log(radius) + tail;
}

double bbh_gamma() {
  static const double gamma = [] {
    const double coarse = bbh_gamma_at(100.0, 0.01);
    const double fine = bbh_gamma_at(100.0, 0.005);
    return (4.0 * fine - coarse) / 3.0;
  }();
  return gamma;
}

const RadialProfile& standard_profile() {
  static const RadialProfile profile = radial_profile(50.0, 0.01);
  return profile;
}

} // namespace glv

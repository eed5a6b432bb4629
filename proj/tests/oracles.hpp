#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

// Reference computations that share no code with the library.
namespace oracle {

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace detail {
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                           double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * eps) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson on a finite interval, split into `pieces` to keep the
/// recursion honest on peaked integrands.
inline double integrate(const std::function<double(double)>& f, double a, double b, double eps = 1e-14,
                        int pieces = 64) {
  if (!(a < b)) return 0.0;
  double total = 0.0;
  const double h = (b - a) / pieces;
  for (int k = 0; k < pieces; ++k) {
    const double lo = a + k * h, hi = k + 1 == pieces ? b : a + (k + 1) * h;
    const double flo = f(lo), fmid = f(0.5 * (lo + hi)), fhi = f(hi);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += detail::simpson_step(f, lo, hi, flo, fmid, fhi, whole, eps / pieces, 40);
  }
  return total;
}

/// E[g(X); X in [lo, hi]] for X ~ N(0, sigma2), infinite ends clipped at 40 sigma.
inline double gaussian_integral(const std::function<double(double)>& g, double sigma2, double lo, double hi) {
  const double s = std::sqrt(sigma2);
  lo = std::max(lo, -40.0 * s);
  hi = std::min(hi, 40.0 * s);
  return integrate([&](double x) { return g(x) * phi(x / s) / s; }, lo, hi);
}

/// Stage cost of the white-process interval rule by direct integration.
inline double interval_stage_cost(double sigma2, double p, double lo, double hi) {
  const double inf = std::numeric_limits<double>::infinity();
  auto moments = [&](double a, double b, double& m0, double& m1, double& m2) {
    m0 += gaussian_integral([](double) { return 1.0; }, sigma2, a, b);
    m1 += gaussian_integral([](double x) { return x; }, sigma2, a, b);
    m2 += gaussian_integral([](double x) { return x * x; }, sigma2, a, b);
  };
  double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0, t2 = 0;
  if (lo < hi) {
    moments(lo, hi, s0, s1, s2);
    moments(-inf, lo, t0, t1, t2);
    moments(hi, inf, t0, t1, t2);
  } else {
    moments(-inf, inf, t0, t1, t2);
  }
  const double v0 = s0 > 0 ? s2 - s1 * s1 / s0 : 0.0;
  const double v1 = t0 > 0 ? t2 - t1 * t1 / t0 : 0.0;
  return v0 + p * v1;
}

/// Exact E[f(s + W)], W ~ N(0, sigma2), for f linear between the knots and
/// constant-slope beyond them (knots ascending).
inline double piecewise_linear_expectation(const std::vector<double>& xs, const std::vector<double>& ys, double s,
                                           double sigma2) {
  const double sd = std::sqrt(sigma2);
  // Integral of (alpha + beta x) phi((x - s)/sd)/sd over [a, b].
  auto piece = [&](double alpha, double beta, double a, double b) {
    const double za = (a - s) / sd, zb = (b - s) / sd;
    const double mass = Phi(zb) - Phi(za);
    const double first = s * mass + sd * (phi(za) - phi(zb));
    return alpha * mass + beta * first;
  };
  const double inf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  const size_t k = xs.size();
  auto line = [&](size_t i, double& alpha, double& beta) {
    beta = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    alpha = ys[i] - beta * xs[i];
  };
  double alpha, beta;
  line(0, alpha, beta);
  total += piece(alpha, beta, -inf, xs[0]);
  for (size_t i = 0; i + 1 < k; ++i) {
    line(i, alpha, beta);
    total += piece(alpha, beta, xs[i], xs[i + 1]);
  }
  line(k - 2, alpha, beta);
  total += piece(alpha, beta, xs[k - 1], inf);
  return total;
}

/// Never-transmit cost: sum over n of Var(E_n) with Var_n = a^2 Var_{n-1} + sigma2.
inline double open_loop_cost(double a, double sigma2, int horizon) {
  double var = 0.0, total = 0.0;
  for (int n = 1; n <= horizon; ++n) {
    var = a * a * var + sigma2;
    total += var;
  }
  return total;
}

}  // namespace oracle

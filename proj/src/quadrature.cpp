#include "remest/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "remest/errors.hpp"
#include "remest/process.hpp"

namespace remest {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kKernelSigmas = 8.0;
constexpr double kMassFloor = 1e-300;

double std_pdf(double x) {
  if (std::isinf(x)) return 0.0;
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// x * phi(x), with the limit 0 at +-inf.
double x_pdf(double x) { return std::isinf(x) ? 0.0 : x * std_pdf(x); }

double upper_tail(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

// P(alpha <= Z <= beta) for standard Z, choosing the form that avoids cancellation.
double std_mass(double alpha, double beta) {
  if (alpha >= 0.0) return upper_tail(alpha) - upper_tail(beta);
  if (beta <= 0.0) return normal_cdf(beta) - normal_cdf(alpha);
  return 1.0 - normal_cdf(alpha) - upper_tail(beta);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double PartialMoments::scaled_variance() const {
  if (m0 < kMassFloor) return 0.0;
  return std::max(0.0, m2 - m1 * m1 / m0);
}

PartialMoments partial_moments(double sigma2, double lo, double hi) {
  if (!(sigma2 > 0.0)) throw ArgumentError("sigma2 must be positive");
  if (std::isnan(lo) || std::isnan(hi)) throw ArgumentError("NaN interval bound");
  if (hi <= lo) return {};
  const double s = std::sqrt(sigma2);
  const double alpha = lo / s;
  const double beta = hi / s;
  PartialMoments pm;
  pm.m0 = std_mass(alpha, beta);
  pm.m1 = s * (std_pdf(alpha) - std_pdf(beta));
  pm.m2 = sigma2 * (pm.m0 + x_pdf(alpha) - x_pdf(beta));
  return pm;
}

TruncatedMoments truncated_moments(double sigma2, double lo, double hi) {
  if (!(lo < hi)) throw ArgumentError("truncated_moments requires lo < hi");
  const auto pm = partial_moments(sigma2, lo, hi);
  if (pm.m0 < kMassFloor) throw DegenerateRegionError("interval carries no probability mass");
  return {pm.m0, pm.m1 / pm.m0, pm.m2 / pm.m0};
}

// ---------------------------------------------------------------------------

ErrorGrid::ErrorGrid(double half_width, int num_points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ArgumentError("grid half-width must be positive");
  if (num_points < 3 || num_points % 2 == 0) throw ArgumentError("grid needs an odd number of points >= 3");
  half_width_ = half_width;
  radius_ = (num_points - 1) / 2;
  spacing_ = half_width / radius_;
}

ErrorGrid ErrorGrid::automatic(const PlantModel& plant, int num_points, double cap_sigmas) {
  const double sigma = plant.sigma();
  const double growth = std::pow(std::max(1.0, std::abs(plant.a)), plant.horizon);
  return ErrorGrid(std::min(8.0 * sigma * growth, cap_sigmas * sigma), num_points);
}

int ErrorGrid::nearest_index(double e) const {
  const long k = std::lround(e / spacing_);
  return static_cast<int>(std::clamp<long>(k, -radius_, radius_) + radius_);
}

GridFunction::GridFunction(ErrorGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<size_t>(grid_.size())) {
    throw ArgumentError("grid function length does not match grid");
  }
  fit_tail();
}

GridFunction GridFunction::sample(const ErrorGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(static_cast<size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i) v[static_cast<size_t>(i)] = f(grid.point(i));
  return {grid, std::move(v)};
}

void GridFunction::set(size_t i, double v) {
  values_.at(i) = v;
  fit_tail();
}

void GridFunction::fit_tail() {
  const int r = grid_.radius();
  const int k_lo = std::min(static_cast<int>(std::floor(0.9 * r)), r - 1);
  auto fit = [&](int sign) {
    double mu = 0.0, mf = 0.0;
    const int count = r - k_lo + 1;
    for (int k = k_lo; k <= r; ++k) {
      const double u = grid_.at_offset(k);
      mu += u * u;
      mf += values_[static_cast<size_t>(r + sign * k)];
    }
    mu /= count;
    mf /= count;
    double num = 0.0, den = 0.0;
    for (int k = k_lo; k <= r; ++k) {
      const double u = grid_.at_offset(k);
      const double d = u * u - mu;
      num += d * (values_[static_cast<size_t>(r + sign * k)] - mf);
      den += d * d;
    }
    return den > 0.0 ? num / den : 0.0;
  };
  tail_.left_anchor = values_.front();
  tail_.right_anchor = values_.back();
  tail_.left_curvature = fit(-1);
  tail_.right_curvature = fit(+1);
}

double GridFunction::at_offset(long k) const {
  const long r = grid_.radius();
  if (k >= -r && k <= r) return values_[static_cast<size_t>(k + r)];
  const double u = grid_.at_offset(k);
  const double edge = grid_.at_offset(r);
  const double du2 = u * u - edge * edge;
  return k > 0 ? tail_.right_anchor + tail_.right_curvature * du2
               : tail_.left_anchor + tail_.left_curvature * du2;
}

GridFunction pointwise_min(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid())) throw ArgumentError("pointwise_min on different grids");
  std::vector<double> v(f.size());
  for (size_t i = 0; i < v.size(); ++i) v[i] = std::min(f[i], g[i]);
  return {f.grid(), std::move(v)};
}

// ---------------------------------------------------------------------------

GaussianSmoother::GaussianSmoother(const ErrorGrid& grid, double a, double sigma2) : grid_(grid), a_(a) {
  if (!(sigma2 > 0.0)) throw ArgumentError("sigma2 must be positive");
  const double sigma = std::sqrt(sigma2);
  const double dx = grid.spacing();
  if (dx > sigma) throw ArgumentError("grid spacing exceeds the noise standard deviation; add grid points");
  const double norm = dx / (sigma * std::sqrt(2.0 * std::numbers::pi));
  const auto n = static_cast<size_t>(grid.size());
  first_.resize(n);
  start_.resize(n);
  count_.resize(n);
  const long r = grid.radius();
  interior_limit_ = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double s = a * grid.point(static_cast<int>(i));
    const long lo = static_cast<long>(std::ceil((s - kKernelSigmas * sigma) / dx));
    const long hi = static_cast<long>(std::floor((s + kKernelSigmas * sigma) / dx));
    first_[i] = lo;
    start_[i] = weights_.size();
    count_[i] = static_cast<size_t>(hi - lo + 1);
    for (long k = lo; k <= hi; ++k) {
      const double z = (grid.at_offset(k) - s) / sigma;
      double w = norm * std::exp(-0.5 * z * z);
      if (k == lo || k == hi) w *= 0.5;
      weights_.push_back(w);
    }
    if (lo >= -r && hi <= r) interior_limit_ = std::max(interior_limit_, std::abs(grid.point(static_cast<int>(i))));
  }
}

double GaussianSmoother::apply_at(const GridFunction& f, size_t i) const {
  const long r = grid_.radius();
  const long lo = first_[i];
  const size_t cnt = count_[i];
  const double* w = weights_.data() + start_[i];
  double acc = 0.0;
  if (lo >= -r && lo + static_cast<long>(cnt) - 1 <= r) {
    const double* v = f.values().data() + (lo + r);
    for (size_t k = 0; k < cnt; ++k) acc += w[k] * v[k];
  } else {
    for (size_t k = 0; k < cnt; ++k) acc += w[k] * f.at_offset(lo + static_cast<long>(k));
  }
  return acc;
}

GridFunction GaussianSmoother::apply(const GridFunction& f) const {
  if (!(f.grid() == grid_)) throw ArgumentError("smoother applied to a function on another grid");
  std::vector<double> out(f.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = apply_at(f, i);
  return {grid_, std::move(out)};
}

double GaussianSmoother::expect_at_zero(const GridFunction& f) const {
  return apply_at(f, static_cast<size_t>(grid_.radius()));
}

GridFunction gaussian_expectation(const GridFunction& f, double a, double sigma2) {
  return GaussianSmoother(f.grid(), a, sigma2).apply(f);
}

// ---------------------------------------------------------------------------

ShapeCheck is_symmetric_nondecreasing(const GridFunction& f, double tol) {
  const int r = f.grid().radius();
  auto fail = [&](int idx, const char* what) {
    return ShapeCheck{false, idx, f.grid().point(idx), what};
  };
  for (int k = 1; k <= r; ++k) {
    const double right = f[static_cast<size_t>(r + k)];
    const double left = f[static_cast<size_t>(r - k)];
    if (!(std::abs(right - left) <= tol)) return fail(r + k, "asymmetric");
    if (!(right >= f[static_cast<size_t>(r + k - 1)] - tol)) return fail(r + k, "decreasing in |e|");
    if (!(left >= f[static_cast<size_t>(r - k + 1)] - tol)) return fail(r - k, "decreasing in |e|");
  }
  return {};
}

double range_tolerance(const GridFunction& f, double rel) {
  const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
  const double range = *hi - *lo;
  // never tighter than the rounding noise of a weighted sum of these values
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(*lo), std::abs(*hi));
  return std::max(rel * (range > 0.0 ? range : 1.0), floor);
}

double directional_difference_quotient(const GridFunction& f, double e) {
  if (e < 0.0) throw std::out_of_range("difference quotient needs e >= 0");
  const auto& g = f.grid();
  const int i = g.nearest_index(e);
  if (std::abs(g.point(i) - e) > g.spacing() || i + 1 >= g.size()) {
    throw std::out_of_range("difference quotient too close to the grid boundary");
  }
  const double e0 = g.point(i);
  const double e1 = g.point(i + 1);
  return (f[static_cast<size_t>(i + 1)] - f[static_cast<size_t>(i)]) / (e1 * e1 - e0 * e0);
}

}  // namespace remest

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace remest {

struct PlantModel;

// ---------------------------------------------------------------------------
// Truncated Gaussian moments
// ---------------------------------------------------------------------------

/// Unnormalized moments of X ~ N(0, sigma2) restricted to [lo, hi]:
/// m0 = P(X in [lo, hi]), m1 = E[X; X in [lo, hi]], m2 = E[X^2; X in [lo, hi]].
struct PartialMoments {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;

  PartialMoments& operator+=(const PartialMoments& o) {
    m0 += o.m0;
    m1 += o.m1;
    m2 += o.m2;
    return *this;
  }
  /// m0 * Var(X | region), computed without normalizing first. Zero on an empty region.
  [[nodiscard]] double scaled_variance() const;
};

PartialMoments partial_moments(double sigma2, double lo, double hi);

struct TruncatedMoments {
  double mass = 0.0;
  double mean = 0.0;
  double second_moment = 0.0;
};

/// Mass, conditional mean and conditional second moment of N(0, sigma2) on
/// [lo, hi] (either end may be infinite). Throws DegenerateRegionError when
/// the mass underflows below 1e-300.
TruncatedMoments truncated_moments(double sigma2, double lo, double hi);

/// Standard normal CDF, accurate in both tails.
double normal_cdf(double x);

// ---------------------------------------------------------------------------
// Error grid and sampled functions
// ---------------------------------------------------------------------------

/// Uniform grid on [-half_width, half_width] with an odd number of points so
/// that 0 is a grid point. Points are indexed by offset k in [-M, M].
class ErrorGrid {
 public:
  ErrorGrid(double half_width, int num_points);

  /// Half-width 8 sigma max(1, |a|)^N, clipped to cap_sigmas * sigma.
  static ErrorGrid automatic(const PlantModel& plant, int num_points, double cap_sigmas = 100.0);

  [[nodiscard]] double half_width() const { return half_width_; }
  [[nodiscard]] int size() const { return 2 * radius_ + 1; }
  [[nodiscard]] int radius() const { return radius_; }
  [[nodiscard]] double spacing() const { return spacing_; }
  /// Point at storage index i in [0, size()).
  [[nodiscard]] double point(int i) const { return static_cast<double>(i - radius_) * spacing_; }
  /// Point at centered offset k (may lie outside the grid).
  [[nodiscard]] double at_offset(long k) const { return static_cast<double>(k) * spacing_; }
  [[nodiscard]] int nearest_index(double e) const;

  bool operator==(const ErrorGrid&) const = default;

 private:
  double half_width_;
  int radius_;
  double spacing_;
};

/// Per-side quadratic extrapolation f(u) = anchor + curvature (u^2 - e_max^2)
/// for |e| = u > e_max. The curvature is the least-squares slope of f against
/// u^2 over the outermost 10% of the grid, so the model is linear in f, exact
/// for even quadratics, and non-decreasing whenever f is.
struct TailModel {
  double left_anchor = 0.0;
  double left_curvature = 0.0;
  double right_anchor = 0.0;
  double right_curvature = 0.0;
};

class GridFunction {
 public:
  GridFunction(ErrorGrid grid, std::vector<double> values);

  static GridFunction sample(const ErrorGrid& grid, const std::function<double(double)>& f);

  [[nodiscard]] const ErrorGrid& grid() const { return grid_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] const TailModel& tail() const { return tail_; }
  [[nodiscard]] size_t size() const { return values_.size(); }
  [[nodiscard]] double operator[](size_t i) const { return values_[i]; }
  /// Value at centered offset k; the tail model is used beyond the grid.
  [[nodiscard]] double at_offset(long k) const;
  [[nodiscard]] double at_zero() const { return values_[static_cast<size_t>(grid_.radius())]; }

  /// Overwrites one sample and refits the tail model.
  void set(size_t i, double v);

 private:
  void fit_tail();

  ErrorGrid grid_;
  std::vector<double> values_;
  TailModel tail_;
};

GridFunction pointwise_min(const GridFunction& f, const GridFunction& g);

// ---------------------------------------------------------------------------
// Gaussian expectation h(e) = E_W[f(a e + W)]
// ---------------------------------------------------------------------------

/// Precomputed trapezoid weights for h(e_i) = sum_j f(x_j) phi(x_j - a e_i) dx
/// over grid-aligned nodes x_j within 8 sigma of a e_i. Reusable across every
/// function sampled on the same grid.
class GaussianSmoother {
 public:
  GaussianSmoother(const ErrorGrid& grid, double a, double sigma2);

  [[nodiscard]] GridFunction apply(const GridFunction& f) const;
  /// E_W[f(W)], i.e. the smoothed value at e = 0 regardless of a.
  [[nodiscard]] double expect_at_zero(const GridFunction& f) const;
  /// Largest |e| whose window stays inside the grid (no tail extrapolation).
  [[nodiscard]] double interior_limit() const { return interior_limit_; }

 private:
  [[nodiscard]] double apply_at(const GridFunction& f, size_t i) const;

  ErrorGrid grid_;
  double a_;
  std::vector<long> first_;       // first node offset per output point
  std::vector<size_t> start_;     // start into weights_
  std::vector<size_t> count_;
  std::vector<double> weights_;
  double interior_limit_ = 0.0;
};

GridFunction gaussian_expectation(const GridFunction& f, double a, double sigma2);

// ---------------------------------------------------------------------------
// Structure checks
// ---------------------------------------------------------------------------

struct ShapeCheck {
  bool ok = true;
  std::optional<int> index;  ///< storage index of the first violation
  double e = 0.0;
  std::string what;
};

/// |f(e) - f(-e)| <= tol everywhere, and f non-decreasing in |e| up to tol.
/// Scans outward from 0; the first violation is reported.
ShapeCheck is_symmetric_nondecreasing(const GridFunction& f, double tol);

/// Absolute tolerance equal to `rel` times the value range of f (or `rel` if flat),
/// floored at 64 ulps of max |f|.
double range_tolerance(const GridFunction& f, double rel);

/// (f(e + d) - f(e)) / ((e + d)^2 - e^2) with d one grid spacing, e snapped to
/// the nearest grid point. Throws std::out_of_range if e < 0 or e + d is off-grid.
double directional_difference_quotient(const GridFunction& f, double e);

}  // namespace remest

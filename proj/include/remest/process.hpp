#pragma once

#include <utility>

namespace remest {

/// Scalar plant X_{n+1} = a X_n + W_n with W_n ~ N(0, sigma2) and known X_0 = x0.
struct PlantModel {
  double a = 1.0;
  double sigma2 = 1.0;
  double x0 = 0.0;
  int horizon = 1;

  [[nodiscard]] double sigma() const;
};

/// Throws ArgumentError unless sigma2 > 0 and horizon >= 1.
void require_valid(const PlantModel& plant);

struct EstimatorState {
  double estimate = 0.0;
  double error = 0.0;
  // Conditional means given R = 0 / R = 1 for the white (a = 0) case.
  std::pair<double, double> conditional_estimates{0.0, 0.0};
};

/// Error recursion under a symmetric policy: 0 after a delivery, a*e + w otherwise.
double error_step(const PlantModel& plant, double e, bool delivered, double w);

/// Sum of Var(E_n), n = 1..N, when nothing is ever delivered and E_0 = 0.
double predicted_open_loop_cost(const PlantModel& plant);

}  // namespace remest

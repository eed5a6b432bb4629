#include "remest/process.hpp"

#include <cmath>

#include "remest/errors.hpp"

namespace remest {

double PlantModel::sigma() const { return std::sqrt(sigma2); }

void require_valid(const PlantModel& plant) {
  if (!(plant.sigma2 > 0.0) || !std::isfinite(plant.sigma2)) throw ArgumentError("sigma2 must be positive");
  if (!std::isfinite(plant.a) || !std::isfinite(plant.x0)) throw ArgumentError("plant parameters must be finite");
  if (plant.horizon < 1) throw ArgumentError("horizon must be at least 1");
}

double error_step(const PlantModel& plant, double e, bool delivered, double w) {
  return delivered ? 0.0 : plant.a * e + w;
}

double predicted_open_loop_cost(const PlantModel& plant) {
  double var = 0.0;
  double total = 0.0;
  const double a2 = plant.a * plant.a;
  for (int n = 1; n <= plant.horizon; ++n) {
    var = a2 * var + plant.sigma2;
    total += var;
  }
  return total;
}

}  // namespace remest

#pragma once

#include <vector>

#include "laglad/path.hpp"
#include "laglad/rng.hpp"

namespace laglad {

/// Standard Brownian motion sampled on `grid` (B_0 = 0, no jumps).
LagladPath brownian(const GridPtr& grid, Engine& rng);
LagladPath brownian(const GridPtr& grid, const SeedSpec& seed);

/// Compound Poisson process X with intensity mu and exponential(theta) jump
/// sizes (mean 1/theta), paired with the surplus W_t = drift * t - X_t.
struct CompoundPoissonPath {
  std::vector<double> jump_times;
  std::vector<double> jump_sizes;
  double mu = 1.0;
  double theta = 2.0;
  double drift = 1.0;
  double horizon = 0.0;

  /// X_t, right-continuous.
  double x_at(double t) const;
  /// Surplus W_t = drift * t - X_t.
  double surplus_at(double t) const { return drift * t - x_at(t); }
};

/// Samples jumps on [0, horizon]; drift defaults to the intensity.
CompoundPoissonPath compound_poisson(double mu, double theta, double horizon, Engine& rng);
CompoundPoissonPath compound_poisson(double mu, double theta, double horizon, const SeedSpec& seed);

/// Appends jumps on (cp.horizon, new_horizon] using the same stream.
void extend(CompoundPoissonPath& cp, double new_horizon, Engine& rng);

/// The surplus path W on `grid`, which must contain every jump time within
/// its horizon as a node. Left jumps are -size at those nodes.
LagladPath surplus_path(const CompoundPoissonPath& cp, const GridPtr& grid);

/// Base grid refined with every jump time.
GridPtr jump_refined_grid(const CompoundPoissonPath& cp, const TimeGrid& base);

}  // namespace laglad

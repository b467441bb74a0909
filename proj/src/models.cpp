#include "laglad/models.hpp"

#include <algorithm>
#include <cmath>

#include "laglad/errors.hpp"

namespace laglad {

LagladPath brownian(const GridPtr& grid, Engine& rng) {
  const std::size_t n = grid->size();
  std::normal_distribution<double> normal;
  std::vector<double> seg(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) seg[i] = std::sqrt(grid->step(i)) * normal(rng);
  const std::vector<double> zero(n, 0.0);
  return LagladPath::from_increments(grid, 0.0, seg, zero, zero);
}

LagladPath brownian(const GridPtr& grid, const SeedSpec& seed) {
  Engine rng = make_engine(seed);
  return brownian(grid, rng);
}

double CompoundPoissonPath::x_at(double t) const {
  const auto end = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  double x = 0.0;
  for (auto it = jump_times.begin(); it != end; ++it) x += jump_sizes[static_cast<std::size_t>(it - jump_times.begin())];
  return x;
}

void extend(CompoundPoissonPath& cp, double new_horizon, Engine& rng) {
  std::exponential_distribution<double> gap(cp.mu);
  std::exponential_distribution<double> size(cp.theta);
  double t = cp.jump_times.empty() ? 0.0 : cp.jump_times.back();
  // Memorylessness: restarting the clock at the old horizon is exact.
  t = std::max(t, cp.horizon);
  while (true) {
    t += gap(rng);
    if (t > new_horizon) break;
    cp.jump_times.push_back(t);
    cp.jump_sizes.push_back(size(rng));
  }
  cp.horizon = new_horizon;
}

CompoundPoissonPath compound_poisson(double mu, double theta, double horizon, Engine& rng) {
  if (!(mu > 0.0) || !(theta > 0.0) || !(horizon >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "compound Poisson needs mu > 0, theta > 0, horizon >= 0");
  CompoundPoissonPath cp;
  cp.mu = mu;
  cp.theta = theta;
  cp.drift = mu;
  cp.horizon = 0.0;
  if (horizon > 0.0) extend(cp, horizon, rng);
  return cp;
}

CompoundPoissonPath compound_poisson(double mu, double theta, double horizon, const SeedSpec& seed) {
  Engine rng = make_engine(seed);
  return compound_poisson(mu, theta, horizon, rng);
}

GridPtr jump_refined_grid(const CompoundPoissonPath& cp, const TimeGrid& base) {
  std::vector<double> extra;
  for (double t : cp.jump_times)
    if (t <= base.horizon()) extra.push_back(t);
  return share(base.refined(extra));
}

LagladPath surplus_path(const CompoundPoissonPath& cp, const GridPtr& grid) {
  const std::size_t n = grid->size();
  std::vector<double> seg(n - 1), left(n, 0.0);
  const std::vector<double> right(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) seg[i] = cp.drift * grid->step(i);
  for (std::size_t k = 0; k < cp.jump_times.size(); ++k) {
    const double t = cp.jump_times[k];
    if (t > grid->horizon()) break;
    std::size_t i = grid->find(t, 1e-11);
    if (i == grid->size() || i == 0)
      throw Error(ErrorCode::GridMismatch, "jump time is not a grid node");
    left[i] -= cp.jump_sizes[k];
  }
  return LagladPath::from_increments(grid, 0.0, seg, left, right);
}

}  // namespace laglad

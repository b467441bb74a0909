#pragma once

// Honest-time scenarios with closed-form Azéma components.
//
// Every scenario carries F̃ = 1 - Z̃ = ᵒ(1_{]τ,∞[}) together with its
// decomposition F̃ = M + A, so that Z̃ = m - A with m = 1 - M and A = (H^o)_-.

#include <limits>
#include <string>
#include <vector>

#include "laglad/path.hpp"
#include "laglad/rng.hpp"
#include "laglad/models.hpp"
#include "laglad/tree.hpp"

namespace laglad {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

enum class HorizonPolicy { Extend, Strict, Discard };

struct HonestTimeScenario {
  std::string kind;
  SeedSpec seed;
  /// Realized τ; kNever when it lies beyond the grid horizon.
  double tau = 0.0;
  /// Component times for the max-combined scenario.
  double tau_c = 0.0;
  double tau_d = 0.0;
  /// For the Brownian scenario: T = inf{t : B_t = 1} (kNever if beyond the horizon).
  double hitting_time = kNever;
  bool discarded = false;

  PathDecomposition f_tilde;
  /// Driving paths on the scenario grid (B stopped at T, and/or the surplus W).
  LagladPath brownian;
  LagladPath surplus;

  const GridPtr& grid() const noexcept { return f_tilde.grid_ptr(); }
  LagladPath z_tilde() const;  ///< Z̃ = 1 - F̃
  LagladPath z() const;        ///< Z = Z̃_+, as a làglàd path
  LagladPath m() const;        ///< m = 1 - M
  LagladPath a() const;        ///< A = A^c + A^d + A^g
  LagladPath ho() const;       ///< H^o = A_+
};

struct BrownianOptions {
  HorizonPolicy policy = HorizonPolicy::Extend;
  /// Probe the Brownian bridge between grid nodes for hidden zeros and
  /// passages at 1. The probe points are not added to the grid.
  bool refine = true;
  /// A bridge segment is bisected while it would reach a barrier with
  /// probability above miss_prob, down to nominal step / 2^near_depth.
  double miss_prob = 1e-3;
  int near_depth = 6;
  /// Near zero the grid step is (|B| / near_kappa)², floored at
  /// nominal step * min_step_ratio; near_kappa = 0 keeps the base grid.
  double near_kappa = 3.0;
  double min_step_ratio = 1.0 / 64.0;
};

/// Brownian motion B on `base` plus the node T = inf{t: B_t = 1}, stopped at T.
struct StoppedBrownian {
  GridPtr grid;
  LagladPath b;
  double hitting_time = kNever;
  double tau = kNever;  ///< last zero before T (kNever if beyond the horizon)
  bool discarded = false;
};

StoppedBrownian stopped_brownian(const TimeGrid& base, Engine& rng, const BrownianOptions& opt = {});

/// τ = sup{u <= T : B_u = 0}, F̃ = B^+_{·∧T}, A = A^c = ½ L^0_{·∧T}.
HonestTimeScenario brownian_last_zero(const SeedSpec& seed, const TimeGrid& base, const BrownianOptions& opt = {});
HonestTimeScenario brownian_last_zero_on(const StoppedBrownian& sb, const SeedSpec& seed);

/// Ruin probability Ψ(x) = P(inf_t (x + μt - X_t) < 0) for exponential(θ)
/// claims with premium rate equal to the intensity: Ψ(x) = e^{-(θ-1)x}/θ.
struct RuinFunction {
  double theta = 2.0;
  double operator()(double x) const;
  /// Smallest x with Ψ(x) <= p.
  double level_for(double p) const;
};

RuinFunction ruin_prob_exponential(double theta, double mu);

struct PoissonOptions {
  double mu = 1.0;
  double theta = 2.0;
  double a = 0.0;
  /// τ is accepted once the surplus exceeds a by x with Ψ(x) below this.
  double certify = 1e-8;
};

/// Jump path extended far enough to certify τ^d, with the upcrossing times σ_n
/// of the level a (σ_0 = 0 when a = 0).
struct CertifiedPoisson {
  CompoundPoissonPath cp;
  std::vector<double> upcrossings;
  double tau = 0.0;
};

CertifiedPoisson certified_poisson(double horizon, Engine& rng, const PoissonOptions& opt);

/// Grid containing `base`, every jump and every upcrossing up to the horizon.
GridPtr poisson_grid(const CertifiedPoisson& cp, const TimeGrid& base);

/// τ^d = sup{t : W_t <= a} with W_t = μt - X_t. F̃ = (1 - Ψ(W - a))1{W > a}
/// off the upcrossings; A = A^g jumps by 1 - Ψ(0) right after each σ_n.
HonestTimeScenario cpp_honest_time(const SeedSpec& seed, const TimeGrid& base, const PoissonOptions& opt);
HonestTimeScenario cpp_honest_time_on(const CertifiedPoisson& cp, const GridPtr& grid, const PoissonOptions& opt,
                                      const SeedSpec& seed);

/// τ ≡ 0: F̃ = 1 after time 0.
HonestTimeScenario zero_time_scenario(const GridPtr& grid, const SeedSpec& seed);

/// Both scenarios on the same grid; F̃ = F̃^c F̃^d and τ = τ^c ∨ τ^d.
HonestTimeScenario max_combine(const HonestTimeScenario& c, const HonestTimeScenario& d);

/// Poisson part first, Brownian part simulated on the union grid.
HonestTimeScenario max_combined(const SeedSpec& seed, const TimeGrid& base, const BrownianOptions& bopt,
                                const PoissonOptions& popt);

// ---------------------------------------------------------------------------
// Trees

/// H^o for H = 1_{[τ,∞)}, τ given per leaf as a level (or kNever).
/// Returns H^o_k per atom (cumulative).
TreeProcess dual_optional_projection(const FiltrationTree& tree, const std::vector<double>& tau_per_leaf);
/// Same for a randomized τ: law[leaf][k] = P(τ = k | F_D) for k = 0..depth;
/// further entries (mass outside the levels) are ignored.
TreeProcess dual_optional_projection(const FiltrationTree& tree, const std::vector<std::vector<double>>& law);

/// Honest time on a tree: the last level at which a class-(Σ) process vanishes.
struct HonestTree {
  FiltrationTree tree;
  TreeLaglad sigma;             ///< the class-(Σ) process
  std::vector<double> tau;      ///< per leaf
  TreeLaglad z_tilde;           ///< Z̃_k = P(τ >= k | F_k), Z̃_{k+} = P(τ > k | F_k)
  TreeProcess ho;               ///< H^o
  GridPtr grid;                 ///< {0, ..., depth}
};

HonestTree honest_tree(const FiltrationTree& tree, const TreeLaglad& sigma);
HonestTimeScenario leaf_scenario(const HonestTree& h, std::size_t leaf);

/// One scenario per leaf, indexed by leaf.
std::vector<HonestTimeScenario> leaf_scenarios(const HonestTree& h);

}  // namespace laglad

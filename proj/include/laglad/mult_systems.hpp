#pragma once

// Optional multiplicative systems associated with a positive submartingale
// on a finite tree, and the construction of a random time with a given dual
// optional projection.
//
// With X = X_0 + M + A^r + A^g,
//   C̄_{u,t} = 1 - ∫_{]u,t]} C̄_{u,s-} (ᵖX_s)^{-1} dA^r_s - ∫_{[u,t[} C̄_{u,s} (X_{s+})^{-1} dA^g_{s+}.
// On a tree A^r only jumps, so the equation reduces to a product of the
// ratios ℓ_s = X_{s-} / ᵖX_s at every level and r_s = X_s / X_{s+} at every
// right limit.

#include <cstddef>
#include <vector>

#include "laglad/path.hpp"
#include "laglad/rng.hpp"
#include "laglad/tree.hpp"

namespace laglad {

struct MultOptions {
  /// Shifts X + ε used to exhibit the monotone limit when inf X = 0.
  std::vector<double> epsilon_ladder = {1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-8};
  /// Slack for the submartingale and sign checks.
  double tol = 1e-13;
};

struct LadderRung {
  double epsilon = 0.0;
  /// max |C̄^ε - C̄| over all u, t and atoms.
  double gap_to_limit = 0.0;
};

struct MultSystem {
  FiltrationTree tree;
  TreeLaglad x;
  TreeProcess left_factor;   ///< ℓ at atom (k, j); 1 at level 0
  TreeProcess right_factor;  ///< r at atom (k, j)
  /// c_bar[u][t][j] = C̄_{u,t} at atom (t, j); 1 for t <= u.
  std::vector<TreeProcess> c_bar;
  /// C̄_{u,t+}.
  std::vector<TreeProcess> c_bar_plus;
  /// The regularized system C_{u,t} = C̄_{u+,t+}.
  std::vector<TreeProcess> c_reg;
  /// Filled when inf X = 0 and the system is the ε -> 0 limit.
  std::vector<LadderRung> ladder;
  bool ladder_monotone = true;

  std::size_t depth() const { return tree.depth(); }
};

/// Throws NonPositiveX if X < 0 somewhere and NotSubmartingale if the exact
/// Doob split has a negative A^r or A^g increment.
MultSystem build_mult_system(const FiltrationTree& tree, const TreeLaglad& x, const MultOptions& opt = {});

struct MultSystemReport {
  double msdef = 0.0;         ///< max |E[C_{t,D} X_{D+} | F_t] - X_{t+}|
  double q_martingale = 0.0;  ///< max defect of Q̄_{u,·} = C̄_{u,·} X on [u, D]
  double cocycle = 0.0;       ///< max |C̄_{u,s} C̄_{s,t} - C̄_{u,t}|
  double monotone = 0.0;      ///< largest increase in t or decrease in u
  double range = 0.0;         ///< distance of C̄ from [0, 1]
  double max() const;
};

MultSystemReport martingale_check(const MultSystem& ms);

/// C̄_{u,·} along a single decomposed path, with ᵖX = X_- + ΔA^d at left
/// jumps and factor X_{t+} / (X_{t+} + ΔA^c) on segments.
LagladPath c_bar_path(const PathDecomposition& x, std::size_t u);

// ---------------------------------------------------------------------------
// Random times with dual optional projection B

struct ConstructedTime {
  FiltrationTree tree;
  TreeProcess b;            ///< the target, levels 0..D
  TreeLaglad x;             ///< X_k = 1 - E[B_D - B_{k-1} | F_k], X_{k+} = 1 - E[B_D - B_k | F_k]
  MultSystem system;
  /// law[leaf][k] = P(τ = k | F_D) for k = 0..D; law[leaf][D+1] is the
  /// sentinel τ = ∞, whose conditional mean given F_0 is X_0 = 1 - E[B_D].
  std::vector<std::vector<double>> law;
  /// Thresholds X_∞ C̄_{u,∞} per leaf: entry 0 is the sentinel level
  /// X_∞ C̄_{0,∞}, entry k+1 is X_∞ C̄_{k+,∞}.
  std::vector<std::vector<double>> ladder;
};

ConstructedTime construct_time(const FiltrationTree& tree, const TreeProcess& b, const MultOptions& opt = {});
/// The same ladder for an arbitrary positive submartingale X with X_∞ = X_{D+}
/// (b stays empty). The sentinel then carries X_∞ C̄_{0,∞} + 1 - X_∞.
ConstructedTime construct_time(const FiltrationTree& tree, const TreeLaglad& x, const MultOptions& opt = {});

/// τ for one draw of U on the given leaf (kNever for the sentinel).
double sample_tau(const ConstructedTime& ct, std::size_t leaf, double u);

/// Law read off the raw infimum inf{u >= 0 : X_∞ C̄_{u,∞} > U}, which puts
/// the sentinel mass at 0.
std::vector<std::vector<double>> infimum_law(const ConstructedTime& ct);

struct DualProjectionReport {
  TreeProcess ho;
  double max_deviation = 0.0;   ///< max |H^o - B|
  /// max |P(τ < k or τ = ∞ | F_k) - X_k| and the same with τ <= k against X_{k+}.
  double x_identity = 0.0;
};

DualProjectionReport verify_dual_projection(const ConstructedTime& ct);

/// Random adapted increasing B on levels 0..D with increments in
/// [0, scale / (D + 1)]. With normalize, B_D = 1 on every leaf.
TreeProcess random_increasing(const FiltrationTree& tree, Engine& rng, double scale = 0.9, bool normalize = false);

/// Random positive submartingale on a tree (left and right jumps of A).
TreeLaglad random_submartingale(const FiltrationTree& tree, Engine& rng);

}  // namespace laglad

#pragma once

// Class-(Σ) processes: the minimal reflection condition at zero, the
// transforms that preserve it, last-zero functionals and the
// Madan-Roynette-Yor identities.
//
// "X = 0" is tested as |X| <= band. Continuous-path grids need a band of a
// few sqrt(dt); pure-jump and tree processes use band 0.

#include <cstddef>
#include <functional>
#include <vector>

#include "laglad/calculus.hpp"
#include "laglad/path.hpp"
#include "laglad/rng.hpp"
#include "laglad/tree.hpp"

namespace laglad {

struct SigmaReport {
  bool is_sigma = false;
  double leak_c = 0.0;  ///< |dA^c| mass on segments away from zero
  double leak_g = 0.0;  ///< |Δ⁺A^g| mass at nodes with X != 0
  double leak_d = 0.0;  ///< |ΔA^d| mass at nodes with X_- != 0
  /// sup_t |X_0 + A^d_t|; class-(Σ) forces X_0 = 0 and A^d = 0.
  double x0_plus_ad_residual = 0.0;
};

SigmaReport check_sigma(const PathDecomposition& x, double zero_band = 0.0, double tol = 1e-10);

/// Σ 1{X_{s-} > 0}(X_s)^- and Σ 1{X_{s-} <= 0}(X_s)^+ over left jumps.
struct CrossingSums {
  double from_positive = 0.0;
  double from_negative = 0.0;
};

CrossingSums crossing_sums(const LagladPath& x);

enum class CrossingClass { Continuous, FromPositive, FromNegative, Neither };

/// Strongest class that applies: Continuous if both sums vanish.
CrossingClass crossing_class(const LagladPath& x, double tol = 0.0);
const char* to_string(CrossingClass c);

struct SigmaTransform {
  PathDecomposition result;
  SigmaReport report;
  /// Whether the crossing (or bracket) hypothesis of the transform holds.
  bool hypothesis_holds = false;
  /// sup |pointwise value - assembled decomposition|.
  double residual = 0.0;
};

SigmaTransform pos_part(const PathDecomposition& x, double zero_band = 0.0);
SigmaTransform neg_part(const PathDecomposition& x, double zero_band = 0.0);
SigmaTransform abs_part(const PathDecomposition& x, double zero_band = 0.0);

/// XY by integration by parts. Throws BracketNonzero when sup |[X^m, Y^m]|
/// exceeds bracket_tol.
SigmaTransform sigma_product(const PathDecomposition& x, const PathDecomposition& y, double zero_band = 0.0,
                             double bracket_tol = 1e-10);

/// f(A) X with martingale part ∫ f(A_s) dM_s; everything else is
/// finite variation carried where A moves.
SigmaTransform fA_transform(const PathDecomposition& x, const std::function<double(double)>& f,
                            double zero_band = 0.0);

/// g_t = sup{s <= t : X_s = 0} and k_t = inf{s > t : X_s = 0} on the grid.
/// Node 0 counts as a zero.
struct PassageFunctionals {
  std::vector<std::size_t> g_index;
  std::vector<std::size_t> k_index;  ///< size() when X never vanishes again
  std::vector<double> g;
  std::vector<double> k;  ///< +inf when X never vanishes again
  double tau = 0.0;       ///< g at the horizon
};

PassageFunctionals passage(const LagladPath& x, double zero_band = 0.0);

/// Residuals of the balayage identity at the node u:
///   (X_+)_t 1{g_t <= u} - (M_{t∧k_u} + A^c_u + A^g_{u+})   for t >= u,
///   X_t 1{g_t <= u}     - (M_{t∧k_u} + A^c_u + A^g_{u+})   for t > u.
struct BalayageResidual {
  std::size_t u = 0;
  std::vector<double> plus_form;   ///< indexed by t - u
  std::vector<double> value_form;  ///< indexed by t - u; entry 0 unused
  double sup() const;
  double rms() const;
};

BalayageResidual balayage_check(const PathDecomposition& x, std::size_t u, double zero_band = 0.0);

// ---------------------------------------------------------------------------
// MRY identities

/// One replication's contribution to a finite-horizon identity at node
/// times u <= s <= t:
///   (i)  lhs = X_{t+} 1{g_t <= u}, rhs = X_{s+} 1{g_s <= u}
///   (ii) lhs = X_t 1{g_t < u},     rhs = X_s 1{g_s < u}     (u < s)
struct MrySample {
  double lhs = 0.0;
  double rhs = 0.0;
};

MrySample mry_finite_sample(const LagladPath& x, const PassageFunctionals& pf, std::size_t u, std::size_t s,
                            std::size_t t, bool strict = false);

/// lhs = X_∞ 1{τ <= s} (or τ < s), rhs = X_{s+} (or X_s).
MrySample mry_infinity_sample(const LagladPath& x, double x_infinity, double tau, std::size_t s,
                              bool strict = false);

/// Exact check on a tree: the maximal per-atom violation over all levels
/// u <= s <= t of the four identities.
struct MryTreeReport {
  double finite_plus = 0.0;     ///< E[X_{t+}1{g_t<=u}|F_s] = X_{s+}1{g_s<=u}
  double finite_strict = 0.0;   ///< E[X_t 1{g_t<u}|F_s] = X_s 1{g_s<u}, u < s
  double infinity_plus = 0.0;   ///< E[X_∞1{τ<=s}|F_s] = X_{s+}
  double infinity_strict = 0.0; ///< E[X_∞1{τ<s}|F_s] = X_s
  std::size_t atoms_checked = 0;
  double max() const;
};

MryTreeReport mry_tree_exact(const FiltrationTree& tree, const TreeLaglad& x);

// ---------------------------------------------------------------------------
// Class-(Σ) tree processes

/// Root 0. A nonzero atom keeps its value as right limit and moves to a
/// mean-preserving pair of children; with probability zero_child_prob that
/// pair is (0, x/p). A zero atom first jumps right to a random v >= 0 (A^g)
/// and then branches around v the same way.
TreeLaglad random_sigma_tree(const FiltrationTree& tree, Engine& rng, double zero_child_prob = 0.5);

/// Variant in which every atom has a zero child and zero atoms always jump
/// to a positive value, so P(τ > k | F_k) > 0 before the last level.
TreeLaglad honest_sigma_tree(const FiltrationTree& tree, Engine& rng);

/// Tree version of check_sigma along every branch (band 0).
SigmaReport check_sigma_tree(const FiltrationTree& tree, const TreeLaglad& x, double tol = 1e-12);

}  // namespace laglad

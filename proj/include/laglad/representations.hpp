#pragma once

// Additive and multiplicative representations of the Azéma supermartingale
// Z̃ of an honest time:
//
//   Z̃ = 1 + n - n̄,   n = m - A^g,   n̄ = 1 + A^c
//   Z̃ = N / N̄,       N = Z̃ D^c,    N̄ = D^c = e^{A^c}
//
// where D̃ = D^c D^g solves D̃ = 1 + ∫ D̃_- Z̃^{-1} dA^c + ∫ D̃ Z̃_+^{-1} dA^g_+.

#include "laglad/honest.hpp"
#include "laglad/path.hpp"

namespace laglad {

struct AdditiveRep {
  LagladPath n;
  IncreasingPath n_bar;
  LagladPath residual;      ///< Z̃ - (1 + n - n̄)
  double residual_sup = 0.0;
  double n_bar_gap = 0.0;   ///< sup |n̄ - (1 + A^c)|
};

AdditiveRep additive_rep(const HonestTimeScenario& sc);

/// Fraction of limit points where exactly one of |n - n̄| <= eps and
/// |Z̃ - 1| <= eps holds.
double set_equality_check(const HonestTimeScenario& sc, const AdditiveRep& rep, double eps = 1e-10);

struct MultiplicativeRep {
  IncreasingPath y_c;
  IncreasingPath y_g;
  PathDecomposition y;     ///< Y = Y^c + Y^g as an FV semimartingale
  LagladPath d_tilde;
  IncreasingPath d_c;
  IncreasingPath d_g;
  LagladPath n;             ///< N = Z̃ D^c
  IncreasingPath n_bar;
  LagladPath m_tilde;       ///< M̃ = D̃ Z̃
  LagladPath residual;      ///< Z̃ N̄ - N
  double residual_sup = 0.0;
  double n_bar_gap = 0.0;   ///< sup |N̄ - D^c|
  /// On a finite tree τ is bounded by the last level, so Z̃ vanishes right
  /// after it and the last right jump of A cannot enter Y. It is dropped.
  bool terminal_jump_dropped = false;
};

/// Y, D̃, D^c and D^g. dY^c uses the larger of the two endpoint values of
/// Z̃ on each segment, which equals 1 wherever the segment reaches {Z̃ = 1}.
/// Throws DivisionNearZero if Z̃ < 1e-12 where A moves.
MultiplicativeRep solve_D(const HonestTimeScenario& sc);

/// solve_D followed by N, N̄, M̃ and the residual.
MultiplicativeRep mult_rep(const HonestTimeScenario& sc);

/// Mass of dD^c and Δ⁺D^g carried where Z̃ < 1 - eps on the whole segment
/// (resp. at the node).
double support_leak(const HonestTimeScenario& sc, const MultiplicativeRep& rep, double eps);

/// sup |D̃ - 1 - ∫ D̃_- dY^c - ∫ D̃ dY^g_+|.
double dcg_residual(const MultiplicativeRep& rep);

/// D̃ by forward Euler iteration of the same integral equation; agrees with
/// the product formula up to Σ (ΔY^c)^2.
LagladPath dcg_forward(const MultiplicativeRep& rep);

/// Skorokhod reflection R(p) = sup(-p) ∨ 0.
IncreasingPath skorokhod_map(const LagladPath& p);

}  // namespace laglad

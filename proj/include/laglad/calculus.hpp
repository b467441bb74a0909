#pragma once

// Stochastic calculus for optional semimartingales on a grid.
//
// Integrals follow the optional convention: the right-continuous part of the
// integrator (continuous moves and left jumps) is integrated against H_{s-},
// the right jumps against H_s. On a continuous segment (t_i, t_{i+1}), H_{s-}
// is evaluated at the segment start, i.e. at H_{t_i+}.

#include <functional>
#include <vector>

#include "laglad/path.hpp"

namespace laglad {

struct Integrand {
  std::vector<double> seg_values;   ///< per segment
  std::vector<double> left_values;  ///< per node, weights left jumps
  std::vector<double> at_values;    ///< per node, weights right jumps

  /// Predictable/optional evaluation of an adapted path: segment values are
  /// the right limits, left jumps use H_-, right jumps use H.
  static Integrand from_path(const LagladPath& h);
  static Integrand constant(std::size_t nodes, double c);
  /// Applies g to each evaluation point of X.
  static Integrand of(const LagladPath& x, const std::function<double(double)>& g);
};

/// ∫ H_{s-} dX^r + ∫ H_s dX^g_{s+}. Zero at node 0.
LagladPath integrate(const Integrand& h, const LagladPath& integrator);

/// Running sum of squared continuous-martingale increments.
LagladPath bracket_c(const PathDecomposition& d);

/// [X^m, Y^m]: continuous-martingale products plus products of martingale
/// left jumps.
LagladPath covariation(const PathDecomposition& x, const PathDecomposition& y);

/// f(X) - f(X_0) minus every term of the Itô formula, at all limit points.
LagladPath ito_check(const PathDecomposition& d, const std::function<double(double)>& f,
                     const std::function<double(double)>& df,
                     const std::function<double(double)>& d2f);

struct StochExp {
  LagladPath path;
  bool zero_factor = false;  ///< some factor 1 + jump vanished
};

StochExp stoch_exp(const PathDecomposition& d, double s0 = 1.0);

/// Residual of S_t - s0 - ∫ S_- dX^r - ∫ S dX^g_+ along the grid.
LagladPath stoch_exp_equation_residual(const LagladPath& s, const PathDecomposition& d, double s0);

struct LocalTimePath {
  IncreasingPath L;
  double level = 0.0;
};

struct TanakaSplit {
  PathDecomposition pos;
  PathDecomposition neg;
  PathDecomposition abs;
  LocalTimePath local_time;
  /// L recovered independently from the (X - a)^- identity.
  LagladPath local_time_from_minus;
};

TanakaSplit tanaka_split(const PathDecomposition& d, double a);

/// Largest local-time increment over segments whose linear interpolation
/// stays farther than `band` from the level.
double local_time_support_leak(const LagladPath& x, const LocalTimePath& lt, double band);

/// Decomposition of X + Y (parts add).
PathDecomposition add(const PathDecomposition& x, const PathDecomposition& y);

/// Decomposition of X * Y by integration by parts. The continuous covariation
/// of the martingale parts goes to A^c; other segment cross terms stay in M.
PathDecomposition product(const PathDecomposition& x, const PathDecomposition& y);

}  // namespace laglad

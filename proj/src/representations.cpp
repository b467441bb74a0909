#include "laglad/representations.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "laglad/calculus.hpp"
#include "laglad/errors.hpp"

namespace laglad {

namespace {

constexpr double kDivisionFloor = 1e-12;

double sup_norm(const LagladPath& p) { return sup_distance(p, LagladPath::constant(p.grid_ptr(), 0.0)); }

void require_decomposition(const HonestTimeScenario& sc) {
  if (sc.f_tilde.size() == 0) throw Error(ErrorCode::MissingDecomposition, "scenario carries no F̃ decomposition");
}

// Limit components in the order minus, value, plus, skipping the node-0 minus.
template <class F>
void for_each_point(const LagladPath& a, const LagladPath& b, F&& f) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0) f(a.minus(i), b.minus(i));
    f(a.value(i), b.value(i));
    f(a.plus(i), b.plus(i));
  }
}

}  // namespace

AdditiveRep additive_rep(const HonestTimeScenario& sc) {
  require_decomposition(sc);
  const PathDecomposition& d = sc.f_tilde;
  AdditiveRep rep;
  rep.n = sc.m() - d.ag();
  rep.n_bar = running_sup(rep.n);
  const LagladPath z = sc.z_tilde();
  rep.residual = z - affine(1.0, 1.0, rep.n - rep.n_bar.path());
  rep.residual_sup = sup_norm(rep.residual);
  rep.n_bar_gap = sup_distance(rep.n_bar.path(), affine(1.0, 1.0, d.ac()));
  return rep;
}

double set_equality_check(const HonestTimeScenario& sc, const AdditiveRep& rep, double eps) {
  const LagladPath z = sc.z_tilde();
  const LagladPath gap = rep.n_bar.path() - rep.n;
  std::size_t total = 0, differ = 0;
  for_each_point(gap, z, [&](double gp, double zv) {
    ++total;
    if ((std::abs(gp) <= eps) != (std::abs(zv - 1.0) <= eps)) ++differ;
  });
  return total == 0 ? 0.0 : static_cast<double>(differ) / static_cast<double>(total);
}

MultiplicativeRep solve_D(const HonestTimeScenario& sc) {
  require_decomposition(sc);
  const PathDecomposition& d = sc.f_tilde;
  const GridPtr& g = sc.grid();
  const std::size_t n = d.size();
  const LagladPath z = sc.z_tilde();

  MultiplicativeRep rep;
  std::vector<double> yc(n - 1, 0.0), yg(n, 0.0), zeros(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double da = d.ac_increment(i);
    if (da == 0.0) continue;
    const double denom = std::max(z.plus(i), z.minus(i + 1));
    if (denom < kDivisionFloor)
      throw Error(ErrorCode::DivisionNearZero, "Z̃ vanishes on a segment where A^c moves");
    yc[i] = da / denom;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(d.ad_jump(i)) > 1e-12)
      throw Error(ErrorCode::InvariantViolation, "A has a left jump; the representation needs A = A^c + A^g");
    const double da = d.ag_jump(i);
    if (da == 0.0) continue;
    if (z.plus(i) < kDivisionFloor) {
      if (i + 1 == n) {
        rep.terminal_jump_dropped = true;
        continue;
      }
      throw Error(ErrorCode::DivisionNearZero, "Z̃_+ vanishes where A^g jumps");
    }
    yg[i] = da / z.plus(i);
  }

  rep.y_c = IncreasingPath(LagladPath::from_increments(g, 0.0, yc, zeros, zeros), 1e-15);
  rep.y_g = IncreasingPath(LagladPath::from_increments(g, 0.0, std::vector<double>(n - 1, 0.0), zeros, yg), 1e-15);
  FvSpec spec;
  spec.ac = yc;
  spec.ad = zeros;
  rep.y = decompose(rep.y_c.path() + rep.y_g.path(), spec);

  rep.d_tilde = stoch_exp(rep.y).path;
  rep.d_c = IncreasingPath(rep.y_c.path().map([](double v) { return std::exp(v); }), 1e-12);
  rep.d_g = IncreasingPath(combine(rep.d_tilde, rep.d_c.path(), [](double a, double b) { return a / b; }), 1e-12);
  return rep;
}

MultiplicativeRep mult_rep(const HonestTimeScenario& sc) {
  MultiplicativeRep rep = solve_D(sc);
  const LagladPath z = sc.z_tilde();
  rep.n = z * rep.d_c.path();
  rep.n_bar = running_sup(rep.n);
  rep.m_tilde = rep.d_tilde * z;
  rep.residual = z * rep.n_bar.path() - rep.n;
  rep.residual_sup = sup_norm(rep.residual);
  rep.n_bar_gap = sup_distance(rep.n_bar.path(), rep.d_c.path());
  return rep;
}

double support_leak(const HonestTimeScenario& sc, const MultiplicativeRep& rep, double eps) {
  const LagladPath z = sc.z_tilde();
  const LagladPath& dc = rep.d_c.path();
  const LagladPath& dg = rep.d_g.path();
  double leak = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z.value(i) < 1.0 - eps) leak += std::abs(dg.right_jump(i));
    if (i + 1 < z.size() && std::max(z.plus(i), z.minus(i + 1)) < 1.0 - eps)
      leak += std::abs(dc.segment_increment(i));
  }
  return leak;
}

double dcg_residual(const MultiplicativeRep& rep) {
  return sup_norm(stoch_exp_equation_residual(rep.d_tilde, rep.y, 1.0));
}

LagladPath dcg_forward(const MultiplicativeRep& rep) {
  const LagladPath& yc = rep.y_c.path();
  const LagladPath& yg = rep.y_g.path();
  const std::size_t n = yc.size();
  std::vector<double> m(n, 0.0), v(n), p(n);
  v[0] = 1.0;
  p[0] = v[0] * (1.0 + yg.right_jump(0));
  for (std::size_t i = 1; i < n; ++i) {
    m[i] = p[i - 1] * (1.0 + yc.segment_increment(i - 1));
    v[i] = m[i];
    p[i] = v[i] * (1.0 + yg.right_jump(i));
  }
  return LagladPath(yc.grid_ptr(), std::move(m), std::move(v), std::move(p));
}

IncreasingPath skorokhod_map(const LagladPath& p) {
  const IncreasingPath s = running_sup(affine(0.0, -1.0, p));
  return IncreasingPath(s.path().map([](double v) { return std::max(v, 0.0); }));
}

}  // namespace laglad

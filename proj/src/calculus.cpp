#include "laglad/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "laglad/errors.hpp"

namespace laglad {

namespace {

void check_lengths(const Integrand& h, std::size_t n) {
  if (h.seg_values.size() != n - 1 || h.left_values.size() != n || h.at_values.size() != n)
    throw Error(ErrorCode::GridMismatch, "integrand not aligned with integrator grid");
}

double pos(double v) { return v > 0.0 ? v : 0.0; }
double neg(double v) { return v < 0.0 ? -v : 0.0; }

// Accumulates node-by-node into a path, visiting minus, value, plus in order.
struct Accumulator {
  std::vector<double> m, v, p;
  explicit Accumulator(std::size_t n) : m(n, 0.0), v(n, 0.0), p(n, 0.0) {}
  LagladPath finish(const GridPtr& g) {
    m[0] = 0.0;
    return LagladPath(g, std::move(m), std::move(v), std::move(p));
  }
};

}  // namespace

Integrand Integrand::from_path(const LagladPath& h) {
  const std::size_t n = h.size();
  Integrand out;
  out.seg_values.resize(n - 1);
  out.left_values.resize(n);
  out.at_values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) out.seg_values[i] = h.plus(i);
    out.left_values[i] = h.minus(i);
    out.at_values[i] = h.value(i);
  }
  return out;
}

Integrand Integrand::constant(std::size_t nodes, double c) {
  return Integrand{std::vector<double>(nodes - 1, c), std::vector<double>(nodes, c), std::vector<double>(nodes, c)};
}

Integrand Integrand::of(const LagladPath& x, const std::function<double(double)>& g) {
  Integrand h = from_path(x);
  for (double& v : h.seg_values) v = g(v);
  for (std::size_t i = 0; i < h.left_values.size(); ++i) h.left_values[i] = i == 0 ? 0.0 : g(h.left_values[i]);
  for (double& v : h.at_values) v = g(v);
  return h;
}

LagladPath integrate(const Integrand& h, const LagladPath& x) {
  const std::size_t n = x.size();
  check_lengths(h, n);
  std::vector<double> seg(n - 1), left(n), right(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) seg[i] = h.seg_values[i] * x.segment_increment(i);
    left[i] = i == 0 ? 0.0 : h.left_values[i] * x.left_jump(i);
    right[i] = h.at_values[i] * x.right_jump(i);
  }
  return LagladPath::from_increments(x.grid_ptr(), 0.0, seg, left, right);
}

LagladPath bracket_c(const PathDecomposition& d) {
  const std::size_t n = d.size();
  std::vector<double> seg(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) seg[i] = d.mc_increment(i) * d.mc_increment(i);
  const std::vector<double> zero(n, 0.0);
  return LagladPath::from_increments(d.grid_ptr(), 0.0, seg, zero, zero);
}

LagladPath covariation(const PathDecomposition& x, const PathDecomposition& y) {
  require_same_grid(x.path(), y.path());
  const std::size_t n = x.size();
  std::vector<double> seg(n - 1), left(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) seg[i] = x.mc_increment(i) * y.mc_increment(i);
  for (std::size_t i = 1; i < n; ++i) left[i] = x.m_jump(i) * y.m_jump(i);
  return LagladPath::from_increments(x.grid_ptr(), 0.0, seg, left, std::vector<double>(n, 0.0));
}

LagladPath ito_check(const PathDecomposition& d, const std::function<double(double)>& f,
                     const std::function<double(double)>& df, const std::function<double(double)>& d2f) {
  const LagladPath& x = d.path();
  const std::size_t n = x.size();
  const double f0 = f(x.value(0));
  Accumulator r(n);
  double rhs = 0.0;  // every right-hand term accumulated so far
  auto right_jump = [&](std::size_t i) {
    const double xs = x.value(i), xp = x.plus(i);
    const double dr = xp - xs;
    rhs += df(xs) * dr + (f(xp) - f(xs) - df(xs) * dr);
  };
  r.v[0] = 0.0;
  right_jump(0);
  r.p[0] = f(x.plus(0)) - f0 - rhs;
  for (std::size_t i = 1; i < n; ++i) {
    const double s = x.plus(i - 1);
    const double c = x.segment_increment(i - 1);
    const double mc = d.mc_increment(i - 1);
    rhs += df(s) * c + 0.5 * d2f(s) * mc * mc;
    r.m[i] = f(x.minus(i)) - f0 - rhs;
    const double xm = x.minus(i), xv = x.value(i);
    const double dl = xv - xm;
    rhs += df(xm) * dl + (f(xv) - f(xm) - df(xm) * dl);
    r.v[i] = f(xv) - f0 - rhs;
    right_jump(i);
    r.p[i] = f(x.plus(i)) - f0 - rhs;
  }
  return r.finish(d.grid_ptr());
}

StochExp stoch_exp(const PathDecomposition& d, double s0) {
  const LagladPath& x = d.path();
  const std::size_t n = x.size();
  Accumulator out(n);
  StochExp res;
  double s = s0;
  out.v[0] = s;
  auto mul = [&](double factor) {
    if (factor == 0.0) res.zero_factor = true;
    s *= factor;
  };
  mul(1.0 + x.right_jump(0));
  out.p[0] = s;
  for (std::size_t i = 1; i < n; ++i) {
    const double mc = d.mc_increment(i - 1);
    mul(std::exp(x.segment_increment(i - 1) - 0.5 * mc * mc));
    out.m[i] = s;
    mul(1.0 + x.left_jump(i));
    out.v[i] = s;
    mul(1.0 + x.right_jump(i));
    out.p[i] = s;
  }
  res.path = out.finish(d.grid_ptr());
  return res;
}

LagladPath stoch_exp_equation_residual(const LagladPath& s, const PathDecomposition& d, double s0) {
  const LagladPath integral = integrate(Integrand::from_path(s), d.path());
  return s - integral - LagladPath::constant(s.grid_ptr(), s0);
}

TanakaSplit tanaka_split(const PathDecomposition& d, double a) {
  const LagladPath& x = d.path();
  const std::size_t n = x.size();
  const GridPtr& g = d.grid_ptr();

  const LagladPath p = x.map([a](double v) { return pos(v - a); });
  const LagladPath q = x.map([a](double v) { return neg(v - a); });

  // Half local time per segment: (e-a)^+ - (s-a)^+ - 1{s>a}(e-s), evaluated
  // by cases so that it is exactly zero unless the segment crosses a.
  std::vector<double> half_l(n - 1, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double s = x.plus(i), e = x.minus(i + 1);
    if (s > a && e <= a) half_l[i] = a - e;
    else if (s <= a && e > a) half_l[i] = e - a;
  }

  FvSpec sp, sq;
  sp.ac.resize(n - 1);
  sp.md_drift.resize(n - 1);
  sp.ad.assign(n, 0.0);
  sq = sp;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x.plus(i) > a ? 1.0 : 0.0;
    sp.ac[i] = h * d.ac_increment(i) + half_l[i];
    sp.md_drift[i] = h * d.md_drift(i);
    sq.ac[i] = -(1.0 - h) * d.ac_increment(i) + half_l[i];
    sq.md_drift[i] = -(1.0 - h) * d.md_drift(i);
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double h = x.minus(i) > a ? 1.0 : 0.0;
    sp.ad[i] = p.left_jump(i) - h * d.m_jump(i);
    sq.ad[i] = q.left_jump(i) + (1.0 - h) * d.m_jump(i);
  }
  FvSpec sa = sp;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sa.ac[i] += sq.ac[i];
    sa.md_drift[i] += sq.md_drift[i];
  }
  for (std::size_t i = 0; i < n; ++i) sa.ad[i] += sq.ad[i];

  TanakaSplit out;
  out.pos = decompose(p, sp);
  out.neg = decompose(q, sq);
  out.abs = decompose(p + q, sa);

  std::vector<double> l_seg(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) l_seg[i] = 2.0 * half_l[i];
  const std::vector<double> zero(n, 0.0);
  out.local_time = LocalTimePath{IncreasingPath(LagladPath::from_increments(g, 0.0, l_seg, zero, zero)), a};

  // Independent inversion of the minus identity, written out term by term.
  Accumulator lm(n);
  const double q0 = q.value(0);
  double rhs = 0.0;
  auto right_terms = [&](std::size_t i) {
    const double xs = x.value(i), xp = x.plus(i);
    const double h = xs <= a ? 1.0 : 0.0;
    rhs += -h * d.ag_jump(i);
    rhs += (xs > a ? neg(xp - a) : 0.0) + (xs <= a ? pos(xp - a) : 0.0);
  };
  right_terms(0);
  lm.p[0] = 2.0 * (q.plus(0) - q0 - rhs);
  for (std::size_t i = 1; i < n; ++i) {
    const double s = x.plus(i - 1);
    const double h = s <= a ? 1.0 : 0.0;
    rhs += -h * (d.ac_increment(i - 1) + d.mc_increment(i - 1) + d.md_drift(i - 1));
    lm.m[i] = 2.0 * (q.minus(i) - q0 - rhs);
    const double xm = x.minus(i), xv = x.value(i);
    const double hl = xm <= a ? 1.0 : 0.0;
    rhs += -hl * (d.ad_jump(i) + d.m_jump(i));
    rhs += (xm > a ? neg(xv - a) : 0.0) + (xm <= a ? pos(xv - a) : 0.0);
    lm.v[i] = 2.0 * (q.value(i) - q0 - rhs);
    right_terms(i);
    lm.p[i] = 2.0 * (q.plus(i) - q0 - rhs);
  }
  out.local_time_from_minus = lm.finish(g);
  return out;
}

double local_time_support_leak(const LagladPath& x, const LocalTimePath& lt, double band) {
  const LagladPath& l = lt.L.path();
  require_same_grid(x, l);
  double leak = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double s = x.plus(i) - lt.level, e = x.minus(i + 1) - lt.level;
    const double dist = (s > 0.0) != (e > 0.0) ? 0.0 : std::min(std::abs(s), std::abs(e));
    if (dist > band) leak = std::max(leak, l.segment_increment(i));
  }
  for (std::size_t i = 0; i < l.size(); ++i)
    leak = std::max({leak, std::abs(l.left_jump(i)), std::abs(l.right_jump(i))});
  return leak;
}

PathDecomposition add(const PathDecomposition& x, const PathDecomposition& y) {
  require_same_grid(x.path(), y.path());
  const std::size_t n = x.size();
  FvSpec s;
  s.ac.resize(n - 1);
  s.md_drift.resize(n - 1);
  s.ad.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    s.ac[i] = x.ac_increment(i) + y.ac_increment(i);
    s.md_drift[i] = x.md_drift(i) + y.md_drift(i);
  }
  for (std::size_t i = 0; i < n; ++i) s.ad[i] = x.ad_jump(i) + y.ad_jump(i);
  return decompose(x.path() + y.path(), s);
}

PathDecomposition product(const PathDecomposition& x, const PathDecomposition& y) {
  require_same_grid(x.path(), y.path());
  const LagladPath& px = x.path();
  const LagladPath& py = y.path();
  const std::size_t n = x.size();
  FvSpec s;
  s.ac.resize(n - 1);
  s.md_drift.resize(n - 1);
  s.ad.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double xs = px.plus(i), ys = py.plus(i);
    s.ac[i] = xs * y.ac_increment(i) + ys * x.ac_increment(i) + x.mc_increment(i) * y.mc_increment(i);
    s.md_drift[i] = xs * y.md_drift(i) + ys * x.md_drift(i);
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double xm = px.minus(i), ym = py.minus(i);
    const double dx = px.left_jump(i), dy = py.left_jump(i);
    s.ad[i] = xm * y.ad_jump(i) + ym * x.ad_jump(i) + (dx * dy - x.m_jump(i) * y.m_jump(i));
  }
  return decompose(px * py, s);
}

}  // namespace laglad

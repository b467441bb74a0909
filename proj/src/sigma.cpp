#include "laglad/sigma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "laglad/errors.hpp"

namespace laglad {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }
double neg(double v) { return v < 0.0 ? -v : 0.0; }

// Distance of a segment's linear interpolation from zero.
double segment_distance(double s, double e) {
  if ((s > 0.0) != (e > 0.0)) return 0.0;
  return std::min(std::abs(s), std::abs(e));
}

double reconstruction_error(const PathDecomposition& d) {
  return sup_distance(affine(d.x0(), 1.0, d.martingale() + d.fv()), d.path());
}

}  // namespace

SigmaReport check_sigma(const PathDecomposition& d, double band, double tol) {
  const LagladPath& x = d.path();
  const std::size_t n = x.size();
  SigmaReport r;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (segment_distance(x.plus(i), x.minus(i + 1)) > band) r.leak_c += std::abs(d.ac_increment(i));
  double ad = 0.0;
  r.x0_plus_ad_residual = std::abs(x.initial());
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(x.value(i)) > band) r.leak_g += std::abs(d.ag_jump(i));
    if (i > 0 && std::abs(x.minus(i)) > band) r.leak_d += std::abs(d.ad_jump(i));
    ad += d.ad_jump(i);
    r.x0_plus_ad_residual = std::max(r.x0_plus_ad_residual, std::abs(x.initial() + ad));
  }
  r.is_sigma = r.leak_c <= tol && r.leak_g <= tol && r.leak_d <= tol && r.x0_plus_ad_residual <= tol;
  return r;
}

CrossingSums crossing_sums(const LagladPath& x) {
  CrossingSums c;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x.minus(i) > 0.0) c.from_positive += neg(x.value(i));
    else c.from_negative += pos(x.value(i));
  }
  return c;
}

CrossingClass crossing_class(const LagladPath& x, double tol) {
  const CrossingSums c = crossing_sums(x);
  const bool p = c.from_positive <= tol, q = c.from_negative <= tol;
  if (p && q) return CrossingClass::Continuous;
  if (p) return CrossingClass::FromPositive;
  if (q) return CrossingClass::FromNegative;
  return CrossingClass::Neither;
}

const char* to_string(CrossingClass c) {
  switch (c) {
    case CrossingClass::Continuous: return "continuous";
    case CrossingClass::FromPositive: return "continuous-from-positive";
    case CrossingClass::FromNegative: return "continuous-from-negative";
    case CrossingClass::Neither: return "neither";
  }
  return "?";
}

namespace {

SigmaTransform finish(PathDecomposition d, bool hypothesis, double band) {
  SigmaTransform t;
  t.report = check_sigma(d, band);
  t.residual = reconstruction_error(d);
  t.hypothesis_holds = hypothesis;
  t.result = std::move(d);
  return t;
}

}  // namespace

SigmaTransform pos_part(const PathDecomposition& x, double band) {
  const CrossingSums c = crossing_sums(x.path());
  return finish(tanaka_split(x, 0.0).pos, c.from_positive == 0.0, band);
}

SigmaTransform neg_part(const PathDecomposition& x, double band) {
  const CrossingSums c = crossing_sums(x.path());
  return finish(tanaka_split(x, 0.0).neg, c.from_negative == 0.0, band);
}

SigmaTransform abs_part(const PathDecomposition& x, double band) {
  const CrossingSums c = crossing_sums(x.path());
  return finish(tanaka_split(x, 0.0).abs, c.from_positive == 0.0 && c.from_negative == 0.0, band);
}

SigmaTransform sigma_product(const PathDecomposition& x, const PathDecomposition& y, double band,
                             double bracket_tol) {
  const LagladPath cov = covariation(x, y);
  double worst = 0.0;
  for (std::size_t i = 0; i < cov.size(); ++i)
    worst = std::max({worst, std::abs(cov.minus(i)), std::abs(cov.value(i)), std::abs(cov.plus(i))});
  if (worst > bracket_tol)
    throw Error(ErrorCode::BracketNonzero, "martingale parts have nonzero covariation " + std::to_string(worst));
  return finish(product(x, y), true, band);
}

SigmaTransform fA_transform(const PathDecomposition& x, const std::function<double(double)>& f, double band) {
  const LagladPath& px = x.path();
  const LagladPath a = x.fv();
  const std::size_t n = px.size();
  std::vector<double> ym(n), yv(n), yp(n);
  for (std::size_t i = 0; i < n; ++i) {
    ym[i] = i == 0 ? 0.0 : f(a.minus(i)) * px.minus(i);
    yv[i] = f(a.value(i)) * px.value(i);
    yp[i] = f(a.plus(i)) * px.plus(i);
  }
  const LagladPath y(px.grid_ptr(), std::move(ym), std::move(yv), std::move(yp));

  FvSpec s;
  s.ac.resize(n - 1);
  s.md_drift.resize(n - 1);
  s.ad.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double fs = f(a.plus(i)), fe = f(a.minus(i + 1));
    s.ac[i] = fs * x.ac_increment(i) + (fe - fs) * px.minus(i + 1);
    s.md_drift[i] = fs * x.md_drift(i);
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double fm = f(a.minus(i)), fv = f(a.value(i));
    s.ad[i] = fm * x.ad_jump(i) + (fv - fm) * px.value(i);
  }
  SigmaTransform t = finish(decompose(y, s), true, band);

  // Compare against f(0)X_0 + ∫ f(A) dM + ∫ f(A_+) dA_+, accumulated term by term.
  double r = f(0.0) * px.initial();
  double worst = std::abs(r - y.value(0));
  for (std::size_t i = 0; i < n; ++i) {
    r += f(a.plus(i)) * x.ag_jump(i);
    worst = std::max(worst, std::abs(r - y.plus(i)));
    if (i + 1 == n) break;
    const double fs = f(a.plus(i));
    r += fs * (x.mc_increment(i) + x.md_drift(i) + x.ac_increment(i));
    worst = std::max(worst, std::abs(r - y.minus(i + 1)));
    const double fm = f(a.minus(i + 1));
    r += fm * (x.m_jump(i + 1) + x.ad_jump(i + 1));
    worst = std::max(worst, std::abs(r - y.value(i + 1)));
  }
  t.residual = worst;
  return t;
}

PassageFunctionals passage(const LagladPath& x, double band) {
  const std::size_t n = x.size();
  const TimeGrid& g = x.grid();
  PassageFunctionals p;
  p.g_index.resize(n);
  p.k_index.resize(n);
  p.g.resize(n);
  p.k.resize(n);
  std::size_t last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || std::abs(x.value(i)) <= band) last = i;
    p.g_index[i] = last;
    p.g[i] = g[last];
  }
  std::size_t next = n;
  for (std::size_t i = n; i-- > 0;) {
    p.k_index[i] = next;
    p.k[i] = next == n ? std::numeric_limits<double>::infinity() : g[next];
    if (i == 0 || std::abs(x.value(i)) <= band) next = i;
  }
  p.tau = p.g.back();
  return p;
}

double BalayageResidual::sup() const {
  double s = 0.0;
  for (double v : plus_form) s = std::max(s, std::abs(v));
  for (std::size_t i = 1; i < value_form.size(); ++i) s = std::max(s, std::abs(value_form[i]));
  return s;
}

double BalayageResidual::rms() const {
  if (plus_form.empty()) return 0.0;
  double s = 0.0;
  for (double v : plus_form) s += v * v;
  return std::sqrt(s / static_cast<double>(plus_form.size()));
}

BalayageResidual balayage_check(const PathDecomposition& d, std::size_t u, double band) {
  const LagladPath& x = d.path();
  const std::size_t n = x.size();
  if (u >= n) throw Error(ErrorCode::InvalidArgument, "balayage node out of range");
  const PassageFunctionals pf = passage(x, band);
  const LagladPath m = d.martingale(), ac = d.ac(), ag = d.ag();
  const double frozen = ac.value(u) + ag.plus(u);
  const std::size_t ku = pf.k_index[u];
  BalayageResidual r;
  r.u = u;
  r.plus_form.resize(n - u);
  r.value_form.assign(n - u, 0.0);
  for (std::size_t t = u; t < n; ++t) {
    const double rhs = m.value(std::min(t, ku)) + frozen;
    const double ind = pf.g_index[t] <= u ? 1.0 : 0.0;
    r.plus_form[t - u] = x.plus(t) * ind - rhs;
    if (t > u) r.value_form[t - u] = x.value(t) * ind - rhs;
  }
  return r;
}

MrySample mry_finite_sample(const LagladPath& x, const PassageFunctionals& pf, std::size_t u, std::size_t s,
                            std::size_t t, bool strict) {
  if (!(u <= s && s <= t && t < x.size())) throw Error(ErrorCode::InvalidArgument, "need u <= s <= t");
  if (strict) {
    return {pf.g_index[t] < u ? x.value(t) : 0.0, pf.g_index[s] < u ? x.value(s) : 0.0};
  }
  return {pf.g_index[t] <= u ? x.plus(t) : 0.0, pf.g_index[s] <= u ? x.plus(s) : 0.0};
}

MrySample mry_infinity_sample(const LagladPath& x, double x_infinity, double tau, std::size_t s, bool strict) {
  const double ts = x.grid()[s];
  if (strict) return {tau < ts ? x_infinity : 0.0, x.value(s)};
  return {tau <= ts ? x_infinity : 0.0, x.plus(s)};
}

double MryTreeReport::max() const { return std::max({finite_plus, finite_strict, infinity_plus, infinity_strict}); }

MryTreeReport mry_tree_exact(const FiltrationTree& tree, const TreeLaglad& x) {
  const std::size_t d = tree.depth(), leaves = tree.width(d);
  // g level per leaf and level.
  std::vector<std::vector<std::size_t>> g(leaves, std::vector<std::size_t>(d + 1, 0));
  for (std::size_t l = 0; l < leaves; ++l) {
    std::size_t last = 0;
    for (std::size_t k = 0; k <= d; ++k) {
      if (k == 0 || x.x[k][ancestor(d, l, k)] == 0.0) last = k;
      g[l][k] = last;
    }
  }
  MryTreeReport r;
  std::vector<double> lhs(leaves), rhs(leaves);
  auto compare = [&](std::size_t s, double& worst) {
    const std::vector<double> el = tree.conditional_expectation(s, d, lhs);
    const std::vector<double> er = tree.conditional_expectation(s, d, rhs);
    for (std::size_t j = 0; j < el.size(); ++j) worst = std::max(worst, std::abs(el[j] - er[j]));
    r.atoms_checked += el.size();
  };
  for (std::size_t u = 0; u <= d; ++u)
    for (std::size_t s = u; s <= d; ++s)
      for (std::size_t t = s; t <= d; ++t) {
        for (std::size_t l = 0; l < leaves; ++l) {
          lhs[l] = g[l][t] <= u ? x.x_plus[t][ancestor(d, l, t)] : 0.0;
          rhs[l] = g[l][s] <= u ? x.x_plus[s][ancestor(d, l, s)] : 0.0;
        }
        compare(s, r.finite_plus);
        if (u < s) {
          for (std::size_t l = 0; l < leaves; ++l) {
            lhs[l] = g[l][t] < u ? x.x[t][ancestor(d, l, t)] : 0.0;
            rhs[l] = g[l][s] < u ? x.x[s][ancestor(d, l, s)] : 0.0;
          }
          compare(s, r.finite_strict);
        }
      }
  for (std::size_t s = 0; s <= d; ++s) {
    for (std::size_t l = 0; l < leaves; ++l) {
      lhs[l] = g[l][d] <= s ? x.x[d][l] : 0.0;
      rhs[l] = x.x_plus[s][ancestor(d, l, s)];
    }
    compare(s, r.infinity_plus);
    for (std::size_t l = 0; l < leaves; ++l) {
      lhs[l] = g[l][d] < s ? x.x[d][l] : 0.0;
      rhs[l] = x.x[s][ancestor(d, l, s)];
    }
    compare(s, r.infinity_strict);
  }
  return r;
}

TreeLaglad random_sigma_tree(const FiltrationTree& tree, Engine& rng, double zero_child_prob) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  const std::size_t d = tree.depth();
  TreeLaglad x{tree.constant(0.0), tree.constant(0.0)};
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < tree.width(k); ++j) {
      const double v = x.x[k][j];
      double base = v;
      if (v == 0.0) base = u(rng) < 0.7 ? u(rng) : 0.0;
      x.x_plus[k][j] = base;
      const double p = tree.up_prob(k, j);
      if (base != 0.0 && u(rng) < zero_child_prob) {
        x.x[k + 1][2 * j] = 0.0;
        x.x[k + 1][2 * j + 1] = base / p;
      } else {
        const double h = 0.5 * (std::abs(base) + 0.5) * z(rng);
        x.x[k + 1][2 * j] = base - p * h;
        x.x[k + 1][2 * j + 1] = base + (1.0 - p) * h;
      }
    }
  x.x_plus[d] = x.x[d];
  return x;
}

TreeLaglad honest_sigma_tree(const FiltrationTree& tree, Engine& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  const std::size_t d = tree.depth();
  TreeLaglad x{tree.constant(0.0), tree.constant(0.0)};
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < tree.width(k); ++j) {
      const double v = x.x[k][j];
      const double base = v == 0.0 ? u(rng) : v;
      x.x_plus[k][j] = base;
      x.x[k + 1][2 * j] = 0.0;
      x.x[k + 1][2 * j + 1] = base / tree.up_prob(k, j);
    }
  x.x_plus[d] = x.x[d];
  return x;
}

SigmaReport check_sigma_tree(const FiltrationTree& tree, const TreeLaglad& x, double tol) {
  const std::size_t d = tree.depth();
  const GridPtr grid = level_grid(d);
  SigmaReport all;
  all.is_sigma = true;
  for (std::size_t l = 0; l < tree.width(d); ++l) {
    const SigmaReport r = check_sigma(branch_decomposition(tree, x, l, grid), 0.0, tol);
    all.is_sigma = all.is_sigma && r.is_sigma;
    all.leak_c = std::max(all.leak_c, r.leak_c);
    all.leak_g = std::max(all.leak_g, r.leak_g);
    all.leak_d = std::max(all.leak_d, r.leak_d);
    all.x0_plus_ad_residual = std::max(all.x0_plus_ad_residual, r.x0_plus_ad_residual);
  }
  return all;
}

}  // namespace laglad

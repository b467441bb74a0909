#include "laglad/mult_systems.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "laglad/errors.hpp"
#include "laglad/honest.hpp"

namespace laglad {

namespace {

// a / b with the ε -> 0 limit of (a + ε) / (b + ε) when b vanishes. The
// submartingale property gives 0 <= a <= b, so the limit is 1 if a = b = 0.
double limit_ratio(double a, double b) {
  if (b <= 0.0) return 1.0;
  return std::max(a, 0.0) / b;
}

TreeLaglad shifted(const TreeLaglad& x, double eps) {
  TreeLaglad y = x;
  for (auto* proc : {&y.x, &y.x_plus})
    for (auto& level : *proc)
      for (double& v : level) v += eps;
  return y;
}

double max_gap(const std::vector<TreeProcess>& a, const std::vector<TreeProcess>& b, double sign, bool& monotone) {
  double gap = 0.0;
  for (std::size_t u = 0; u < a.size(); ++u)
    for (std::size_t k = 0; k < a[u].size(); ++k)
      for (std::size_t j = 0; j < a[u][k].size(); ++j) {
        const double d = a[u][k][j] - b[u][k][j];
        gap = std::max(gap, std::abs(d));
        if (sign * d < -1e-14) monotone = false;
      }
  return gap;
}

MultSystem build_positive(const FiltrationTree& tree, const TreeLaglad& x) {
  const std::size_t d = tree.depth();
  MultSystem ms{tree, x, tree.constant(1.0), tree.constant(1.0), {}, {}, {}, {}, true};
  for (std::size_t k = 0; k <= d; ++k) {
    const std::vector<double> px = k == 0 ? std::vector<double>{} : tree.conditional_expectation(k - 1, k, x.x[k]);
    for (std::size_t j = 0; j < tree.width(k); ++j) {
      if (k > 0) ms.left_factor[k][j] = limit_ratio(x.x_plus[k - 1][j / 2], px[j / 2]);
      ms.right_factor[k][j] = limit_ratio(x.x[k][j], x.x_plus[k][j]);
    }
  }
  ms.c_bar.assign(d + 1, tree.constant(1.0));
  ms.c_bar_plus.assign(d + 1, tree.constant(1.0));
  ms.c_reg.assign(d + 1, tree.constant(1.0));
  for (std::size_t u = 0; u <= d; ++u) {
    for (std::size_t t = u; t <= d; ++t)
      for (std::size_t j = 0; j < tree.width(t); ++j) {
        if (t > u) {
          ms.c_bar[u][t][j] = ms.c_bar_plus[u][t - 1][j / 2] * ms.left_factor[t][j];
          ms.c_reg[u][t][j] = ms.c_reg[u][t - 1][j / 2] * ms.left_factor[t][j] * ms.right_factor[t][j];
        }
        ms.c_bar_plus[u][t][j] = ms.c_bar[u][t][j] * ms.right_factor[t][j];
      }
  }
  return ms;
}

}  // namespace

MultSystem build_mult_system(const FiltrationTree& tree, const TreeLaglad& x, const MultOptions& opt) {
  const std::size_t d = tree.depth();
  if (x.x.size() != d + 1 || x.x_plus.size() != d + 1)
    throw Error(ErrorCode::InvalidArgument, "process does not match the tree depth");
  bool touches_zero = false;
  TreeLaglad clean = x;
  for (std::size_t k = 0; k <= d; ++k)
    for (std::size_t j = 0; j < tree.width(k); ++j) {
      for (double* v : {&clean.x[k][j], &clean.x_plus[k][j]}) {
        if (*v < -opt.tol) throw Error(ErrorCode::NonPositiveX, "X takes a negative value");
        if (*v <= opt.tol) {
          *v = std::max(*v, 0.0);
          touches_zero = touches_zero || *v == 0.0;
        }
      }
      if (clean.x_plus[k][j] - clean.x[k][j] < -opt.tol)
        throw Error(ErrorCode::NotSubmartingale, "negative right jump of A");
    }
  for (std::size_t k = 0; k < d; ++k) {
    const std::vector<double> px = tree.conditional_expectation(k, k + 1, clean.x[k + 1]);
    for (std::size_t j = 0; j < tree.width(k); ++j)
      if (px[j] - clean.x_plus[k][j] < -opt.tol)
        throw Error(ErrorCode::NotSubmartingale, "negative left jump of A");
  }

  MultSystem ms = build_positive(tree, clean);
  if (!touches_zero) return ms;

  // The ε-shifted systems decrease to the limit system as ε decreases.
  std::vector<double> eps = opt.epsilon_ladder;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  std::optional<MultSystem> prev;
  for (double e : eps) {
    MultSystem s = build_positive(tree, shifted(clean, e));
    LadderRung rung{e, 0.0};
    rung.gap_to_limit = std::max(max_gap(s.c_bar, ms.c_bar, 1.0, ms.ladder_monotone),
                                 max_gap(s.c_bar_plus, ms.c_bar_plus, 1.0, ms.ladder_monotone));
    if (prev) {
      max_gap(prev->c_bar, s.c_bar, 1.0, ms.ladder_monotone);
      max_gap(prev->c_bar_plus, s.c_bar_plus, 1.0, ms.ladder_monotone);
    }
    ms.ladder.push_back(rung);
    prev = std::move(s);
  }
  return ms;
}

double MultSystemReport::max() const { return std::max({msdef, q_martingale, cocycle, monotone, range}); }

MultSystemReport martingale_check(const MultSystem& ms) {
  const FiltrationTree& tree = ms.tree;
  const std::size_t d = tree.depth();
  MultSystemReport rep;
  const std::vector<double>& x_end = ms.x.x_plus[d];

  for (std::size_t t = 0; t <= d; ++t) {
    std::vector<double> xi(tree.width(d));
    for (std::size_t l = 0; l < xi.size(); ++l) xi[l] = ms.c_reg[t][d][l] * x_end[l];
    const std::vector<double> e = tree.conditional_expectation(t, d, xi);
    for (std::size_t j = 0; j < tree.width(t); ++j)
      rep.msdef = std::max(rep.msdef, std::abs(e[j] - ms.x.x_plus[t][j]));
  }

  for (std::size_t u = 0; u <= d; ++u) {
    std::vector<double> xi(tree.width(d));
    for (std::size_t l = 0; l < xi.size(); ++l) xi[l] = ms.c_bar_plus[u][d][l] * x_end[l];
    for (std::size_t t = u; t <= d; ++t) {
      const std::vector<double> e = tree.conditional_expectation(t, d, xi);
      for (std::size_t j = 0; j < tree.width(t); ++j) {
        rep.q_martingale = std::max(rep.q_martingale, std::abs(e[j] - ms.c_bar[u][t][j] * ms.x.x[t][j]));
        rep.q_martingale = std::max(rep.q_martingale, std::abs(e[j] - ms.c_bar_plus[u][t][j] * ms.x.x_plus[t][j]));
      }
    }
  }

  for (std::size_t u = 0; u <= d; ++u)
    for (std::size_t t = u; t <= d; ++t)
      for (std::size_t j = 0; j < tree.width(t); ++j) {
        const double c = ms.c_bar[u][t][j];
        const double cp = ms.c_bar_plus[u][t][j];
        for (double v : {c, cp}) rep.range = std::max({rep.range, -v, v - 1.0});
        rep.monotone = std::max(rep.monotone, cp - c);
        if (t > u) rep.monotone = std::max(rep.monotone, c - ms.c_bar_plus[u][t - 1][j / 2]);
        if (u > 0) rep.monotone = std::max(rep.monotone, ms.c_bar[u - 1][t][j] - c);
        for (std::size_t s = u; s <= t; ++s) {
          const std::size_t anc = j >> (t - s);
          rep.cocycle = std::max(rep.cocycle, std::abs(ms.c_bar[u][s][anc] * ms.c_bar[s][t][j] - c));
        }
      }
  return rep;
}

LagladPath c_bar_path(const PathDecomposition& x, std::size_t u) {
  const LagladPath& p = x.path();
  const std::size_t n = p.size();
  if (u >= n) throw Error(ErrorCode::InvalidArgument, "start node beyond the grid");
  std::vector<double> m(n, 1.0), v(n, 1.0), pl(n, 1.0);
  m[0] = 0.0;
  pl[u] = limit_ratio(p.value(u), p.plus(u));
  for (std::size_t i = u; i + 1 < n; ++i) {
    const double seg = limit_ratio(p.plus(i), p.plus(i) + x.ac_increment(i));
    m[i + 1] = pl[i] * seg;
    v[i + 1] = m[i + 1] * limit_ratio(p.minus(i + 1), p.minus(i + 1) + x.ad_jump(i + 1));
    pl[i + 1] = v[i + 1] * limit_ratio(p.value(i + 1), p.plus(i + 1));
  }
  return LagladPath(p.grid_ptr(), std::move(m), std::move(v), std::move(pl));
}

// ---------------------------------------------------------------------------

ConstructedTime construct_time(const FiltrationTree& tree, const TreeProcess& b, const MultOptions& opt) {
  const std::size_t d = tree.depth();
  if (b.size() != d + 1) throw Error(ErrorCode::InvalidArgument, "B does not match the tree depth");
  for (std::size_t k = 0; k <= d; ++k)
    for (std::size_t j = 0; j < tree.width(k); ++j) {
      const double prev = k == 0 ? 0.0 : b[k - 1][j / 2];
      if (b[k][j] < prev - opt.tol) throw Error(ErrorCode::InvalidArgument, "B is not increasing");
    }

  // X_k = 1 - E[B_D - B_{k-1} | F_k] with B_{-1} = 0, and the right limit
  // with B_k in place of B_{k-1}: B enters X through right jumps only.
  TreeLaglad x{tree.constant(0.0), tree.constant(0.0)};
  const TreeProcess eb = tree.conditional_expectation(d, b[d]);
  for (std::size_t k = 0; k <= d; ++k)
    for (std::size_t j = 0; j < tree.width(k); ++j) {
      const double prev = k == 0 ? 0.0 : b[k - 1][j / 2];
      x.x[k][j] = 1.0 - (eb[k][j] - prev);
      x.x_plus[k][j] = 1.0 - (eb[k][j] - b[k][j]);
    }
  ConstructedTime ct = construct_time(tree, x, opt);
  ct.b = b;
  return ct;
}

ConstructedTime construct_time(const FiltrationTree& tree, const TreeLaglad& x, const MultOptions& opt) {
  const std::size_t d = tree.depth();
  ConstructedTime ct{tree, {}, x, build_mult_system(tree, x, opt), {}, {}};

  // P(τ <= k | F_D) = X_∞ C̄_{k+,∞} with X_∞ = X_{D+} (= 1 in the B-form).
  // The level at u = 0 itself, X_∞ C̄_{0,∞}, has conditional mean X_0 and
  // goes to the sentinel.
  const std::size_t w = tree.width(d);
  ct.law.assign(w, std::vector<double>(d + 2, 0.0));
  ct.ladder.assign(w, std::vector<double>(d + 2, 0.0));
  for (std::size_t l = 0; l < w; ++l) {
    const double x_inf = ct.x.x_plus[d][l];
    std::vector<double>& lad = ct.ladder[l];
    lad[0] = x_inf * ct.system.c_bar_plus[0][d][l];
    for (std::size_t k = 0; k <= d; ++k) lad[k + 1] = x_inf * ct.system.c_reg[k][d][l];
    for (std::size_t k = 0; k <= d; ++k) ct.law[l][k] = std::max(lad[k + 1] - lad[k], 0.0);
    ct.law[l][d + 1] = lad[0] + std::max(1.0 - lad[d + 1], 0.0);
  }
  return ct;
}

double sample_tau(const ConstructedTime& ct, std::size_t leaf, double u) {
  const std::vector<double>& lad = ct.ladder.at(leaf);
  if (u < lad[0]) return kNever;
  for (std::size_t k = 1; k < lad.size(); ++k)
    if (u < lad[k]) return static_cast<double>(k - 1);
  return kNever;
}

std::vector<std::vector<double>> infimum_law(const ConstructedTime& ct) {
  const std::size_t d = ct.tree.depth();
  std::vector<std::vector<double>> law = ct.law;
  for (std::size_t l = 0; l < law.size(); ++l) {
    law[l][0] += ct.ladder[l][0];
    law[l][d + 1] -= ct.ladder[l][0];
  }
  return law;
}

DualProjectionReport verify_dual_projection(const ConstructedTime& ct) {
  const FiltrationTree& tree = ct.tree;
  const std::size_t d = tree.depth();
  DualProjectionReport rep;
  rep.ho = dual_optional_projection(tree, ct.law);
  for (std::size_t k = 0; k <= d && !ct.b.empty(); ++k)
    for (std::size_t j = 0; j < tree.width(k); ++j)
      rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.ho[k][j] - ct.b[k][j]));

  // The sentinel sits below every level in this identity.
  const std::size_t w = tree.width(d);
  for (std::size_t k = 0; k <= d; ++k) {
    std::vector<double> before(w), upto(w);
    for (std::size_t l = 0; l < w; ++l) {
      double acc = ct.law[l][d + 1];
      for (std::size_t s = 0; s < k; ++s) acc += ct.law[l][s];
      before[l] = acc;
      upto[l] = acc + ct.law[l][k];
    }
    const std::vector<double> eb = tree.conditional_expectation(k, d, before);
    const std::vector<double> eu = tree.conditional_expectation(k, d, upto);
    for (std::size_t j = 0; j < tree.width(k); ++j) {
      rep.x_identity = std::max(rep.x_identity, std::abs(eb[j] - ct.x.x[k][j]));
      rep.x_identity = std::max(rep.x_identity, std::abs(eu[j] - ct.x.x_plus[k][j]));
    }
  }
  return rep;
}

TreeProcess random_increasing(const FiltrationTree& tree, Engine& rng, double scale, bool normalize) {
  const std::size_t d = tree.depth();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double step = scale / static_cast<double>(d + 1);
  TreeProcess b = tree.constant(0.0);
  for (std::size_t k = 0; k <= d; ++k)
    for (std::size_t j = 0; j < tree.width(k); ++j) b[k][j] = (k == 0 ? 0.0 : b[k - 1][j / 2]) + step * unif(rng);
  // The last increment takes the remainder, which keeps B adapted.
  if (normalize)
    for (std::size_t j = 0; j < tree.width(d); ++j) b[d][j] = 1.0;
  return b;
}

TreeLaglad random_submartingale(const FiltrationTree& tree, Engine& rng) {
  const std::size_t d = tree.depth();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  TreeLaglad x{tree.constant(0.0), tree.constant(0.0)};
  for (std::size_t k = 0; k <= d; ++k) {
    if (k == 0) {
      x.x[0][0] = 0.2 + 0.5 * unif(rng);
    } else {
      // A mean-zero move under (1 - p, p) around the parent's right limit,
      // plus a common drift that keeps A^r predictable.
      for (std::size_t parent = 0; parent < tree.width(k - 1); ++parent) {
        const double base = x.x_plus[k - 1][parent];
        const double p = tree.up_prob(k - 1, parent);
        const double spread = 0.5 * base * unif(rng);
        const double drift = 0.3 * base * unif(rng);
        x.x[k][2 * parent] = base - spread * p + drift;
        x.x[k][2 * parent + 1] = base + spread * (1.0 - p) + drift;
      }
    }
    for (std::size_t j = 0; j < tree.width(k); ++j) {
      const double size = 0.3 * unif(rng);
      x.x_plus[k][j] = x.x[k][j] * (unif(rng) < 0.5 ? 1.0 + size : 1.0);
    }
  }
  return x;
}

}  // namespace laglad

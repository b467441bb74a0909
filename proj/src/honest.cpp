#include "laglad/honest.hpp"

#include <algorithm>
#include <cmath>

#include "laglad/calculus.hpp"
#include "laglad/errors.hpp"

namespace laglad {

LagladPath HonestTimeScenario::z_tilde() const { return affine(1.0, -1.0, f_tilde.path()); }

LagladPath HonestTimeScenario::z() const {
  const LagladPath zt = z_tilde();
  const std::size_t n = zt.size();
  std::vector<double> m(n), v(n), p(n);
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = i == 0 ? 0.0 : zt.minus(i);
    v[i] = zt.plus(i);
    p[i] = zt.plus(i);
  }
  return LagladPath(zt.grid_ptr(), std::move(m), std::move(v), std::move(p));
}

LagladPath HonestTimeScenario::m() const { return affine(1.0, -1.0, f_tilde.martingale()); }

LagladPath HonestTimeScenario::a() const { return f_tilde.fv(); }

LagladPath HonestTimeScenario::ho() const {
  const LagladPath a = f_tilde.fv();
  const std::size_t n = a.size();
  std::vector<double> m(n), v(n), p(n);
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = i == 0 ? 0.0 : a.minus(i);
    v[i] = a.plus(i);
    p[i] = a.plus(i);
  }
  return LagladPath(a.grid_ptr(), std::move(m), std::move(v), std::move(p));
}

// ---------------------------------------------------------------------------
// Brownian last zero before hitting 1

namespace {

// Walks B along the scenario grid. Between two grid nodes the Brownian bridge
// is probed at hidden points, which are never emitted: they only locate the
// zeros of B (for τ) and the first passage at 1. The emitted grid is the base
// grid plus the node T, so the discrete Tanaka split stays a martingale
// decomposition on it.
class BridgeProbe {
 public:
  BridgeProbe(Engine& rng, const BrownianOptions& opt, double nominal)
      : rng_(rng), opt_(opt), min_leaf_(std::ldexp(nominal, -opt.near_depth)) {}

  /// Probes (t0, t1). Returns true if B reaches 1 inside; hit_time() then
  /// holds T.
  bool segment(double t0, double b0, double t1, double b1) {
    if (!opt_.refine) {
      leaf(t0, b0, t1, b1, false);
      return hit_;
    }
    probe(t0, b0, t1, b1);
    return hit_;
  }

  double hit_time() const { return t_hit_; }
  /// Time of the last zero seen so far (0 if none since B_0 = 0).
  double last_zero() const { return last_zero_; }
  bool zero_after(double t) const { return last_zero_ > t; }

 private:
  double hit_prob(double b0, double b1, double h) const {
    if (b0 >= 1.0 || b1 >= 1.0) return 1.0;
    return std::exp(-2.0 * (1.0 - b0) * (1.0 - b1) / h);
  }
  double zero_prob(double b0, double b1, double h) const {
    if (b0 <= 0.0 || b1 <= 0.0) return 1.0;
    return std::exp(-2.0 * b0 * b1 / h);
  }

  void probe(double t0, double b0, double t1, double b1) {
    if (hit_) return;
    const double h = t1 - t0;
    const double p1 = hit_prob(b0, b1, h), p0 = zero_prob(b0, b1, h);
    const bool ambiguous = p1 > opt_.miss_prob || (p0 > opt_.miss_prob && (b0 > 0.0 || b1 > 0.0));
    if (h <= min_leaf_ || !ambiguous) {
      leaf(t0, b0, t1, b1, true);
      return;
    }
    const double tm = t0 + 0.5 * h;
    const double bm = 0.5 * (b0 + b1) + 0.5 * std::sqrt(h) * normal_(rng_);
    probe(t0, b0, tm, bm);
    probe(tm, bm, t1, b1);
  }

  // Within a leaf the bridge events are drawn with their exact probabilities
  // and located by linear interpolation.
  void leaf(double t0, double b0, double t1, double b1, bool bridge) {
    const double h = t1 - t0;
    if (b1 >= 1.0 || (bridge && unif_(rng_) < hit_prob(b0, b1, h))) {
      if (b0 <= 0.0) last_zero_ = t0 + (-b0) / (b1 - b0) * h;
      hit_ = true;
      t_hit_ = b1 >= 1.0 ? t0 + (1.0 - b0) / (b1 - b0) * h : t0 + 0.5 * h;
      return;
    }
    if (b1 <= 0.0) last_zero_ = t1;
    else if (b0 <= 0.0) last_zero_ = t0 + (-b0) / (b1 - b0) * h;
    else if (bridge && unif_(rng_) < zero_prob(b0, b1, h)) last_zero_ = t0 + 0.5 * h;
  }

  Engine& rng_;
  const BrownianOptions& opt_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> unif_;
  double min_leaf_;
  bool hit_ = false;
  double t_hit_ = kNever;
  double last_zero_ = 0.0;
};

}  // namespace

StoppedBrownian stopped_brownian(const TimeGrid& base, Engine& rng, const BrownianOptions& opt) {
  const double nominal = base.max_step();
  BridgeProbe probe(rng, opt, nominal);
  std::normal_distribution<double> normal;
  std::vector<double> times{0.0}, vals{0.0};
  double b = 0.0;
  StoppedBrownian out;
  bool hit = false;
  const double min_step = nominal * opt.min_step_ratio;
  // One probed step of B; false once T has been reached.
  auto step = [&](double t0, double t1) {
    const double b1 = b + std::sqrt(t1 - t0) * normal(rng);
    if (probe.segment(t0, b, t1, b1)) {
      hit = true;
      out.hitting_time = probe.hit_time();
      const double snap = 1e-9 * std::max(1.0, t1);
      if (out.hitting_time - t0 <= snap || t1 - out.hitting_time <= snap) {
        out.hitting_time = t1;
      } else {
        times.push_back(out.hitting_time);
        vals.push_back(1.0);
      }
      times.push_back(t1);
      vals.push_back(1.0);
      return false;
    }
    times.push_back(t1);
    vals.push_back(b1);
    b = b1;
    return true;
  };
  for (std::size_t i = 0; i + 1 < base.size(); ++i) {
    const double t0 = base[i], t1 = base[i + 1];
    if (hit) {
      times.push_back(t1);
      vals.push_back(1.0);
      continue;
    }
    // Step sizes depend on B at the start of each step only, so the grid
    // stays predictable and ∫ 1{B > 0} dB remains a martingale on it. Near
    // zero the step shrinks like B², which keeps crossing overshoots below
    // sqrt(min_step) with high probability.
    double t = t0;
    while (!hit && t < t1) {
      double h = t1 - t;
      if (opt.near_kappa > 0.0) {
        const double target = std::max(min_step, std::pow(b / opt.near_kappa, 2));
        if (target < h) h = std::max(target, min_step);
        if (t1 - (t + h) < 0.5 * min_step) h = t1 - t;
      }
      const double te = h == t1 - t ? t1 : t + h;
      if (!step(t, te)) break;
      t = te;
    }
    if (hit && times.back() < t1) {
      times.push_back(t1);
      vals.push_back(1.0);
    }
  }
  if (hit) {
    out.tau = probe.last_zero();
  } else {
    switch (opt.policy) {
      case HorizonPolicy::Strict:
        throw Error(ErrorCode::HorizonTooShort, "B did not reach 1 before the horizon");
      case HorizonPolicy::Discard:
        out.discarded = true;
        out.tau = kNever;
        break;
      case HorizonPolicy::Extend: {
        // Continue the same stream past the horizon until B either returns
        // to zero (τ lies beyond the horizon) or reaches 1.
        const double before = probe.last_zero();
        double t = base.horizon(), x = b;
        const double sd = std::sqrt(nominal);
        bool done = false;
        while (!done) {
          const double x1 = x + sd * normal(rng);
          done = probe.segment(t, x, t + nominal, x1) || probe.zero_after(before);
          t += nominal;
          x = x1;
        }
        out.tau = probe.zero_after(before) && probe.last_zero() > base.horizon() ? kNever : before;
        break;
      }
    }
  }
  out.grid = share(TimeGrid(std::move(times)));
  std::vector<double> minus(vals);
  minus[0] = 0.0;
  std::vector<double> plus(vals);
  out.b = LagladPath(out.grid, std::move(minus), std::move(vals), std::move(plus));
  return out;
}

HonestTimeScenario brownian_last_zero_on(const StoppedBrownian& sb, const SeedSpec& seed) {
  HonestTimeScenario sc;
  sc.kind = "brownian-last-zero";
  sc.seed = seed;
  sc.tau = sb.tau;
  sc.tau_c = sb.tau;
  sc.tau_d = 0.0;
  sc.hitting_time = sb.hitting_time;
  sc.discarded = sb.discarded;
  sc.brownian = sb.b;
  sc.f_tilde = tanaka_split(decompose(sb.b, FvSpec::martingale(sb.b.size())), 0.0).pos;
  return sc;
}

HonestTimeScenario brownian_last_zero(const SeedSpec& seed, const TimeGrid& base, const BrownianOptions& opt) {
  Engine rng = make_engine(seed);
  return brownian_last_zero_on(stopped_brownian(base, rng, opt), seed);
}

// ---------------------------------------------------------------------------
// Compound Poisson drawdown above a level

double RuinFunction::operator()(double x) const {
  if (x < 0.0) return 1.0;
  return std::exp(-(theta - 1.0) * x) / theta;
}

double RuinFunction::level_for(double p) const {
  return std::max(0.0, std::log(1.0 / (theta * p)) / (theta - 1.0));
}

RuinFunction ruin_prob_exponential(double theta, double mu) {
  if (!(theta > 1.0)) throw Error(ErrorCode::UnstableParameters, "theta must exceed 1 for a finite honest time");
  if (!(mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "intensity must be positive");
  return RuinFunction{theta};
}

CertifiedPoisson certified_poisson(double horizon, Engine& rng, const PoissonOptions& opt) {
  const RuinFunction psi = ruin_prob_exponential(opt.theta, opt.mu);
  if (!(opt.a >= 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be nonnegative");
  CertifiedPoisson out;
  out.cp = compound_poisson(opt.mu, opt.theta, horizon, rng);
  CompoundPoissonPath& cp = out.cp;
  const double xstar = psi.level_for(opt.certify);
  const double mu = cp.drift, a = opt.a;

  double t = 0.0, w = 0.0;
  bool above = false;
  if (a == 0.0) {
    out.upcrossings.push_back(0.0);
    above = true;
  }
  std::size_t k = 0;
  const double chunk = std::max(10.0, 4.0 * (xstar + a) / mu);
  while (true) {
    if (k == cp.jump_times.size()) {
      const double end = cp.horizon;
      const double w_end = w + mu * (end - t);
      if (!above && w_end >= a) {
        out.upcrossings.push_back(t + (a - w) / mu);
        above = true;
      }
      if (above && w_end - a >= xstar) break;
      extend(cp, cp.horizon + chunk, rng);
      continue;
    }
    const double tk = cp.jump_times[k];
    const double w_before = w + mu * (tk - t);
    if (!above && w_before >= a) {
      out.upcrossings.push_back(t + (a - w) / mu);
      above = true;
    }
    if (above && w_before - a >= xstar) break;
    w = w_before - cp.jump_sizes[k];
    t = tk;
    if (w < a) above = false;
    ++k;
  }
  out.tau = out.upcrossings.back();
  return out;
}

GridPtr poisson_grid(const CertifiedPoisson& cp, const TimeGrid& base) {
  std::vector<double> extra;
  for (double t : cp.cp.jump_times)
    if (t <= base.horizon()) extra.push_back(t);
  for (double s : cp.upcrossings)
    if (s <= base.horizon()) extra.push_back(s);
  return share(base.refined(extra));
}

HonestTimeScenario cpp_honest_time_on(const CertifiedPoisson& cpc, const GridPtr& grid, const PoissonOptions& opt,
                                      const SeedSpec& seed) {
  const RuinFunction psi = ruin_prob_exponential(opt.theta, opt.mu);
  const CompoundPoissonPath& cp = cpc.cp;
  const double a = opt.a;
  const auto phi = [&](double w) { return w > a ? 1.0 - psi(w - a) : 0.0; };
  constexpr double tol = 1e-11;

  const std::size_t n = grid->size();
  std::vector<double> fm(n), f(n), fp(n);
  std::size_t j = 0, u = 0;
  double x_before = 0.0;  // sum of jumps strictly before the current node
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (*grid)[i];
    while (j < cp.jump_times.size() && cp.jump_times[j] < t - tol) x_before += cp.jump_sizes[j++];
    const bool jump_here = j < cp.jump_times.size() && std::abs(cp.jump_times[j] - t) <= tol;
    while (u < cpc.upcrossings.size() && cpc.upcrossings[u] < t - tol) ++u;
    const bool sigma_here = u < cpc.upcrossings.size() && std::abs(cpc.upcrossings[u] - t) <= tol;
    const double w_minus = cp.drift * t - x_before;
    const double w = jump_here ? w_minus - cp.jump_sizes[j] : w_minus;
    if (sigma_here) {
      fm[i] = 0.0;
      f[i] = 0.0;
      fp[i] = 1.0 - psi(0.0);
    } else {
      fm[i] = phi(w_minus);
      f[i] = phi(w);
      fp[i] = f[i];
    }
  }
  fm[0] = 0.0;
  LagladPath ft(grid, std::move(fm), std::move(f), std::move(fp));

  FvSpec s;
  s.ac.assign(n - 1, 0.0);
  s.md_drift.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) s.md_drift[i] = ft.segment_increment(i);
  s.ad.assign(n, 0.0);

  HonestTimeScenario sc;
  sc.kind = "cpp-honest";
  sc.seed = seed;
  sc.tau = cpc.tau;
  sc.tau_c = 0.0;
  sc.tau_d = cpc.tau;
  sc.surplus = surplus_path(cp, grid);
  sc.f_tilde = decompose(ft, s);
  return sc;
}

HonestTimeScenario cpp_honest_time(const SeedSpec& seed, const TimeGrid& base, const PoissonOptions& opt) {
  Engine rng = make_engine(seed);
  const CertifiedPoisson cp = certified_poisson(base.horizon(), rng, opt);
  return cpp_honest_time_on(cp, poisson_grid(cp, base), opt, seed);
}

HonestTimeScenario zero_time_scenario(const GridPtr& grid, const SeedSpec& seed) {
  const std::size_t n = grid->size();
  std::vector<double> m(n, 1.0), v(n, 1.0), p(n, 1.0);
  m[0] = 0.0;
  v[0] = 0.0;
  HonestTimeScenario sc;
  sc.kind = "zero-time";
  sc.seed = seed;
  sc.tau = 0.0;
  sc.f_tilde = decompose(LagladPath(grid, std::move(m), std::move(v), std::move(p)), FvSpec::martingale(n));
  return sc;
}

HonestTimeScenario max_combine(const HonestTimeScenario& c, const HonestTimeScenario& d) {
  if (c.seed == d.seed) throw Error(ErrorCode::SeedCollision, "both factors use the same random stream");
  require_same_grid(c.f_tilde.path(), d.f_tilde.path());
  HonestTimeScenario sc;
  sc.kind = "max-combined";
  sc.seed = c.seed;
  sc.tau_c = c.tau;
  sc.tau_d = d.tau;
  sc.tau = std::max(c.tau, d.tau);
  sc.hitting_time = c.hitting_time;
  sc.discarded = c.discarded || d.discarded;
  sc.brownian = c.brownian;
  sc.surplus = d.surplus;
  sc.f_tilde = product(c.f_tilde, d.f_tilde);
  return sc;
}

HonestTimeScenario max_combined(const SeedSpec& seed, const TimeGrid& base, const BrownianOptions& bopt,
                                const PoissonOptions& popt) {
  Engine rp = make_engine(seed.sub(1));
  const CertifiedPoisson cp = certified_poisson(base.horizon(), rp, popt);
  const GridPtr g1 = poisson_grid(cp, base);
  Engine rb = make_engine(seed.sub(0));
  const StoppedBrownian sb = stopped_brownian(*g1, rb, bopt);
  const HonestTimeScenario c = brownian_last_zero_on(sb, seed.sub(0));
  const HonestTimeScenario d = cpp_honest_time_on(cp, sb.grid, popt, seed.sub(1));
  HonestTimeScenario sc = max_combine(c, d);
  sc.seed = seed;
  return sc;
}

// ---------------------------------------------------------------------------
// Trees

TreeProcess dual_optional_projection(const FiltrationTree& tree, const std::vector<double>& tau) {
  const std::size_t d = tree.depth();
  if (tau.size() != tree.width(d)) throw Error(ErrorCode::InvalidArgument, "one tau value per leaf required");
  TreeProcess ho = tree.constant(0.0);
  for (std::size_t k = 0; k <= d; ++k) {
    std::vector<double> ind(tree.width(d));
    for (std::size_t l = 0; l < ind.size(); ++l) ind[l] = tau[l] == static_cast<double>(k) ? 1.0 : 0.0;
    const std::vector<double> dh = tree.conditional_expectation(k, d, ind);
    for (std::size_t j = 0; j < tree.width(k); ++j) ho[k][j] = (k == 0 ? 0.0 : ho[k - 1][j / 2]) + dh[j];
  }
  return ho;
}

TreeProcess dual_optional_projection(const FiltrationTree& tree, const std::vector<std::vector<double>>& law) {
  const std::size_t d = tree.depth();
  if (law.size() != tree.width(d)) throw Error(ErrorCode::InvalidArgument, "one law per leaf required");
  TreeProcess ho = tree.constant(0.0);
  for (std::size_t k = 0; k <= d; ++k) {
    std::vector<double> mass(tree.width(d));
    for (std::size_t l = 0; l < mass.size(); ++l) {
      if (law[l].size() <= d) throw Error(ErrorCode::InvalidArgument, "law must cover every level");
      mass[l] = law[l][k];
    }
    const std::vector<double> dh = tree.conditional_expectation(k, d, mass);
    for (std::size_t j = 0; j < tree.width(k); ++j) ho[k][j] = (k == 0 ? 0.0 : ho[k - 1][j / 2]) + dh[j];
  }
  return ho;
}

HonestTree honest_tree(const FiltrationTree& tree, const TreeLaglad& sigma) {
  const std::size_t d = tree.depth();
  HonestTree h{tree, sigma, std::vector<double>(tree.width(d), 0.0), {tree.constant(0.0), tree.constant(0.0)},
               {}, level_grid(d)};
  for (std::size_t l = 0; l < tree.width(d); ++l) {
    for (std::size_t k = d + 1; k-- > 0;) {
      if (sigma.x[k][ancestor(d, l, k)] == 0.0) {
        h.tau[l] = static_cast<double>(k);
        break;
      }
    }
  }
  for (std::size_t k = 0; k <= d; ++k) {
    std::vector<double> ge(tree.width(d)), gt(tree.width(d));
    for (std::size_t l = 0; l < ge.size(); ++l) {
      ge[l] = h.tau[l] >= static_cast<double>(k) ? 1.0 : 0.0;
      gt[l] = h.tau[l] > static_cast<double>(k) ? 1.0 : 0.0;
    }
    h.z_tilde.x[k] = tree.conditional_expectation(k, d, ge);
    h.z_tilde.x_plus[k] = tree.conditional_expectation(k, d, gt);
  }
  h.ho = dual_optional_projection(tree, h.tau);
  return h;
}

HonestTimeScenario leaf_scenario(const HonestTree& h, std::size_t leaf) {
  const std::size_t d = h.tree.depth();
  TreeLaglad f{h.tree.constant(0.0), h.tree.constant(0.0)};
  for (std::size_t k = 0; k <= d; ++k)
    for (std::size_t j = 0; j < h.tree.width(k); ++j) {
      f.x[k][j] = 1.0 - h.z_tilde.x[k][j];
      f.x_plus[k][j] = 1.0 - h.z_tilde.x_plus[k][j];
    }
  HonestTimeScenario sc;
  sc.kind = "tree";
  sc.seed = SeedSpec{0, leaf};
  sc.tau = h.tau[leaf];
  sc.f_tilde = branch_decomposition(h.tree, f, leaf, h.grid);
  return sc;
}

std::vector<HonestTimeScenario> leaf_scenarios(const HonestTree& h) {
  std::vector<HonestTimeScenario> out;
  out.reserve(h.tree.width(h.tree.depth()));
  for (std::size_t l = 0; l < h.tree.width(h.tree.depth()); ++l) out.push_back(leaf_scenario(h, l));
  return out;
}

}  // namespace laglad

#include "laglad/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "laglad/calculus.hpp"
#include "laglad/ensemble.hpp"
#include "laglad/errors.hpp"
#include "laglad/honest.hpp"
#include "laglad/models.hpp"
#include "laglad/mult_systems.hpp"
#include "laglad/representations.hpp"
#include "laglad/sigma.hpp"
#include "laglad/stats.hpp"
#include "laglad/tree_io.hpp"

namespace laglad {

namespace {

constexpr const char* kVersion = "0.1.0";

using S = ScenarioKind;

const std::vector<std::pair<std::string, ScenarioKind>>& scenario_names() {
  static const std::vector<std::pair<std::string, ScenarioKind>> names = {
      {"brownian-last-zero", S::BrownianLastZero}, {"cpp-honest", S::CppHonest}, {"max-combined", S::MaxCombined},
      {"abs-brownian", S::AbsBrownian},           {"tree", S::Tree}};
  return names;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

std::vector<double> parse_list(const std::string& s) {
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(", "), boost::token_compress_on);
  std::vector<double> out;
  for (std::string p : parts) {
    boost::trim(p);
    if (p.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(p, &used));
      if (used != p.size()) invalid("not a number: " + p);
    } catch (const std::logic_error&) {
      invalid("not a number: " + p);
    }
  }
  return out;
}

template <class T>
T get_number(const boost::property_tree::ptree& section, const std::string& key, T fallback) {
  const auto v = section.get_optional<std::string>(key);
  if (!v) return fallback;
  std::istringstream is(boost::trim_copy(*v));
  T out{};
  is >> out;
  if (is.fail() || !is.eof()) invalid("bad value for " + key + ": " + *v);
  return out;
}

void reject_unknown(const boost::property_tree::ptree& section, const std::string& name,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, _] : section)
    if (!allowed.count(key)) invalid("unknown key [" + name + "] " + key);
}

// ---------------------------------------------------------------------------
// Per-replication state, built lazily so that each identity pays only for
// what it reads.

struct Shared {
  const ExperimentConfig& cfg;
  TimeGrid base;
  BrownianOptions bopt;
  PoissonOptions popt;
};

class Replication {
 public:
  Replication(const Shared& sh, std::size_t r) : sh_(sh), seed_{sh.cfg.master_seed, r} {}

  const SeedSpec& seed() const { return seed_; }
  const ExperimentConfig& cfg() const { return sh_.cfg; }

  const HonestTimeScenario& scenario() {
    if (!sc_) {
      switch (cfg().scenario) {
        case S::BrownianLastZero: sc_ = brownian_last_zero(seed_, sh_.base, sh_.bopt); break;
        case S::CppHonest: sc_ = cpp_honest_time(seed_, sh_.base, sh_.popt); break;
        case S::MaxCombined: sc_ = max_combined(seed_, sh_.base, sh_.bopt, sh_.popt); break;
        default: throw Error(ErrorCode::InvariantViolation, "scenario has no honest time");
      }
    }
    return *sc_;
  }
  const AdditiveRep& additive() {
    if (!ar_) ar_ = additive_rep(scenario());
    return *ar_;
  }
  const MultiplicativeRep& mult() {
    if (!mr_) mr_ = mult_rep(scenario());
    return *mr_;
  }
  // Independent components on the base grid, for the product identity.
  const HonestTimeScenario& component_c() {
    if (!cc_) cc_ = brownian_last_zero(seed_.sub(0), sh_.base, sh_.bopt);
    return *cc_;
  }
  const HonestTimeScenario& component_d() {
    if (!cd_) cd_ = cpp_honest_time(seed_.sub(1), sh_.base, sh_.popt);
    return *cd_;
  }
  const PathDecomposition& brownian_path() {
    if (!bd_) {
      const LagladPath b = brownian(share(sh_.base), seed_);
      bd_ = decompose(b, FvSpec::martingale(b.size()));
    }
    return *bd_;
  }
  const TanakaSplit& tanaka() {
    if (!ts_) ts_ = tanaka_split(brownian_path(), 0.0);
    return *ts_;
  }
  /// Private stream k of this replication for tree identities.
  Engine engine(std::uint64_t k) const { return make_engine(seed_.sub(k)); }

 private:
  const Shared& sh_;
  SeedSpec seed_;
  std::optional<HonestTimeScenario> sc_, cc_, cd_;
  std::optional<AdditiveRep> ar_;
  std::optional<MultiplicativeRep> mr_;
  std::optional<PathDecomposition> bd_;
  std::optional<TanakaSplit> ts_;
};

double sup_abs(const LagladPath& p) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i > 0) m = std::max(m, std::abs(p.minus(i)));
    m = std::max({m, std::abs(p.value(i)), std::abs(p.plus(i))});
  }
  return m;
}

std::size_t node_at(const HonestTimeScenario& sc, double t) {
  const std::size_t i = sc.grid()->find(t, 1e-9);
  if (i >= sc.grid()->size()) throw Error(ErrorCode::InvariantViolation, "checkpoint is not a grid node");
  return i;
}

// ---------------------------------------------------------------------------
// Identity definitions

enum class Reduce { Fraction, Exact, Oracle, Paired, Rms, Ratio };

struct Context {
  const ExperimentConfig& cfg;
  std::vector<double> times;
  double path_tol() const;
  bool exact_scenario() const { return cfg.scenario == S::CppHonest || cfg.scenario == S::Tree; }
};

double Context::path_tol() const {
  return exact_scenario() ? cfg.tol.exact : cfg.tol.path * std::sqrt(cfg.params.dt);
}

struct IdentityDef {
  IdentityInfo info;
  Reduce reduce;
  std::function<std::vector<std::string>(const Context&)> columns;
  std::function<std::vector<double>(Replication&, const Context&)> per_rep;
  std::function<std::vector<double>(const ExperimentConfig&)> default_times = {};
  std::function<double(double, const ExperimentConfig&)> oracle = {};
};

std::vector<std::string> one(const std::string& c) { return {c}; }

std::vector<std::string> time_columns(const Context& ctx, const std::vector<std::string>& stems) {
  std::vector<std::string> out;
  for (double t : ctx.times)
    for (const auto& s : stems) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s@%g", s.c_str(), t);
      out.emplace_back(buf);
    }
  return out;
}

std::vector<double> even_times(const ExperimentConfig& cfg, std::size_t n) {
  std::vector<double> t;
  for (std::size_t i = 1; i <= n; ++i) t.push_back(cfg.params.horizon * static_cast<double>(i) / static_cast<double>(n));
  return t;
}

// Maximal defect of M̃ = D̃Z̃ as a tree martingale.
double tree_mdz_defect(Replication& rep) {
  Engine rng = rep.engine(0);
  const std::size_t depth = 1 + rep.seed().stream_index % rep.cfg().params.depth;
  const FiltrationTree t = FiltrationTree::random(depth, rng);
  const HonestTree h = honest_tree(t, honest_sigma_tree(t, rng));
  std::vector<LagladPath> mt;
  double worst = 0.0;
  for (const HonestTimeScenario& sc : leaf_scenarios(h)) {
    const MultiplicativeRep mr = mult_rep(sc);
    worst = std::max(worst, mr.residual_sup);
    mt.push_back(mr.m_tilde);
  }
  const TreeLaglad m = from_branches(t, mt);
  for (std::size_t k = 0; k < depth; ++k) {
    const std::vector<double> e = t.conditional_expectation(k, k + 1, m.x[k + 1]);
    for (std::size_t j = 0; j < t.width(k); ++j)
      worst = std::max({worst, std::abs(m.x_plus[k][j] - m.x[k][j]), std::abs(e[j] - m.x_plus[k][j])});
  }
  return worst;
}

const std::vector<IdentityDef>& registry() {
  using V = std::vector<double>;
  const std::vector<S> honest = {S::BrownianLastZero, S::CppHonest, S::MaxCombined};
  static const std::vector<IdentityDef> defs = {
      {{"t1-additive", "Z̃ = 1 + n − n̄ with n̄ = 1 + A^c", honest},
       Reduce::Fraction,
       [](const Context&) { return one("sup_residual"); },
       [](Replication& r, const Context&) {
         const AdditiveRep& a = r.additive();
         return V{std::max(a.residual_sup, a.n_bar_gap)};
       }},
      {{"t1-multiplicative", "Z̃ = N / N̄ with N = Z̃ D^c, N̄ = D^c", honest},
       Reduce::Fraction,
       [](const Context&) { return one("sup_residual"); },
       [](Replication& r, const Context&) {
         const MultiplicativeRep& m = r.mult();
         return V{std::max(m.residual_sup, m.n_bar_gap)};
       }},
      {{"nbar-exp", "N̄ = e^{A^c}", honest},
       Reduce::Fraction,
       [](const Context&) { return one("sup_gap"); },
       [](Replication& r, const Context&) {
         const LagladPath e = r.scenario().f_tilde.ac().map([](double v) { return std::exp(v); });
         return V{sup_abs(r.mult().n_bar.path() - e)};
       }},
      {{"poisson-trivial", "N = Z̃ and N̄ ≡ 1 when A^c ≡ 0", {S::CppHonest}},
       Reduce::Exact,
       [](const Context&) { return one("sup_residual"); },
       [](Replication& r, const Context&) {
         const MultiplicativeRep& m = r.mult();
         return V{sup_abs(m.n - r.scenario().z_tilde()) +
                  sup_abs(affine(-1.0, 1.0, m.n_bar.path()))};
       }},
      {{"mdz", "E[D̃_t Z̃_t] = 1 for all t", honest},
       Reduce::Oracle,
       [](const Context& c) { return time_columns(c, {"m_tilde"}); },
       [](Replication& r, const Context& c) {
         V out;
         const HonestTimeScenario& sc = r.scenario();
         for (double t : c.times) out.push_back(r.mult().m_tilde.value(node_at(sc, t)));
         return out;
       },
       [](const ExperimentConfig& cfg) { return even_times(cfg, 10); },
       [](double, const ExperimentConfig&) { return 1.0; }},
      {{"mdz-tree", "E[M̃_{k+1} | F_k] = M̃_{k+} = M̃_k for M̃ = D̃ Z̃", {S::Tree}},
       Reduce::Exact,
       [](const Context&) { return one("max_defect"); },
       [](Replication& r, const Context&) { return V{tree_mdz_defect(r)}; }},
      {{"dcg-residual", "D̃ = 1 + ∫ D̃_- Z̃^{-1} dA^c + ∫ D̃ Z̃_+^{-1} dA^g_+", {S::CppHonest}},
       Reduce::Exact,
       [](const Context&) { return one("sup_residual"); },
       [](Replication& r, const Context&) { return V{dcg_residual(r.mult())}; }},
      {{"prop-max", "P(τ^c ∨ τ^d < t) = E[F̃^c_t F̃^d_t] for independent honest times", {S::MaxCombined}},
       Reduce::Paired,
       [](const Context& c) { return time_columns(c, {"indicator", "product"}); },
       [](Replication& r, const Context& c) {
         const HonestTimeScenario& hc = r.component_c();
         const HonestTimeScenario& hd = r.component_d();
         const double tau = std::max(hc.tau, hd.tau);
         V out;
         for (double t : c.times) {
           out.push_back(tau < t ? 1.0 : 0.0);
           out.push_back(hc.f_tilde.path().value(node_at(hc, t)) * hd.f_tilde.path().value(node_at(hd, t)));
         }
         return out;
       },
       [](const ExperimentConfig& cfg) { return even_times(cfg, 5); }},
      {{"mry-infinity", "P(τ ≤ s) = E[B^+_{s∧T}] for the last zero before T", {S::BrownianLastZero}},
       Reduce::Paired,
       [](const Context& c) { return time_columns(c, {"indicator", "b_plus"}); },
       [](Replication& r, const Context& c) {
         const HonestTimeScenario& sc = r.scenario();
         V out;
         for (double s : c.times) {
           out.push_back(sc.tau <= s ? 1.0 : 0.0);
           out.push_back(std::max(sc.brownian.value(node_at(sc, s)), 0.0));
         }
         return out;
       },
       [](const ExperimentConfig& cfg) {
         V t;
         for (double s : {0.25, 1.0, 4.0})
           if (s <= cfg.params.horizon) t.push_back(s);
         return t;
       }},
      {{"mry-tree", "E[X_∞ 1{τ ≤ s} | F_s] = X_{s+} and E[X_{t+} 1{g_t ≤ u} | F_s] = X_{s+} 1{g_s ≤ u}", {S::Tree}},
       Reduce::Exact,
       [](const Context&) { return one("max_violation"); },
       [](Replication& r, const Context&) {
         Engine rng = r.engine(1);
         const FiltrationTree t = FiltrationTree::random(r.cfg().params.depth, rng);
         return V{mry_tree_exact(t, random_sigma_tree(t, rng)).max()};
       }},
      {{"local-time-mean", "E[L^0_t] = (2t/π)^{1/2}", {S::AbsBrownian}},
       Reduce::Oracle,
       [](const Context& c) { return time_columns(c, {"local_time"}); },
       [](Replication& r, const Context& c) {
         V out;
         const LagladPath& l = r.tanaka().local_time.L.path();
         for (double t : c.times) out.push_back(l.value(l.grid_ptr()->find(t, 1e-9)));
         return out;
       },
       [](const ExperimentConfig& cfg) { return V{cfg.params.horizon}; },
       [](double t, const ExperimentConfig&) { return std::sqrt(2.0 * t / M_PI); }},
      {{"tanaka-support", "dL^0 is carried by {B = 0}", {S::AbsBrownian}},
       Reduce::Ratio,
       [](const Context&) { return std::vector<std::string>{"far_mass", "total_mass"}; },
       [](Replication& r, const Context&) {
         const LagladPath& b = r.brownian_path().path();
         const LagladPath& l = r.tanaka().local_time.L.path();
         const double band = 2.0 * std::sqrt(r.cfg().params.dt);
         double far = 0.0, total = 0.0;
         for (std::size_t i = 0; i + 1 < b.size(); ++i) {
           const double dl = l.segment_increment(i);
           total += dl;
           if (std::min(std::abs(b.plus(i)), std::abs(b.minus(i + 1))) > band) far += dl;
         }
         return V{far, total};
       }},
      {{"stoch-exp-brownian", "E(B)_t = exp(B_t − t/2)", {S::AbsBrownian}},
       Reduce::Rms,
       [](const Context&) { return one("error_at_horizon"); },
       [](Replication& r, const Context&) {
         const PathDecomposition& d = r.brownian_path();
         const LagladPath s = stoch_exp(d).path;
         const double h = r.cfg().params.horizon;
         return V{s.terminal() - std::exp(d.path().terminal() - 0.5 * h)};
       }},
      {{"stoch-exp-jumps", "E(X)_t = Π_{s≤t} (1 + ΔX_s) for pure-jump X", {S::CppHonest}},
       Reduce::Exact,
       [](const Context&) { return one("sup_relative_error"); },
       [](Replication& r, const Context&) {
         // Driver with the claim times of the surplus and jumps in (-1, 0).
         const LagladPath& w = r.scenario().surplus;
         const std::size_t n = w.size();
         std::vector<double> seg(n - 1, 0.0), left(n, 0.0), right(n, 0.0);
         for (std::size_t i = 1; i < n; ++i) {
           const double j = w.left_jump(i);
           left[i] = j / (1.0 + std::abs(j));
         }
         const LagladPath x = LagladPath::from_increments(w.grid_ptr(), 0.0, seg, left, right);
         const LagladPath s = stoch_exp(decompose(x, FvSpec::martingale(n))).path;
         double prod = 1.0, err = 0.0;
         for (std::size_t i = 0; i < n; ++i) {
           prod *= 1.0 + left[i];
           err = std::max(err, std::abs(s.value(i) - prod) / prod);
         }
         return V{err};
       }},
      {{"skorokhod", "L^0 = R(M) = sup(−M) ∨ 0 for |B| = M + L^0", {S::AbsBrownian}},
       Reduce::Rms,
       [](const Context&) { return one("sup_gap"); },
       [](Replication& r, const Context&) {
         const TanakaSplit& ts = r.tanaka();
         return V{sup_distance(ts.abs.ac(), skorokhod_map(ts.abs.martingale()).path())};
       }},
      {{"msdef", "E[C_{t,∞} X_∞ | F_t] = X_{t+}", {S::Tree}},
       Reduce::Exact,
       [](const Context&) { return one("max_defect"); },
       [](Replication& r, const Context&) {
         Engine rng = r.engine(2);
         const FiltrationTree t = FiltrationTree::random(r.cfg().params.depth, rng);
         return V{martingale_check(build_mult_system(t, random_submartingale(t, rng))).msdef};
       }},
      {{"mult-invariants", "C̄_{u,s} C̄_{s,t} = C̄_{u,t}, decreasing in t, increasing in u, C̄_{u,·} X a martingale", {S::Tree}},
       Reduce::Exact,
       [](const Context&) { return one("max_violation"); },
       [](Replication& r, const Context&) {
         Engine rng = r.engine(2);
         const FiltrationTree t = FiltrationTree::random(r.cfg().params.depth, rng);
         const MultSystemReport m = martingale_check(build_mult_system(t, random_submartingale(t, rng)));
         return V{std::max({m.q_martingale, m.cocycle, m.monotone, m.range})};
       }},
      {{"dual-projection", "H^o = B for τ = inf{u : X_∞ C̄_{u,∞} > U}, X_t = 1 − E[B_∞ − B_{t−} | F_t]", {S::Tree}},
       Reduce::Exact,
       [](const Context&) { return one("max_deviation"); },
       [](Replication& r, const Context&) {
         Engine rng = r.engine(3);
         const FiltrationTree t = FiltrationTree::random(r.cfg().params.depth, rng);
         const ConstructedTime ct = construct_time(t, random_increasing(t, rng, 0.9));
         const DualProjectionReport d = verify_dual_projection(ct);
         return V{std::max({d.max_deviation, d.x_identity, martingale_check(ct.system).max()})};
       }},
  };
  return defs;
}

const IdentityDef& find_identity(const std::string& name) {
  for (const IdentityDef& d : registry())
    if (d.info.name == name) return d;
  invalid("unknown identity: " + name);
}

ReportRow reduce_identity(const IdentityDef& def, const Context& ctx, const std::vector<std::vector<double>>& rows) {
  const ExperimentConfig& cfg = ctx.cfg;
  ReportRow row;
  row.identity = def.info.name;
  const std::size_t n = rows.size();
  auto column = [&](std::size_t c) {
    std::vector<double> v(n);
    for (std::size_t r = 0; r < n; ++r) v[r] = rows[r][c];
    return v;
  };
  switch (def.reduce) {
    case Reduce::Fraction: {
      const std::vector<double> v = column(0);
      const double tol = ctx.path_tol();
      const double need = ctx.exact_scenario() ? 1.0 : cfg.tol.fraction;
      const double f = fraction_within(v, tol);
      row.lhs = *std::max_element(v.begin(), v.end());
      row.rhs = need;
      row.estimate = f;
      row.se = std::sqrt(f * (1.0 - f) / static_cast<double>(n));
      row.tolerance = tol;
      row.pass = f >= need;
      break;
    }
    case Reduce::Exact: {
      const std::vector<double> v = column(0);
      row.lhs = row.estimate = *std::max_element(v.begin(), v.end());
      row.tolerance = cfg.tol.exact;
      row.pass = row.estimate <= cfg.tol.exact;
      break;
    }
    case Reduce::Oracle:
    case Reduce::Paired: {
      row.pass = true;
      row.tolerance = cfg.tol.z;
      double worst = -1.0;
      for (std::size_t i = 0; i < ctx.times.size(); ++i) {
        double lhs = 0.0, rhs = 0.0, se = 0.0, diff = 0.0;
        if (def.reduce == Reduce::Oracle) {
          const MeanStats m = mean_se(column(i));
          lhs = m.mean;
          rhs = def.oracle(ctx.times[i], cfg);
          se = m.se;
          diff = lhs - rhs;
        } else {
          const PairedStats p = paired(column(2 * i), column(2 * i + 1));
          lhs = p.lhs_mean;
          rhs = p.rhs_mean;
          se = p.se;
          diff = p.diff_mean;
        }
        const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
        if (std::abs(z) > cfg.tol.z) row.pass = false;
        if (std::abs(z) > worst) {
          worst = std::abs(z);
          row.t = ctx.times[i];
          row.s = ctx.times[i];
          row.lhs = lhs;
          row.rhs = rhs;
          row.estimate = diff;
          row.se = se;
          row.z_score = z;
        }
      }
      break;
    }
    case Reduce::Rms: {
      double ss = 0.0;
      for (const auto& r : rows) ss += r[0] * r[0];
      const double k = def.info.name == "stoch-exp-brownian" ? cfg.tol.rms : cfg.tol.path;
      row.lhs = row.estimate = std::sqrt(ss / static_cast<double>(n));
      row.tolerance = k * std::sqrt(cfg.params.dt);
      row.pass = row.estimate <= row.tolerance;
      break;
    }
    case Reduce::Ratio: {
      double a = 0.0, b = 0.0;
      for (const auto& r : rows) {
        a += r[0];
        b += r[1];
      }
      row.lhs = a;
      row.rhs = b;
      row.estimate = b > 0.0 ? a / b : 0.0;
      row.tolerance = cfg.tol.ratio;
      row.pass = row.estimate <= cfg.tol.ratio;
      break;
    }
  }
  row.t = row.t == 0.0 && def.reduce != Reduce::Oracle && def.reduce != Reduce::Paired ? cfg.params.horizon : row.t;
  return row;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* to_string(ScenarioKind k) {
  for (const auto& [name, kind] : scenario_names())
    if (kind == k) return name.c_str();
  return "?";
}

const std::vector<IdentityInfo>& identity_catalog() {
  static const std::vector<IdentityInfo> cat = [] {
    std::vector<IdentityInfo> out;
    for (const IdentityDef& d : registry()) out.push_back(d.info);
    return out;
  }();
  return cat;
}

ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    invalid(std::string("malformed config: ") + e.what());
  }
  for (const auto& [name, _] : tree)
    if (name != "experiment" && name != "parameters" && name != "tolerances") invalid("unknown section " + name);

  ExperimentConfig cfg;
  const pt::ptree empty;
  const pt::ptree& ex = tree.get_child("experiment", empty);
  const pt::ptree& par = tree.get_child("parameters", empty);
  const pt::ptree& tol = tree.get_child("tolerances", empty);
  reject_unknown(ex, "experiment", {"scenario", "replications", "master_seed", "identities", "out"});
  reject_unknown(par, "parameters",
                 {"mu", "theta", "a", "depth", "dt", "horizon", "near_kappa", "min_step_ratio", "times"});
  reject_unknown(tol, "tolerances", {"z", "exact", "path", "fraction", "rms", "ratio"});

  const std::string scen = boost::trim_copy(ex.get<std::string>("scenario", ""));
  bool found = false;
  for (const auto& [name, kind] : scenario_names())
    if (name == scen) {
      cfg.scenario = kind;
      found = true;
    }
  if (!found) invalid("unknown scenario: " + scen);

  const auto reps = get_number<long long>(ex, "replications", 1);
  if (reps < 1) invalid("replications must be at least 1");
  cfg.replications = static_cast<std::size_t>(reps);
  cfg.master_seed = get_number<std::uint64_t>(ex, "master_seed", 0);
  std::vector<std::string> ids;
  boost::split(ids, ex.get<std::string>("identities", ""), boost::is_any_of(", "), boost::token_compress_on);
  for (std::string& s : ids) {
    boost::trim(s);
    if (!s.empty()) cfg.identities.push_back(s);
  }
  if (const auto o = ex.get_optional<std::string>("out")) cfg.out_dir = boost::trim_copy(*o);

  ExperimentParams& p = cfg.params;
  p.mu = get_number(par, "mu", p.mu);
  p.theta = get_number(par, "theta", p.theta);
  p.a = get_number(par, "a", p.a);
  const auto depth = get_number<long long>(par, "depth", static_cast<long long>(p.depth));
  if (depth < 1 || depth > 16) invalid("depth must be in [1, 16]");
  p.depth = static_cast<std::size_t>(depth);
  p.dt = get_number(par, "dt", p.dt);
  p.horizon = get_number(par, "horizon", p.horizon);
  p.near_kappa = get_number(par, "near_kappa", p.near_kappa);
  p.min_step_ratio = get_number(par, "min_step_ratio", p.min_step_ratio);
  if (const auto t = par.get_optional<std::string>("times")) p.times = parse_list(*t);

  ExperimentTolerances& t = cfg.tol;
  t.z = get_number(tol, "z", t.z);
  t.exact = get_number(tol, "exact", t.exact);
  t.path = get_number(tol, "path", t.path);
  t.fraction = get_number(tol, "fraction", t.fraction);
  t.rms = get_number(tol, "rms", t.rms);
  t.ratio = get_number(tol, "ratio", t.ratio);
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) invalid("cannot read config " + file.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.replications < 1) invalid("replications must be at least 1");
  if (!(cfg.params.dt > 0.0)) invalid("dt must be positive");
  if (!(cfg.params.horizon > 0.0)) invalid("horizon must be positive");
  if (!(cfg.params.dt <= cfg.params.horizon)) invalid("dt exceeds the horizon");
  if (cfg.params.depth < 1) invalid("depth must be at least 1");
  if (cfg.identities.empty()) invalid("no identities requested");
  std::set<std::string> seen;
  for (const std::string& name : cfg.identities) {
    const IdentityDef& d = find_identity(name);
    if (!seen.insert(name).second) invalid("identity listed twice: " + name);
    if (std::find(d.info.scenarios.begin(), d.info.scenarios.end(), cfg.scenario) == d.info.scenarios.end())
      invalid("identity " + name + " does not apply to scenario " + to_string(cfg.scenario));
  }
  for (double t : cfg.params.times)
    if (!(t > 0.0 && t <= cfg.params.horizon)) invalid("checkpoint outside (0, horizon]");
  if (cfg.scenario != S::Tree) {
    const double steps = cfg.params.horizon / cfg.params.dt;
    if (std::abs(steps - std::round(steps)) > 1e-6) invalid("horizon must be a multiple of dt");
  }
}

bool ExperimentReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

ExperimentReport run(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto steps = static_cast<std::size_t>(std::llround(cfg.params.horizon / cfg.params.dt));
  Shared sh{cfg, TimeGrid::uniform(cfg.params.horizon, cfg.scenario == S::Tree ? 1 : steps), {}, {}};
  sh.bopt.near_kappa = cfg.params.near_kappa;
  sh.bopt.min_step_ratio = cfg.params.min_step_ratio;
  sh.popt.mu = cfg.params.mu;
  sh.popt.theta = cfg.params.theta;
  sh.popt.a = cfg.params.a;

  std::vector<const IdentityDef*> defs;
  std::vector<Context> ctxs;
  for (const std::string& name : cfg.identities) {
    const IdentityDef& d = find_identity(name);
    defs.push_back(&d);
    Context c{cfg, {}};
    if (d.default_times) c.times = cfg.params.times.empty() ? d.default_times(cfg) : cfg.params.times;
    if ((d.reduce == Reduce::Oracle || d.reduce == Reduce::Paired) && c.times.empty())
      invalid("identity " + name + " has no checkpoint within the horizon");
    ctxs.push_back(std::move(c));
  }

  using Row = std::vector<std::vector<double>>;
  const std::vector<Row> per_rep = run_replications<Row>(
      cfg.replications,
      [&](std::size_t r) {
        Replication rep(sh, r);
        Row out;
        for (std::size_t i = 0; i < defs.size(); ++i) out.push_back(defs[i]->per_rep(rep, ctxs[i]));
        return out;
      },
      cfg.workers);

  ExperimentReport report;
  report.config = cfg;
  for (std::size_t i = 0; i < defs.size(); ++i) {
    std::vector<std::vector<double>> rows(per_rep.size());
    for (std::size_t r = 0; r < per_rep.size(); ++r) rows[r] = per_rep[r][i];
    report.rows.push_back(reduce_identity(*defs[i], ctxs[i], rows));
    report.residuals.push_back({defs[i]->info.name, defs[i]->columns(ctxs[i]), std::move(rows)});
  }
  return report;
}

std::string report_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "identity,s,t,lhs,rhs,estimate,se,tolerance,z_score,pass\n";
  for (const ReportRow& r : rep.rows)
    os << r.identity << ',' << fmt(r.s) << ',' << fmt(r.t) << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ','
       << fmt(r.estimate) << ',' << fmt(r.se) << ',' << fmt(r.tolerance) << ',' << fmt(r.z_score) << ','
       << (r.pass ? "pass" : "fail") << '\n';
  return os.str();
}

void write_report(const ExperimentReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write " + (dir / name).string());
    return os;
  };
  open("report.csv") << report_csv(rep);

  const ExperimentConfig& c = rep.config;
  std::ofstream st = open("stamp.txt");
  st << "version = " << kVersion << '\n'
     << "scenario = " << to_string(c.scenario) << '\n'
     << "master_seed = " << c.master_seed << '\n'
     << "replications = " << c.replications << '\n'
     << "identities = " << boost::join(c.identities, ", ") << '\n'
     << "mu = " << fmt(c.params.mu) << "\ntheta = " << fmt(c.params.theta) << "\na = " << fmt(c.params.a)
     << "\ndepth = " << c.params.depth << "\ndt = " << fmt(c.params.dt) << "\nhorizon = " << fmt(c.params.horizon)
     << "\nnear_kappa = " << fmt(c.params.near_kappa) << "\nmin_step_ratio = " << fmt(c.params.min_step_ratio)
     << "\nz = " << fmt(c.tol.z) << "\nexact = " << fmt(c.tol.exact) << "\npath = " << fmt(c.tol.path)
     << "\nfraction = " << fmt(c.tol.fraction) << "\nrms = " << fmt(c.tol.rms) << "\nratio = " << fmt(c.tol.ratio)
     << '\n';

  for (const IdentityResiduals& res : rep.residuals) {
    std::ofstream os = open(res.identity + ".csv");
    os << "replication";
    for (const std::string& col : res.columns) os << ',' << col;
    os << '\n';
    for (std::size_t r = 0; r < res.rows.size(); ++r) {
      os << r;
      for (double v : res.rows[r]) os << ',' << fmt(v);
      os << '\n';
    }
  }
}

std::string dump_scenario(const ExperimentConfig& cfg) {
  validate(cfg);
  std::ostringstream os;
  if (cfg.scenario == S::Tree) {
    Engine rng = make_engine(SeedSpec{cfg.master_seed, 0}.sub(3));
    const FiltrationTree t = FiltrationTree::random(cfg.params.depth, rng);
    const TreeProcess b = random_increasing(t, rng, 0.9);
    os << tree_report_json(construct_time(t, b)).dump(2) << '\n';
    return os.str();
  }
  const auto steps = static_cast<std::size_t>(std::llround(cfg.params.horizon / cfg.params.dt));
  const TimeGrid base = TimeGrid::uniform(cfg.params.horizon, steps);
  if (cfg.scenario == S::AbsBrownian) {
    write_csv(os, brownian(share(base), SeedSpec{cfg.master_seed, 0}));
    return os.str();
  }
  ExperimentConfig one_rep = cfg;
  Shared sh{one_rep, base, {}, {}};
  sh.bopt.near_kappa = cfg.params.near_kappa;
  sh.bopt.min_step_ratio = cfg.params.min_step_ratio;
  sh.popt.mu = cfg.params.mu;
  sh.popt.theta = cfg.params.theta;
  sh.popt.a = cfg.params.a;
  Replication rep(sh, 0);
  const HonestTimeScenario& sc = rep.scenario();
  const LagladPath f = sc.f_tilde.path();
  const LagladPath a = sc.f_tilde.fv();
  const LagladPath& drv = sc.brownian.size() > 0 ? sc.brownian : sc.surplus;
  os << "# tau = " << fmt(sc.tau) << '\n';
  os << "t,f_minus,f,f_plus,a_minus,a,a_plus,driver\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << fmt((*sc.grid())[i]) << ',' << fmt(f.minus(i)) << ',' << fmt(f.value(i)) << ',' << fmt(f.plus(i)) << ','
       << fmt(a.minus(i)) << ',' << fmt(a.value(i)) << ',' << fmt(a.plus(i)) << ','
       << fmt(drv.size() > 0 ? drv.value(i) : 0.0) << '\n';
  }
  return os.str();
}

}  // namespace laglad

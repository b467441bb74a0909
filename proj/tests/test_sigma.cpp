#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "laglad/ensemble.hpp"
#include "laglad/errors.hpp"
#include "laglad/honest.hpp"
#include "laglad/models.hpp"
#include "laglad/sigma.hpp"
#include "laglad/stats.hpp"

using namespace laglad;
using Catch::Matchers::WithinAbs;

namespace {

PathDecomposition brownian_decomposition(double horizon, std::size_t steps, const SeedSpec& seed) {
  const LagladPath b = brownian(share(TimeGrid::uniform(horizon, steps)), seed);
  return decompose(b, FvSpec::martingale(b.size()));
}

PathDecomposition jumps(const std::vector<double>& t, const std::vector<Triple>& x) {
  const LagladPath p = LagladPath::make(share(TimeGrid(t)), x);
  return decompose(p, FvSpec::martingale(p.size()));
}

}  // namespace

TEST_CASE("check_sigma examples", "[sigma]") {
  const double dt = 1e-3, band = 2.0 * std::sqrt(dt);
  const PathDecomposition b = brownian_decomposition(1.0, 1000, {61, 0});
  CHECK(check_sigma(b).is_sigma);

  std::size_t passes = 0;
  for (std::uint64_t r = 0; r < 50; ++r) {
    const SigmaTransform a = abs_part(brownian_decomposition(1.0, 1000, {61, r}), band);
    CHECK(a.hypothesis_holds);
    if (a.report.is_sigma) ++passes;
  }
  CHECK(passes >= 49);

  // B_t + t with A^c = t: the drift is carried away from zero.
  std::vector<double> leaks;
  for (std::uint64_t r = 0; r < 400; ++r) {
    const LagladPath b1 = brownian(share(TimeGrid::uniform(1.0, 1000)), SeedSpec{62, r});
    std::vector<double> seg(1000);
    for (std::size_t i = 0; i < seg.size(); ++i) seg[i] = b1.segment_increment(i) + dt;
    const std::vector<double> zero(1001, 0.0);
    FvSpec s;
    s.ac.assign(1000, dt);
    const PathDecomposition d = decompose(LagladPath::from_increments(b1.grid_ptr(), 0.0, seg, zero, zero), s);
    const SigmaReport rep = check_sigma(d, band);
    CHECK_FALSE(rep.is_sigma);
    leaks.push_back(rep.leak_c);
  }
  // Occupation of {|B_s + s| <= band} on [0, 1] is about 2 band ∫ e^{-s/2} / sqrt(2π s) ds;
  // the segment rule also counts the neighbours of each crossing, hence the slack.
  double integral = 0.0;
  const int m = 100000;
  for (int i = 0; i < m; ++i) {
    const double u = (i + 0.5) / m;  // s = u^2
    integral += 2.0 * std::exp(-u * u / 2.0) / std::sqrt(2.0 * M_PI) / m;
  }
  const MeanStats ms = mean_se(leaks);
  CHECK(std::abs(ms.mean - (1.0 - 2.0 * band * integral)) < 0.04);
}

TEST_CASE("crossing classes", "[sigma]") {
  const PathDecomposition b = brownian_decomposition(1.0, 100, {63, 0});
  CHECK(crossing_class(b.path()) == CrossingClass::Continuous);

  const PathDecomposition down = jumps({0.0, 1.0}, {{0, 1, 1}, {1, -1, -1}});
  const CrossingClass c = crossing_class(down.path());
  CHECK(c != CrossingClass::FromPositive);
  CHECK(c != CrossingClass::Continuous);
  CHECK(crossing_sums(down.path()).from_positive == 1.0);

  const PathDecomposition to_zero = jumps({0.0, 1.0, 2.0}, {{0, 0.5, 0.5}, {0.5, 0.0, 0.0}, {0.0, 0.0, 0.0}});
  CHECK(crossing_sums(to_zero.path()).from_positive == 0.0);
  CHECK(crossing_class(to_zero.path()) != CrossingClass::Neither);
}

TEST_CASE("sign parts", "[sigma]") {
  const double band = 2.0 * std::sqrt(1e-3);
  const PathDecomposition b = brownian_decomposition(1.0, 1000, {64, 0});
  const SigmaTransform p = pos_part(b, band), n = neg_part(b, band), a = abs_part(b, band);
  CHECK(sup_distance(p.result.path() - n.result.path(), b.path()) == 0.0);
  CHECK(sup_distance(p.result.path() + n.result.path(), a.result.path()) == 0.0);
  CHECK(a.report.is_sigma);
  CHECK(p.report.is_sigma);
  CHECK(n.report.is_sigma);

  // Already nonnegative: nothing changes.
  const PathDecomposition x = jumps({0.0, 1.0, 2.0}, {{0, 0, 1}, {1, 2, 2}, {2, 0.5, 0.5}});
  const SigmaTransform xp = pos_part(x);
  CHECK(sup_distance(xp.result.path(), x.path()) == 0.0);
  CHECK(sup_distance(xp.result.martingale(), x.martingale()) == 0.0);
  CHECK(sup_distance(xp.result.fv(), x.fv()) == 0.0);

  // A down-jump through zero: X^+ gains Σ 1{X_- > 0} (X)^- in A^d.
  const PathDecomposition j = jumps({0.0, 1.0, 2.0}, {{0, 0, 1}, {1, -0.5, -0.5}, {-0.5, -0.5, -0.5}});
  const SigmaTransform jp = pos_part(j);
  CHECK_FALSE(jp.hypothesis_holds);
  CHECK(jp.result.ad_jump(1) == 0.5);
  CHECK_FALSE(jp.report.is_sigma);
  CHECK(jp.report.leak_d == 0.5);
}

TEST_CASE("sigma product", "[sigma]") {
  const PathDecomposition b = brownian_decomposition(1.0, 500, {65, 0});
  const PathDecomposition one = decompose(LagladPath::constant(b.grid_ptr(), 1.0), FvSpec::martingale(b.size()));
  const SigmaTransform same = sigma_product(b, one);
  CHECK(sup_distance(same.result.path(), b.path()) == 0.0);
  CHECK(sup_distance(same.result.martingale(), b.martingale()) < 1e-15);
  CHECK(sup_distance(same.result.fv(), b.fv()) < 1e-15);

  try {
    sigma_product(b, b);
    FAIL("expected BracketNonzero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BracketNonzero);
  }

  const TimeGrid base = TimeGrid::uniform(4.0, 4000);
  PoissonOptions popt;
  popt.a = 0.5;
  const double band = 2.0 * std::sqrt(1e-3);
  for (std::uint64_t r = 0; r < 10; ++r) {
    const Engine::result_type seed = r;
    Engine rp = make_engine(SeedSpec{66, seed}.sub(1));
    const CertifiedPoisson cp = certified_poisson(4.0, rp, popt);
    Engine rb = make_engine(SeedSpec{66, seed}.sub(0));
    const StoppedBrownian sb = stopped_brownian(*poisson_grid(cp, base), rb);
    const HonestTimeScenario c = brownian_last_zero_on(sb, SeedSpec{66, seed}.sub(0));
    const HonestTimeScenario d = cpp_honest_time_on(cp, sb.grid, popt, SeedSpec{66, seed}.sub(1));
    const SigmaTransform prod = sigma_product(c.f_tilde, d.f_tilde, band);
    CHECK(prod.report.is_sigma);
    CHECK(prod.residual < 1e-12);
  }
}

TEST_CASE("f(A) transform", "[sigma]") {
  const double band = 2.0 * std::sqrt(1e-3);
  const PathDecomposition b = brownian_decomposition(1.0, 1000, {67, 0});
  const SigmaTransform a = abs_part(b, band);
  const SigmaTransform id = fA_transform(a.result, [](double) { return 1.0; }, band);
  CHECK(sup_distance(id.result.path(), a.result.path()) == 0.0);
  CHECK(id.residual < 1e-12);

  const SigmaTransform e = fA_transform(a.result, [](double v) { return std::exp(-v); }, band);
  CHECK(e.report.is_sigma);
  CHECK(e.residual < 3.0 * std::sqrt(1e-3));
  for (std::size_t i = 0; i < b.size(); ++i)
    CHECK_THAT(e.result.path().value(i), WithinAbs(std::exp(-a.result.fv().value(i)) * std::abs(b.path().value(i)), 1e-14));

  const SigmaTransform zero = fA_transform(b, [](double v) { return v; });
  CHECK(sup_distance(zero.result.path(), LagladPath::constant(b.grid_ptr(), 0.0)) == 0.0);

  // Pure-jump class-(Σ) input: the display holds exactly.
  const PathDecomposition x = jumps({0.0, 1.0, 2.0, 3.0}, {{0, 0, 0.5}, {0.5, 1.0, 1.0}, {1.0, 0, 0.25}, {0.25, 0.25, 0.25}});
  const SigmaTransform fx = fA_transform(x, [](double v) { return 1.0 / (1.0 + v); });
  CHECK(fx.residual < 1e-15);
  CHECK(fx.report.is_sigma);
}

TEST_CASE("passage functionals", "[sigma]") {
  auto g = share(TimeGrid::uniform(1.0, 5));
  const PassageFunctionals z = passage(LagladPath::constant(g, 0.0));
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(z.g[i] == (*g)[i]);
    if (i + 1 < g->size()) CHECK(z.k[i] == (*g)[i + 1]);
  }
  CHECK(z.k.back() == INFINITY);

  const std::vector<Triple> up{{0, 0, 0}, {0.5, 0.5, 0.5}, {1, 1, 1}, {2, 2, 2}, {1, 1, 1}, {3, 3, 3}};
  const PassageFunctionals pu = passage(LagladPath::make(g, up, std::vector<Segment>(5, Segment::Continuous)));
  for (double v : pu.g) CHECK(v == 0.0);

  for (std::uint64_t r = 0; r < 5; ++r) {
    const PathDecomposition b = brownian_decomposition(1.0, 300, {68, r});
    const PassageFunctionals p = passage(b.path(), 2.0 * std::sqrt(1.0 / 300));
    bool dual = true;
    for (std::size_t t = 0; t < b.size(); ++t)
      for (std::size_t u = 0; u < b.size(); ++u) dual = dual && ((p.g_index[t] <= u) == (t < p.k_index[u]));
    CHECK(dual);
  }
}

TEST_CASE("balayage identity", "[sigma]") {
  // Pure-jump class-(Σ) toy: right jumps off zero, martingale left jumps.
  const PathDecomposition x = jumps({0.0, 1.0, 2.0, 3.0}, {{0, 0, 0.5}, {0.5, 1.0, 1.0}, {1.0, 0, 0.25}, {0.25, 0.25, 0.25}});
  REQUIRE(check_sigma(x).is_sigma);
  for (std::size_t u = 0; u < 4; ++u) CHECK(balayage_check(x, u).sup() == 0.0);

  // Never returns to zero after u = 0: indicator is one and A is frozen.
  const PathDecomposition y = jumps({0.0, 1.0, 2.0}, {{0, 0, 0.5}, {0.5, 1.5, 1.5}, {1.5, 0.7, 0.7}});
  const BalayageResidual ry = balayage_check(y, 0);
  CHECK(ry.sup() == 0.0);

  const double dt = 1e-3, band = 2.0 * std::sqrt(dt);
  double worst_rms = 0.0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const SigmaTransform a = abs_part(brownian_decomposition(1.0, 1000, {69, r}), band);
    for (std::size_t u : {0u, 100u, 500u, 900u}) worst_rms = std::max(worst_rms, balayage_check(a.result, u, band).rms());
  }
  CHECK(worst_rms <= 3.0 * std::sqrt(dt));
}

TEST_CASE("MRY on class-(Σ) trees is exact", "[sigma][tree]") {
  Engine rng = make_engine({71, 0});
  for (int rep = 0; rep < 100; ++rep) {
    const FiltrationTree t = FiltrationTree::random(3, rng);
    const TreeLaglad x = random_sigma_tree(t, rng);
    REQUIRE(check_sigma_tree(t, x).is_sigma);
    const MryTreeReport r = mry_tree_exact(t, x);
    CHECK(r.max() <= 1e-12);
    CHECK(r.atoms_checked > 0);
  }
  // A process that is not class-(Σ) breaks the identity.
  const FiltrationTree t = FiltrationTree::binomial(2, {0.5, 0.5});
  TreeLaglad drift{t.adapted([](std::size_t k, std::size_t) { return 0.3 * static_cast<double>(k) + 0.1; }),
                   t.adapted([](std::size_t k, std::size_t) { return 0.3 * static_cast<double>(k) + 0.1; })};
  drift.x[0][0] = 0.0;
  drift.x_plus[0][0] = 0.0;
  CHECK_FALSE(check_sigma_tree(t, drift).is_sigma);
  CHECK(mry_tree_exact(t, drift).max() > 0.1);
}

TEST_CASE("check_sigma is invariant under refinement for pure-jump paths", "[sigma]") {
  const PathDecomposition x = jumps({0.0, 1.0, 2.0, 3.0}, {{0, 0, 0.5}, {0.5, 1.0, 1.3}, {1.3, 0, 0.25}, {0.25, 0.25, 0.25}});
  const SigmaReport r0 = check_sigma(x);
  const std::vector<double> extra{0.5, 1.5, 2.25, 2.75};
  const GridPtr fine = share(x.path().grid().refined(extra));
  std::vector<Triple> tr;
  const auto& g0 = x.path().grid();
  for (std::size_t i = 0; i < fine->size(); ++i) {
    const std::size_t j = g0.find((*fine)[i]);
    if (j < g0.size()) {
      const LagladPath& p = x.path();
      tr.push_back({p.minus(j), p.value(j), p.plus(j)});
    } else {
      const double v = x.path().plus(g0.index_at_or_before((*fine)[i]));
      tr.push_back({v, v, v});
    }
  }
  const LagladPath pf = LagladPath::make(fine, tr);
  const SigmaReport r1 = check_sigma(decompose(pf, FvSpec::martingale(pf.size())));
  CHECK(r0.leak_g == r1.leak_g);
  CHECK(r0.leak_d == r1.leak_d);
  CHECK(r0.is_sigma == r1.is_sigma);
  CHECK_THAT(r0.leak_g, WithinAbs(0.3, 1e-15));
}

TEST_CASE("MRY on the Brownian last-zero ensemble", "[sigma]") {
  const TimeGrid base = TimeGrid::uniform(3.0, 3000);
  const std::size_t reps = 10000;
  struct Row {
    double fin_l = 0, fin_r = 0, inf_l = 0, inf_r = 0, far_l = 0, far_r = 0;
  };
  const std::vector<Row> rows = run_replications<Row>(reps, [&](std::size_t r) {
    const HonestTimeScenario sc = brownian_last_zero({73, r}, base);
    const LagladPath& x = sc.f_tilde.path();
    const TimeGrid& g = x.grid();
    const PassageFunctionals pf = passage(x);
    const std::size_t s = g.find(0.5, 1e-9), t = g.find(2.0, 1e-9);
    Row row;
    const MrySample a = mry_finite_sample(x, pf, s, s, t);
    row.fin_l = a.lhs;
    row.fin_r = a.rhs;
    const MrySample b = mry_infinity_sample(x, 1.0, sc.tau, g.find(1.0, 1e-9));
    row.inf_l = b.lhs;
    row.inf_r = b.rhs;
    // Past the horizon-limited activity both sides are the terminal value.
    const MrySample c = mry_infinity_sample(x, x.terminal(), sc.tau == kNever ? g.horizon() : sc.tau, g.size() - 1);
    row.far_l = c.lhs;
    row.far_r = c.rhs;
    return row;
  });
  std::vector<double> fl, fr, il, ir;
  for (const Row& r : rows) {
    fl.push_back(r.fin_l);
    fr.push_back(r.fin_r);
    il.push_back(r.inf_l);
    ir.push_back(r.inf_r);
    CHECK(r.far_l == r.far_r);
  }
  CHECK(std::abs(paired(fl, fr).z) <= 3.0);
  CHECK(std::abs(paired(il, ir).z) <= 3.0);
}

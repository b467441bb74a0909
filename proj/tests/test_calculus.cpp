#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "laglad/calculus.hpp"

using namespace laglad;
using Catch::Matchers::WithinAbs;

namespace {

LagladPath zero_path(const GridPtr& g) { return LagladPath::constant(g, 0.0); }

LagladPath brownian_walk(std::size_t steps, unsigned seed) {
  auto g = share(TimeGrid::uniform(1.0, steps));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, std::sqrt(1.0 / static_cast<double>(steps)));
  std::vector<double> seg(steps);
  for (double& s : seg) s = n(rng);
  std::vector<double> zero(steps + 1, 0.0);
  return LagladPath::from_increments(g, 0.0, seg, zero, zero);
}

// Flat path with left jumps `left` and right jumps `right`, all martingale
// except right jumps (A^g).
PathDecomposition jump_path(const GridPtr& g, double x0, std::vector<double> left, std::vector<double> right) {
  const std::vector<double> seg(g->size() - 1, 0.0);
  return decompose(LagladPath::from_increments(g, x0, seg, left, right), FvSpec::martingale(g->size()));
}

}  // namespace

TEST_CASE("integrate examples", "[calculus]") {
  const LagladPath b = brownian_walk(200, 1);
  auto g = b.grid_ptr();
  const LagladPath one = integrate(Integrand::constant(b.size(), 1.0), b);
  CHECK(sup_distance(one, affine(-b.initial(), 1.0, b)) < 1e-12);
  CHECK(sup_distance(integrate(Integrand::constant(b.size(), 0.0), b), zero_path(g)) == 0.0);

  auto g3 = share(TimeGrid({0.0, 1.0, 2.0}));
  const PathDecomposition r = jump_path(g3, 0.0, {0, 0, 0}, {0.7, 0, 0});
  Integrand h = Integrand::constant(3, 0.0);
  h.at_values = {0.0, 1.0, 1.0};  // indicator(s >= 1)
  h.left_values = {0.0, 1.0, 1.0};
  h.seg_values = {0.0, 1.0};
  CHECK(sup_distance(integrate(h, r.path()), zero_path(g3)) == 0.0);
}

TEST_CASE("integrate is linear", "[calculus]") {
  const LagladPath b = brownian_walk(100, 2);
  const LagladPath c = brownian_walk(100, 3);
  const LagladPath b2(c.grid_ptr(), std::vector<double>(b.minus_values().begin(), b.minus_values().end()),
                      std::vector<double>(b.values().begin(), b.values().end()),
                      std::vector<double>(b.plus_values().begin(), b.plus_values().end()));
  const Integrand h1 = Integrand::from_path(b2);
  const Integrand h2 = Integrand::of(c, [](double v) { return std::sin(v); });
  Integrand hs = h1;
  for (std::size_t i = 0; i < hs.seg_values.size(); ++i) hs.seg_values[i] += h2.seg_values[i];
  for (std::size_t i = 0; i < hs.left_values.size(); ++i) {
    hs.left_values[i] += h2.left_values[i];
    hs.at_values[i] += h2.at_values[i];
  }
  const LagladPath lhs = integrate(hs, c);
  const LagladPath rhs = integrate(h1, c) + integrate(h2, c);
  CHECK(sup_distance(lhs, rhs) < 1e-12);
  const LagladPath lin = integrate(h1, b2 + c);
  CHECK(sup_distance(lin, integrate(h1, b2) + integrate(h1, c)) < 1e-12);
}

TEST_CASE("ito_check is exact for identity and pure jumps", "[calculus]") {
  const LagladPath b = brownian_walk(300, 4);
  const auto id = [](double v) { return v; };
  const auto one = [](double) { return 1.0; };
  const auto zero = [](double) { return 0.0; };
  const PathDecomposition db = decompose(b, FvSpec::martingale(b.size()));
  CHECK(sup_distance(ito_check(db, id, one, zero), zero_path(b.grid_ptr())) < 1e-12);

  auto g = share(TimeGrid({0.0, 0.5, 1.0}));
  const PathDecomposition two = jump_path(g, 1.0, {0.0, -2.5, 0.0}, {0.0, 0.0, 0.75});
  const LagladPath r = ito_check(
      two, [](double v) { return v * v; }, [](double v) { return 2 * v; }, [](double) { return 2.0; });
  CHECK(sup_distance(r, zero_path(g)) < 1e-14);
}

TEST_CASE("covariation examples", "[calculus]") {
  const LagladPath b = brownian_walk(100, 5);
  const PathDecomposition db = decompose(b, FvSpec::martingale(b.size()));
  const PathDecomposition dc = decompose(LagladPath::constant(b.grid_ptr(), 2.0), FvSpec::martingale(b.size()));
  CHECK(sup_distance(covariation(db, dc), zero_path(b.grid_ptr())) == 0.0);

  auto g = share(TimeGrid::uniform(1.0, 4));
  const PathDecomposition x = jump_path(g, 0.0, {0, 1.0, 0, 0, 0}, {0, 0, 0, 0, 0});
  const PathDecomposition y = jump_path(g, 0.0, {0, 0, 0, -0.5, 0}, {0, 0, 0, 0, 0});
  CHECK(sup_distance(covariation(x, y), zero_path(g)) == 0.0);
  CHECK(covariation(x, x).terminal() == 1.0);
}

TEST_CASE("stoch_exp examples", "[calculus]") {
  auto g = share(TimeGrid({0.0, 1.0, 2.0}));
  const PathDecomposition z = jump_path(g, 0.0, {0, 0, 0}, {0, 0, 0});
  const StochExp e0 = stoch_exp(z, 1.5);
  CHECK(e0.path.value(0) == 1.5);
  CHECK(e0.path.terminal() == 1.5);
  CHECK_FALSE(e0.zero_factor);

  const PathDecomposition j = jump_path(g, 0.0, {0, 1.0, 0}, {0, 0, 0});
  const StochExp e1 = stoch_exp(j, 1.0);
  CHECK(e1.path.value(0) == 1.0);
  CHECK(e1.path.minus(1) == 1.0);
  CHECK(e1.path.value(1) == 2.0);
  CHECK(e1.path.value(2) == 2.0);

  const PathDecomposition k = jump_path(g, 0.0, {0, 0, -1.0}, {0.5, 0, 0});
  const StochExp e2 = stoch_exp(k, 1.0);
  CHECK(e2.zero_factor);
  CHECK(e2.path.plus(0) == 1.5);
  CHECK(e2.path.value(2) == 0.0);
  CHECK(sup_distance(stoch_exp_equation_residual(e2.path, k, 1.0), zero_path(g)) < 1e-15);
}

TEST_CASE("stoch_exp multiplies over disjoint drivers", "[calculus]") {
  const LagladPath b = brownian_walk(400, 6);
  auto g = b.grid_ptr();
  const PathDecomposition db = decompose(b, FvSpec::martingale(b.size()));
  std::vector<double> left(b.size(), 0.0), right(b.size(), 0.0);
  left[100] = 0.3;
  left[250] = -0.4;
  right[0] = 0.2;
  right[300] = 0.5;
  const PathDecomposition dj = jump_path(g, 0.0, left, right);
  const LagladPath prod = stoch_exp(db).path * stoch_exp(dj).path;
  const LagladPath sum = stoch_exp(add(db, dj)).path;
  CHECK(sup_distance(prod, sum) < 1e-12);
}

TEST_CASE("tanaka: path strictly above the level", "[calculus]") {
  auto g = share(TimeGrid::uniform(1.0, 10));
  std::vector<double> seg{0.1, -0.2, 0.3, 0.1, -0.4, 0.2, 0.1, -0.1, 0.0, 0.05};
  const std::vector<double> zero(11, 0.0);
  const LagladPath x = LagladPath::from_increments(g, 1.0, seg, zero, zero);
  const TanakaSplit t = tanaka_split(decompose(x, FvSpec::martingale(x.size())), 0.0);
  CHECK(t.local_time.L.path().terminal() == 0.0);
  CHECK(sup_distance(t.pos.path(), x) == 0.0);
}

TEST_CASE("tanaka: pure-jump crossing by a left jump", "[calculus]") {
  auto g = share(TimeGrid({0.0, 1.0, 2.0}));
  const std::vector<Triple> tr{{0, 2, 2}, {2, -1, -1}, {-1, -1, -1}};
  const LagladPath x = LagladPath::make(g, tr);
  const PathDecomposition d = decompose(x, FvSpec::martingale(3));
  const TanakaSplit t = tanaka_split(d, 0.0);
  CHECK(sup_distance(t.local_time.L.path(), zero_path(g)) == 0.0);
  // ∫ 1{X_- > 0} dM = -3 and the compensation term 1{X_- > 0}(X - 0)^- = 1.
  CHECK(t.pos.m_jump(1) == -3.0);
  CHECK(t.pos.ad_jump(1) == 1.0);
  CHECK(t.pos.path().value(1) == 0.0);
  // Minus identity: -∫ 1{X_- <= 0} dM = 0, compensation 1{X_- > 0}(X)^- = 1.
  CHECK(t.neg.m_jump(1) == 0.0);
  CHECK(t.neg.ad_jump(1) == 1.0);
  CHECK(sup_distance(t.local_time_from_minus, zero_path(g)) == 0.0);
  CHECK(local_time_support_leak(x, t.local_time, 0.0) == 0.0);
}

TEST_CASE("tanaka: consistency on a Brownian path", "[calculus]") {
  const LagladPath b = brownian_walk(2000, 8);
  const PathDecomposition d = decompose(b, FvSpec::martingale(b.size()));
  for (double a : {0.0, 0.3, -0.2}) {
    const TanakaSplit t = tanaka_split(d, a);
    CHECK(sup_distance(t.pos.path() - t.neg.path(), affine(-a, 1.0, b)) == 0.0);
    CHECK(sup_distance(t.pos.path() + t.neg.path(), t.abs.path()) == 0.0);
    const double lt = t.local_time.L.path().terminal();
    CHECK(sup_distance(t.local_time.L.path(), t.local_time_from_minus) <= 1e-10 * (1.0 + lt) + 1e-12);
    const double band = 2.0 * std::sqrt(b.grid().max_step());
    CHECK(local_time_support_leak(b, t.local_time, band) == 0.0);
    // Decomposition of (X - a)^+ reproduces X - a via pos - neg parts.
    const LagladPath recon = affine(t.pos.x0(), 1.0, t.pos.martingale() + t.pos.fv());
    CHECK(sup_distance(recon, t.pos.path()) < 1e-12);
  }
}

TEST_CASE("product decomposition reconstructs", "[calculus]") {
  const LagladPath b = brownian_walk(300, 9);
  auto g = b.grid_ptr();
  std::vector<double> left(b.size(), 0.0), right(b.size(), 0.0);
  left[50] = 0.3;
  right[120] = -0.2;
  const PathDecomposition dj = jump_path(g, 1.0, left, right);
  const PathDecomposition db = decompose(affine(2.0, 1.0, b), FvSpec::martingale(b.size()));
  const PathDecomposition p = product(db, dj);
  const LagladPath recon = affine(p.x0(), 1.0, p.martingale() + p.fv());
  CHECK(sup_distance(recon, p.path()) < 1e-12);
  CHECK(p.ag_jump(120) == p.path().right_jump(120));
}

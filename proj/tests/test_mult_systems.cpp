#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "laglad/errors.hpp"
#include "laglad/honest.hpp"
#include "laglad/mult_systems.hpp"

using namespace laglad;
using Catch::Matchers::WithinAbs;

namespace {

bool has_code(const Error& e, ErrorCode c) { return e.code() == c; }

// Unconditional law of τ over levels 0..D and the sentinel.
std::vector<double> marginal(const FiltrationTree& tree, const std::vector<std::vector<double>>& law) {
  const std::size_t d = tree.depth();
  std::vector<double> out(d + 2, 0.0);
  for (std::size_t l = 0; l < law.size(); ++l)
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += tree.atom_prob(d, l) * law[l][k];
  return out;
}

}  // namespace

TEST_CASE("deterministic X_0 = 1/2, X_1 = 1", "[mult]") {
  const FiltrationTree tree = FiltrationTree::binomial(1, {0.5});
  const TreeLaglad x{{{0.5}, {1.0, 1.0}}, {{0.5}, {1.0, 1.0}}};
  const MultSystem ms = build_mult_system(tree, x);
  CHECK(ms.c_bar[0][1][0] == 0.5);
  CHECK(ms.c_bar[0][1][1] == 0.5);
  CHECK(ms.c_bar[1][1][0] == 1.0);
  CHECK(martingale_check(ms).max() <= 1e-15);

  const ConstructedTime ct = construct_time(tree, x);
  for (const auto& leaf : infimum_law(ct)) {
    CHECK_THAT(leaf[0], WithinAbs(0.5, 1e-15));
    CHECK_THAT(leaf[1], WithinAbs(0.5, 1e-15));
    CHECK_THAT(leaf[2], WithinAbs(0.0, 1e-15));
  }
}

TEST_CASE("constant X: τ = 0 with probability c", "[mult]") {
  Engine rng = make_engine({3, 0});
  const FiltrationTree tree = FiltrationTree::random(3, rng);
  const double c = 0.3;
  const TreeLaglad x{tree.constant(c), tree.constant(c)};
  const MultSystem ms = build_mult_system(tree, x);
  for (const auto& cu : ms.c_bar)
    for (const auto& level : cu)
      for (double v : level) CHECK_THAT(v, WithinAbs(1.0, 1e-15));
  const std::vector<double> m = marginal(tree, infimum_law(construct_time(tree, x)));
  CHECK_THAT(m[0], WithinAbs(c, 1e-15));
  CHECK_THAT(m.back(), WithinAbs(1.0 - c, 1e-15));
}

TEST_CASE("unit increment of B at t0 gives τ = t0", "[mult]") {
  Engine rng = make_engine({5, 0});
  const FiltrationTree tree = FiltrationTree::random(4, rng);
  for (std::size_t t0 = 0; t0 <= 4; ++t0) {
    const TreeProcess b = tree.adapted([&](std::size_t k, std::size_t) { return k >= t0 ? 1.0 : 0.0; });
    const ConstructedTime ct = construct_time(tree, b);
    for (const auto& leaf : ct.law)
      for (std::size_t k = 0; k < leaf.size(); ++k) CHECK(leaf[k] == (k == t0 ? 1.0 : 0.0));
    const DualProjectionReport rep = verify_dual_projection(ct);
    CHECK(rep.max_deviation <= 1e-15);
    CHECK(rep.x_identity <= 1e-15);
    // X vanishes before t0, so the system is an ε-limit.
    if (t0 > 0) {
      REQUIRE_FALSE(ct.system.ladder.empty());
      CHECK(ct.system.ladder_monotone);
      for (std::size_t i = 1; i < ct.system.ladder.size(); ++i)
        CHECK(ct.system.ladder[i].gap_to_limit <= ct.system.ladder[i - 1].gap_to_limit);
      CHECK(ct.system.ladder.back().gap_to_limit <= 1e-7);
    }
  }
}

TEST_CASE("B = 0: τ is never finite", "[mult]") {
  Engine rng = make_engine({7, 0});
  const FiltrationTree tree = FiltrationTree::random(3, rng);
  const ConstructedTime ct = construct_time(tree, tree.constant(0.0));
  for (const auto& leaf : ct.law) CHECK(leaf.back() == 1.0);
  const DualProjectionReport rep = verify_dual_projection(ct);
  for (const auto& level : rep.ho)
    for (double v : level) CHECK(v == 0.0);
  CHECK(sample_tau(ct, 0, 0.999) == kNever);
}

TEST_CASE("random B round trip through the constructed time", "[mult]") {
  Engine rng = make_engine({11, 0});
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t depth = 1 + rep % 5;
    const FiltrationTree tree = FiltrationTree::random(depth, rng);
    const bool normalize = rep % 2 == 1;
    const TreeProcess b = random_increasing(tree, rng, 0.9, normalize);
    const ConstructedTime ct = construct_time(tree, b);
    CHECK(martingale_check(ct.system).max() <= 1e-12);
    const DualProjectionReport dp = verify_dual_projection(ct);
    CHECK(dp.max_deviation <= 1e-12);
    CHECK(dp.x_identity <= 1e-12);
    if (normalize) {
      // X_0 = 1 - E[B_D] = 0: no sentinel mass and an ε-limit system.
      CHECK(ct.system.ladder_monotone);
      for (const auto& leaf : ct.law) CHECK(leaf.back() <= 1e-12);
    } else {
      CHECK(ct.system.ladder.empty());
    }
  }
}

TEST_CASE("sampling U reproduces the law", "[mult]") {
  Engine rng = make_engine({13, 0});
  const FiltrationTree tree = FiltrationTree::random(3, rng);
  const TreeProcess b = random_increasing(tree, rng, 0.8);
  const ConstructedTime ct = construct_time(tree, b);
  const std::vector<double> exact = marginal(tree, ct.law);

  const std::size_t n = 40000;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> leaf_cdf;
  double acc = 0.0;
  for (std::size_t l = 0; l < tree.width(3); ++l) leaf_cdf.push_back(acc += tree.atom_prob(3, l));
  std::vector<double> counts(exact.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = unif(rng);
    std::size_t leaf = 0;
    while (leaf + 1 < leaf_cdf.size() && v >= leaf_cdf[leaf]) ++leaf;
    const double tau = sample_tau(ct, leaf, unif(rng));
    counts[tau == kNever ? exact.size() - 1 : static_cast<std::size_t>(tau)] += 1.0;
  }
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const double p = counts[k] / static_cast<double>(n);
    const double se = std::sqrt(exact[k] * (1.0 - exact[k]) / static_cast<double>(n));
    CHECK(std::abs(p - exact[k]) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("random submartingales: system identities and branch form", "[mult]") {
  Engine rng = make_engine({17, 0});
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t depth = 1 + rep % 4;
    const FiltrationTree tree = FiltrationTree::random(depth, rng);
    const TreeLaglad x = random_submartingale(tree, rng);
    const MultSystem ms = build_mult_system(tree, x);
    const MultSystemReport r = martingale_check(ms);
    CHECK(r.msdef <= 1e-12);
    CHECK(r.q_martingale <= 1e-12);
    CHECK(r.cocycle <= 1e-12);
    CHECK(r.monotone <= 1e-15);
    CHECK(r.range <= 1e-15);

    const GridPtr g = level_grid(depth);
    for (std::size_t leaf = 0; leaf < tree.width(depth); ++leaf) {
      const PathDecomposition dec = branch_decomposition(tree, x, leaf, g);
      for (std::size_t u = 0; u <= depth; ++u) {
        const LagladPath c = c_bar_path(dec, u);
        for (std::size_t t = u; t <= depth; ++t) {
          const std::size_t a = ancestor(depth, leaf, t);
          CHECK_THAT(c.value(t), WithinAbs(ms.c_bar[u][t][a], 1e-14));
          CHECK_THAT(c.plus(t), WithinAbs(ms.c_bar_plus[u][t][a], 1e-14));
        }
      }
    }
  }
}

TEST_CASE("C̄ along a path with A^c and a right jump", "[mult]") {
  // X = 1 + t with an extra right jump of 1/2 at node 5.
  const std::size_t n = 11;
  GridPtr g = share(TimeGrid::uniform(1.0, n - 1));
  std::vector<double> seg(n - 1, 0.1), zeros(n, 0.0), right(n, 0.0);
  right[5] = 0.5;
  const LagladPath p = LagladPath::from_increments(g, 1.0, seg, zeros, right);
  FvSpec spec;
  spec.ac = seg;
  spec.ad = zeros;
  const PathDecomposition dec = decompose(p, spec);
  const LagladPath c = c_bar_path(dec, 0);
  // Segment and jump ratios telescope to X_0 / X_t.
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = 1.0 / p.value(i);
    CHECK_THAT(c.value(i), WithinAbs(expected, 1e-14));
  }
  CHECK_THAT(c.plus(5), WithinAbs(c.value(5) * 1.5 / 2.0, 1e-14));
  CHECK(c.value(0) == 1.0);
}

TEST_CASE("input validation", "[mult]") {
  const FiltrationTree tree = FiltrationTree::binomial(1, {0.5});
  const TreeLaglad negative{{{-0.1}, {1.0, 1.0}}, {{-0.1}, {1.0, 1.0}}};
  CHECK_THROWS_MATCHES(build_mult_system(tree, negative), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return has_code(e, ErrorCode::NonPositiveX); }));
  const TreeLaglad super{{{0.5}, {0.2, 0.2}}, {{0.5}, {0.2, 0.2}}};
  CHECK_THROWS_MATCHES(build_mult_system(tree, super), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return has_code(e, ErrorCode::NotSubmartingale); }));
  const TreeLaglad down{{{0.5}, {1.0, 1.0}}, {{0.4}, {1.0, 1.0}}};
  CHECK_THROWS_MATCHES(build_mult_system(tree, down), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return has_code(e, ErrorCode::NotSubmartingale); }));
}

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "laglad/errors.hpp"
#include "laglad/path.hpp"

using namespace laglad;
using Catch::Matchers::WithinAbs;

namespace {

GridPtr grid01() { return share(TimeGrid({0.0, 1.0})); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

LagladPath random_walk(std::size_t steps, unsigned seed) {
  auto g = share(TimeGrid::uniform(1.0, steps));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, std::sqrt(1.0 / static_cast<double>(steps)));
  std::vector<double> seg(steps);
  for (double& s : seg) s = n(rng);
  std::vector<double> zero(steps + 1, 0.0);
  return LagladPath::from_increments(g, 0.0, seg, zero, zero);
}

double max_reconstruction_error(const PathDecomposition& d) {
  const LagladPath sum = d.xc() + d.xd() + d.xg();
  const LagladPath semi = affine(d.x0(), 1.0, d.martingale() + d.fv());
  return std::max(sup_distance(sum, d.path()), sup_distance(semi, d.path()));
}

}  // namespace

TEST_CASE("time grid validation", "[path]") {
  CHECK_THROWS_AS(TimeGrid({0.0}), Error);
  CHECK_THROWS_AS(TimeGrid({0.5, 1.0}), Error);
  CHECK_THROWS_AS(TimeGrid({0.0, 1.0, 1.0}), Error);
  const TimeGrid g = TimeGrid::uniform(2.0, 4);
  CHECK(g.size() == 5);
  CHECK(g.horizon() == 2.0);
  CHECK(g.index_at_or_before(1.2) == 2);
  CHECK(g.find(1.5) == 3);
  CHECK(g.find(1.25) == g.size());
  const std::vector<double> extra{0.25, 1.0 + 1e-14, 1.75};
  const TimeGrid r = g.refined(extra);
  CHECK(r.size() == 7);
  CHECK(r.horizon() == 2.0);
}

TEST_CASE("make_path examples", "[path]") {
  const std::vector<Triple> constant{{0, 1, 1}, {1, 1, 1}};
  const LagladPath c = LagladPath::make(grid01(), constant);
  CHECK(c.right_jump(0) == 0.0);
  CHECK(c.left_jump(1) == 0.0);
  CHECK(c.value(1) == 1.0);

  const std::vector<Triple> jump{{0, 0, 1}, {1, 1, 1}};
  const LagladPath j = LagladPath::make(grid01(), jump);
  CHECK(j.right_jump(0) == 1.0);

  const std::vector<Triple> nan{{0, std::nan(""), 1}, {1, 1, 1}};
  CHECK(code_of([&] { LagladPath::make(grid01(), nan); }) == ErrorCode::NonFinite);

  const std::vector<Triple> short_list{{0, 1, 1}};
  CHECK(code_of([&] { LagladPath::make(grid01(), short_list); }) == ErrorCode::GridMismatch);

  const std::vector<Triple> broken{{0, 0, 0}, {1, 1, 1}};
  CHECK(code_of([&] { LagladPath::make(grid01(), broken); }) == ErrorCode::Inconsistent);
  const std::vector<Segment> moving{Segment::Continuous};
  CHECK_NOTHROW(LagladPath::make(grid01(), broken, moving));
}

TEST_CASE("decompose: left jump declared martingale", "[path]") {
  auto g = share(TimeGrid({0.0, 0.5, 1.0, 1.5}));
  const std::vector<Triple> t{{0, 1, 1}, {1, 1, 1}, {1, 3, 3}, {3, 3, 3}};
  const LagladPath x = LagladPath::make(g, t);
  const PathDecomposition d = decompose(x, FvSpec::martingale(x.size()));
  CHECK(d.xd().value(2) == 2.0);
  CHECK(d.xd().minus(2) == 0.0);
  CHECK(sup_distance(d.xg(), LagladPath::constant(g, 0.0)) == 0.0);
  CHECK(sup_distance(d.xc(), LagladPath::constant(g, 1.0)) == 0.0);
  CHECK(sup_distance(d.martingale(), affine(-1.0, 1.0, x)) == 0.0);
  CHECK(max_reconstruction_error(d) == 0.0);
}

TEST_CASE("decompose: right jump at 0 declared A^g", "[path]") {
  auto g = share(TimeGrid({0.0, 1.0, 2.0}));
  const std::vector<Triple> t{{0, 0, 1.5}, {1.5, 1.5, 1.5}, {1.5, 1.5, 1.5}};
  const LagladPath x = LagladPath::make(g, t);
  FvAssignment a;
  a.segments = {Part::Unassigned, Part::Unassigned};
  a.left = {Part::Unassigned, Part::Unassigned, Part::Unassigned};
  a.right = {Part::Ag, Part::Unassigned, Part::Unassigned};
  const PathDecomposition d = decompose(x, a);
  const LagladPath xg = d.xg();
  CHECK(xg.value(0) == 0.0);
  CHECK(xg.plus(0) == 1.5);
  CHECK(xg.value(1) == 1.5);
  CHECK(sup_distance(d.ag(), xg) == 0.0);
  CHECK(sup_distance(d.martingale(), LagladPath::constant(g, 0.0)) == 0.0);

  a.right[0] = Part::Ad;
  CHECK(code_of([&] { decompose(x, a); }) == ErrorCode::InvariantViolation);
  a.right[0] = Part::Unassigned;
  CHECK(code_of([&] { decompose(x, a); }) == ErrorCode::IncompleteSpec);
}

TEST_CASE("decompose: Brownian path reconstructs", "[path]") {
  const LagladPath b = random_walk(1000, 7);
  const PathDecomposition d = decompose(b, FvSpec::martingale(b.size()));
  CHECK(sup_distance(d.xc(), b) < 1e-12);
  CHECK(sup_distance(d.xd(), LagladPath::constant(b.grid_ptr(), 0.0)) == 0.0);
  CHECK(sup_distance(d.xg(), LagladPath::constant(b.grid_ptr(), 0.0)) == 0.0);
  CHECK(max_reconstruction_error(d) < 1e-12);
}

TEST_CASE("decompose: variation splits across A parts", "[path]") {
  auto g = share(TimeGrid::uniform(1.0, 4));
  const std::vector<double> seg{0.1, -0.2, 0.3, 0.05};
  const std::vector<double> left{0.0, 0.5, 0.0, -0.25, 0.0};
  const std::vector<double> right{0.2, 0.0, 0.7, 0.0, 0.1};
  const LagladPath x = LagladPath::from_increments(g, 2.0, seg, left, right);
  FvSpec s;
  s.ac = {0.1, 0.0, 0.3, 0.05};
  s.ad = {0.0, 0.5, 0.0, -0.25, 0.0};
  const PathDecomposition d = decompose(x, s);
  CHECK_THAT(total_variation(d.fv()),
             WithinAbs(total_variation(d.ac()) + total_variation(d.ad()) + total_variation(d.ag()), 1e-14));
  CHECK(max_reconstruction_error(d) < 1e-14);
  CHECK_THAT(d.martingale().terminal(), WithinAbs(-0.2, 1e-15));
}

TEST_CASE("running_sup examples and properties", "[path]") {
  auto g = share(TimeGrid({0.0, 1.0, 2.0}));
  const std::vector<Triple> t{{0, 1, 1}, {1, 3, 3}, {3, 2, 2}};
  const LagladPath x = LagladPath::make(g, t);
  const LagladPath s = running_sup(x);
  CHECK(s.value(0) == 1.0);
  CHECK(s.value(1) == 3.0);
  CHECK(s.value(2) == 3.0);

  const LagladPath c = LagladPath::constant(g, -4.0);
  CHECK(sup_distance(running_sup(c), c) == 0.0);

  const std::vector<Triple> up{{0, 0, 1}, {1, 1, 1}, {1, 1, 1}};
  const LagladPath u = running_sup(LagladPath::make(g, up));
  CHECK(u.value(0) == 0.0);
  CHECK(u.plus(0) == 1.0);
  CHECK(u.minus(1) >= 1.0);

  const LagladPath w = random_walk(500, 3);
  const LagladPath sw = running_sup(w);
  CHECK(sup_distance(running_sup(sw), sw) == 0.0);
  const LagladPath w2 = affine(0.01, 1.0, w);
  const LagladPath sw2 = running_sup(w2);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(sw.value(i) <= sw2.value(i));
}

TEST_CASE("total_variation examples", "[path]") {
  auto g = share(TimeGrid({0.0, 1.0}));
  CHECK(total_variation(LagladPath::constant(g, 3.0)) == 0.0);
  const std::vector<Triple> drop{{0, 1, 1}, {1, -1, -1}};
  CHECK(total_variation(LagladPath::make(g, drop)) == 2.0);
  auto g10 = share(TimeGrid::uniform(1.0, 10));
  const LagladPath lin = LagladPath::from_increments(g10, 0.0, std::vector<double>(10, 0.1),
                                                     std::vector<double>(11, 0.0), std::vector<double>(11, 0.0));
  CHECK_THAT(total_variation(lin), WithinAbs(1.0, 1e-15));
}

TEST_CASE("path CSV round trip", "[path]") {
  const LagladPath w = random_walk(20, 11);
  std::stringstream ss;
  write_csv(ss, w);
  const LagladPath r = read_csv(ss);
  CHECK(sup_distance(r, w) == 0.0);
}

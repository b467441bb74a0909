#include "laglad/tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "laglad/errors.hpp"

namespace laglad {

FiltrationTree::FiltrationTree(std::vector<std::vector<double>> up_prob) : up_(std::move(up_prob)) {
  if (up_.empty()) throw Error(ErrorCode::InvalidArgument, "tree depth must be at least 1");
  for (std::size_t k = 0; k < up_.size(); ++k) {
    if (up_[k].size() != width(k))
      throw Error(ErrorCode::InvalidArgument, "level " + std::to_string(k) + " has the wrong number of atoms");
    for (double p : up_[k])
      if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "edge probabilities must lie in (0, 1)");
  }
  atom_.resize(depth() + 1);
  atom_[0] = {1.0};
  for (std::size_t k = 0; k < depth(); ++k) {
    atom_[k + 1].resize(width(k + 1));
    for (std::size_t j = 0; j < width(k); ++j) {
      atom_[k + 1][2 * j] = atom_[k][j] * (1.0 - up_[k][j]);
      atom_[k + 1][2 * j + 1] = atom_[k][j] * up_[k][j];
    }
  }
}

FiltrationTree FiltrationTree::binomial(std::size_t depth, const std::vector<double>& p) {
  if (p.size() != depth) throw Error(ErrorCode::InvalidArgument, "one up probability per level required");
  std::vector<std::vector<double>> up(depth);
  for (std::size_t k = 0; k < depth; ++k) up[k].assign(std::size_t{1} << k, p[k]);
  return FiltrationTree(std::move(up));
}

FiltrationTree FiltrationTree::random(std::size_t depth, Engine& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::vector<double>> up(depth);
  for (std::size_t k = 0; k < depth; ++k) {
    up[k].resize(std::size_t{1} << k);
    for (double& p : up[k]) p = u(rng);
  }
  return FiltrationTree(std::move(up));
}

double FiltrationTree::edge_prob(std::size_t level, std::size_t j) const {
  if (level == 0) return 1.0;
  const double p = up_[level - 1][j / 2];
  return (j % 2 == 1) ? p : 1.0 - p;
}

TreeProcess FiltrationTree::adapted(const std::function<double(std::size_t, std::size_t)>& rule) const {
  TreeProcess x(depth() + 1);
  for (std::size_t k = 0; k <= depth(); ++k) {
    x[k].resize(width(k));
    for (std::size_t j = 0; j < width(k); ++j) x[k][j] = rule(k, j);
  }
  return x;
}

TreeProcess FiltrationTree::constant(double c) const {
  return adapted([c](std::size_t, std::size_t) { return c; });
}

std::vector<double> FiltrationTree::conditional_expectation(std::size_t from, std::size_t level,
                                                            const std::vector<double>& xi) const {
  if (level > depth() || from > level || xi.size() != width(level))
    throw Error(ErrorCode::InvalidArgument, "conditional expectation arguments out of range");
  std::vector<double> cur = xi;
  for (std::size_t k = level; k > from; --k) {
    std::vector<double> up(width(k - 1));
    for (std::size_t j = 0; j < up.size(); ++j) {
      const double p = up_[k - 1][j];
      up[j] = (1.0 - p) * cur[2 * j] + p * cur[2 * j + 1];
    }
    cur = std::move(up);
  }
  return cur;
}

TreeProcess FiltrationTree::conditional_expectation(std::size_t level, const std::vector<double>& xi) const {
  TreeProcess out(depth() + 1);
  for (std::size_t k = level; k <= depth(); ++k) out[k] = lift(level, k, xi);
  std::vector<double> cur = xi;
  out[level] = cur;
  for (std::size_t k = level; k > 0; --k) {
    cur = conditional_expectation(k - 1, k, cur);
    out[k - 1] = cur;
  }
  return out;
}

double FiltrationTree::expectation(std::size_t level, const std::vector<double>& xi) const {
  return conditional_expectation(0, level, xi)[0];
}

std::vector<double> FiltrationTree::lift(std::size_t k, std::size_t level, const std::vector<double>& v) const {
  std::vector<double> out(width(level));
  const std::size_t shift = level - k;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = v[j >> shift];
  return out;
}

BinomialTree binomial_tree(std::size_t depth, const std::vector<double>& p,
                           const std::function<double(std::size_t, std::size_t)>& rule) {
  FiltrationTree t = FiltrationTree::binomial(depth, p);
  TreeProcess v = t.adapted(rule);
  return {std::move(t), std::move(v)};
}

double martingale_defect(const FiltrationTree& tree, const TreeProcess& x) {
  double d = 0.0;
  for (std::size_t k = 0; k < tree.depth(); ++k) {
    const std::vector<double> e = tree.conditional_expectation(k, k + 1, x[k + 1]);
    for (std::size_t j = 0; j < e.size(); ++j) d = std::max(d, std::abs(e[j] - x[k][j]));
  }
  return d;
}

}  // namespace laglad

namespace laglad {

GridPtr level_grid(std::size_t depth) {
  std::vector<double> t(depth + 1);
  for (std::size_t k = 0; k <= depth; ++k) t[k] = static_cast<double>(k);
  return share(TimeGrid(std::move(t)));
}

LagladPath branch_path(const FiltrationTree& tree, const TreeLaglad& p, std::size_t leaf, const GridPtr& grid) {
  const std::size_t d = tree.depth();
  std::vector<double> xm(d + 1), x(d + 1), xp(d + 1);
  for (std::size_t k = 0; k <= d; ++k) {
    const std::size_t j = ancestor(d, leaf, k);
    x[k] = p.x[k][j];
    xp[k] = p.x_plus[k][j];
    xm[k] = k == 0 ? 0.0 : xp[k - 1];
  }
  return LagladPath(grid, std::move(xm), std::move(x), std::move(xp));
}

TreeLaglad from_branches(const FiltrationTree& tree, const std::vector<LagladPath>& paths) {
  const std::size_t d = tree.depth();
  TreeLaglad out{tree.constant(0.0), tree.constant(0.0)};
  for (std::size_t k = 0; k <= d; ++k) {
    for (std::size_t j = 0; j < tree.width(k); ++j) {
      const LagladPath& p = paths[j << (d - k)];
      out.x[k][j] = p.value(k);
      out.x_plus[k][j] = p.plus(k);
    }
  }
  return out;
}

}  // namespace laglad

namespace laglad {

PathDecomposition branch_decomposition(const FiltrationTree& tree, const TreeLaglad& p, std::size_t leaf,
                                       const GridPtr& grid) {
  const std::size_t d = tree.depth();
  FvSpec s;
  s.ac.assign(d, 0.0);
  s.ad.assign(d + 1, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t j = ancestor(d, leaf, k);
    const double up = tree.up_prob(k, j);
    const double pred = (1.0 - up) * p.x[k + 1][2 * j] + up * p.x[k + 1][2 * j + 1];
    s.ad[k + 1] = pred - p.x_plus[k][j];
  }
  return decompose(branch_path(tree, p, leaf, grid), s);
}

}  // namespace laglad

#pragma once

// Binary filtration trees. Level k has 2^k atoms; atom (k, j) splits into
// (k+1, 2j) with probability 1 - p(k, j) and (k+1, 2j+1) with probability
// p(k, j). Adapted processes are stored level by level.

#include <cstddef>
#include <functional>
#include <vector>

#include "laglad/path.hpp"
#include "laglad/rng.hpp"

namespace laglad {

/// One value per atom at every level 0..depth.
using TreeProcess = std::vector<std::vector<double>>;

class FiltrationTree {
 public:
  /// `up_prob[k][j]` is the probability of the up-move out of atom (k, j).
  explicit FiltrationTree(std::vector<std::vector<double>> up_prob);

  /// Same up probability for every atom at level k.
  static FiltrationTree binomial(std::size_t depth, const std::vector<double>& up_prob_per_level);
  /// Up probabilities drawn uniformly from [lo, hi].
  static FiltrationTree random(std::size_t depth, Engine& rng, double lo = 0.1, double hi = 0.9);

  std::size_t depth() const noexcept { return up_.size(); }
  std::size_t width(std::size_t level) const noexcept { return std::size_t{1} << level; }
  std::size_t node_count() const noexcept { return (std::size_t{1} << (depth() + 1)) - 1; }
  double up_prob(std::size_t level, std::size_t j) const { return up_[level][j]; }
  /// Probability of the edge into atom (level, j) from its parent.
  double edge_prob(std::size_t level, std::size_t j) const;
  /// Unconditional probability of atom (level, j).
  double atom_prob(std::size_t level, std::size_t j) const { return atom_[level][j]; }

  /// Process with value rule(level, j) at atom (level, j).
  TreeProcess adapted(const std::function<double(std::size_t, std::size_t)>& rule) const;
  TreeProcess constant(double c) const;

  /// E[xi | F_k] for all k <= level, where xi is F_level-measurable and given
  /// by its values at that level. Entries past `level` repeat xi.
  TreeProcess conditional_expectation(std::size_t level, const std::vector<double>& xi) const;
  /// E[xi | F_from] with xi given at `level` >= from.
  std::vector<double> conditional_expectation(std::size_t from, std::size_t level, const std::vector<double>& xi) const;
  /// E[xi] for xi at `level`.
  double expectation(std::size_t level, const std::vector<double>& xi) const;
  /// Values of an F_k-measurable quantity lifted to `level` >= k.
  std::vector<double> lift(std::size_t k, std::size_t level, const std::vector<double>& v) const;

 private:
  std::vector<std::vector<double>> up_;
  std::vector<std::vector<double>> atom_;
};

struct BinomialTree {
  FiltrationTree tree;
  TreeProcess values;
};

BinomialTree binomial_tree(std::size_t depth, const std::vector<double>& up_prob_per_level,
                           const std::function<double(std::size_t, std::size_t)>& value_rule);

/// max_k max_j |E[X_{k+1} | F_k] - X_k|.
double martingale_defect(const FiltrationTree& tree, const TreeProcess& x);

}  // namespace laglad

namespace laglad {

/// Làglàd process on a tree: value and right limit per atom. The left limit
/// at level k+1 is the right limit at level k; at level 0 it is 0.
struct TreeLaglad {
  TreeProcess x;
  TreeProcess x_plus;
};

/// Grid {0, 1, ..., depth}.
GridPtr level_grid(std::size_t depth);

/// Atom index at `level` on the way to `leaf`.
inline std::size_t ancestor(std::size_t depth, std::size_t leaf, std::size_t level) {
  return leaf >> (depth - level);
}

/// The path of `p` along the branch ending at `leaf`.
LagladPath branch_path(const FiltrationTree& tree, const TreeLaglad& p, std::size_t leaf, const GridPtr& grid);

/// Decomposition along a branch with the exact Doob split: the left jump at
/// level k+1 splits into the martingale part X_{k+1} - E[X_{k+1} | F_k] and
/// A^d = E[X_{k+1} | F_k] - X_{k+}; right jumps are A^g.
PathDecomposition branch_decomposition(const FiltrationTree& tree, const TreeLaglad& p, std::size_t leaf,
                                       const GridPtr& grid);

/// Reassembles per-leaf paths into tree form (values must agree across
/// leaves sharing an atom; the first leaf wins).
TreeLaglad from_branches(const FiltrationTree& tree, const std::vector<LagladPath>& paths);

}  // namespace laglad

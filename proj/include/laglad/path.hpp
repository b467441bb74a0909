#pragma once

// Làglàd paths on a finite time grid.
//
// A path stores, for every grid node t_i, the triple (X_{t_i-}, X_{t_i}, X_{t_i+}).
// Between two nodes the path moves continuously from X_{t_i+} to X_{t_{i+1}-};
// jumps live only at nodes. By convention X_{0-} = 0, so the minus component of
// node 0 is always zero and the "jump" it implies is never counted.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace laglad {

class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> nodes);

  static TimeGrid uniform(double horizon, std::size_t steps);

  std::size_t size() const noexcept { return nodes_.size(); }
  double operator[](std::size_t i) const noexcept { return nodes_[i]; }
  double horizon() const noexcept { return nodes_.back(); }
  double step(std::size_t i) const noexcept { return nodes_[i + 1] - nodes_[i]; }
  double max_step() const noexcept;
  std::span<const double> nodes() const noexcept { return nodes_; }

  /// Index of the last node <= t (0 if t < 0).
  std::size_t index_at_or_before(double t) const noexcept;
  /// Index of the node equal to t within `tol`, or size() if absent.
  std::size_t find(double t, double tol = 1e-12) const noexcept;

  /// Union with `extra` (points in [0, horizon]); points within `snap` of an
  /// existing node are merged into it.
  TimeGrid refined(std::span<const double> extra, double snap = 1e-12) const;

 private:
  std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

inline GridPtr share(TimeGrid g) { return std::make_shared<const TimeGrid>(std::move(g)); }

struct Triple {
  double minus;
  double value;
  double plus;
};

/// Declares whether the path may move between two nodes. Flat segments
/// require X_{t_i+} == X_{t_{i+1}-}.
enum class Segment : std::uint8_t { Flat, Continuous };

class LagladPath {
 public:
  LagladPath() = default;
  LagladPath(GridPtr grid, std::vector<double> minus, std::vector<double> value,
             std::vector<double> plus);

  /// Validated construction from triples. Segments default to Flat.
  static LagladPath make(GridPtr grid, std::span<const Triple> triples,
                         std::span<const Segment> segments = {});

  /// Builds the path by accumulating increments: `seg[i]` is the continuous
  /// move over (t_i, t_{i+1}), `left[i]` the jump X_{t_i} - X_{t_i-} (ignored at
  /// i = 0) and `right[i]` the jump X_{t_i+} - X_{t_i}.
  static LagladPath from_increments(GridPtr grid, double x0, std::span<const double> seg,
                                    std::span<const double> left, std::span<const double> right);

  static LagladPath constant(GridPtr grid, double c);

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const TimeGrid& grid() const noexcept { return *grid_; }
  std::size_t size() const noexcept { return x_.size(); }

  double minus(std::size_t i) const noexcept { return xm_[i]; }
  double value(std::size_t i) const noexcept { return x_[i]; }
  double plus(std::size_t i) const noexcept { return xp_[i]; }
  Triple at(std::size_t i) const noexcept { return {xm_[i], x_[i], xp_[i]}; }
  double initial() const noexcept { return x_.front(); }
  double terminal() const noexcept { return xp_.back(); }

  std::span<const double> minus_values() const noexcept { return xm_; }
  std::span<const double> values() const noexcept { return x_; }
  std::span<const double> plus_values() const noexcept { return xp_; }

  /// ΔX at node i (zero at node 0 by convention).
  double left_jump(std::size_t i) const noexcept { return i == 0 ? 0.0 : x_[i] - xm_[i]; }
  /// Δ⁺X at node i.
  double right_jump(std::size_t i) const noexcept { return xp_[i] - x_[i]; }
  /// Continuous move over (t_i, t_{i+1}).
  double segment_increment(std::size_t i) const noexcept { return xm_[i + 1] - xp_[i]; }

  /// Componentwise transform; the node-0 minus convention is preserved.
  LagladPath map(const std::function<double(double)>& f) const;

 private:
  GridPtr grid_;
  std::vector<double> xm_, x_, xp_;
};

/// Componentwise a ⊙ b for paths on the same grid.
LagladPath combine(const LagladPath& a, const LagladPath& b,
                   const std::function<double(double, double)>& op);
LagladPath operator+(const LagladPath& a, const LagladPath& b);
LagladPath operator-(const LagladPath& a, const LagladPath& b);
LagladPath operator*(const LagladPath& a, const LagladPath& b);
/// alpha + beta * p, componentwise.
LagladPath affine(double alpha, double beta, const LagladPath& p);

/// Sup over nodes and over all three components of |a - b|, skipping the
/// node-0 minus convention.
double sup_distance(const LagladPath& a, const LagladPath& b);

void require_same_grid(const LagladPath& a, const LagladPath& b);

/// A path that is nondecreasing through every limit component.
class IncreasingPath {
 public:
  IncreasingPath() = default;
  /// Validates monotonicity up to `slack` (absolute).
  explicit IncreasingPath(LagladPath p, double slack = 0.0);

  const LagladPath& path() const noexcept { return path_; }
  operator const LagladPath&() const noexcept { return path_; }

 private:
  LagladPath path_;
};

// ---------------------------------------------------------------------------
// Decomposition X = X^c + X^d + X^g and X = X_0 + M + A.

/// How a path's increments split between the local martingale and the
/// finite-variation part. Right jumps always belong to A^g (martingales are
/// càdlàg); everything not assigned to A goes to M.
struct FvSpec {
  /// Per segment: part of the continuous move assigned to A^c.
  std::vector<double> ac;
  /// Per segment: part of the continuous move assigned to the purely
  /// discontinuous martingale (the compensator drift of a jump martingale).
  /// Empty means zero everywhere.
  std::vector<double> md_drift;
  /// Per node: part of the left jump assigned to A^d.
  std::vector<double> ad;

  static FvSpec martingale(std::size_t nodes);
};

enum class Part : std::uint8_t { Unassigned, Martingale, Ac, Ad, Ag };

/// Whole-increment assignment; converted into shares by `decompose`.
struct FvAssignment {
  std::vector<Part> segments;
  std::vector<Part> left;
  std::vector<Part> right;
  /// When true, continuous moves assigned to the martingale are treated as
  /// compensator drift (no continuous quadratic variation).
  bool martingale_drift_is_fv = false;
};

class PathDecomposition {
 public:
  PathDecomposition() = default;

  const LagladPath& path() const noexcept { return x_; }
  const GridPtr& grid_ptr() const noexcept { return x_.grid_ptr(); }
  std::size_t size() const noexcept { return x_.size(); }
  double x0() const noexcept { return x_.initial(); }

  // Increments of the parts.
  double mc_increment(std::size_t seg) const noexcept { return mc_seg_[seg]; }
  double md_drift(std::size_t seg) const noexcept { return md_seg_[seg]; }
  double ac_increment(std::size_t seg) const noexcept { return ac_seg_[seg]; }
  double m_jump(std::size_t i) const noexcept { return m_left_[i]; }
  double ad_jump(std::size_t i) const noexcept { return ad_left_[i]; }
  double ag_jump(std::size_t i) const noexcept { return ag_right_[i]; }

  /// X^c: continuous part (carries X_0).
  LagladPath xc() const;
  /// X^d = Σ_{0<s≤·} ΔX_s.
  LagladPath xd() const;
  /// X^g = Σ_{s<·} Δ⁺X_s.
  LagladPath xg() const;

  LagladPath martingale() const;         // M, M_0 = 0
  LagladPath continuous_martingale() const;  // M^c
  LagladPath fv() const;                 // A = A^c + A^d + A^g, A_0 = 0
  LagladPath ac() const;
  LagladPath ad() const;
  LagladPath ag() const;

  friend PathDecomposition decompose(const LagladPath& path, const FvSpec& spec);

 private:
  LagladPath x_;
  std::vector<double> mc_seg_, md_seg_, ac_seg_;
  std::vector<double> m_left_, ad_left_, ag_right_;
};

PathDecomposition decompose(const LagladPath& path, const FvSpec& spec);
PathDecomposition decompose(const LagladPath& path, const FvAssignment& assignment);

/// Running supremum over every limit component attained up to each node.
IncreasingPath running_sup(const LagladPath& path);

/// Sum of absolute increments over segments, left jumps and right jumps.
double total_variation(const LagladPath& path);

// CSV with header "t,x_minus,x,x_plus".
void write_csv(std::ostream& os, const LagladPath& path);
LagladPath read_csv(std::istream& is);

}  // namespace laglad

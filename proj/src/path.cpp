#include "laglad/path.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "laglad/errors.hpp"

namespace laglad {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a) + std::abs(b)); }

}  // namespace

// ---------------------------------------------------------------------------
// TimeGrid

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw Error(ErrorCode::InvalidArgument, "time grid needs at least 2 nodes");
  if (!all_finite(nodes_)) throw Error(ErrorCode::NonFinite, "time grid contains non-finite node");
  if (nodes_.front() != 0.0) throw Error(ErrorCode::InvalidArgument, "time grid must start at 0");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "time grid nodes must be strictly increasing");
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
  if (!(horizon > 0.0) || steps == 0)
    throw Error(ErrorCode::InvalidArgument, "uniform grid needs horizon > 0 and steps >= 1");
  std::vector<double> t(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) t[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
  t.back() = horizon;
  return TimeGrid(std::move(t));
}

double TimeGrid::max_step() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) m = std::max(m, step(i));
  return m;
}

std::size_t TimeGrid::index_at_or_before(double t) const noexcept {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  if (it == nodes_.begin()) return 0;
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

std::size_t TimeGrid::find(double t, double tol) const noexcept {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - tol);
  if (it != nodes_.end() && std::abs(*it - t) <= tol) return static_cast<std::size_t>(it - nodes_.begin());
  return nodes_.size();
}

TimeGrid TimeGrid::refined(std::span<const double> extra, double snap) const {
  std::vector<double> add(extra.begin(), extra.end());
  for (double e : add) {
    if (!std::isfinite(e) || e < 0.0 || e > horizon())
      throw Error(ErrorCode::InvalidArgument, "refinement point outside [0, horizon]");
  }
  std::sort(add.begin(), add.end());
  std::vector<double> out;
  out.reserve(nodes_.size() + add.size());
  std::size_t i = 0, j = 0;
  auto push = [&](double v) {
    if (out.empty() || v - out.back() > snap) out.push_back(v);
  };
  while (i < nodes_.size() || j < add.size()) {
    if (j == add.size() || (i < nodes_.size() && nodes_[i] <= add[j])) {
      // Existing nodes win over nearby additions so the horizon stays fixed.
      if (!out.empty() && nodes_[i] - out.back() <= snap) out.back() = nodes_[i];
      else out.push_back(nodes_[i]);
      ++i;
    } else {
      push(add[j]);
      ++j;
    }
  }
  return TimeGrid(std::move(out));
}

// ---------------------------------------------------------------------------
// LagladPath

LagladPath::LagladPath(GridPtr grid, std::vector<double> minus, std::vector<double> value,
                       std::vector<double> plus)
    : grid_(std::move(grid)), xm_(std::move(minus)), x_(std::move(value)), xp_(std::move(plus)) {
  if (!grid_) throw Error(ErrorCode::InvalidArgument, "path without grid");
  const std::size_t n = grid_->size();
  if (xm_.size() != n || x_.size() != n || xp_.size() != n)
    throw Error(ErrorCode::GridMismatch, "path length disagrees with grid");
  if (!all_finite(xm_) || !all_finite(x_) || !all_finite(xp_))
    throw Error(ErrorCode::NonFinite, "path contains non-finite value");
  if (xm_[0] != 0.0) throw Error(ErrorCode::Inconsistent, "left limit at time 0 must be 0");
}

LagladPath LagladPath::make(GridPtr grid, std::span<const Triple> triples, std::span<const Segment> segments) {
  if (!grid) throw Error(ErrorCode::InvalidArgument, "path without grid");
  const std::size_t n = grid->size();
  if (triples.size() != n) throw Error(ErrorCode::GridMismatch, "triple count disagrees with grid");
  if (!segments.empty() && segments.size() != n - 1)
    throw Error(ErrorCode::GridMismatch, "segment declaration count disagrees with grid");
  std::vector<double> xm(n), x(n), xp(n);
  for (std::size_t i = 0; i < n; ++i) {
    xm[i] = triples[i].minus;
    x[i] = triples[i].value;
    xp[i] = triples[i].plus;
  }
  if (!all_finite(xm) || !all_finite(x) || !all_finite(xp))
    throw Error(ErrorCode::NonFinite, "path contains non-finite value");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const bool flat = segments.empty() || segments[i] == Segment::Flat;
    if (flat && !near(xp[i], xm[i + 1]))
      throw Error(ErrorCode::Inconsistent, "right limit at node " + std::to_string(i) +
                                               " differs from left limit at the next node on a flat segment");
  }
  return LagladPath(std::move(grid), std::move(xm), std::move(x), std::move(xp));
}

LagladPath LagladPath::from_increments(GridPtr grid, double x0, std::span<const double> seg,
                                       std::span<const double> left, std::span<const double> right) {
  if (!grid) throw Error(ErrorCode::InvalidArgument, "path without grid");
  const std::size_t n = grid->size();
  if (seg.size() != n - 1 || left.size() != n || right.size() != n)
    throw Error(ErrorCode::GridMismatch, "increment arrays disagree with grid");
  std::vector<double> xm(n), x(n), xp(n);
  xm[0] = 0.0;
  x[0] = x0;
  xp[0] = x0 + right[0];
  for (std::size_t i = 1; i < n; ++i) {
    xm[i] = xp[i - 1] + seg[i - 1];
    x[i] = xm[i] + left[i];
    xp[i] = x[i] + right[i];
  }
  return LagladPath(std::move(grid), std::move(xm), std::move(x), std::move(xp));
}

LagladPath LagladPath::constant(GridPtr grid, double c) {
  if (!grid) throw Error(ErrorCode::InvalidArgument, "path without grid");
  const std::size_t n = grid->size();
  std::vector<double> xm(n, c), x(n, c), xp(n, c);
  xm[0] = 0.0;
  return LagladPath(std::move(grid), std::move(xm), std::move(x), std::move(xp));
}

LagladPath LagladPath::map(const std::function<double(double)>& f) const {
  const std::size_t n = size();
  std::vector<double> xm(n), x(n), xp(n);
  for (std::size_t i = 0; i < n; ++i) {
    xm[i] = i == 0 ? 0.0 : f(xm_[i]);
    x[i] = f(x_[i]);
    xp[i] = f(xp_[i]);
  }
  return LagladPath(grid_, std::move(xm), std::move(x), std::move(xp));
}

void require_same_grid(const LagladPath& a, const LagladPath& b) {
  if (a.grid_ptr() == b.grid_ptr()) return;
  const auto na = a.grid().nodes();
  const auto nb = b.grid().nodes();
  if (na.size() != nb.size() || !std::equal(na.begin(), na.end(), nb.begin()))
    throw Error(ErrorCode::GridMismatch, "paths live on different grids");
}

LagladPath combine(const LagladPath& a, const LagladPath& b, const std::function<double(double, double)>& op) {
  require_same_grid(a, b);
  const std::size_t n = a.size();
  std::vector<double> xm(n), x(n), xp(n);
  for (std::size_t i = 0; i < n; ++i) {
    xm[i] = i == 0 ? 0.0 : op(a.minus(i), b.minus(i));
    x[i] = op(a.value(i), b.value(i));
    xp[i] = op(a.plus(i), b.plus(i));
  }
  return LagladPath(a.grid_ptr(), std::move(xm), std::move(x), std::move(xp));
}

LagladPath operator+(const LagladPath& a, const LagladPath& b) {
  return combine(a, b, [](double u, double v) { return u + v; });
}
LagladPath operator-(const LagladPath& a, const LagladPath& b) {
  return combine(a, b, [](double u, double v) { return u - v; });
}
LagladPath operator*(const LagladPath& a, const LagladPath& b) {
  return combine(a, b, [](double u, double v) { return u * v; });
}
LagladPath affine(double alpha, double beta, const LagladPath& p) {
  return p.map([=](double v) { return alpha + beta * v; });
}

double sup_distance(const LagladPath& a, const LagladPath& b) {
  require_same_grid(a, b);
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0) d = std::max(d, std::abs(a.minus(i) - b.minus(i)));
    d = std::max(d, std::abs(a.value(i) - b.value(i)));
    d = std::max(d, std::abs(a.plus(i) - b.plus(i)));
  }
  return d;
}

IncreasingPath::IncreasingPath(LagladPath p, double slack) : path_(std::move(p)) {
  const std::size_t n = path_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool ok_node = (i == 0 || path_.minus(i) <= path_.value(i) + slack) && path_.value(i) <= path_.plus(i) + slack;
    const bool ok_seg = i + 1 == n || path_.plus(i) <= path_.minus(i + 1) + slack;
    if (!ok_node || !ok_seg)
      throw Error(ErrorCode::InvariantViolation, "path is not nondecreasing at node " + std::to_string(i));
  }
}

// ---------------------------------------------------------------------------
// Decomposition

FvSpec FvSpec::martingale(std::size_t nodes) {
  FvSpec s;
  s.ac.assign(nodes - 1, 0.0);
  s.ad.assign(nodes, 0.0);
  return s;
}

PathDecomposition decompose(const LagladPath& path, const FvSpec& spec) {
  const std::size_t n = path.size();
  const auto share = [](const std::vector<double>& v, std::size_t len, const char* what) {
    if (!v.empty() && v.size() != len)
      throw Error(ErrorCode::IncompleteSpec, std::string(what) + " has the wrong length");
    if (!all_finite(v)) throw Error(ErrorCode::NonFinite, std::string(what) + " is not finite");
  };
  share(spec.ac, n - 1, "A^c shares");
  share(spec.md_drift, n - 1, "drift shares");
  share(spec.ad, n, "A^d shares");
  if (!spec.ad.empty() && spec.ad[0] != 0.0)
    throw Error(ErrorCode::InvariantViolation, "A^d cannot jump at time 0");

  PathDecomposition d;
  d.x_ = path;
  d.mc_seg_.resize(n - 1);
  d.md_seg_.resize(n - 1);
  d.ac_seg_.resize(n - 1);
  d.m_left_.resize(n);
  d.ad_left_.resize(n);
  d.ag_right_.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double c = path.segment_increment(i);
    const double ac = spec.ac.empty() ? 0.0 : spec.ac[i];
    const double md = spec.md_drift.empty() ? 0.0 : spec.md_drift[i];
    d.ac_seg_[i] = ac;
    d.md_seg_[i] = md;
    d.mc_seg_[i] = c - ac - md;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double ad = spec.ad.empty() ? 0.0 : spec.ad[i];
    d.ad_left_[i] = ad;
    d.m_left_[i] = path.left_jump(i) - ad;
    d.ag_right_[i] = path.right_jump(i);
  }
  return d;
}

PathDecomposition decompose(const LagladPath& path, const FvAssignment& a) {
  const std::size_t n = path.size();
  if (a.segments.size() != n - 1 || a.left.size() != n || a.right.size() != n)
    throw Error(ErrorCode::IncompleteSpec, "assignment does not cover every increment");
  FvSpec s;
  s.ac.assign(n - 1, 0.0);
  s.md_drift.assign(n - 1, 0.0);
  s.ad.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double c = path.segment_increment(i);
    switch (a.segments[i]) {
      case Part::Unassigned:
        if (c != 0.0) throw Error(ErrorCode::IncompleteSpec, "unassigned continuous increment on segment " + std::to_string(i));
        break;
      case Part::Martingale:
        if (a.martingale_drift_is_fv) s.md_drift[i] = c;
        break;
      case Part::Ac: s.ac[i] = c; break;
      case Part::Ad:
      case Part::Ag:
        throw Error(ErrorCode::InvariantViolation, "continuous increment assigned to a jump part");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double dl = path.left_jump(i);
    switch (a.left[i]) {
      case Part::Unassigned:
        if (dl != 0.0) throw Error(ErrorCode::IncompleteSpec, "unassigned left jump at node " + std::to_string(i));
        break;
      case Part::Martingale: break;
      case Part::Ad:
        if (i > 0) s.ad[i] = dl;
        break;
      case Part::Ac:
      case Part::Ag:
        throw Error(ErrorCode::InvariantViolation, "left jump assigned to A^c or A^g at node " + std::to_string(i));
    }
    const double dr = path.right_jump(i);
    switch (a.right[i]) {
      case Part::Unassigned:
        if (dr != 0.0) throw Error(ErrorCode::IncompleteSpec, "unassigned right jump at node " + std::to_string(i));
        break;
      case Part::Ag: break;
      default:
        throw Error(ErrorCode::InvariantViolation, "right jump must belong to A^g at node " + std::to_string(i));
    }
  }
  return decompose(path, s);
}

namespace {
std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }
}  // namespace

LagladPath PathDecomposition::xc() const {
  std::vector<double> seg(size() - 1);
  for (std::size_t i = 0; i + 1 < size(); ++i) seg[i] = x_.segment_increment(i);
  return LagladPath::from_increments(grid_ptr(), x0(), seg, zeros(size()), zeros(size()));
}

LagladPath PathDecomposition::xd() const {
  std::vector<double> left(size());
  for (std::size_t i = 0; i < size(); ++i) left[i] = x_.left_jump(i);
  return LagladPath::from_increments(grid_ptr(), 0.0, zeros(size() - 1), left, zeros(size()));
}

LagladPath PathDecomposition::xg() const {
  std::vector<double> right(size());
  for (std::size_t i = 0; i < size(); ++i) right[i] = x_.right_jump(i);
  return LagladPath::from_increments(grid_ptr(), 0.0, zeros(size() - 1), zeros(size()), right);
}

LagladPath PathDecomposition::martingale() const {
  std::vector<double> seg(size() - 1);
  for (std::size_t i = 0; i + 1 < size(); ++i) seg[i] = mc_seg_[i] + md_seg_[i];
  return LagladPath::from_increments(grid_ptr(), 0.0, seg, m_left_, zeros(size()));
}

LagladPath PathDecomposition::continuous_martingale() const {
  return LagladPath::from_increments(grid_ptr(), 0.0, mc_seg_, zeros(size()), zeros(size()));
}

LagladPath PathDecomposition::fv() const {
  return LagladPath::from_increments(grid_ptr(), 0.0, ac_seg_, ad_left_, ag_right_);
}

LagladPath PathDecomposition::ac() const {
  return LagladPath::from_increments(grid_ptr(), 0.0, ac_seg_, zeros(size()), zeros(size()));
}

LagladPath PathDecomposition::ad() const {
  return LagladPath::from_increments(grid_ptr(), 0.0, zeros(size() - 1), ad_left_, zeros(size()));
}

LagladPath PathDecomposition::ag() const {
  return LagladPath::from_increments(grid_ptr(), 0.0, zeros(size() - 1), zeros(size()), ag_right_);
}

// ---------------------------------------------------------------------------
// Functionals

IncreasingPath running_sup(const LagladPath& p) {
  const std::size_t n = p.size();
  std::vector<double> sm(n), sv(n), sp(n);
  sm[0] = 0.0;
  sv[0] = p.value(0);
  sp[0] = std::max(sv[0], p.plus(0));
  for (std::size_t i = 1; i < n; ++i) {
    sm[i] = std::max(sp[i - 1], p.minus(i));
    sv[i] = std::max(sm[i], p.value(i));
    sp[i] = std::max(sv[i], p.plus(i));
  }
  LagladPath out(p.grid_ptr(), std::move(sm), std::move(sv), std::move(sp));
  return IncreasingPath(std::move(out));
}

double total_variation(const LagladPath& p) {
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    tv += std::abs(p.left_jump(i)) + std::abs(p.right_jump(i));
    if (i + 1 < p.size()) tv += std::abs(p.segment_increment(i));
  }
  return tv;
}

void write_csv(std::ostream& os, const LagladPath& p) {
  os << "t,x_minus,x,x_plus\n";
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < p.size(); ++i)
    os << p.grid()[i] << ',' << p.minus(i) << ',' << p.value(i) << ',' << p.plus(i) << '\n';
  os.precision(old);
}

LagladPath read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::InvalidArgument, "empty path CSV");
  std::vector<double> t, xm, x, xp;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double v[4];
    char comma = 0;
    row >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3];
    if (!row) throw Error(ErrorCode::InvalidArgument, "malformed path CSV row: " + line);
    t.push_back(v[0]);
    xm.push_back(v[1]);
    x.push_back(v[2]);
    xp.push_back(v[3]);
  }
  auto grid = share(TimeGrid(std::move(t)));
  return LagladPath(std::move(grid), std::move(xm), std::move(x), std::move(xp));
}

}  // namespace laglad

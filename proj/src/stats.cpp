#include "laglad/stats.hpp"

#include <cmath>

#include "laglad/errors.hpp"

namespace laglad {

MeanStats mean_se(const std::vector<double>& v) {
  MeanStats s;
  s.n = v.size();
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.se = std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
  return s;
}

PairedStats paired(const std::vector<double>& lhs, const std::vector<double>& rhs) {
  if (lhs.size() != rhs.size()) throw Error(ErrorCode::InvalidArgument, "paired columns differ in length");
  std::vector<double> d(lhs.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = lhs[i] - rhs[i];
  const MeanStats m = mean_se(d);
  PairedStats p;
  p.n = m.n;
  p.lhs_mean = mean_se(lhs).mean;
  p.rhs_mean = mean_se(rhs).mean;
  p.diff_mean = m.mean;
  p.se = m.se;
  p.z = m.se > 0.0 ? m.mean / m.se : (m.mean == 0.0 ? 0.0 : (m.mean > 0 ? INFINITY : -INFINITY));
  return p;
}

double fraction_within(const std::vector<double>& v, double bound) {
  if (v.empty()) return 1.0;
  std::size_t k = 0;
  for (double x : v)
    if (x <= bound) ++k;
  return static_cast<double>(k) / static_cast<double>(v.size());
}

}  // namespace laglad

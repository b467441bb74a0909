#pragma once

#include <cstddef>
#include <vector>

namespace laglad {

struct MeanStats {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Sample mean and its standard error, accumulated in index order.
MeanStats mean_se(const std::vector<double>& v);

/// Comparison of two per-replication columns through their paired
/// differences; z = mean(lhs - rhs) / se.
struct PairedStats {
  double lhs_mean = 0.0;
  double rhs_mean = 0.0;
  double diff_mean = 0.0;
  double se = 0.0;
  double z = 0.0;
  std::size_t n = 0;
};

PairedStats paired(const std::vector<double>& lhs, const std::vector<double>& rhs);

/// Fraction of entries <= bound.
double fraction_within(const std::vector<double>& v, double bound);

}  // namespace laglad

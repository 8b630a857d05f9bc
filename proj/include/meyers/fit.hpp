#pragma once

#include <utility>
#include <vector>

namespace meyers {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int samples = 0;
};

/// Least squares line through (log scale, log value). Throws
/// std::invalid_argument for fewer than 3 pairs or nonpositive entries.
FitResult fit_loglog(const std::vector<std::pair<double, double>>& pairs);

/// max / min of positive values; +inf when the minimum is not positive.
double spread(const std::vector<double>& values);

}  // namespace meyers

#pragma once

#include <vector>

namespace nlsdyn {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
  int points = 0;
};

// Least-squares line through (log x, log y). Requires >= 2 positive pairs.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nlsdyn

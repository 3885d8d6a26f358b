#include "nlsdyn/fit.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nlsdyn/error.hpp"

namespace nlsdyn {

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw UsageError("fit_loglog: size mismatch");
  if (x.size() < 2) throw UsageError("fit_loglog: need at least two points");
  const int n = static_cast<int>(x.size());
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw UsageError(fmt::format("fit_loglog: non-positive value at index {} (x={}, y={})", i, x[i], y[i]));
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw UsageError("fit_loglog: all x values coincide");
  LogLogFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ssr += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  f.slope_stderr = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return f;
}

}  // namespace nlsdyn

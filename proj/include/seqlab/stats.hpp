#pragma once
//---------------------------------------------------------------------------
// stats.hpp - small statistics helpers: Wilson score interval, least-squares
// line fits with confidence information, geometric-decay diagnostics.
//---------------------------------------------------------------------------

#include <cmath>
#include <cstdint>
#include <vector>

#include "seqlab/util.hpp"

namespace seqlab {

struct WilsonInterval {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial proportion (default z = 1.96 for a
// 95% interval).  The lower bound is strictly positive iff successes >= 1.
inline WilsonInterval wilson_interval(std::int64_t successes,
                                      std::int64_t n,
                                      double z = 1.959963984540054) {
  SEQLAB_CHECK(n > 0 && successes >= 0 && successes <= n,
               "wilson_interval: bad counts");
  double p = static_cast<double>(successes) / static_cast<double>(n);
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  WilsonInterval w;
  w.point = p;
  w.lo = center - half;
  w.hi = center + half;
  if (w.lo < 0.0) w.lo = 0.0;
  if (w.hi > 1.0) w.hi = 1.0;
  return w;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double slope_lo95 = 0.0;  // slope -/+ t * stderr with a normal z fallback
  double slope_hi95 = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares y = intercept + slope * x.  For n > 2 the 95%
// interval uses Student t quantiles (tabulated for small df, normal beyond);
// for n == 2 the interval degenerates to the exact slope.
inline LineFit ols_fit(const std::vector<double>& xs,
                       const std::vector<double>& ys) {
  SEQLAB_CHECK(xs.size() == ys.size() && xs.size() >= 2, "ols_fit: need n >= 2");
  std::size_t n = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  SEQLAB_CHECK(sxx > 0, "ols_fit: degenerate x values");
  LineFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = ys[i] - (f.intercept + f.slope * xs[i]);
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / (n - 2) / sxx);
    static const double t95[] = {0,     0,     0,     12.706, 4.303, 3.182,
                                 2.776, 2.571, 2.447, 2.365,  2.306, 2.262};
    double t = (n <= 11) ? t95[n] : 1.959963984540054 + 4.0 / (n - 2.0);
    f.slope_lo95 = f.slope - t * f.slope_stderr;
    f.slope_hi95 = f.slope + t * f.slope_stderr;
  } else {
    f.slope_lo95 = f.slope_hi95 = f.slope;
  }
  return f;
}

// Fits log(terms) against the index and reports exp(slope): the common
// ratio of the best geometric approximation.  Terms must be positive.
inline double fitted_geometric_ratio(const std::vector<double>& terms) {
  SEQLAB_CHECK(terms.size() >= 2, "fitted_geometric_ratio: need >= 2 terms");
  std::vector<double> xs(terms.size()), ys(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    SEQLAB_CHECK(terms[i] > 0, "fitted_geometric_ratio: nonpositive term");
    xs[i] = static_cast<double>(i);
    ys[i] = std::log(terms[i]);
  }
  return std::exp(ols_fit(xs, ys).slope);
}

}  // namespace seqlab

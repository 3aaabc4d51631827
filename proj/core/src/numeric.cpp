#include "cpoly/numeric.hpp"

#include <algorithm>

#include "cpoly/error.hpp"

namespace cpoly {

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value();
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  CompensatedSum s;
  for (double x : xs) s.add(std::exp(x - m));
  return m + std::log(s.value());
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y,
                   std::span<const double> sigma) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2 || (!sigma.empty() && sigma.size() != n)) {
    throw InvalidArgument("fit_line: need at least two matching points");
  }
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = sigma.empty() ? 1.0 : 1.0 / (sigma[i] * sigma[i]);
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  if (det == 0.0) throw InvalidArgument("fit_line: degenerate abscissae");
  LinearFit fit;
  fit.slope = (sw * sxy - sx * sy) / det;
  fit.intercept = (sxx * sy - sx * sxy) / det;
  double scale = 1.0;
  if (sigma.empty()) {
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    scale = n > 2 ? rss / static_cast<double>(n - 2) : 0.0;
  }
  fit.slope_se = std::sqrt(scale * sw / det);
  fit.intercept_se = std::sqrt(scale * sxx / det);
  return fit;
}

MeanSe mean_se(std::span<const double> xs) {
  MeanSe r;
  if (xs.empty()) return r;
  CompensatedSum s;
  for (double x : xs) s.add(x);
  r.mean = s.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) return r;
  CompensatedSum v;
  for (double x : xs) v.add((x - r.mean) * (x - r.mean));
  const double n = static_cast<double>(xs.size());
  r.se = std::sqrt(v.value() / (n - 1) / n);
  return r;
}

}  // namespace cpoly

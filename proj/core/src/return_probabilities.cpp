#include <cmath>
#include <vector>

#include "cpoly/lattice_walk.hpp"
#include "cpoly/numeric.hpp"

namespace cpoly {

namespace {

// P(S_r = 0) for the one-dimensional walk, by convolution over [-n, n].
std::vector<double> one_dimensional_returns(int n_max) {
  const auto n = static_cast<std::size_t>(n_max);
  std::vector<double> out(n + 1, 0.0);
  std::vector<double> cur(2 * n + 3, 0.0);
  std::vector<double> nxt(2 * n + 3, 0.0);
  const std::size_t origin = n + 1;
  cur[origin] = 1.0;
  out[0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r) {
    // After r steps the support is origin +- r with parity r.
    const std::size_t lo = origin - r;
    const std::size_t hi = origin + r;
    for (std::size_t x = lo; x <= hi; x += 2) nxt[x] = 0.5 * (cur[x - 1] + cur[x + 1]);
    for (std::size_t x = lo - 1; x <= hi + 1; x += 2) cur[x] = 0.0;
    std::swap(cur, nxt);
    out[r] = cur[origin];
  }
  return out;
}

}  // namespace

std::vector<double> return_probabilities(int dim, int n_max) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("return_probabilities: bad dimension");
  if (n_max < 0) throw InvalidArgument("return_probabilities: n_max must be >= 0");
  const std::vector<double> line = one_dimensional_returns(n_max);
  std::vector<double> p = line;
  const auto n = static_cast<std::size_t>(n_max);
  for (int j = 2; j <= dim; ++j) {
    // Each step lands on the new axis with probability 1/j; row[k] is
    // P(Binomial(r, 1/j) = k), advanced by Pascal's rule.
    const double hit = 1.0 / j;
    const double miss = 1.0 - hit;
    std::vector<double> row(n + 2, 0.0);
    row[0] = 1.0;
    std::vector<double> next(n + 1, 0.0);
    next[0] = 1.0;
    for (std::size_t r = 1; r <= n; ++r) {
      for (std::size_t k = r; k >= 1; --k) row[k] = miss * row[k] + hit * row[k - 1];
      row[0] *= miss;
      if (r % 2 == 1) {
        next[r] = 0.0;
        continue;
      }
      CompensatedSum s;
      for (std::size_t k = 0; k <= r; k += 2) s.add(row[k] * line[k] * p[r - k]);
      next[r] = s.value();
    }
    p = std::move(next);
  }
  return p;
}

std::vector<double> return_probabilities_box(int dim, int n_max, double cell_budget) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("return_probabilities_box: bad dimension");
  if (n_max < 0) throw InvalidArgument("return_probabilities_box: n_max must be >= 0");
  const double cells = std::pow(2.0 * n_max + 1.0, dim);
  if (cells > cell_budget) {
    throw BudgetExceeded("return-probability box DP", cells, cell_budget);
  }
  OccupancyBox geometry(dim, n_max);
  const auto total = static_cast<std::size_t>(cells);
  std::vector<double> cur(total, 0.0);
  std::vector<double> nxt(total, 0.0);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  cur[geometry.origin()] = 1.0;
  out[0] = 1.0;
  const double w = 1.0 / (2.0 * dim);
  const std::size_t width = 2 * static_cast<std::size_t>(n_max) + 1;
  for (int r = 1; r <= n_max; ++r) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::size_t i = 0; i < total; ++i) {
      const double mass = cur[i];
      if (mass == 0.0) continue;
      std::size_t rest = i;
      std::size_t stride = 1;
      for (int a = 0; a < dim; ++a) {
        const std::size_t coord = rest % width;
        rest /= width;
        if (coord + 1 < width) nxt[i + stride] += w * mass;
        if (coord > 0) nxt[i - stride] += w * mass;
        stride *= width;
      }
    }
    std::swap(cur, nxt);
    out[static_cast<std::size_t>(r)] = cur[geometry.origin()];
  }
  return out;
}

}  // namespace cpoly

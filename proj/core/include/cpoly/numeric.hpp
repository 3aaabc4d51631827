#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace cpoly {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Pairwise (cascade) summation; result is independent of thread layout
/// as long as the input order is fixed.
double pairwise_sum(std::span<const double> xs);

/// Streaming log-sum-exp: accumulates log(sum_i exp(x_i)) without overflow.
class LogSumExp {
 public:
  void add(double log_x) {
    if (log_x == -std::numeric_limits<double>::infinity()) return;
    if (log_x <= max_) {
      scaled_ += std::exp(log_x - max_);
    } else {
      scaled_ = scaled_ * std::exp(max_ - log_x) + 1.0;
      max_ = log_x;
    }
  }
  void merge(const LogSumExp& other) {
    if (other.max_ == -std::numeric_limits<double>::infinity()) return;
    add_scaled(other.max_, other.scaled_);
  }
  double value() const {
    if (max_ == -std::numeric_limits<double>::infinity()) return max_;
    return max_ + std::log(scaled_);
  }

 private:
  void add_scaled(double log_m, double s) {
    if (log_m <= max_) {
      scaled_ += s * std::exp(log_m - max_);
    } else {
      scaled_ = scaled_ * std::exp(max_ - log_m) + s;
      max_ = log_m;
    }
  }
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_ = 0.0;
};

/// log(sum exp(x)) over a span.
double log_sum_exp(std::span<const double> xs);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_se = 0.0;
  double slope_se = 0.0;
};

/// Weighted least squares y = a + b x. With empty `sigma`, ordinary least
/// squares and standard errors from the residual scatter.
LinearFit fit_line(std::span<const double> x, std::span<const double> y,
                   std::span<const double> sigma = {});

/// Mean and standard error of the mean.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_se(std::span<const double> xs);

}  // namespace cpoly

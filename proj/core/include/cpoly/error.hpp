#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cpoly {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An exact enumeration or DP would exceed its configured budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, double required, double budget)
      : Error(what + " (required " + std::to_string(required) + ", budget " +
              std::to_string(budget) + ")"),
        required_(required),
        budget_(budget) {}
  double required() const { return required_; }
  double budget() const { return budget_; }

 private:
  double required_;
  double budget_;
};

/// Rejection sampling gave up after its try budget.
class AcceptanceTooLow : public Error {
 public:
  AcceptanceTooLow(std::uint64_t tries, std::uint64_t accepted)
      : Error("acceptance-too-low: " + std::to_string(accepted) + " accepted in " +
              std::to_string(tries) + " tries"),
        tries_(tries),
        accepted_(accepted) {}
  std::uint64_t tries() const { return tries_; }
  double empirical_rate() const {
    return tries_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(tries_);
  }

 private:
  std::uint64_t tries_;
  std::uint64_t accepted_;
};

/// Importance weights degenerated (effective sample size collapsed).
class EssCollapse : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to reach its requested accuracy.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what + " (achieved error " + std::to_string(achieved) + ")"), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace cpoly

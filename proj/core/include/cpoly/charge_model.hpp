#pragma once

// Charge laws with E[w] = 0 and E[w^2] = 1, their exponential tilts, and
// the law of the site charge Omega_l = w_1 + ... + w_l.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cpoly/rng.hpp"

namespace cpoly {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

enum class LawKind { kRademacher, kGaussian, kThreePoint, kFiniteLattice, kUniform };

class ChargeLaw {
 public:
  /// +-1 with probability 1/2 each.
  static ChargeLaw rademacher();
  /// Standard normal.
  static ChargeLaw gaussian();
  /// Values -N, 0, 2N with weights 1/(3N^2), 1 - 1/(2N^2), 1/(6N^2); N >= 1.
  static ChargeLaw three_point(int n);
  /// Finite support given as exact rationals. Must be normalized, have
  /// distinct values, mean 0 and variance 1.
  static ChargeLaw finite_lattice(std::vector<Rational> values, std::vector<Rational> probs);
  /// Uniform on [-sqrt(3), sqrt(3)]: a bounded density, non-lattice.
  static ChargeLaw uniform();

  LawKind kind() const { return kind_; }
  /// Stable identifier, e.g. "three_point(4)".
  const std::string& id() const { return id_; }

  /// Raw moment E[w^k] for k = 0..6.
  double moment(int k) const;

  bool is_lattice() const { return kind_ != LawKind::kGaussian && kind_ != LawKind::kUniform; }
  bool has_density() const { return !is_lattice(); }
  bool is_symmetric() const { return symmetric_; }

  /// Finite-support laws: values, probabilities, and the values in units of
  /// the lattice span (exact integers).
  std::span<const double> support() const { return support_; }
  std::span<const double> probabilities() const { return probs_; }
  std::span<const std::int64_t> support_units() const { return units_; }
  double span_value() const { return span_; }
  int three_point_n() const { return three_point_n_; }

  /// Density laws: pdf and characteristic function E[exp(i z w)] at complex z.
  double density(double x) const;
  std::complex<double> characteristic(std::complex<double> z) const;
  double density_sup() const;

  /// Largest |w| on the support; infinite for the Gaussian.
  double max_abs() const;

 private:
  ChargeLaw() = default;
  void finalize_moments();

  LawKind kind_ = LawKind::kGaussian;
  std::string id_;
  std::vector<double> support_;
  std::vector<double> probs_;
  std::vector<std::int64_t> units_;
  double span_ = 0.0;
  int three_point_n_ = 0;
  bool symmetric_ = false;
  std::array<double, 7> moments_{};
};

struct TiltParams {
  double delta = 0.0;
  double beta = 0.0;
  void validate() const;
};

/// M(delta) = E[exp(delta w)].
double mgf(const ChargeLaw& law, double delta);
/// log M(delta), computed without overflow.
double log_mgf(const ChargeLaw& law, double delta);
/// f(delta) = -log M(delta) <= 0.
double annealed_exponent(const ChargeLaw& law, double delta);

struct TiltedMoments {
  double mean = 0.0;      // m(delta)
  double variance = 1.0;  // v(delta)
};
TiltedMoments tilted_moments(const ChargeLaw& law, double delta);

/// T = sup{t > 0 : P(w in tZ) = 1}; 0 for laws with a density.
double lattice_span(const ChargeLaw& law);

/// Law of Omega_l.
class OmegaSumLaw {
 public:
  enum class Representation { kLattice, kGaussian, kDensityGrid };

  static OmegaSumLaw lattice(std::int64_t ell, double unit, std::int64_t first_unit,
                             std::vector<double> log_probs);
  static OmegaSumLaw gaussian(std::int64_t ell, double mean = 0.0, double variance = -1.0);
  static OmegaSumLaw density_grid(std::int64_t ell, double x0, double h, std::vector<double> values);

  Representation representation() const { return rep_; }
  std::int64_t ell() const { return ell_; }

  // Lattice: mass at value (first_unit + k) * unit is exp(log_probs[k]).
  double unit() const { return unit_; }
  std::int64_t first_unit() const { return first_unit_; }
  std::span<const double> log_probs() const { return log_probs_; }
  double value_at(std::size_t k) const {
    return static_cast<double>(first_unit_ + static_cast<std::int64_t>(k)) * unit_;
  }

  // Gaussian.
  double mean() const { return mean_; }
  double variance() const { return variance_; }

  // Density grid: values[k] is the density at x0 + k h.
  double x0() const { return x0_; }
  double h() const { return h_; }
  std::span<const double> values() const { return values_; }

  double total_mass() const;
  /// E[Omega_l^k] from this representation.
  double moment(int k) const;
  /// log E[exp(a s + b s^2)] over this law (b <= 0 or bounded support).
  double log_expect_exp_quadratic(double a, double b) const;

 private:
  Representation rep_ = Representation::kLattice;
  std::int64_t ell_ = 0;
  double unit_ = 1.0;
  std::int64_t first_unit_ = 0;
  std::vector<double> log_probs_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double x0_ = 0.0;
  double h_ = 0.0;
  std::vector<double> values_;
};

/// Law of Omega_l under P (delta = 0) or under the tilted law P^delta.
/// Lattice laws: exact log-space convolution. Gaussian: analytic.
/// Uniform: density grid from the characteristic function (FFT), half-width
/// 12 standard deviations and at least 2^14 points.
OmegaSumLaw omega_sum_law(const ChargeLaw& law, std::int64_t ell, double tilt = 0.0,
                          std::size_t grid_points = 1u << 14);

/// Exact lattice laws of Omega_0 .. Omega_L in one pass (lattice laws only).
std::vector<OmegaSumLaw> omega_sum_lattice_sequence(const ChargeLaw& law, std::int64_t max_ell,
                                                    double tilt = 0.0);

/// Calls visit on the laws of Omega_0 .. Omega_L in order, keeping only
/// the current one in memory (lattice laws only).
void for_each_lattice_sum(const ChargeLaw& law, std::int64_t max_ell, double tilt,
                          const std::function<void(const OmegaSumLaw&)>& visit);

/// E[Omega_l^k] for k in 0..6 from the moment expansion in m_2..m_6.
double omega_sum_moment(const ChargeLaw& law, std::int64_t ell, int k);

/// n i.i.d. draws from the tilted marginal P^delta.
std::vector<double> sample_charges(const ChargeLaw& law, double delta, std::size_t n, Stream& stream);

/// Draws from the tilted marginal P^delta with the CDF precomputed.
class TiltedChargeSampler {
 public:
  TiltedChargeSampler(const ChargeLaw& law, double delta);
  double operator()(Stream& stream) const;

 private:
  const ChargeLaw* law_;
  double delta_;
  std::vector<double> cdf_;
};

}  // namespace cpoly

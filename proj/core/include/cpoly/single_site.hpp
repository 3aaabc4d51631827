#pragma once

// Single-site partition functions
//   g*(l) = E[exp(delta Omega_l - beta Omega_l^2)]
//   g(l)  = E^delta[exp(-beta Omega_l^2)]
// and numerical checks of the bounds they satisfy.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpoly/charge_model.hpp"

namespace cpoly {

enum class EvalMode { kClosedForm, kExactConvolution, kQuadrature, kMonteCarlo };

std::string to_string(EvalMode mode);
EvalMode parse_eval_mode(const std::string& name);

/// Best exact mode for a law: closed form (Gaussian), exact convolution
/// (lattice), quadrature (other densities).
EvalMode default_mode(const ChargeLaw& law);

struct McOptions {
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0;
};

struct SiteValue {
  double log_value = 0.0;
  /// Absolute error bound on log_value (statistical standard error for MC).
  double error = 0.0;
  EvalMode mode = EvalMode::kClosedForm;
};

/// log g*(l). Throws InvalidArgument if `mode` does not apply to the law and
/// ConvergenceError if quadrature cannot reach 1e-10 relative.
SiteValue log_g_star(const ChargeLaw& law, TiltParams tilt, std::int64_t ell,
                     std::optional<EvalMode> mode = std::nullopt, McOptions mc = {});
double g_star(const ChargeLaw& law, TiltParams tilt, std::int64_t ell,
              std::optional<EvalMode> mode = std::nullopt, McOptions mc = {});

/// log g(l) under the tilted law.
SiteValue log_g_tilted(const ChargeLaw& law, TiltParams tilt, std::int64_t ell,
                       std::optional<EvalMode> mode = std::nullopt, McOptions mc = {});

/// Cached log g*(l) (or log g(l)) for l = 0..L.
class SingleSiteTable {
 public:
  enum class Kind { kGStar, kGTilted };

  static SingleSiteTable build(const ChargeLaw& law, TiltParams tilt, std::int64_t max_ell,
                               Kind kind = Kind::kGStar, std::optional<EvalMode> mode = std::nullopt,
                               unsigned shards = 1, McOptions mc = {});

  const std::string& law_id() const { return law_id_; }
  TiltParams tilt() const { return tilt_; }
  Kind kind() const { return kind_; }
  std::int64_t max_ell() const { return static_cast<std::int64_t>(log_values_.size()) - 1; }

  double log_value(std::int64_t ell) const { return log_values_.at(static_cast<std::size_t>(ell)); }
  const std::vector<double>& log_values() const { return log_values_; }
  EvalMode mode(std::int64_t ell) const { return modes_.at(static_cast<std::size_t>(ell)); }
  double error(std::int64_t ell) const { return errors_.at(static_cast<std::size_t>(ell)); }

  /// Columns: ell,log_g_star,mode,err_bound
  std::string to_csv() const;

 private:
  std::string law_id_;
  TiltParams tilt_;
  Kind kind_ = Kind::kGStar;
  std::vector<double> log_values_;
  std::vector<EvalMode> modes_;
  std::vector<double> errors_;
};

struct GaussianSplit {
  double attractive = 0.0;  // 1/2 log(1 + 2 beta l)
  double repulsive = 0.0;   // -delta^2 l / (2 (1 + 2 beta l))
};

/// -log g* = attractive + repulsive for the Gaussian law.
GaussianSplit g_attractive_repulsive_split(double delta, double beta, std::int64_t ell);

// ---------------------------------------------------------------------------
// Bound checks.

struct BoundReport {
  std::string name;
  std::map<std::string, double> parameters;
  std::string grid;
  double worst_margin = 0.0;
  bool pass = false;
  std::optional<std::map<std::string, double>> offending;
  std::map<std::string, double> fitted;
  std::vector<std::string> notes;
};

/// g*_{delta, delta^2/2}(l) <= 1 for l <= max_ell over the delta grid.
/// Margin is 1 - g*. Throws InvalidArgument for asymmetric laws.
BoundReport check_symmetric_unit_bound(const ChargeLaw& law, const std::vector<double>& deltas,
                                       std::int64_t max_ell, unsigned shards = 1);

/// beta(delta) = delta^2/2 - m3 delta^3/3 - eps.
double small_delta_beta(const ChargeLaw& law, double delta, double eps);
/// k1 = m3^2/3 - m4/12 + 1/4.
double k1_constant(const ChargeLaw& law);
/// eps chosen so that eps + k1 delta^4 = (1 - eta) delta^4 / 4.
double eps_quartic_preset(const ChargeLaw& law, double delta, double eta);
/// eps chosen so that eps + k1 delta^4 = (1 + slack) f_wsaw(u), for a supplied
/// estimate of f_wsaw at u = (1 + eta) delta^4 / 4.
double eps_wsaw_preset(const ChargeLaw& law, double delta, double slack, double f_wsaw);

/// Two-regime check at beta(delta): quadratic sandwich for delta^2 l <= a,
/// and 1/(c0 sqrt(1 + delta^2 l)) <= g* <= min(1, c0/sqrt(1 + delta^2 l))
/// for a < delta^2 l, l <= max_ell. Reports k1, the fitted c0 and the
/// largest a for which the quadratic sandwich holds.
BoundReport check_small_delta_regimes(const ChargeLaw& law, double delta, double eta, double eps,
                                      double a = 1.0, double delta0 = 0.1, std::int64_t max_ell = 4000);

/// min over 1 <= m <= n, m + n <= L of log g*(m+n) - log g*(m) - log g*(n).
BoundReport check_superadditivity(const ChargeLaw& law, TiltParams tilt, std::int64_t max_ell);

/// Both regimes of the small-beta bound on g(l) for l <= max_ell. Regime 1
/// (beta l^2 <= a) is checked pointwise; for regime 2 the largest c_delta
/// with g(l) <= exp(-c min(beta l^2, l)) is fitted.
BoundReport check_gdb_smallbeta(const ChargeLaw& law, TiltParams tilt, double eta, double a = 0.1,
                                double beta0 = 0.01, std::int64_t max_ell = 1000);

/// Envelope c0 l^-1/2 <= inf_{0<=x<=eps0} f_l(x) <= sup f_l <= c1 l^-1/2 over
/// l in [1, max_ell]; fits c0 and c1 for the given eps0.
BoundReport density_envelope_check(const ChargeLaw& law, std::int64_t max_ell, double eps0 = 1.0);

/// Gaussian law at large delta with beta = delta^2 / (4 log delta): fits
/// the smallest c for which
///   (1/c) eta (delta/beta) e^{(1-eta) delta^2/4beta} l^-1/2 <= g*(l)
///     <= c e^{delta^2/4beta} (delta/beta) l^-1/2
/// for l in [1, max_ell].
BoundReport large_delta_envelope_check(double delta, double eta, std::int64_t max_ell = 1000);

}  // namespace cpoly

#include "cpoly/single_site.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cpoly/error.hpp"
#include "cpoly/numeric.hpp"
#include "cpoly/parallel.hpp"

namespace cpoly {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kQuadTol = 1e-10;

bool mode_applies(const ChargeLaw& law, EvalMode mode) {
  switch (mode) {
    case EvalMode::kClosedForm:
      return law.kind() == LawKind::kGaussian;
    case EvalMode::kExactConvolution:
      return law.is_lattice();
    case EvalMode::kQuadrature:
      return law.has_density();
    case EvalMode::kMonteCarlo:
      return true;
  }
  return false;
}

EvalMode resolve(const ChargeLaw& law, std::optional<EvalMode> mode) {
  const EvalMode m = mode.value_or(default_mode(law));
  if (!mode_applies(law, m)) {
    throw InvalidArgument("evaluation mode " + to_string(m) + " does not apply to law " + law.id());
  }
  return m;
}

void check_inputs(TiltParams tilt, std::int64_t ell) {
  tilt.validate();
  if (ell < 0) throw InvalidArgument("ell must be >= 0");
}

// log of int exp(a s + b s^2) N(s; mu, v) ds by the trapezoid rule on
// +-40 widths around the peak, doubling until two grids agree to 1e-13.
SiteValue gaussian_quadrature(double a, double b, double mu, double v) {
  const double curvature = 1.0 / v - 2.0 * b;
  if (!(curvature > 0)) throw InvalidArgument("quadrature: integrand is not integrable");
  const double peak = (a + mu / v) / curvature;
  const double width = 1.0 / std::sqrt(curvature);
  auto phi = [&](double s) {
    const double z = s - mu;
    return a * s + b * s * s - 0.5 * z * z / v - 0.5 * std::log(2.0 * std::numbers::pi * v);
  };
  const double top = phi(peak);
  const double lo = peak - 40.0 * width;
  const double span = 80.0 * width;
  double prev = std::numeric_limits<double>::quiet_NaN();
  double diff = std::numeric_limits<double>::infinity();
  for (std::size_t n = 64; n <= (1u << 20); n *= 2) {
    const double h = span / static_cast<double>(n);
    CompensatedSum s;
    for (std::size_t i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      s.add(w * std::exp(phi(lo + static_cast<double>(i) * h) - top));
    }
    const double value = top + std::log(s.value() * h);
    if (!std::isnan(prev)) {
      diff = std::abs(value - prev);
      if (diff < 1e-13 * std::max(1.0, std::abs(value))) {
        return {value, std::max(diff, 4 * kEps * std::max(1.0, std::abs(value))), EvalMode::kQuadrature};
      }
    }
    prev = value;
  }
  throw ConvergenceError("Gaussian quadrature did not converge", diff);
}

// log E^tilt[exp(a Omega + b Omega^2)] from the density grid of Omega_l,
// refining the grid until two resolutions agree to 1e-10.
SiteValue density_quadrature(const ChargeLaw& law, std::int64_t ell, double tilt, double a, double b) {
  double prev = std::numeric_limits<double>::quiet_NaN();
  double diff = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1u << 14; n <= (1u << 20); n *= 2) {
    const double value = omega_sum_law(law, ell, tilt, n).log_expect_exp_quadratic(a, b);
    if (!std::isnan(prev)) {
      diff = std::abs(value - prev);
      if (diff < kQuadTol) return {value, std::max(diff, 16 * kEps), EvalMode::kQuadrature};
    }
    prev = value;
  }
  throw ConvergenceError("density quadrature did not converge", diff);
}

// Sample mean of exp(a Omega + b Omega^2) with Omega a sum of l tilted draws.
SiteValue monte_carlo(const ChargeLaw& law, std::int64_t ell, double tilt, double a, double b, McOptions mc) {
  if (mc.samples < 2) throw InvalidArgument("monte carlo: need at least 2 samples");
  Stream stream(mc.seed);
  const TiltedChargeSampler draw(law, tilt);
  LogSumExp first;
  LogSumExp second;
  for (std::uint64_t k = 0; k < mc.samples; ++k) {
    double omega = 0.0;
    for (std::int64_t i = 0; i < ell; ++i) omega += draw(stream);
    const double x = a * omega + b * omega * omega;
    first.add(x);
    second.add(2.0 * x);
  }
  const double log_n = std::log(static_cast<double>(mc.samples));
  const double log_mean = first.value() - log_n;
  const double rel_var = std::max(0.0, std::exp(second.value() - log_n - 2.0 * log_mean) - 1.0);
  const double se = std::sqrt(rel_var / static_cast<double>(mc.samples - 1));
  return {log_mean, se, EvalMode::kMonteCarlo};
}

double lattice_error(double value, std::int64_t ell) {
  return 64.0 * kEps * static_cast<double>(ell + 1) * std::max(1.0, std::abs(value));
}

}  // namespace

std::string to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::kClosedForm:
      return "closed_form";
    case EvalMode::kExactConvolution:
      return "exact_convolution";
    case EvalMode::kQuadrature:
      return "quadrature";
    case EvalMode::kMonteCarlo:
      return "monte_carlo";
  }
  return "?";
}

EvalMode parse_eval_mode(const std::string& name) {
  if (name == "closed_form") return EvalMode::kClosedForm;
  if (name == "exact_convolution") return EvalMode::kExactConvolution;
  if (name == "quadrature") return EvalMode::kQuadrature;
  if (name == "monte_carlo") return EvalMode::kMonteCarlo;
  throw InvalidArgument("unknown evaluation mode '" + name + "'");
}

EvalMode default_mode(const ChargeLaw& law) {
  if (law.kind() == LawKind::kGaussian) return EvalMode::kClosedForm;
  if (law.is_lattice()) return EvalMode::kExactConvolution;
  return EvalMode::kQuadrature;
}

SiteValue log_g_star(const ChargeLaw& law, TiltParams tilt, std::int64_t ell, std::optional<EvalMode> mode,
                     McOptions mc) {
  check_inputs(tilt, ell);
  const EvalMode m = resolve(law, mode);
  if (ell == 0) return {0.0, 0.0, m};
  const double d = tilt.delta;
  const double b = tilt.beta;
  const double l = static_cast<double>(ell);
  switch (m) {
    case EvalMode::kClosedForm: {
      const double v = -0.5 * std::log1p(2.0 * b * l) + d * d * l / (2.0 * (1.0 + 2.0 * b * l));
      return {v, 8 * kEps * std::max(1.0, std::abs(v)), m};
    }
    case EvalMode::kExactConvolution: {
      const double v = omega_sum_law(law, ell).log_expect_exp_quadratic(d, -b);
      return {v, lattice_error(v, ell), m};
    }
    case EvalMode::kQuadrature: {
      if (law.kind() == LawKind::kGaussian) return gaussian_quadrature(d, -b, 0.0, l);
      // Integrate against the tilted law, where the integrand's mass sits:
      // g* = M(delta)^l E^delta[exp(-beta Omega^2)].
      SiteValue sv = density_quadrature(law, ell, d, 0.0, -b);
      sv.log_value += l * log_mgf(law, d);
      return sv;
    }
    case EvalMode::kMonteCarlo:
      return monte_carlo(law, ell, 0.0, d, -b, mc);
  }
  return {};
}

double g_star(const ChargeLaw& law, TiltParams tilt, std::int64_t ell, std::optional<EvalMode> mode,
              McOptions mc) {
  return std::exp(log_g_star(law, tilt, ell, mode, mc).log_value);
}

SiteValue log_g_tilted(const ChargeLaw& law, TiltParams tilt, std::int64_t ell, std::optional<EvalMode> mode,
                       McOptions mc) {
  check_inputs(tilt, ell);
  const EvalMode m = resolve(law, mode);
  if (ell == 0) return {0.0, 0.0, m};
  const double d = tilt.delta;
  const double b = tilt.beta;
  const double l = static_cast<double>(ell);
  switch (m) {
    case EvalMode::kClosedForm: {
      // Omega ~ N(delta l, l) under the tilt.
      const double v = -0.5 * std::log1p(2.0 * b * l) - b * d * d * l * l / (1.0 + 2.0 * b * l);
      return {v, 8 * kEps * std::max(1.0, std::abs(v)), m};
    }
    case EvalMode::kExactConvolution: {
      const double v = omega_sum_law(law, ell, d).log_expect_exp_quadratic(0.0, -b);
      return {v, lattice_error(v, ell), m};
    }
    case EvalMode::kQuadrature:
      if (law.kind() == LawKind::kGaussian) return gaussian_quadrature(0.0, -b, d * l, l);
      return density_quadrature(law, ell, d, 0.0, -b);
    case EvalMode::kMonteCarlo:
      return monte_carlo(law, ell, d, 0.0, -b, mc);
  }
  return {};
}

SingleSiteTable SingleSiteTable::build(const ChargeLaw& law, TiltParams tilt, std::int64_t max_ell, Kind kind,
                                       std::optional<EvalMode> mode, unsigned shards, McOptions mc) {
  check_inputs(tilt, max_ell);
  const EvalMode m = resolve(law, mode);
  SingleSiteTable t;
  t.law_id_ = law.id();
  t.tilt_ = tilt;
  t.kind_ = kind;
  const auto size = static_cast<std::size_t>(max_ell) + 1;
  t.log_values_.assign(size, 0.0);
  t.modes_.assign(size, m);
  t.errors_.assign(size, 0.0);

  if (m == EvalMode::kExactConvolution) {
    // One streaming pass over Omega_0 .. Omega_L.
    const double conv_tilt = kind == Kind::kGStar ? 0.0 : tilt.delta;
    const double a = kind == Kind::kGStar ? tilt.delta : 0.0;
    for_each_lattice_sum(law, max_ell, conv_tilt, [&](const OmegaSumLaw& w) {
      const auto i = static_cast<std::size_t>(w.ell());
      if (i == 0) return;
      t.log_values_[i] = w.log_expect_exp_quadratic(a, -tilt.beta);
      t.errors_[i] = lattice_error(t.log_values_[i], w.ell());
    });
    return t;
  }
  parallel_for(size, m == EvalMode::kClosedForm ? 1u : shards, [&](std::size_t i) {
    McOptions local = mc;
    local.seed = substream_seed(mc.seed, i);
    const auto ell = static_cast<std::int64_t>(i);
    const SiteValue v = kind == Kind::kGStar ? log_g_star(law, tilt, ell, m, local)
                                             : log_g_tilted(law, tilt, ell, m, local);
    t.log_values_[i] = v.log_value;
    t.errors_[i] = v.error;
  });
  return t;
}

std::string SingleSiteTable::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "ell," << (kind_ == Kind::kGStar ? "log_g_star" : "log_g") << ",mode,err_bound\n";
  for (std::size_t i = 0; i < log_values_.size(); ++i) {
    os << i << ',' << log_values_[i] << ',' << to_string(modes_[i]) << ',' << errors_[i] << '\n';
  }
  return os.str();
}

GaussianSplit g_attractive_repulsive_split(double delta, double beta, std::int64_t ell) {
  TiltParams{delta, beta}.validate();
  if (ell < 0) throw InvalidArgument("split: ell must be >= 0");
  const double l = static_cast<double>(ell);
  GaussianSplit s;
  s.attractive = 0.5 * std::log1p(2.0 * beta * l);
  s.repulsive = -delta * delta * l / (2.0 * (1.0 + 2.0 * beta * l));
  return s;
}

}  // namespace cpoly

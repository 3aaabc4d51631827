#include "cpoly/charge_model.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

#include "cpoly/error.hpp"
#include "cpoly/numeric.hpp"

namespace cpoly {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

__extension__ typedef __int128 i128;

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// log(sinh(y) / y), even in y.
double log_sinhc(double y) {
  y = std::abs(y);
  if (y < 1e-4) return y * y / 6.0 - y * y * y * y / 180.0;
  return y + std::log1p(-std::exp(-2.0 * y)) - std::log(2.0 * y);
}

}  // namespace

// ---------------------------------------------------------------------------

ChargeLaw ChargeLaw::rademacher() {
  ChargeLaw law;
  law.kind_ = LawKind::kRademacher;
  law.id_ = "rademacher";
  law.support_ = {-1.0, 1.0};
  law.probs_ = {0.5, 0.5};
  law.units_ = {-1, 1};
  law.span_ = 1.0;
  law.symmetric_ = true;
  law.finalize_moments();
  return law;
}

ChargeLaw ChargeLaw::gaussian() {
  ChargeLaw law;
  law.kind_ = LawKind::kGaussian;
  law.id_ = "gaussian";
  law.symmetric_ = true;
  law.moments_ = {1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0};
  return law;
}

ChargeLaw ChargeLaw::three_point(int n) {
  if (n < 1) throw InvalidArgument("three_point: N must be >= 1");
  ChargeLaw law;
  law.kind_ = LawKind::kThreePoint;
  law.id_ = "three_point(" + std::to_string(n) + ")";
  const double nn = static_cast<double>(n);
  const double n2 = nn * nn;
  law.support_ = {-nn, 0.0, 2.0 * nn};
  law.probs_ = {1.0 / (3.0 * n2), 1.0 - 1.0 / (2.0 * n2), 1.0 / (6.0 * n2)};
  law.units_ = {-1, 0, 2};
  law.span_ = nn;
  law.three_point_n_ = n;
  law.symmetric_ = false;
  law.finalize_moments();
  return law;
}

ChargeLaw ChargeLaw::finite_lattice(std::vector<Rational> values, std::vector<Rational> probs) {
  if (values.empty() || values.size() != probs.size()) {
    throw InvalidArgument("finite_lattice: values and probabilities must be non-empty and aligned");
  }
  for (const auto& r : values) {
    if (r.den <= 0) throw InvalidArgument("finite_lattice: denominators must be positive");
  }
  // Exact normalization check.
  i128 pn = 0;
  i128 pd = 1;
  for (const auto& p : probs) {
    if (p.den <= 0 || p.num < 0) throw InvalidArgument("finite_lattice: probabilities must be p/q >= 0");
    pn = pn * p.den + static_cast<i128>(p.num) * pd;
    pd *= p.den;
    const i128 g = gcd128(pn, pd);
    if (g > 1) {
      pn /= g;
      pd /= g;
    }
  }
  if (pn != pd) throw InvalidArgument("finite_lattice: probabilities must sum to exactly 1");

  // Lattice span: gcd of the values over a common denominator.
  i128 lcm = 1;
  for (const auto& v : values) lcm = lcm / gcd128(lcm, v.den) * v.den;
  std::vector<i128> scaled;
  i128 g = 0;
  for (const auto& v : values) {
    const i128 s = static_cast<i128>(v.num) * (lcm / v.den);
    scaled.push_back(s);
    g = gcd128(g, s);
  }
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    for (std::size_t j = i + 1; j < scaled.size(); ++j) {
      if (scaled[i] == scaled[j]) throw InvalidArgument("finite_lattice: support values must be distinct");
    }
  }
  if (g == 0) throw InvalidArgument("finite_lattice: degenerate law at 0");

  ChargeLaw law;
  law.kind_ = LawKind::kFiniteLattice;
  law.id_ = "finite_lattice";
  law.span_ = static_cast<double>(g) / static_cast<double>(lcm);
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scaled[a] < scaled[b]; });
  for (std::size_t i : order) {
    law.support_.push_back(values[i].value());
    law.probs_.push_back(probs[i].value());
    law.units_.push_back(static_cast<std::int64_t>(scaled[i] / g));
  }
  law.finalize_moments();
  if (std::abs(law.moments_[1]) > 1e-12 || std::abs(law.moments_[2] - 1.0) > 1e-12) {
    throw InvalidArgument("finite_lattice: law must have mean 0 and variance 1");
  }
  // Symmetric iff the support is mirrored with equal weights.
  law.symmetric_ = true;
  const std::size_t s = law.units_.size();
  for (std::size_t i = 0; i < s; ++i) {
    if (law.units_[i] != -law.units_[s - 1 - i] ||
        std::abs(law.probs_[i] - law.probs_[s - 1 - i]) > 1e-15) {
      law.symmetric_ = false;
    }
  }
  return law;
}

ChargeLaw ChargeLaw::uniform() {
  ChargeLaw law;
  law.kind_ = LawKind::kUniform;
  law.id_ = "uniform";
  law.symmetric_ = true;
  // E[w^k] = a^k / (k + 1) for even k, a = sqrt(3).
  law.moments_ = {1.0, 0.0, 1.0, 0.0, 9.0 / 5.0, 0.0, 27.0 / 7.0};
  return law;
}

void ChargeLaw::finalize_moments() {
  for (int k = 0; k <= 6; ++k) {
    CompensatedSum s;
    for (std::size_t i = 0; i < support_.size(); ++i) s.add(probs_[i] * std::pow(support_[i], k));
    moments_[static_cast<std::size_t>(k)] = s.value();
  }
}

double ChargeLaw::moment(int k) const {
  if (k < 0 || k > 6) throw InvalidArgument("moment: k must be in 0..6");
  return moments_[static_cast<std::size_t>(k)];
}

double ChargeLaw::density(double x) const {
  switch (kind_) {
    case LawKind::kGaussian:
      return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case LawKind::kUniform:
      return std::abs(x) <= kSqrt3 ? 1.0 / (2.0 * kSqrt3) : 0.0;
    default:
      throw InvalidArgument("density: law " + id_ + " has no density");
  }
}

double ChargeLaw::density_sup() const {
  switch (kind_) {
    case LawKind::kGaussian:
      return 1.0 / std::sqrt(2.0 * std::numbers::pi);
    case LawKind::kUniform:
      return 1.0 / (2.0 * kSqrt3);
    default:
      throw InvalidArgument("density_sup: law " + id_ + " has no density");
  }
}

std::complex<double> ChargeLaw::characteristic(std::complex<double> z) const {
  switch (kind_) {
    case LawKind::kGaussian:
      return std::exp(-0.5 * z * z);
    case LawKind::kUniform: {
      const std::complex<double> y = kSqrt3 * z;
      if (std::abs(y) < 1e-6) return 1.0 - y * y / 6.0;
      return std::sin(y) / y;
    }
    default: {
      std::complex<double> s = 0.0;
      for (std::size_t i = 0; i < support_.size(); ++i) {
        s += probs_[i] * std::exp(std::complex<double>(0.0, 1.0) * z * support_[i]);
      }
      return s;
    }
  }
}

double ChargeLaw::max_abs() const {
  switch (kind_) {
    case LawKind::kGaussian:
      return std::numeric_limits<double>::infinity();
    case LawKind::kUniform:
      return kSqrt3;
    default: {
      double m = 0;
      for (double v : support_) m = std::max(m, std::abs(v));
      return m;
    }
  }
}

void TiltParams::validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidArgument("delta must be finite and >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be finite and >= 0");
}

// ---------------------------------------------------------------------------

double log_mgf(const ChargeLaw& law, double delta) {
  if (!std::isfinite(delta)) throw InvalidArgument("log_mgf: delta must be finite");
  if (delta == 0.0) return 0.0;
  switch (law.kind()) {
    case LawKind::kGaussian:
      return 0.5 * delta * delta;
    case LawKind::kUniform:
      return log_sinhc(kSqrt3 * delta);
    case LawKind::kRademacher: {
      const double a = std::abs(delta);
      return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
    }
    default: {
      std::vector<double> terms;
      for (std::size_t i = 0; i < law.support().size(); ++i) {
        terms.push_back(std::log(law.probabilities()[i]) + delta * law.support()[i]);
      }
      return log_sum_exp(terms);
    }
  }
}

double mgf(const ChargeLaw& law, double delta) {
  if (law.kind() == LawKind::kRademacher) return std::cosh(delta);
  return std::exp(log_mgf(law, delta));
}

double annealed_exponent(const ChargeLaw& law, double delta) { return -log_mgf(law, delta); }

TiltedMoments tilted_moments(const ChargeLaw& law, double delta) {
  if (!std::isfinite(delta)) throw InvalidArgument("tilted_moments: delta must be finite");
  TiltedMoments out;
  switch (law.kind()) {
    case LawKind::kGaussian:
      out.mean = delta;
      out.variance = 1.0;
      return out;
    case LawKind::kRademacher: {
      const double t = std::tanh(delta);
      out.mean = t;
      out.variance = 1.0 - t * t;
      return out;
    }
    case LawKind::kUniform: {
      if (std::abs(delta) < 1e-2) {
        const double d2 = delta * delta;
        out.mean = delta * (1.0 - d2 / 5.0 + 54.0 / 945.0 * d2 * d2);
        out.variance = 1.0 - 3.0 * d2 / 5.0 + 270.0 / 945.0 * d2 * d2;
      } else {
        const double y = kSqrt3 * delta;
        const double sh = std::sinh(y);
        out.mean = kSqrt3 / std::tanh(y) - 1.0 / delta;
        out.variance = 1.0 / (delta * delta) - 3.0 / (sh * sh);
      }
      return out;
    }
    default: {
      const double lm = log_mgf(law, delta);
      CompensatedSum m;
      for (std::size_t i = 0; i < law.support().size(); ++i) {
        const double q = std::exp(std::log(law.probabilities()[i]) + delta * law.support()[i] - lm);
        m.add(q * law.support()[i]);
      }
      out.mean = m.value();
      CompensatedSum v;
      for (std::size_t i = 0; i < law.support().size(); ++i) {
        const double q = std::exp(std::log(law.probabilities()[i]) + delta * law.support()[i] - lm);
        const double c = law.support()[i] - out.mean;
        v.add(q * c * c);
      }
      out.variance = v.value();
      return out;
    }
  }
}

double lattice_span(const ChargeLaw& law) { return law.is_lattice() ? law.span_value() : 0.0; }

// ---------------------------------------------------------------------------

OmegaSumLaw OmegaSumLaw::lattice(std::int64_t ell, double unit, std::int64_t first_unit,
                                 std::vector<double> log_probs) {
  OmegaSumLaw w;
  w.rep_ = Representation::kLattice;
  w.ell_ = ell;
  w.unit_ = unit;
  w.first_unit_ = first_unit;
  w.log_probs_ = std::move(log_probs);
  return w;
}

OmegaSumLaw OmegaSumLaw::gaussian(std::int64_t ell, double mean, double variance) {
  OmegaSumLaw w;
  w.rep_ = Representation::kGaussian;
  w.ell_ = ell;
  w.mean_ = mean;
  w.variance_ = variance < 0 ? static_cast<double>(ell) : variance;
  return w;
}

OmegaSumLaw OmegaSumLaw::density_grid(std::int64_t ell, double x0, double h, std::vector<double> values) {
  OmegaSumLaw w;
  w.rep_ = Representation::kDensityGrid;
  w.ell_ = ell;
  w.x0_ = x0;
  w.h_ = h;
  w.values_ = std::move(values);
  return w;
}

double OmegaSumLaw::total_mass() const {
  switch (rep_) {
    case Representation::kLattice: {
      CompensatedSum s;
      for (double lp : log_probs_) s.add(std::exp(lp));
      return s.value();
    }
    case Representation::kGaussian:
      return 1.0;
    case Representation::kDensityGrid: {
      CompensatedSum s;
      for (double v : values_) s.add(v * h_);
      return s.value();
    }
  }
  return 0.0;
}

double OmegaSumLaw::moment(int k) const {
  switch (rep_) {
    case Representation::kLattice: {
      CompensatedSum s;
      for (std::size_t i = 0; i < log_probs_.size(); ++i) s.add(std::exp(log_probs_[i]) * std::pow(value_at(i), k));
      return s.value();
    }
    case Representation::kGaussian: {
      double prev = 1.0;
      double cur = mean_;
      if (k == 0) return 1.0;
      for (int j = 2; j <= k; ++j) {
        const double next = mean_ * cur + (j - 1) * variance_ * prev;
        prev = cur;
        cur = next;
      }
      return cur;
    }
    case Representation::kDensityGrid: {
      CompensatedSum s;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        s.add(values_[i] * h_ * std::pow(x0_ + static_cast<double>(i) * h_, k));
      }
      return s.value();
    }
  }
  return 0.0;
}

double OmegaSumLaw::log_expect_exp_quadratic(double a, double b) const {
  switch (rep_) {
    case Representation::kLattice: {
      LogSumExp acc;
      for (std::size_t i = 0; i < log_probs_.size(); ++i) {
        const double s = value_at(i);
        acc.add(log_probs_[i] + a * s + b * s * s);
      }
      return acc.value();
    }
    case Representation::kGaussian: {
      // E exp(aX + bX^2), X ~ N(mu, v), needs 1 - 2bv > 0.
      const double v = variance_;
      const double denom = 1.0 - 2.0 * b * v;
      if (!(denom > 0)) throw InvalidArgument("log_expect_exp_quadratic: divergent Gaussian integral");
      return -0.5 * std::log(denom) + (a * mean_ + b * mean_ * mean_ + 0.5 * a * a * v) / denom;
    }
    case Representation::kDensityGrid: {
      LogSumExp acc;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] <= 0) continue;
        const double s = x0_ + static_cast<double>(i) * h_;
        acc.add(std::log(values_[i]) + a * s + b * s * s);
      }
      return acc.value() + std::log(h_);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

void for_each_lattice_sum(const ChargeLaw& law, std::int64_t max_ell, double tilt,
                          const std::function<void(const OmegaSumLaw&)>& visit) {
  if (!law.is_lattice()) throw InvalidArgument("lattice convolution: law " + law.id() + " is not lattice");
  if (max_ell < 0) throw InvalidArgument("lattice convolution: max_ell must be >= 0");
  const auto units = law.support_units();
  const double lm = log_mgf(law, tilt);
  std::vector<double> lp(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    lp[i] = std::log(law.probabilities()[i]) + tilt * law.support()[i] - lm;
  }
  const std::int64_t umin = *std::min_element(units.begin(), units.end());
  const std::int64_t umax = *std::max_element(units.begin(), units.end());
  const std::int64_t width = umax - umin;

  std::vector<double> cur{0.0};
  std::vector<double> nxt;
  std::vector<double> terms(units.size());
  visit(OmegaSumLaw::lattice(0, law.span_value(), 0, cur));
  for (std::int64_t ell = 1; ell <= max_ell; ++ell) {
    nxt.assign(static_cast<std::size_t>(ell * width) + 1, kNegInf);
    const auto cur_size = static_cast<std::int64_t>(cur.size());
    for (std::size_t j = 0; j < nxt.size(); ++j) {
      double top = kNegInf;
      std::size_t used = 0;
      for (std::size_t i = 0; i < units.size(); ++i) {
        const std::int64_t k = static_cast<std::int64_t>(j) - (units[i] - umin);
        if (k < 0 || k >= cur_size) continue;
        const double t = cur[static_cast<std::size_t>(k)];
        if (t == kNegInf) continue;
        terms[used++] = t + lp[i];
        top = std::max(top, t + lp[i]);
      }
      if (used == 0) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < used; ++i) s += std::exp(terms[i] - top);
      nxt[j] = top + std::log(s);
    }
    std::swap(cur, nxt);
    visit(OmegaSumLaw::lattice(ell, law.span_value(), ell * umin, cur));
  }
}

std::vector<OmegaSumLaw> omega_sum_lattice_sequence(const ChargeLaw& law, std::int64_t max_ell, double tilt) {
  std::vector<OmegaSumLaw> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(max_ell, 0)) + 1);
  for_each_lattice_sum(law, max_ell, tilt, [&](const OmegaSumLaw& w) { out.push_back(w); });
  return out;
}

namespace {

// Density of Omega_l on a grid by inverting the characteristic function.
OmegaSumLaw density_sum_grid(const ChargeLaw& law, std::int64_t ell, double tilt, std::size_t points) {
  const TiltedMoments tm = tilted_moments(law, tilt);
  const double center = tm.mean * static_cast<double>(ell);
  const double sd = std::sqrt(tm.variance * static_cast<double>(ell));
  const double half = 12.0 * sd;
  const std::size_t n = std::bit_ceil(std::max<std::size_t>(points, 1u << 14));
  const double lm = log_mgf(law, tilt);

  if (ell == 1) {
    // The single-charge density may be discontinuous; tabulate it directly.
    const double a = std::min(half, law.max_abs());
    const double h = 2.0 * a / static_cast<double>(n);
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const double x = -a + static_cast<double>(i) * h;
      v[i] = law.density(x) * std::exp(tilt * x - lm);
    }
    // Trapezoid end weights folded into the end values.
    v.front() *= 0.5;
    v.back() *= 0.5;
    return OmegaSumLaw::density_grid(ell, -a, h, std::move(v));
  }

  const double x0 = center - half;
  const double h = 2.0 * half / static_cast<double>(n);
  const double dt = 2.0 * std::numbers::pi / (static_cast<double>(n) * h);
  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  const auto sn = static_cast<std::int64_t>(n);
  for (std::int64_t j = -sn / 2; j < sn / 2; ++j) {
    const double t = static_cast<double>(j) * dt;
    // E^tilt[exp(i t w)] = phi(t - i tilt) / M(tilt).
    const std::complex<double> phi = law.characteristic(std::complex<double>(t, -tilt)) * std::exp(-lm);
    std::complex<double> psi = phi == 0.0 ? std::complex<double>(0.0) : std::pow(phi, static_cast<int>(ell));
    psi *= std::exp(std::complex<double>(0.0, -t * x0));
    const std::size_t slot = static_cast<std::size_t>((j + sn) % sn);
    buf[slot][0] = psi.real();
    buf[slot][1] = psi.imag();
  }
  fftw_execute(plan);
  std::vector<double> v(n);
  for (std::size_t m = 0; m < n; ++m) v[m] = buf[m][0] * dt / (2.0 * std::numbers::pi);
  fftw_destroy_plan(plan);
  fftw_free(buf);
  return OmegaSumLaw::density_grid(ell, x0, h, std::move(v));
}

}  // namespace

OmegaSumLaw omega_sum_law(const ChargeLaw& law, std::int64_t ell, double tilt, std::size_t grid_points) {
  if (ell < 0) throw InvalidArgument("omega_sum_law: ell must be >= 0");
  if (ell == 0) return OmegaSumLaw::lattice(0, law.is_lattice() ? law.span_value() : 1.0, 0, {0.0});
  if (law.is_lattice()) {
    std::optional<OmegaSumLaw> last;
    for_each_lattice_sum(law, ell, tilt, [&](const OmegaSumLaw& w) {
      if (w.ell() == ell) last = w;
    });
    return *last;
  }
  if (law.kind() == LawKind::kGaussian) {
    return OmegaSumLaw::gaussian(ell, tilt * static_cast<double>(ell), static_cast<double>(ell));
  }
  return density_sum_grid(law, ell, tilt, grid_points);
}

double omega_sum_moment(const ChargeLaw& law, std::int64_t ell, int k) {
  if (k < 0 || k > 6) throw InvalidArgument("omega_sum_moment: k must be in 0..6");
  if (ell < 0) throw InvalidArgument("omega_sum_moment: ell must be >= 0");
  if (k == 0) return 1.0;
  if (ell == 0) return 0.0;
  const double l = static_cast<double>(ell);
  const double m2 = law.moment(2);
  const double m3 = law.moment(3);
  const double m4 = law.moment(4);
  const double m5 = law.moment(5);
  const double m6 = law.moment(6);
  switch (k) {
    case 1:
      return 0.0;
    case 2:
      return m2 * l;
    case 3:
      return m3 * l;
    case 4:
      return 3.0 * m2 * m2 * l * (l - 1.0) + m4 * l;
    case 5:
      return 10.0 * m2 * m3 * l * (l - 1.0) + m5 * l;
    default:
      return 15.0 * m2 * m2 * m2 * l * (l - 1.0) * (l - 2.0) + (15.0 * m2 * m4 + 10.0 * m3 * m3) * l * (l - 1.0) +
             m6 * l;
  }
}

TiltedChargeSampler::TiltedChargeSampler(const ChargeLaw& law, double delta) : law_(&law), delta_(delta) {
  if (!std::isfinite(delta)) throw InvalidArgument("sampler: delta must be finite");
  if (law.is_lattice()) {
    const double lm = log_mgf(law, delta);
    double c = 0.0;
    for (std::size_t i = 0; i < law.support().size(); ++i) {
      c += std::exp(std::log(law.probabilities()[i]) + delta * law.support()[i] - lm);
      cdf_.push_back(c);
    }
  }
}

double TiltedChargeSampler::operator()(Stream& stream) const {
  switch (law_->kind()) {
    case LawKind::kGaussian:
      return stream.normal() + delta_;
    case LawKind::kUniform: {
      const double u = stream.uniform();
      if (delta_ == 0.0) return kSqrt3 * (2.0 * u - 1.0);
      const double d = std::abs(delta_);
      const double x = kSqrt3 + std::log(u + (1.0 - u) * std::exp(-2.0 * kSqrt3 * d)) / d;
      return delta_ > 0 ? x : -x;
    }
    default: {
      const double u = stream.uniform();
      const auto sup = law_->support();
      for (std::size_t i = 0; i + 1 < sup.size(); ++i) {
        if (u < cdf_[i]) return sup[i];
      }
      return sup.back();
    }
  }
}

std::vector<double> sample_charges(const ChargeLaw& law, double delta, std::size_t n, Stream& stream) {
  if (!std::isfinite(delta)) throw InvalidArgument("sample_charges: delta must be finite");
  const TiltedChargeSampler draw(law, delta);
  std::vector<double> out(n);
  for (auto& w : out) w = draw(stream);
  return out;
}

}  // namespace cpoly

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cpoly/error.hpp"
#include "cpoly/parallel.hpp"
#include "cpoly/single_site.hpp"

namespace cpoly {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string describe_grid(const std::vector<double>& xs) {
  std::ostringstream os;
  if (xs.empty()) return "[]";
  os << "[" << xs.front() << " .. " << xs.back() << "] (" << xs.size() << " points)";
  return os.str();
}

void finish(BoundReport& r, double margin, std::map<std::string, double> where) {
  r.worst_margin = margin;
  r.pass = margin >= 0.0;
  if (!r.pass) r.offending = std::move(where);
}

}  // namespace

BoundReport check_symmetric_unit_bound(const ChargeLaw& law, const std::vector<double>& deltas,
                                       std::int64_t max_ell, unsigned shards) {
  if (!law.is_symmetric()) {
    throw InvalidArgument("symmetric unit bound is only claimed for symmetric laws; " + law.id() +
                          " is asymmetric");
  }
  if (max_ell < 0) throw InvalidArgument("symmetric unit bound: max_ell must be >= 0");
  BoundReport r;
  r.name = "symmetric_unit_bound";
  r.parameters = {{"max_ell", static_cast<double>(max_ell)}};
  r.grid = "delta in " + describe_grid(deltas) + ", beta = delta^2/2, ell in [0, " + std::to_string(max_ell) + "]";

  struct Worst {
    double log_g = -kInf;
    std::int64_t ell = 0;
  };
  std::vector<Worst> worst(deltas.size());
  parallel_for(deltas.size(), shards, [&](std::size_t i) {
    const double d = deltas[i];
    const auto table = SingleSiteTable::build(law, {d, 0.5 * d * d}, max_ell);
    // Compare the lower end of each entry's error interval: rounding in an
    // exact convolution must not register as a violation.
    for (std::int64_t l = 1; l <= max_ell; ++l) {
      const double lower = table.log_value(l) - table.error(l);
      if (lower > worst[i].log_g) worst[i] = {lower, l};
    }
  });
  // l = 0 gives g* = 1 exactly: the margin never exceeds 0.
  double margin = 0.0;
  double margin_positive_ell = kInf;
  std::map<std::string, double> where{{"delta", 0.0}, {"ell", 0.0}};
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (worst[i].ell == 0) continue;
    const double m = -std::expm1(worst[i].log_g);
    if (m < margin_positive_ell) margin_positive_ell = m;
    if (m < margin) {
      margin = m;
      where = {{"delta", deltas[i]}, {"ell", static_cast<double>(worst[i].ell)}};
    }
  }
  r.fitted["min_margin_ell_ge_1"] = margin_positive_ell;
  finish(r, margin, where);
  return r;
}

double small_delta_beta(const ChargeLaw& law, double delta, double eps) {
  return 0.5 * delta * delta - law.moment(3) * delta * delta * delta / 3.0 - eps;
}

double k1_constant(const ChargeLaw& law) {
  const double m3 = law.moment(3);
  return m3 * m3 / 3.0 - law.moment(4) / 12.0 + 0.25;
}

double eps_quartic_preset(const ChargeLaw& law, double delta, double eta) {
  const double d4 = std::pow(delta, 4);
  return 0.25 * (1.0 - eta) * d4 - k1_constant(law) * d4;
}

double eps_wsaw_preset(const ChargeLaw& law, double delta, double slack, double f_wsaw) {
  return (1.0 + slack) * f_wsaw - k1_constant(law) * std::pow(delta, 4);
}

BoundReport check_small_delta_regimes(const ChargeLaw& law, double delta, double eta, double eps, double a,
                                      double delta0, std::int64_t max_ell) {
  if (!(delta > 0) || delta > delta0) {
    throw InvalidArgument("small-delta regimes: need 0 < delta <= delta0 = " + std::to_string(delta0));
  }
  if (!(eta > 0 && eta < 1)) throw InvalidArgument("small-delta regimes: eta must be in (0, 1)");
  if (!(a > 0)) throw InvalidArgument("small-delta regimes: a must be > 0");
  const double beta = small_delta_beta(law, delta, eps);
  if (!(beta >= 0)) throw InvalidArgument("small-delta regimes: beta(delta) is negative");
  const double k1 = k1_constant(law);
  const double d2 = delta * delta;
  const double d4 = d2 * d2;
  const auto table = SingleSiteTable::build(law, {delta, beta}, max_ell);

  BoundReport r;
  r.name = "small_delta_regimes";
  r.parameters = {{"delta", delta}, {"eta", eta}, {"eps", eps}, {"a", a}, {"delta0", delta0}, {"beta", beta}};
  r.grid = "ell in [1, " + std::to_string(max_ell) + "]";
  r.fitted["k1"] = k1;

  double margin = kInf;
  std::map<std::string, double> where;
  double largest_a = -1.0;
  double c0 = 0.0;
  bool first_failure_seen = false;
  for (std::int64_t l = 1; l <= max_ell; ++l) {
    const double ll = static_cast<double>(l);
    const double x = d2 * ll;
    // g* - 1, computed without cancellation.
    const double gm1 = std::expm1(table.log_value(l));
    const double lin = (eps + k1 * d4) * ll;
    const double lower = lin - 0.25 * (1.0 + eta) * d4 * ll * ll;
    const double upper = lin - 0.25 * (1.0 - eta) * d4 * ll * ll;
    const double quad_margin = std::min(gm1 - lower, upper - gm1);
    if (!first_failure_seen) {
      if (quad_margin >= 0) {
        largest_a = x;
      } else {
        first_failure_seen = true;
      }
    }
    double m;
    if (x <= a) {
      m = quad_margin;
    } else {
      const double g = std::exp(table.log_value(l));
      const double s = std::sqrt(1.0 + x);
      c0 = std::max({c0, g * s, 1.0 / (g * s)});
      m = -gm1;  // g* <= 1
    }
    if (m < margin) {
      margin = m;
      where = {{"delta", delta}, {"ell", ll}, {"delta2_ell", x}};
    }
  }
  if (c0 > 0) r.fitted["c0"] = c0;
  r.fitted["largest_a"] = largest_a;
  if (largest_a < a) r.notes.push_back("quadratic sandwich fails below the configured a");
  finish(r, margin, where);
  return r;
}

BoundReport check_superadditivity(const ChargeLaw& law, TiltParams tilt, std::int64_t max_ell) {
  if (max_ell < 2) throw InvalidArgument("superadditivity: L must be >= 2");
  const auto table = SingleSiteTable::build(law, tilt, max_ell);
  BoundReport r;
  r.name = "superadditivity";
  r.parameters = {{"delta", tilt.delta}, {"beta", tilt.beta}, {"L", static_cast<double>(max_ell)}};
  r.grid = "1 <= m <= n, m + n <= " + std::to_string(max_ell);
  double margin = kInf;
  std::map<std::string, double> where;
  for (std::int64_t m = 1; 2 * m <= max_ell; ++m) {
    for (std::int64_t n = m; m + n <= max_ell; ++n) {
      const double v = table.log_value(m + n) - table.log_value(m) - table.log_value(n);
      if (v < margin) {
        margin = v;
        where = {{"m", static_cast<double>(m)}, {"n", static_cast<double>(n)}};
      }
    }
  }
  r.fitted["min_pair_margin"] = margin;
  r.fitted["argmin_m"] = where["m"];
  r.fitted["argmin_n"] = where["n"];
  finish(r, margin, where);
  return r;
}

BoundReport check_gdb_smallbeta(const ChargeLaw& law, TiltParams tilt, double eta, double a, double beta0,
                                std::int64_t max_ell) {
  if (!(tilt.beta > 0) || tilt.beta > beta0) {
    throw InvalidArgument("small-beta bound: need 0 < beta <= beta0 = " + std::to_string(beta0));
  }
  if (!(eta > 0)) throw InvalidArgument("small-beta bound: eta must be > 0");
  const auto table = SingleSiteTable::build(law, tilt, max_ell, SingleSiteTable::Kind::kGTilted);
  const TiltedMoments tm = tilted_moments(law, tilt.delta);
  const double b = tilt.beta;

  BoundReport r;
  r.name = "gdb_smallbeta";
  r.parameters = {{"delta", tilt.delta}, {"beta", b}, {"eta", eta}, {"a", a}, {"beta0", beta0}};
  r.grid = "ell in [0, " + std::to_string(max_ell) + "]";

  double margin = kInf;
  std::map<std::string, double> where;
  double c_delta = kInf;
  double largest_a = -1.0;
  bool failed = false;
  for (std::int64_t l = 1; l <= max_ell; ++l) {
    const double ll = static_cast<double>(l);
    const double lg = table.log_value(l);
    const double x = b * ll * ll;
    const double log_bound = -(b * tm.variance * ll + (1.0 - eta) * b * tm.mean * tm.mean * ll * ll);
    const double rel = -std::expm1(lg - log_bound);  // 1 - g/bound
    if (!failed) {
      if (rel >= 0) {
        largest_a = x;
      } else {
        failed = true;
      }
    }
    if (x <= a) {
      if (rel < margin) {
        margin = rel;
        where = {{"ell", ll}, {"beta_ell2", x}};
      }
    } else {
      c_delta = std::min(c_delta, -lg / std::min(x, ll));
    }
  }
  if (std::isfinite(c_delta)) {
    r.fitted["c_delta"] = c_delta;
    if (!(c_delta > 0)) {
      r.notes.push_back("no positive c_delta fits regime 2");
      if (c_delta < margin) {
        margin = c_delta;
        where = {{"regime", 2.0}};
      }
    }
  }
  r.fitted["largest_a"] = largest_a;
  if (!std::isfinite(margin)) margin = 0.0;
  finish(r, margin, where);
  return r;
}

BoundReport density_envelope_check(const ChargeLaw& law, std::int64_t max_ell, double eps0) {
  if (!law.has_density()) throw InvalidArgument("density envelope: law " + law.id() + " has no density");
  if (max_ell < 1) throw InvalidArgument("density envelope: max_ell must be >= 1");
  if (!(eps0 > 0)) throw InvalidArgument("density envelope: eps0 must be > 0");
  BoundReport r;
  r.name = "density_envelope";
  r.grid = "ell in [1, " + std::to_string(max_ell) + "]";

  // sqrt(l) inf_{[0, e]} f_l for a halving sequence of e, and sqrt(l) sup f_l.
  std::vector<double> eps_candidates;
  for (double e = eps0; e > eps0 / 1024; e *= 0.5) eps_candidates.push_back(e);
  std::vector<double> c0(eps_candidates.size(), kInf);
  double c1 = 0.0;
  for (std::int64_t l = 1; l <= max_ell; ++l) {
    const double rl = std::sqrt(static_cast<double>(l));
    if (law.kind() == LawKind::kGaussian) {
      c1 = std::max(c1, 1.0 / std::sqrt(2.0 * std::numbers::pi));
      for (std::size_t k = 0; k < eps_candidates.size(); ++k) {
        const double e = eps_candidates[k];
        const double f = std::exp(-e * e / (2.0 * static_cast<double>(l))) / std::sqrt(2.0 * std::numbers::pi);
        c0[k] = std::min(c0[k], f);
      }
      continue;
    }
    const OmegaSumLaw w = omega_sum_law(law, l);
    const auto v = w.values();
    double sup = 0.0;
    std::vector<double> inf(eps_candidates.size(), kInf);
    for (std::size_t i = 0; i < v.size(); ++i) {
      // The l = 1 grid carries half trapezoid weights at its ends.
      double f = v[i];
      if (l == 1 && (i == 0 || i + 1 == v.size())) f *= 2.0;
      sup = std::max(sup, f);
      const double xx = w.x0() + static_cast<double>(i) * w.h();
      for (std::size_t k = 0; k < eps_candidates.size(); ++k) {
        if (xx >= 0.0 && xx <= eps_candidates[k]) inf[k] = std::min(inf[k], f);
      }
    }
    c1 = std::max(c1, rl * sup);
    for (std::size_t k = 0; k < eps_candidates.size(); ++k) c0[k] = std::min(c0[k], rl * inf[k]);
  }
  std::size_t chosen = eps_candidates.size();
  for (std::size_t k = 0; k < eps_candidates.size(); ++k) {
    if (c0[k] > 0 && std::isfinite(c0[k])) {
      chosen = k;
      break;
    }
  }
  r.fitted["c1"] = c1;
  if (chosen == eps_candidates.size()) {
    r.notes.push_back("no eps0 with a positive lower envelope");
    finish(r, -1.0, {{"eps0", eps0}});
    return r;
  }
  r.fitted["c0"] = c0[chosen];
  r.fitted["eps0"] = eps_candidates[chosen];
  r.parameters = {{"eps0_requested", eps0}};
  finish(r, std::min(c0[chosen], c1), {});
  return r;
}

BoundReport large_delta_envelope_check(double delta, double eta, std::int64_t max_ell) {
  if (!(delta > 1)) throw InvalidArgument("large-delta envelope: delta must exceed 1");
  if (!(eta > 0 && eta < 1)) throw InvalidArgument("large-delta envelope: eta must be in (0, 1)");
  const double beta = delta * delta / (4.0 * std::log(delta));
  const ChargeLaw law = ChargeLaw::gaussian();
  const auto table = SingleSiteTable::build(law, {delta, beta}, max_ell);
  const double k = delta * delta / (4.0 * beta);
  const double log_ratio = std::log(delta / beta);
  const double log_lower = std::log(eta) + log_ratio + (1.0 - eta) * k;
  const double log_upper = log_ratio + k;
  double log_c = 0.0;  // c >= 1
  std::int64_t arg = 1;
  for (std::int64_t l = 1; l <= max_ell; ++l) {
    const double lg = table.log_value(l) + 0.5 * std::log(static_cast<double>(l));
    const double need = std::max(log_lower - lg, lg - log_upper);
    if (need > log_c) {
      log_c = need;
      arg = l;
    }
  }
  BoundReport r;
  r.name = "large_delta_envelope";
  r.parameters = {{"delta", delta}, {"beta", beta}, {"eta", eta}};
  r.grid = "ell in [1, " + std::to_string(max_ell) + "]";
  r.fitted["c"] = std::exp(log_c);
  r.fitted["argmax_ell"] = static_cast<double>(arg);
  finish(r, std::isfinite(log_c) ? 0.0 : -1.0, {{"ell", static_cast<double>(arg)}});
  return r;
}

}  // namespace cpoly

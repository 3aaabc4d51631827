// Acceptance checks. `acceptance K` runs check K and prints one PASS/FAIL
// line; with no argument every check runs in turn. Exit status is the number
// of failed checks (capped at 1 per check).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cpoly/bridge_lab.hpp"
#include "cpoly/charge_model.hpp"
#include "cpoly/ldp_lab.hpp"
#include "cpoly/numeric.hpp"
#include "cpoly/partition.hpp"
#include "cpoly/single_site.hpp"

namespace {

using namespace cpoly;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double rel_diff_from_logs(double a, double b) { return std::abs(std::expm1(a - b)); }

// z_exact against the double enumeration over walks and charges.
Outcome oracle_equivalence() {
  double worst = 0.0;
  std::string where;
  int cases = 0;
  for (const ChargeLaw& law : {ChargeLaw::rademacher(), ChargeLaw::three_point(2)}) {
    for (int d : {1, 2}) {
      for (int n = 1; n <= 8; ++n) {
        const auto de = DoubleEnumeration::build(law, d, n);
        for (double delta : {0.0, 0.3, 1.0}) {
          for (double beta : {0.0, 0.2, 1.0}) {
            for (Quantity q : {Quantity::kZ, Quantity::kZStar}) {
              const double a = z_exact(law, {delta, beta}, d, n, q).log_value;
              const double b = de.evaluate({delta, beta}, q).log_value;
              const double r = rel_diff_from_logs(a, b);
              ++cases;
              if (r > worst) {
                worst = r;
                where = fmt("%s d=%d n=%d delta=%g beta=%g %s", law.id().c_str(), d, n, delta, beta,
                            to_string(q).c_str());
              }
            }
          }
        }
      }
    }
  }
  return {worst <= 1e-12, fmt("%d cases, max relative difference %.3g (%s), tolerance 1e-12", cases, worst,
                              where.c_str())};
}

// Gaussian closed form of g* against adaptive quadrature.
Outcome gaussian_closed_form() {
  const ChargeLaw law = ChargeLaw::gaussian();
  double worst = 0.0;
  std::string where;
  int cases = 0;
  for (double delta : {0.0, 0.5, 1.0, 2.0}) {
    for (double beta : {0.01, 0.1, 1.0}) {
      for (std::int64_t ell = 1; ell <= 64; ++ell) {
        const double cf = log_g_star(law, {delta, beta}, ell, EvalMode::kClosedForm).log_value;
        const double qd = log_g_star(law, {delta, beta}, ell, EvalMode::kQuadrature).log_value;
        const double r = rel_diff_from_logs(qd, cf);
        ++cases;
        if (r > worst) {
          worst = r;
          where = fmt("delta=%g beta=%g l=%lld", delta, beta, static_cast<long long>(ell));
        }
      }
    }
  }
  return {worst <= 1e-10,
          fmt("%d cases, max relative error %.3g (%s), tolerance 1e-10", cases, worst, where.c_str())};
}

// g*_{delta, delta^2/2}(l) <= 1 for symmetric laws.
Outcome symmetric_unit_bound() {
  std::vector<double> deltas;
  for (int k = 1; k <= 60; ++k) deltas.push_back(0.05 * k);
  std::string detail;
  bool pass = true;
  for (const ChargeLaw& law : {ChargeLaw::gaussian(), ChargeLaw::rademacher()}) {
    const BoundReport r = check_symmetric_unit_bound(law, deltas, 1000);
    pass = pass && r.pass;
    detail += fmt("%s worst margin %.3g %s; ", law.id().c_str(), r.worst_margin, r.pass ? "ok" : "violated");
  }
  return {pass, detail + "delta in (0,3] step 0.05, l <= 1000"};
}

// E[Q_4] = 5 in d = 2 three ways, and the d = 2 growth constant 2/pi.
Outcome expected_q_d2() {
  const double by_enum = q_histogram_exact(2, 4).mean();
  const double by_formula = expected_q(2, 4).value;
  const QMoments mc = q_moments_mc(2, 4, 200000, 2024);
  const bool routes = by_enum == 5.0 && std::abs(by_formula - 5.0) < 1e-12 && std::abs(mc.mean - 5.0) <= 4 * mc.mean_se;
  std::vector<double> x;
  std::vector<double> y;
  for (int k = 8; k <= 14; ++k) {
    const std::int64_t n = std::int64_t{1} << k;
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(expected_q(2, n).value / static_cast<double>(n));
  }
  const double slope = fit_line(x, y).slope;
  const double target = 2.0 / std::numbers::pi;
  const double rel = std::abs(slope / target - 1.0);
  return {routes && rel <= 0.02,
          fmt("enumeration %.12g, return-probability formula %.12g, MC %.5f +- %.5f; "
              "slope of E[Q_n]/n on log n = %.5f vs 2/pi = %.5f (rel %.3g, tolerance 0.02)",
              by_enum, by_formula, mc.mean, mc.mean_se, slope, target, rel)};
}

// d = 3: Green function consistency and E[Q_n]/n -> lambda_3.
Outcome lambda_d3() {
  const GreenConstants g = green_constants(3, 1e-4);
  std::vector<double> x;
  std::vector<double> y;
  for (int k = 8; k <= 14; ++k) {
    const std::int64_t n = std::int64_t{1} << k;
    x.push_back(1.0 / std::sqrt(static_cast<double>(n)));
    y.push_back(expected_q(3, n).value / static_cast<double>(n));
  }
  const LinearFit fit = fit_line(x, y);
  // Corrected value at n = 2^14: remove the fitted n^{-1/2} term.
  const double corrected = y.back() - fit.slope * x.back();
  const double rel = std::abs(corrected / g.lambda_d - 1.0);
  const bool pass = g.converged && g.consistency <= 1e-4 && rel <= 0.01;
  return {pass, fmt("lambda_3 = %.8f, truncation consistency %.3g (tolerance 1e-4); E[Q_n]/n at 2^14 = %.6f, "
                    "corrected %.6f, rel %.3g (tolerance 0.01)",
                    g.lambda_d, g.consistency, y.back(), corrected, rel)};
}

// SAW counts and the identity I_n(1) = -(1/n) log(c_n / 4^n).
Outcome saw_counts_d2() {
  const auto c = saw_counts(2, 12);
  const bool head = c[1] == 4 && c[2] == 12 && c[3] == 36 && c[4] == 100;
  std::vector<std::int64_t> ladder;
  for (std::int64_t n = 1; n <= 12; ++n) ladder.push_back(n);
  const RateCurve curve = rate_function(2, {1.0}, ladder, RateMethod::kExact);
  bool rate_ok = curve.points.size() == ladder.size();
  double worst = 0.0;
  double worst_shifted = 0.0;
  for (const RatePoint& p : curve.points) {
    const auto n = static_cast<std::size_t>(p.n);
    const double nn = static_cast<double>(p.n);
    const double direct = -(std::log(static_cast<double>(c[n])) - nn * std::log(4.0)) / nn;
    worst = std::max(worst, std::abs(p.estimate - direct));
    // Local times start at time 1, so {Q_n = n} only asks S_1..S_n to be
    // distinct: 4 c_{n-1} paths.
    const double shifted = -(std::log(4.0 * static_cast<double>(c[n - 1])) - nn * std::log(4.0)) / nn;
    worst_shifted = std::max(worst_shifted, std::abs(p.estimate - shifted));
  }
  rate_ok = rate_ok && worst <= 1e-13;
  return {head && rate_ok, fmt("c_1..c_4 = %llu %llu %llu %llu, c_12 = %llu; max |I_n(1) + (1/n) log(c_n/4^n)| "
                               "= %.3g over n <= 12 (with 4 c_{n-1} in place of c_n: %.3g)",
                               static_cast<unsigned long long>(c[1]), static_cast<unsigned long long>(c[2]),
                               static_cast<unsigned long long>(c[3]), static_cast<unsigned long long>(c[4]),
                               static_cast<unsigned long long>(c[12]), worst, worst_shifted)};
}

// Weakly self-avoiding walk properties at desk scale.
Outcome wsaw_properties() {
  std::ostringstream detail;
  bool pass = true;

  // a_{2n} <= a_n on exact rungs.
  int halving_violations = 0;
  std::string first_violation;
  for (auto [d, top] : {std::pair{2, 10}, std::pair{3, 8}}) {
    std::vector<QHistogram> hist;
    for (int n = 1; n <= top; n *= 2) hist.push_back(q_histogram_exact(d, n));
    for (double u : {1e-3, 1e-2, 0.1, 1.0}) {
      for (std::size_t i = 0; i + 1 < hist.size(); ++i) {
        const double an = -hist[i].log_laplace(u) / hist[i].n;
        const double a2n = -hist[i + 1].log_laplace(u) / hist[i + 1].n;
        if (a2n > an + 1e-15) {
          if (halving_violations++ == 0) {
            first_violation = fmt("d=%d u=%g a_%d=%.6g > a_%d=%.6g", d, u, hist[i + 1].n, a2n, hist[i].n, an);
          }
        }
      }
    }
  }
  pass = pass && halving_violations == 0;
  detail << "a_2n <= a_n: " << halving_violations << " violations";
  if (halving_violations > 0) detail << " (first: " << first_violation << ")";

  // Concavity in u of exact a_n.
  double worst_second = -1e300;
  for (auto [d, n] : {std::pair{2, 10}, std::pair{3, 8}}) {
    const QHistogram h = q_histogram_exact(d, n);
    std::vector<double> a;
    for (int k = 0; k <= 40; ++k) a.push_back(-h.log_laplace(0.05 * k) / n);
    for (std::size_t k = 1; k + 1 < a.size(); ++k) worst_second = std::max(worst_second, a[k + 1] - 2 * a[k] + a[k - 1]);
  }
  const bool concave = worst_second <= 1e-14;
  pass = pass && concave;
  detail << fmt("; concavity: max second difference %.3g", worst_second);

  // d = 3: lambda_3 u - a_n(u) >= -3 sigma.
  const McPlan plan{20000, 7, 1};
  const double lambda3 = lambda_constant(3);
  for (double u : {1e-3, 1e-2}) {
    const WsawRung r = wsaw_rung_mc(3, 4096, u, plan);
    const double gap = lambda3 * u - r.a_n;
    const bool ok = gap >= -3 * r.std_error;
    pass = pass && ok;
    detail << fmt("; d=3 u=%g: lambda_3 u - a_4096 = %.4g (sigma %.2g)", u, gap, r.std_error);
  }

  // d = 2: a_n(u) / (u log(1/u)) within a factor 2 of 2/pi.
  const double u = 1e-3;
  const WsawRung r2 = wsaw_rung_mc(2, 4096, u, plan);
  const double ratio = r2.a_n / (u * std::log(1.0 / u)) / (2.0 / std::numbers::pi);
  pass = pass && ratio >= 0.5 && ratio <= 2.0;
  detail << fmt("; d=2 u=1e-3: a_4096 / (u log(1/u)) = %.4f x 2/pi", ratio);
  return {pass, detail.str()};
}

Outcome ballot_identity() {
  const BallotReport r = ballot_check(20);
  int bad = 0;
  for (const auto& row : r.rows) bad += row.match ? 0 : 1;
  return {r.all_match, fmt("%zu (n, k) rows for n <= 20, %d mismatches", r.rows.size(), bad)};
}

Outcome bridge_series() {
  const double p2 = bridge_probability_exact(1, 2);
  const double p3 = bridge_probability_exact(1, 3);
  const bool exact_ok = std::abs(p2 - 0.25) < 1e-15 && std::abs(p3 - 0.125) < 1e-15;
  const BridgeSeries s = bridge_probability(2, {1024, 2048}, BridgeMethod::kMonteCarlo, McPlan{10000000, 99, 1});
  const double ratio = s.ratios.at(0);
  const bool ratio_ok = ratio >= 0.85 && ratio <= 1.15;
  return {exact_ok && ratio_ok,
          fmt("d=1 P(B_2) = %.17g, P(B_3) = %.17g; d=2 n P(B_n) = %.4f (n=1024), %.4f (n=2048), ratio %.4f "
              "(window [0.85, 1.15], 1e7 samples)",
              p2, p3, s.rungs[0].n_times_p, s.rungs[1].n_times_p, ratio)};
}

// Free-energy sandwich on a fixed set of ladders and the critical scan.
Outcome sandwich_and_scan() {
  std::ostringstream detail;
  bool pass = true;
  const ChargeLaw law = ChargeLaw::gaussian();
  LadderOptions opt;
  opt.mc.samples = 100000;
  opt.mc.seed = 11;
  int failed = 0;
  int ladders = 0;
  for (double delta : {0.25, 0.5, 1.0}) {
    for (double beta : {delta * delta / 8.0, delta * delta}) {
      const LadderResult r = free_energy_ladder(law, {delta, beta}, 2, {16, 32, 64, 128, 256}, opt);
      ++ladders;
      if (!r.sandwich_ok) {
        ++failed;
        detail << fmt("ladder delta=%g beta=%g: F = %.5f +- %.1g outside [f = %.5f, 0]; ", delta, beta, r.f,
                      r.f_error, r.f_delta);
      }
    }
  }
  pass = pass && failed == 0;
  detail << fmt("%d of %d ladders inside the sandwich; ", ladders - failed, ladders);

  ScanOptions so;
  so.mc.samples = 100000;
  so.mc.seed = 5;
  so.tol = 0.004;
  so.beta_max_factor = 1.0;
  const CriticalScan scan = critical_scan(law, {0.25, 0.5, 1.0}, 2, 512, so);
  bool ends_ok = true;
  for (const ScanEntry& e : scan.entries) {
    const double width = e.beta_hi - e.beta_lo;
    const bool ok = e.resolved && e.beta_hi <= e.delta * e.delta / 2.0 + width;
    ends_ok = ends_ok && ok;
    detail << fmt("delta=%g bracket [%.4f, %.4f] vs delta^2/2 = %.4f%s; ", e.delta, e.beta_lo, e.beta_hi,
                  e.delta * e.delta / 2.0, ok ? "" : " (too high)");
  }
  pass = pass && ends_ok && scan.monotone;
  detail << (scan.monotone ? "brackets monotone" : "brackets not monotone");
  return {pass, detail.str()};
}

Outcome superadditivity_certificate() {
  const double delta = 20.0;
  const double beta = 1.5 * delta * delta / (4.0 * std::log(delta));
  const BoundReport r = check_superadditivity(ChargeLaw::gaussian(), {delta, beta}, 200);
  const double margin = r.fitted.count("min_pair_margin") ? r.fitted.at("min_pair_margin") : r.worst_margin;
  std::string where;
  if (r.fitted.count("argmin_m")) {
    where = fmt(" at (m, n) = (%g, %g)", r.fitted.at("argmin_m"), r.fitted.at("argmin_n"));
  }
  return {margin >= 0.0, fmt("Gaussian delta=20 beta=%.4f, L=200: min pair margin %.5g%s", beta, margin, where.c_str())};
}

struct Check {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Check>& checks() {
  static const std::vector<Check> all = {
      {"oracle equivalence", oracle_equivalence},
      {"gaussian closed form", gaussian_closed_form},
      {"symmetric unit bound", symmetric_unit_bound},
      {"expected self-intersections d=2", expected_q_d2},
      {"lambda_3", lambda_d3},
      {"self-avoiding walk counts", saw_counts_d2},
      {"weakly self-avoiding walk", wsaw_properties},
      {"ballot identity", ballot_identity},
      {"bridge series", bridge_series},
      {"free-energy sandwich and critical scan", sandwich_and_scan},
      {"super-additivity certificate", superadditivity_certificate},
  };
  return all;
}

bool run_one(std::size_t k) {
  const Check& c = checks()[k - 1];
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k, c.name, o.detail.c_str(), secs);
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 2) {
    std::fprintf(stderr, "usage: acceptance [1-%zu]\n", checks().size());
    return 2;
  }
  if (argc == 2) {
    const int k = std::atoi(argv[1]);
    if (k < 1 || static_cast<std::size_t>(k) > checks().size()) {
      std::fprintf(stderr, "unknown check %s\n", argv[1]);
      return 2;
    }
    return run_one(static_cast<std::size_t>(k)) ? 0 : 1;
  }
  int failed = 0;
  for (std::size_t k = 1; k <= checks().size(); ++k) failed += run_one(k) ? 0 : 1;
  return failed == 0 ? 0 : 1;
}

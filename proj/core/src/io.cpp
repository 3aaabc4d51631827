#include "cpoly/io.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace cpoly {

namespace {

using nlohmann::json;

// NaN and infinities become null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string dump(const json& j) { return j.dump(); }

json estimate_json(const PartitionEstimate& e) {
  return {{"n", e.n},
          {"quantity", to_string(e.quantity)},
          {"log_value", num(e.log_value)},
          {"method", to_string(e.method)},
          {"stderr", num(e.std_error)},
          {"samples", e.samples},
          {"seed", e.seed},
          {"shards", e.shards},
          {"ess", num(e.ess)},
          {"ess_warning", e.ess_warning}};
}

json wsaw_rungs(const std::vector<WsawRung>& rungs) {
  json a = json::array();
  for (const auto& r : rungs) {
    a.push_back({{"n", r.n}, {"a_n", num(r.a_n)}, {"stderr", num(r.std_error)}, {"exact", r.exact}, {"ess", num(r.ess)}});
  }
  return a;
}

class Csv {
 public:
  explicit Csv(const std::string& header) {
    os_.precision(17);
    os_ << header << '\n';
  }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cells, first = false), ...);
    os_ << '\n';
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

}  // namespace

const char* version() { return CPOLY_VERSION; }

std::string to_json(const PartitionEstimate& e) { return dump(estimate_json(e)); }

std::string to_json(const LadderResult& r) {
  json rungs = json::array();
  for (const auto& g : r.rungs) {
    json x = {{"n", g.n},
              {"a_n", num(g.a_n)},
              {"a_n_stderr", num(g.a_n_error)},
              {"excluded", g.excluded},
              {"estimate", estimate_json(g.estimate)}};
    if (g.confinement_a_n) {
      x["confinement_a_n"] = num(*g.confinement_a_n);
      x["confinement_stderr"] = num(g.confinement_error);
    }
    rungs.push_back(x);
  }
  return dump({{"law", r.law_id},
               {"delta", r.tilt.delta},
               {"beta", r.tilt.beta},
               {"d", r.dim},
               {"rungs", rungs},
               {"F_star", num(r.f_star)},
               {"F_star_stderr", num(r.f_star_error)},
               {"F", num(r.f)},
               {"F_stderr", num(r.f_error)},
               {"f_delta", num(r.f_delta)},
               {"monotonicity", r.monotonicity},
               {"sandwich_ok", r.sandwich_ok}});
}

std::string to_json(const CriticalScan& s) {
  json entries = json::array();
  for (const auto& e : s.entries) {
    json probes = json::array();
    for (const auto& p : e.probes) {
      probes.push_back({{"beta", p.beta}, {"statistic", num(p.statistic)}, {"stderr", num(p.std_error)},
                        {"decision", p.decision}});
    }
    entries.push_back({{"delta", e.delta},
                       {"beta_lo", e.beta_lo},
                       {"beta_hi", e.beta_hi},
                       {"beta_hat", e.beta_hat},
                       {"resolved", e.resolved},
                       {"probes", probes}});
  }
  return dump({{"law", s.law_id}, {"d", s.dim}, {"n", s.n}, {"entries", entries}, {"monotone", s.monotone}});
}

std::string to_json(const BetaCPrediction& p) {
  return dump({{"regime", p.regime},
               {"lower", num(p.lower)},
               {"upper", num(p.upper)},
               {"kappa", num(p.kappa)},
               {"kappa_lower", num(p.kappa_lower)}});
}

std::string to_json(const SingleSiteTable& t) {
  json rows = json::array();
  for (std::int64_t l = 0; l <= t.max_ell(); ++l) {
    rows.push_back({{"ell", l}, {"log_value", num(t.log_value(l))}, {"mode", to_string(t.mode(l))},
                    {"err_bound", num(t.error(l))}});
  }
  return dump({{"law", t.law_id()},
               {"delta", t.tilt().delta},
               {"beta", t.tilt().beta},
               {"kind", t.kind() == SingleSiteTable::Kind::kGStar ? "g_star" : "g"},
               {"rows", rows}});
}

std::string to_json(const BoundReport& r) {
  json params = json::object();
  for (const auto& [k, v] : r.parameters) params[k] = num(v);
  json fitted = json::object();
  for (const auto& [k, v] : r.fitted) fitted[k] = num(v);
  json j = {{"name", r.name},         {"parameters", params}, {"grid", r.grid},  {"worst_margin", num(r.worst_margin)},
            {"pass", r.pass},         {"fitted", fitted},     {"notes", r.notes}};
  if (r.offending) {
    json off = json::object();
    for (const auto& [k, v] : *r.offending) off[k] = num(v);
    j["offending"] = off;
  } else {
    j["offending"] = nullptr;
  }
  return dump(j);
}

std::string to_json(const GreenConstants& g) {
  return dump({{"d", g.dim},
               {"G_d", num(g.g_d)},
               {"lambda_d", num(g.lambda_d)},
               {"truncation", g.truncation},
               {"tail_estimate", num(g.tail_estimate)},
               {"tail_bound", num(g.tail_bound)},
               {"G_d_half", num(g.g_d_half)},
               {"consistency", num(g.consistency)},
               {"converged", g.converged}});
}

std::string to_json(const std::vector<ExpectedQ>& series) {
  json a = json::array();
  for (const auto& e : series) a.push_back({{"d", e.dim}, {"n", e.n}, {"value", num(e.value)}, {"ratio", num(e.ratio)}});
  return dump({{"expected_q", a}});
}

std::string to_json(const QHistogram& h) {
  json counts = json::array();
  for (const auto& [q, c] : h.counts) {
    const auto it = h.bridge_counts.find(q);
    counts.push_back({q, c, it == h.bridge_counts.end() ? 0 : it->second});
  }
  return dump({{"d", h.dim},
               {"n", h.n},
               {"total", h.total},
               {"mean", num(h.mean())},
               {"variance", num(h.variance())},
               {"q_count_bridge", counts}});
}

std::string to_json(const QMoments& m) {
  return dump({{"mean", num(m.mean)}, {"variance", num(m.variance)}, {"mean_stderr", num(m.mean_se)},
               {"samples", m.samples}});
}

std::string to_json(const TailEstimate& t) {
  return dump({{"log_p", num(t.log_p)},
               {"log_stderr", num(t.log_se)},
               {"hits", t.hits},
               {"samples", t.samples},
               {"gamma", t.gamma},
               {"ess", num(t.ess)},
               {"zero_hits", t.zero_hits}});
}

std::string to_json(const RateCurve& c) {
  json pts = json::array();
  for (const auto& p : c.points) {
    json x = {{"t", p.t},
              {"n", p.n},
              {"estimate", num(p.estimate)},
              {"stderr", num(p.std_error)},
              {"method", p.method},
              {"lower_bounded_only", p.lower_bounded_only}};
    x["bridge_upper"] = p.has_bridge_upper ? num(p.bridge_upper) : json(nullptr);
    pts.push_back(x);
  }
  return dump({{"kind", c.kind}, {"d", c.dim}, {"points", pts}});
}

std::string to_json(const WsawResult& r) {
  json j = {{"d", r.dim},
            {"u", r.u},
            {"rungs", wsaw_rungs(r.rungs)},
            {"bridge_rungs", wsaw_rungs(r.bridge_rungs)},
            {"lower", num(r.lower)},
            {"lower_stderr", num(r.lower_error)},
            {"consistent", r.consistent}};
  j["upper"] = r.has_upper ? num(r.upper) : json(nullptr);
  j["upper_stderr"] = r.has_upper ? num(r.upper_error) : json(nullptr);
  return dump(j);
}

std::string to_json(const VaradhanReport& r) {
  json res = json::array();
  for (double x : r.residuals) res.push_back(num(x));
  return dump({{"max_residual", num(r.max_residual)}, {"argmax_u", r.argmax_u}, {"residuals", res}});
}

std::string to_json(const RangeProbe& p) {
  json pts = json::array();
  for (const auto& x : p.points) {
    json q = {{"s", x.s},
              {"probability", num(x.probability)},
              {"exponent", num(x.exponent)},
              {"stderr", num(x.std_error)},
              {"one_sided", x.one_sided}};
    if (p.trim_threshold > 0) {
      q["trimmed_probability"] = num(x.trimmed_probability);
      q["trimmed_exponent"] = num(x.trimmed_exponent);
    }
    pts.push_back(q);
  }
  return dump({{"d", p.dim},
               {"n", p.n},
               {"A", p.trim_threshold},
               {"theta", p.theta},
               {"samples", p.samples},
               {"method", p.method},
               {"points", pts},
               {"note", p.note}});
}

std::string to_json(const ExpansionProbe& p) {
  json gap = json::array();
  for (double g : p.gap) gap.push_back(num(g));
  json err = json::array();
  for (double g : p.gap_error) err.push_back(num(g));
  return dump({{"d", p.dim},
               {"u", p.us},
               {"gap", gap},
               {"gap_stderr", err},
               {"n_used", p.n_used},
               {"positive", p.positive},
               {"increasing", p.increasing},
               {"exponent", num(p.exponent)},
               {"exponent_stderr", num(p.exponent_se)},
               {"prefactor", num(p.prefactor)},
               {"prefactor_stderr", num(p.prefactor_se)},
               {"note", p.note}});
}

std::string to_json(const BridgeSeries& s) {
  json rungs = json::array();
  for (const auto& r : s.rungs) {
    rungs.push_back({{"n", r.n},
                     {"p_hat", num(r.p_hat)},
                     {"stderr", num(r.std_error)},
                     {"n_times_p", num(r.n_times_p)},
                     {"exact", r.exact},
                     {"one_sided", r.one_sided},
                     {"hits", r.hits},
                     {"samples", r.samples}});
  }
  return dump({{"d", s.dim}, {"rungs", rungs}, {"ratios", s.ratios}});
}

std::string to_json(const BallotReport& r) {
  json rows = json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"n", x.n}, {"k", x.k}, {"positive", x.positive}, {"all", x.all}, {"match", x.match}});
  }
  return dump({{"n_max", r.n_max}, {"all_match", r.all_match}, {"rows", rows}});
}

std::string to_json(const ConditionalQSeries& s) {
  json pts = json::array();
  for (const auto& p : s.points) {
    pts.push_back({{"m", p.m},
                   {"mean_over_m", num(p.mean)},
                   {"stderr", num(p.std_error)},
                   {"bridges", p.bridges},
                   {"proposals", p.proposals},
                   {"exceeds", p.exceeds}});
  }
  return dump({{"d", s.dim}, {"lambda_d", num(s.lambda)}, {"tol", s.tol}, {"points", pts}});
}

std::string to_json(const SiltTailSeries& s) {
  json pts = json::array();
  for (const auto& p : s.points) {
    pts.push_back({{"m", p.m},
                   {"threshold", p.threshold},
                   {"probability", num(p.probability)},
                   {"stderr", num(p.std_error)},
                   {"bridges", p.bridges}});
  }
  return dump({{"eps", s.eps}, {"points", pts}});
}

std::string saw_counts_json(int dim, const std::vector<std::uint64_t>& counts) {
  json mu = json::array();
  for (std::size_t n = 1; n < counts.size(); ++n) {
    mu.push_back(std::pow(static_cast<double>(counts[n]), 1.0 / static_cast<double>(n)));
  }
  return dump({{"d", dim}, {"counts", counts}, {"mu_hat", mu}});
}

// ---------------------------------------------------------------------------

std::string to_csv(const LadderResult& r) {
  Csv csv("n,a_n,a_n_error,method,ess,excluded,confinement_a_n");
  for (const auto& g : r.rungs) {
    csv.row(g.n, g.a_n, g.a_n_error, to_string(g.estimate.method), g.estimate.ess, g.excluded ? 1 : 0,
            g.confinement_a_n ? std::to_string(*g.confinement_a_n) : std::string());
  }
  return csv.str();
}

std::string to_csv(const CriticalScan& s) {
  Csv csv("delta,beta_lo,beta_hi,beta_hat,resolved,probes");
  for (const auto& e : s.entries) csv.row(e.delta, e.beta_lo, e.beta_hi, e.beta_hat, e.resolved ? 1 : 0, e.probes.size());
  return csv.str();
}

std::string to_csv(const std::vector<ExpectedQ>& series) {
  Csv csv("n,value,ratio");
  for (const auto& e : series) csv.row(e.n, e.value, e.ratio);
  return csv.str();
}

std::string to_csv(const QHistogram& h) {
  Csv csv("q,count,bridge_count");
  for (const auto& [q, c] : h.counts) {
    const auto it = h.bridge_counts.find(q);
    csv.row(q, c, it == h.bridge_counts.end() ? 0 : it->second);
  }
  return csv.str();
}

std::string to_csv(const RateCurve& c) {
  Csv csv("t,n,estimate,std_error,method,lower_bounded_only,bridge_upper");
  for (const auto& p : c.points) {
    csv.row(p.t, p.n, p.estimate, p.std_error, p.method, p.lower_bounded_only ? 1 : 0,
            p.has_bridge_upper ? std::to_string(p.bridge_upper) : std::string());
  }
  return csv.str();
}

std::string to_csv(const WsawResult& r) {
  Csv csv("kind,n,a_n,std_error,exact,ess");
  for (const auto& g : r.rungs) csv.row("walk", g.n, g.a_n, g.std_error, g.exact ? 1 : 0, g.ess);
  for (const auto& g : r.bridge_rungs) csv.row("bridge", g.n, g.a_n, g.std_error, g.exact ? 1 : 0, g.ess);
  return csv.str();
}

std::string to_csv(const RangeProbe& p) {
  Csv csv("s,probability,exponent,std_error,one_sided,trimmed_probability,trimmed_exponent");
  for (const auto& x : p.points) {
    csv.row(x.s, x.probability, x.exponent, x.std_error, x.one_sided ? 1 : 0, x.trimmed_probability,
            x.trimmed_exponent);
  }
  return csv.str();
}

std::string to_csv(const ExpansionProbe& p) {
  Csv csv("u,n,gap,gap_error");
  for (std::size_t i = 0; i < p.us.size(); ++i) csv.row(p.us[i], p.n_used[i], p.gap[i], p.gap_error[i]);
  return csv.str();
}

std::string to_csv(const BridgeSeries& s) {
  Csv csv("n,p_hat,stderr,n_times_p,exact");
  for (const auto& r : s.rungs) csv.row(r.n, r.p_hat, r.std_error, r.n_times_p, r.exact ? 1 : 0);
  return csv.str();
}

std::string to_csv(const BallotReport& r) {
  Csv csv("n,k,positive,all,match");
  for (const auto& x : r.rows) csv.row(x.n, x.k, x.positive, x.all, x.match ? 1 : 0);
  return csv.str();
}

std::string to_csv(const ConditionalQSeries& s) {
  Csv csv("m,mean,std_error,bridges,proposals,exceeds");
  for (const auto& p : s.points) csv.row(p.m, p.mean, p.std_error, p.bridges, p.proposals, p.exceeds ? 1 : 0);
  return csv.str();
}

std::string to_csv(const SiltTailSeries& s) {
  Csv csv("m,threshold,probability,std_error");
  for (const auto& p : s.points) csv.row(p.m, p.threshold, p.probability, p.std_error);
  return csv.str();
}

std::string saw_counts_csv(const std::vector<std::uint64_t>& counts) {
  Csv csv("n,c_n,mu_hat");
  for (std::size_t n = 0; n < counts.size(); ++n) {
    csv.row(n, counts[n], n == 0 ? 1.0 : std::pow(static_cast<double>(counts[n]), 1.0 / static_cast<double>(n)));
  }
  return csv.str();
}

}  // namespace cpoly

// cpoly: command-line front end to the charged-polymer lab.
//
// Every run appends one JSON line per result (config echo, version, result)
// to --out, to $CPOLY_OUTPUT_DIR/<command>.jsonl, or to stdout. --csv swaps
// the JSON line for a plot-ready table. Exit codes: 0 ok, 2 invalid input,
// 3 budget or sampling failure.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_parse.hpp"
#include "cpoly/bridge_lab.hpp"
#include "cpoly/error.hpp"
#include "cpoly/io.hpp"
#include "cpoly/ldp_lab.hpp"
#include "cpoly/partition.hpp"
#include "cpoly/single_site.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
using namespace cpoly;

constexpr int kExitInvalid = 2;
constexpr int kExitBudget = 3;

struct Output {
  std::string path;
  bool csv = false;
};

// Options shared by most subcommands.
struct Common {
  std::string law = "gaussian";
  double delta = 0.0;
  double beta = 0.0;
  int d = 2;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  unsigned shards = 1;
  CLI::Option* seed_opt = nullptr;
};

// Numbers stay numbers in the echo; everything else is a string.
json scalar(const std::string& text) {
  if (!text.empty() && (std::isdigit(static_cast<unsigned char>(text.front())) || text.front() == '-')) {
    const json j = json::parse(text, nullptr, false);
    if (j.is_number()) return j;
  }
  return text;
}

json config_echo(const CLI::App* app) {
  json echo = json::object();
  for (const CLI::App* a = app; a != nullptr; a = a->get_parent()) {
    for (const CLI::Option* opt : a->get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string& name = opt->get_lnames().front();
      if (name == "help" || name == "config" || name == "version" || echo.contains(name)) continue;
      if (opt->get_expected_max() == 0) {
        echo[name] = opt->count() > 0;
      } else {
        echo[name] = scalar(opt->count() > 0 ? opt->results().back() : opt->get_default_str());
      }
    }
  }
  return echo;
}

std::string command_path(const CLI::App* app) {
  std::string name;
  for (const CLI::App* a = app; a != nullptr && a->get_parent() != nullptr; a = a->get_parent()) {
    name = name.empty() ? a->get_name() : a->get_name() + " " + name;
  }
  return name;
}

class Emitter {
 public:
  Emitter(const Output& out, const CLI::App* app) : out_(out), app_(app) {}

  void emit(const std::string& json_text, const std::string& csv_text = {}) {
    std::ostream& os = stream();
    if (out_.csv && !csv_text.empty()) {
      os << csv_text;
    } else {
      json record = {{"op", command_path(app_)},
                     {"version", cpoly::version()},
                     {"config", config_echo(app_)},
                     {"result", json::parse(json_text)}};
      os << record.dump() << '\n';
    }
    os.flush();
  }

 private:
  std::ostream& stream() {
    if (file_) return *file_;
    std::string path = out_.path;
    if (path.empty()) {
      if (const char* dir = std::getenv("CPOLY_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
        std::string base = command_path(app_);
        for (char& c : base) {
          if (c == ' ') c = '_';
        }
        path = (std::filesystem::path(dir) / (base + (out_.csv ? ".csv" : ".jsonl"))).string();
      }
    }
    if (path.empty()) return std::cout;
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    file_.emplace(path, std::ios::app);
    if (!*file_) throw InvalidArgument("cannot open output file '" + path + "'");
    return *file_;
  }

  Output out_;
  const CLI::App* app_;
  std::optional<std::ofstream> file_;
};

// Counts may be written in scientific notation (1e5) when integral.
const CLI::Validator kCount(
    [](std::string& text) {
      if (text.find_first_of("eE.") == std::string::npos) return std::string();
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(text, &used);
      } catch (const std::exception&) {
        return "not a number: " + text;
      }
      if (used != text.size() || !(v >= 0) || v != std::floor(v) || v > 1.8e19) {
        return "not a non-negative integer: " + text;
      }
      text = std::to_string(static_cast<std::uint64_t>(v));
      return std::string();
    },
    "COUNT");

void require_seed(const Common& c, const std::string& why) {
  if (c.seed_opt == nullptr || c.seed_opt->count() == 0) {
    throw InvalidArgument("--seed is required: " + why + " uses Monte Carlo");
  }
}

CLI::App* command(CLI::App& parent, const std::string& name, const std::string& description) {
  CLI::App* sub = parent.add_subcommand(name, description);
  sub->add_option("--config", "key=value file mirroring the flags of this command; explicit flags win");
  return sub;
}

void add_law(CLI::App* app, Common& c) {
  app->add_option("--law", c.law, "charge law: rademacher, gaussian, uniform, three_point(N), lattice(v:p,...)");
}
void add_tilt(CLI::App* app, Common& c) {
  app->add_option("--delta", c.delta, "charge bias delta (>= 0)");
  app->add_option("--beta", c.beta, "inverse temperature beta (>= 0)");
}
void add_dim(CLI::App* app, Common& c) {
  app->add_option("--d", c.d, "lattice dimension (1..5)")->check(CLI::Range(1, 5));
}
void add_mc(CLI::App* app, Common& c, std::uint64_t samples) {
  c.samples = samples;
  app->add_option("--samples", c.samples, "Monte Carlo samples")->transform(kCount);
  c.seed_opt = app->add_option("--seed", c.seed, "random seed (required for Monte Carlo; no clock default)");
  app->add_option("--shards", c.shards, "worker threads (0 = all cores)");
}

McConfig mc_config(const Common& c, std::uint32_t batches) {
  McConfig mc;
  mc.samples = c.samples;
  mc.seed = c.seed;
  mc.shards = c.shards;
  mc.batches = batches;
  return mc;
}

McPlan plan(const Common& c) { return McPlan{c.samples, c.seed, c.shards}; }

// Expands `--config FILE` into flags. Lines are key=value (or a bare key for
// a switch); '#' starts a comment. Keys also given on the command line are
// skipped so explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file '" + path + "'");
  auto given = [&](const std::string& flag) {
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  auto trim = [](std::string t) {
    const auto b = t.find_first_not_of(" \t\r");
    const auto e = t.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
  };
  std::vector<std::string> extra;
  for (std::string line; std::getline(in, line);) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) != 0) key = "--" + key;
    if (given(key)) continue;
    if (eq == std::string::npos) {
      extra.push_back(key);
    } else {
      extra.push_back(key + "=" + trim(line.substr(eq + 1)));
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cpoly: annealed charged-polymer lab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(cpoly::version()));
  Output out;
  app.add_option("--out", out.path, "append results to this file (default: $CPOLY_OUTPUT_DIR/<command>.jsonl or stdout)");
  app.add_flag("--csv", out.csv, "emit a CSV table instead of a JSON line");

  std::function<void()> run;
  auto bind = [&](CLI::App* sub, std::function<void(Emitter&)> body) {
    sub->callback([&, sub, body] {
      run = [&, sub, body] {
        Emitter em(out, sub);
        body(em);
      };
    });
  };

  // single-site -------------------------------------------------------------
  Common ss;
  std::int64_t ss_lmax = 100;
  std::string ss_kind = "g_star";
  std::string ss_mode = "auto";
  {
    CLI::App* sub = command(app, "single-site", "table of log g*(l) or log g(l) for l = 0..lmax");
    add_law(sub, ss);
    add_tilt(sub, ss);
    sub->add_option("--lmax", ss_lmax, "largest site occupation l");
    sub->add_option("--kind", ss_kind, "g_star or g")->check(CLI::IsMember({"g_star", "g"}));
    sub->add_option("--mode", ss_mode, "auto, closed_form, exact_convolution, quadrature, monte_carlo");
    add_mc(sub, ss, 1000000);
    bind(sub, [&](Emitter& em) {
      const ChargeLaw law = cli::parse_law(ss.law);
      std::optional<EvalMode> mode;
      if (ss_mode != "auto") mode = parse_eval_mode(ss_mode);
      if (mode == EvalMode::kMonteCarlo) require_seed(ss, "monte_carlo mode");
      const auto table = SingleSiteTable::build(
          law, {ss.delta, ss.beta}, ss_lmax,
          ss_kind == "g" ? SingleSiteTable::Kind::kGTilted : SingleSiteTable::Kind::kGStar, mode, ss.shards,
          McOptions{ss.samples, ss.seed});
      em.emit(to_json(table), table.to_csv());
    });
  }

  // partition ---------------------------------------------------------------
  Common pt;
  int pt_n = 8;
  std::string pt_method = "exact";
  std::string pt_quantity = "Zstar";
  std::uint32_t pt_batches = 64;
  std::uint64_t pt_budget = static_cast<std::uint64_t>(kDefaultPathBudget);
  {
    CLI::App* sub = command(app, "partition", "Z_n or Z*_n by enumeration, double enumeration or Monte Carlo");
    add_law(sub, pt);
    add_tilt(sub, pt);
    add_dim(sub, pt);
    sub->add_option("--n", pt_n, "polymer length")->check(CLI::PositiveNumber);
    sub->add_option("--method", pt_method, "exact, double, mc or confined")
        ->check(CLI::IsMember({"exact", "double", "mc", "confined"}));
    sub->add_option("--quantity", pt_quantity, "Z or Zstar")->check(CLI::IsMember({"Z", "Zstar"}));
    sub->add_option("--batches", pt_batches, "Monte Carlo batches (>= 32)");
    sub->add_option("--budget", pt_budget, "enumeration budget in paths")->transform(kCount);
    add_mc(sub, pt, 100000);
    bind(sub, [&](Emitter& em) {
      const ChargeLaw law = cli::parse_law(pt.law);
      const TiltParams tilt{pt.delta, pt.beta};
      const Quantity q = pt_quantity == "Z" ? Quantity::kZ : Quantity::kZStar;
      PartitionEstimate e;
      if (pt_method == "exact") {
        e = z_exact(law, tilt, pt.d, pt_n, q, pt.shards, pt_budget);
      } else if (pt_method == "double") {
        e = z_double_enum(law, tilt, pt.d, pt_n, q, pt_budget);
      } else {
        require_seed(pt, "method " + pt_method);
        if (pt_method == "mc") {
          e = z_mc(law, tilt, pt.d, pt_n, mc_config(pt, pt_batches), q);
        } else {
          if (q != Quantity::kZStar) throw InvalidArgument("the confinement estimator targets Zstar");
          e = z_confined(law, tilt, pt.d, pt_n, mc_config(pt, pt_batches));
        }
      }
      em.emit(to_json(e));
    });
  }

  // free-energy -------------------------------------------------------------
  Common fe;
  std::string fe_ladder = "16:1024";
  std::uint32_t fe_batches = 64;
  std::uint64_t fe_exact_budget = 1048576;
  bool fe_confinement = false;
  {
    CLI::App* sub = command(app, "free-energy", "ladder a_n = (1/n) log Z*_n, extrapolated F* and F");
    add_law(sub, fe);
    add_tilt(sub, fe);
    add_dim(sub, fe);
    sub->add_option("--ladder", fe_ladder, "rungs: a:b doubles from a to b, or a comma list");
    sub->add_option("--batches", fe_batches, "Monte Carlo batches (>= 32)");
    sub->add_option("--exact-budget", fe_exact_budget, "rungs with at most this many walks are enumerated")->transform(kCount);
    sub->add_flag("--confinement", fe_confinement, "also run the confinement lower-bound estimator");
    add_mc(sub, fe, 100000);
    bind(sub, [&](Emitter& em) {
      const ChargeLaw law = cli::parse_law(fe.law);
      const auto ladder = cli::parse_ladder(fe_ladder);
      bool needs_mc = fe_confinement;
      for (auto n : ladder) needs_mc = needs_mc || walk_count(fe.d, static_cast<int>(std::min<std::int64_t>(n, 1000))) > fe_exact_budget;
      if (needs_mc) require_seed(fe, "a Monte Carlo rung");
      LadderOptions opt;
      opt.mc = mc_config(fe, fe_batches);
      opt.exact_budget = fe_exact_budget;
      opt.with_confinement = fe_confinement;
      const LadderResult r = free_energy_ladder(law, {fe.delta, fe.beta}, fe.d, ladder, opt);
      em.emit(to_json(r), to_csv(r));
    });
  }

  // critical-curve ----------------------------------------------------------
  Common cc;
  std::string cc_grid = "0.25,0.5,1";
  std::int64_t cc_n = 512;
  std::uint32_t cc_batches = 64;
  ScanOptions cc_opt;
  {
    CLI::App* sub = command(app, "critical-curve", "bisection scan for beta_c(delta) with asymptotic predictions");
    add_law(sub, cc);
    add_dim(sub, cc);
    sub->add_option("--delta-grid", cc_grid, "delta values: lo:hi:step or a comma list");
    sub->add_option("--n", cc_n, "polymer length; the statistic compares n/2 and n");
    sub->add_option("--batches", cc_batches, "Monte Carlo batches (>= 32)");
    sub->add_option("--tol", cc_opt.tol, "stop when the bracket is narrower than this (in beta)");
    sub->add_option("--beta-max-factor", cc_opt.beta_max_factor, "initial upper end is this times delta^2");
    sub->add_option("--max-probes", cc_opt.max_probes, "bisection probes per delta");
    add_mc(sub, cc, 100000);
    bind(sub, [&](Emitter& em) {
      require_seed(cc, "critical-curve");
      const ChargeLaw law = cli::parse_law(cc.law);
      const auto deltas = cli::parse_grid(cc_grid);
      cc_opt.mc = mc_config(cc, cc_batches);
      const CriticalScan scan = critical_scan(law, deltas, cc.d, cc_n, cc_opt);
      json result = json::parse(to_json(scan));
      json predictions = json::array();
      for (double delta : deltas) {
        json p = {{"delta", delta}};
        for (auto [name, regime] : {std::pair{"small", AsymptoticRegime::kSmall}, std::pair{"large", AsymptoticRegime::kLarge}}) {
          try {
            p[name] = json::parse(to_json(beta_c_asymptote(law, delta, regime, cc.d)));
          } catch (const InvalidArgument& e) {
            p[name] = {{"unavailable", e.what()}};
          }
        }
        predictions.push_back(p);
      }
      result["predictions"] = predictions;
      em.emit(result.dump(), to_csv(scan));
    });
  }

  // silt --------------------------------------------------------------------
  CLI::App* silt = app.add_subcommand("silt", "self-intersection local time Q_n");
  silt->require_subcommand(1);
  silt->fallthrough();
  Common sl;
  std::int64_t sl_n = 4;
  std::string sl_ladder;
  double sl_eps = 1e-4;
  std::int64_t sl_trunc = 1 << 14;
  std::uint64_t sl_budget = static_cast<std::uint64_t>(kDefaultPathBudget);
  std::int64_t sl_qmax = -1;
  double sl_t = 0.0;
  double sl_gamma = -1.0;
  bool sl_bridge = false;
  double sl_tol = 0.05;
  double sl_tail_eps = 0.25;
  {
    CLI::App* sub = command(*silt, "expected-q", "exact E[Q_n] from return probabilities");
    add_dim(sub, sl);
    sub->add_option("--n", sl_n, "walk length");
    sub->add_option("--ladder", sl_ladder, "several lengths instead of --n (a:b doubles)");
    bind(sub, [&](Emitter& em) {
      const std::vector<std::int64_t> ns = sl_ladder.empty() ? std::vector<std::int64_t>{sl_n} : cli::parse_ladder(sl_ladder);
      const auto series = expected_q_series(sl.d, ns);
      if (series.size() == 1) {
        em.emit(json({{"d", sl.d}, {"n", series[0].n}, {"value", series[0].value}, {"ratio", series[0].ratio}}).dump(),
                to_csv(series));
      } else {
        em.emit(to_json(series), to_csv(series));
      }
    });
  }
  {
    CLI::App* sub = command(*silt, "green", "Green function G_d and lambda_d");
    add_dim(sub, sl);
    sub->add_option("--eps", sl_eps, "required agreement of two truncation levels");
    sub->add_option("--truncation", sl_trunc, "number of return probabilities summed");
    bind(sub, [&](Emitter& em) { em.emit(to_json(green_constants(sl.d, sl_eps, sl_trunc))); });
  }
  {
    CLI::App* sub = command(*silt, "histogram", "exact law of Q_n (and on bridges) by enumeration");
    add_dim(sub, sl);
    sub->add_option("--n", sl_n, "walk length");
    sub->add_option("--budget", sl_budget, "enumeration budget in paths")->transform(kCount);
    sub->add_option("--shards", sl.shards, "worker threads (0 = all cores)");
    bind(sub, [&](Emitter& em) {
      const QHistogram h = q_histogram_exact(sl.d, static_cast<int>(sl_n), sl.shards, sl_budget);
      em.emit(to_json(h), to_csv(h));
    });
  }
  Common slm;
  {
    CLI::App* sub = command(*silt, "moments", "Monte Carlo mean and variance of Q_n");
    add_dim(sub, slm);
    sub->add_option("--n", sl_n, "walk length");
    add_mc(sub, slm, 100000);
    bind(sub, [&](Emitter& em) {
      require_seed(slm, "silt moments");
      em.emit(to_json(q_moments_mc(slm.d, static_cast<int>(sl_n), slm.samples, slm.seed, slm.shards)));
    });
  }
  Common slt;
  {
    CLI::App* sub = command(*silt, "tail", "P(Q_n <= q) by exponentially tilted sampling");
    add_dim(sub, slt);
    sub->add_option("--n", sl_n, "walk length");
    sub->add_option("--q-max", sl_qmax, "threshold q (or give --t)");
    sub->add_option("--t", sl_t, "threshold as t n");
    sub->add_option("--gamma", sl_gamma, "tilt; negative means match the tilted mean to the threshold");
    sub->add_flag("--bridge", sl_bridge, "restrict to the bridge event");
    add_mc(sub, slt, 100000);
    bind(sub, [&](Emitter& em) {
      require_seed(slt, "silt tail");
      const double nn = static_cast<double>(sl_n);
      const std::int64_t q = sl_qmax >= 0 ? sl_qmax : static_cast<std::int64_t>(std::floor(sl_t * nn + 1e-9));
      if (q < sl_n) throw InvalidArgument("threshold below n: Q_n >= n always");
      const double gamma = sl_gamma >= 0 ? sl_gamma
                                         : match_tilt(slt.d, static_cast<int>(sl_n), static_cast<double>(q), slt.seed);
      em.emit(to_json(q_tail(slt.d, static_cast<int>(sl_n), q, gamma, slt.samples, substream_seed(slt.seed, 1),
                             slt.shards, sl_bridge)));
    });
  }
  Common slc;
  {
    CLI::App* sub = command(*silt, "conditional", "E[Q_m | B_m] / m by bridge rejection sampling");
    slc.d = 3;
    add_dim(sub, slc);
    sub->add_option("--ladder", sl_ladder, "bridge lengths m")->required();
    sub->add_option("--tol", sl_tol, "flag when the ratio exceeds lambda_d (1 + tol)");
    add_mc(sub, slc, 10000);
    bind(sub, [&](Emitter& em) {
      require_seed(slc, "silt conditional");
      const auto s = conditional_q_bridge(slc.d, cli::parse_ladder(sl_ladder), plan(slc), sl_tol);
      em.emit(to_json(s), to_csv(s));
    });
  }
  Common slb;
  {
    CLI::App* sub = command(*silt, "bridge-tail", "d = 2: P(Q_m <= (1 + eps) lambda_2 m log m | B_m)");
    sub->add_option("--ladder", sl_ladder, "bridge lengths m")->required();
    sub->add_option("--eps", sl_tail_eps, "relative slack eps (> -1)");
    add_mc(sub, slb, 10000);
    bind(sub, [&](Emitter& em) {
      require_seed(slb, "silt bridge-tail");
      const auto s = bridge_silt_tail(cli::parse_ladder(sl_ladder), sl_tail_eps, plan(slb));
      em.emit(to_json(s), to_csv(s));
    });
  }

  // wsaw --------------------------------------------------------------------
  Common ws;
  std::string ws_mode = "bounds";
  std::string ws_u = "0.01";
  std::string ws_ladder = "64:4096";
  int ws_exact_max = 0;
  std::int64_t ws_bridge_max = 0;
  int ws_n = 12;
  double ws_m_factor = 10.0;
  std::int64_t ws_max_n = 4096;
  {
    CLI::App* sub = command(app, "wsaw", "weakly self-avoiding walk free energy f_wsaw(u)");
    ws.d = 3;
    add_dim(sub, ws);
    sub->add_option("--mode", ws_mode, "bounds, varadhan or expansion")
        ->check(CLI::IsMember({"bounds", "varadhan", "expansion"}));
    sub->add_option("--u", ws_u, "penalty u >= 0: one value, a comma list or lo:hi:step");
    sub->add_option("--ladder", ws_ladder, "rungs (bounds mode)");
    sub->add_option("--exact-max-n", ws_exact_max, "rungs up to this n come from exact histograms");
    sub->add_option("--bridge-max-n", ws_bridge_max, "sample bridge upper bounds up to this n")->transform(kCount);
    sub->add_option("--n", ws_n, "walk length of the exact histogram (varadhan mode)");
    sub->add_option("--m-factor", ws_m_factor, "expansion mode uses n = m_factor / u");
    sub->add_option("--max-n", ws_max_n, "cap on n in expansion mode")->transform(kCount);
    add_mc(sub, ws, 10000);
    bind(sub, [&](Emitter& em) {
      const auto us = cli::parse_grid(ws_u);
      if (ws_mode == "varadhan") {
        const QHistogram h = q_histogram_exact(ws.d, ws_n, ws.shards);
        em.emit(to_json(varadhan_residual(h, us)));
        return;
      }
      require_seed(ws, "wsaw " + ws_mode);
      if (ws_mode == "expansion") {
        const auto p = expansion_probe(ws.d, us, ws_m_factor, ws_max_n, plan(ws));
        em.emit(to_json(p), to_csv(p));
        return;
      }
      WsawOptions opt{plan(ws), ws_exact_max, ws_bridge_max};
      const auto ladder = cli::parse_ladder(ws_ladder);
      for (double u : us) {
        const auto r = wsaw_free_energy(ws.d, u, ladder, opt);
        em.emit(to_json(r), to_csv(r));
      }
    });
  }

  // rate-function -----------------------------------------------------------
  Common rf;
  std::string rf_t = "1,1.5,2";
  std::string rf_ladder = "8,12";
  std::string rf_method = "exact";
  {
    CLI::App* sub = command(app, "rate-function", "finite-n rate function -(1/n) log P(Q_n <= t n)");
    add_dim(sub, rf);
    sub->add_option("--t-grid", rf_t, "t values >= 1");
    sub->add_option("--ladder", rf_ladder, "walk lengths");
    sub->add_option("--method", rf_method, "exact or tilted")->check(CLI::IsMember({"exact", "tilted"}));
    add_mc(sub, rf, 10000);
    bind(sub, [&](Emitter& em) {
      if (rf_method == "tilted") require_seed(rf, "the tilted method");
      const auto c = rate_function(rf.d, cli::parse_grid(rf_t), cli::parse_ladder(rf_ladder),
                                   rf_method == "exact" ? RateMethod::kExact : RateMethod::kTiltedMc, plan(rf));
      em.emit(to_json(c), to_csv(c));
    });
  }

  // saw-count ---------------------------------------------------------------
  Common sc;
  int sc_nmax = 12;
  std::uint64_t sc_budget = 1000000000000;
  {
    CLI::App* sub = command(app, "saw-count", "self-avoiding walk counts c_0..c_nmax");
    add_dim(sub, sc);
    sub->add_option("--nmax", sc_nmax, "largest walk length");
    sub->add_option("--budget", sc_budget, "cap on the non-reversing search tree size")->transform(kCount);
    bind(sub, [&](Emitter& em) {
      const auto c = saw_counts(sc.d, sc_nmax, sc_budget);
      em.emit(saw_counts_json(sc.d, c), saw_counts_csv(c));
    });
  }

  // bridge ------------------------------------------------------------------
  Common br;
  std::string br_mode = "series";
  std::string br_ladder = "16:1024";
  std::string br_method = "auto";
  std::int64_t br_exact_max = 256;
  int br_nmax = 20;
  {
    CLI::App* sub = command(app, "bridge", "bridge probabilities, the ballot identity and C'");
    add_dim(sub, br);
    sub->add_option("--mode", br_mode, "series, ballot or c-prime")->check(CLI::IsMember({"series", "ballot", "c-prime"}));
    sub->add_option("--ladder", br_ladder, "bridge lengths (series and c-prime modes)");
    sub->add_option("--method", br_method, "auto, exact or mc")->check(CLI::IsMember({"auto", "exact", "mc"}));
    sub->add_option("--exact-max-n", br_exact_max, "auto method: exact up to this n")->transform(kCount);
    sub->add_option("--nmax", br_nmax, "ballot mode: largest n (<= 24)");
    add_mc(sub, br, 1000000);
    bind(sub, [&](Emitter& em) {
      if (br_mode == "ballot") {
        const auto r = ballot_check(br_nmax);
        em.emit(to_json(r), to_csv(r));
        return;
      }
      const auto ladder = cli::parse_ladder(br_ladder);
      if (br_mode == "c-prime") {
        json pts = json::array();
        for (auto n : ladder) pts.push_back({{"n", n}, {"c_prime", c_prime_d1(n)}});
        em.emit(json({{"d", 1}, {"points", pts}, {"upper_bound", 1.0 / (2.0 * 3.14159265358979323846)}}).dump());
        return;
      }
      const BridgeMethod m = br_method == "exact" ? BridgeMethod::kExact
                             : br_method == "mc"  ? BridgeMethod::kMonteCarlo
                                                  : BridgeMethod::kAuto;
      bool needs_mc = m == BridgeMethod::kMonteCarlo;
      for (auto n : ladder) needs_mc = needs_mc || (m == BridgeMethod::kAuto && n > br_exact_max);
      if (needs_mc) require_seed(br, "a Monte Carlo rung");
      const auto s = bridge_probability(br.d, ladder, m, plan(br), br_exact_max);
      em.emit(to_json(s), to_csv(s));
    });
  }

  // range-probe -------------------------------------------------------------
  Common rp;
  std::int64_t rp_n = 12;
  std::string rp_s = "0,0.5,1";
  std::int64_t rp_a = 0;
  double rp_theta = 0.5;
  std::uint64_t rp_budget = 4194304;
  {
    CLI::App* sub = command(app, "range-probe", "tails of the range and the trimmed range (conjecture evidence)");
    add_dim(sub, rp);
    sub->add_option("--n", rp_n, "walk length");
    sub->add_option("--s-grid", rp_s, "s values in [0, 1]");
    sub->add_option("--A", rp_a, "trim threshold A (0 disables the trimmed event)");
    sub->add_option("--theta", rp_theta, "theta in (0, 1] for the trimmed event");
    sub->add_option("--exact-budget", rp_budget, "enumerate when (2d)^n is at most this")->transform(kCount);
    add_mc(sub, rp, 100000);
    bind(sub, [&](Emitter& em) {
      if (walk_count(rp.d, static_cast<int>(std::min<std::int64_t>(rp_n, 1000))) > rp_budget) {
        require_seed(rp, "range-probe beyond the enumeration budget");
      }
      const auto p = range_ld_probe(rp.d, rp_n, cli::parse_grid(rp_s), rp_a, rp_theta, plan(rp), rp_budget);
      em.emit(to_json(p), to_csv(p));
    });
  }

  // check -------------------------------------------------------------------
  CLI::App* check = app.add_subcommand("check", "bound-report suites");
  check->require_subcommand(1);
  check->fallthrough();
  Common ck;
  std::string ck_grid = "0.05:3:0.05";
  std::int64_t ck_lmax = 1000;
  double ck_eta = 0.1;
  double ck_eps = -1.0;
  double ck_a = 1.0;
  double ck_delta0 = 0.1;
  double ck_beta0 = 0.01;
  double ck_eps0 = 1.0;
  {
    CLI::App* sub = command(*check, "symmetric-unit-bound", "g*_{delta, delta^2/2}(l) <= 1 over a delta grid");
    add_law(sub, ck);
    sub->add_option("--delta-grid", ck_grid, "delta values");
    sub->add_option("--lmax", ck_lmax, "largest l");
    sub->add_option("--shards", ck.shards, "worker threads (0 = all cores)");
    bind(sub, [&](Emitter& em) {
      em.emit(to_json(check_symmetric_unit_bound(cli::parse_law(ck.law), cli::parse_grid(ck_grid), ck_lmax, ck.shards)));
    });
  }
  {
    CLI::App* sub = command(*check, "small-delta", "two-regime bound on g* at beta = delta^2/2 - m3 delta^3/3 - eps");
    add_law(sub, ck);
    sub->add_option("--delta", ck.delta, "charge bias delta");
    sub->add_option("--eta", ck_eta, "eta in (0, 1)");
    sub->add_option("--eps", ck_eps, "eps; negative selects the quartic preset");
    sub->add_option("--a", ck_a, "regime boundary a");
    sub->add_option("--delta0", ck_delta0, "largest delta the bound is claimed for");
    sub->add_option("--lmax", ck_lmax, "largest l");
    bind(sub, [&](Emitter& em) {
      const ChargeLaw law = cli::parse_law(ck.law);
      const double eps = ck_eps >= 0 ? ck_eps : eps_quartic_preset(law, ck.delta, ck_eta);
      em.emit(to_json(check_small_delta_regimes(law, ck.delta, ck_eta, eps, ck_a, ck_delta0, ck_lmax)));
    });
  }
  {
    CLI::App* sub = command(*check, "superadditivity", "log g*(m+n) >= log g*(m) + log g*(n) for m + n <= lmax");
    add_law(sub, ck);
    add_tilt(sub, ck);
    sub->add_option("--lmax", ck_lmax, "largest m + n");
    bind(sub, [&](Emitter& em) {
      em.emit(to_json(check_superadditivity(cli::parse_law(ck.law), {ck.delta, ck.beta}, ck_lmax)));
    });
  }
  {
    CLI::App* sub = command(*check, "small-beta", "small-beta bounds on g_{delta,beta}(l)");
    add_law(sub, ck);
    add_tilt(sub, ck);
    sub->add_option("--eta", ck_eta, "eta in (0, 1)");
    sub->add_option("--a", ck_a, "regime boundary a");
    sub->add_option("--beta0", ck_beta0, "largest beta the bound is claimed for");
    sub->add_option("--lmax", ck_lmax, "largest l");
    bind(sub, [&](Emitter& em) {
      em.emit(to_json(check_gdb_smallbeta(cli::parse_law(ck.law), {ck.delta, ck.beta}, ck_eta, ck_a, ck_beta0, ck_lmax)));
    });
  }
  {
    CLI::App* sub = command(*check, "density-envelope", "c0 l^-1/2 <= density of Omega_l <= c1 l^-1/2");
    add_law(sub, ck);
    sub->add_option("--lmax", ck_lmax, "largest l");
    sub->add_option("--eps0", ck_eps0, "window [0, eps0] for the lower envelope");
    bind(sub, [&](Emitter& em) { em.emit(to_json(density_envelope_check(cli::parse_law(ck.law), ck_lmax, ck_eps0))); });
  }
  {
    CLI::App* sub = command(*check, "large-delta-envelope", "Gaussian g* envelope at beta = delta^2/(4 log delta)");
    sub->add_option("--delta", ck.delta, "charge bias delta (> 1)");
    sub->add_option("--eta", ck_eta, "eta in (0, 1)");
    sub->add_option("--lmax", ck_lmax, "largest l");
    bind(sub, [&](Emitter& em) { em.emit(to_json(large_delta_envelope_check(ck.delta, ck_eta, ck_lmax))); });
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }
  try {
    if (run) run();
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return 0;
}

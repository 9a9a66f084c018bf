#include "delaybs/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "delaybs/errors.hpp"
#include "delaybs/hedging.hpp"
#include "delaybs/measure_change.hpp"
#include "delaybs/parallel.hpp"
#include "delaybs/sdde.hpp"

namespace delaybs::cli {

using nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void emit_json(std::ostream& out, const ordered_json& j) { out << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg, OutputFormat fmt, std::ostream& out) {
  const auto seg = load_segment(cfg);
  const auto paths = simulate_ensemble(cfg.params, cfg.g, seg, cfg.grid, cfg.measure, cfg.seed,
                                       cfg.n_paths, cfg.workers);
  const auto& grid = cfg.grid;
  if (fmt == OutputFormat::Csv) {
    out << "path_index,t,S\n";
    for (const auto& p : paths) {
      for (std::int64_t i = -grid.n_pre; i <= grid.n_post; ++i) {
        out << p.path_index << ',' << format_double(grid.time(i)) << ',' << format_double(p.s(i))
            << '\n';
      }
    }
    return kExitOk;
  }
  std::vector<double> times;
  for (std::int64_t i = -grid.n_pre; i <= grid.n_post; ++i) times.push_back(grid.time(i));
  ordered_json j;
  j["measure"] = std::string(to_string(cfg.measure));
  j["seed"] = cfg.seed;
  j["t"] = times;
  auto& arr = j["paths"] = ordered_json::array();
  for (const auto& p : paths) arr.push_back({{"path_index", p.path_index}, {"S", p.S}});
  emit_json(out, j);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_price(const RunConfig& cfg, OutputFormat fmt, std::ostream& out) {
  const auto hist = load_history(cfg);
  const auto q = price_call(hist, cfg);
  const bool mc = q.mc.has_value();
  const std::string branch(branch_name(q.method));
  const std::string method = mc ? "conditional-monte-carlo" : "analytic";

  if (fmt == OutputFormat::Csv) {
    out << "value,method,branch,t0,seed,n_paths,stderr,ci95_lo,ci95_hi,antithetic\n";
    out << format_double(q.value) << ',' << method << ',' << branch << ',' << format_double(q.t0);
    if (mc) {
      out << ',' << q.mc->seed << ',' << q.mc->n_paths << ',' << format_double(q.mc->std_error)
          << ',' << format_double(q.mc->ci95_lo) << ',' << format_double(q.mc->ci95_hi) << ','
          << (q.mc->antithetic ? "true" : "false");
    } else {
      out << ",,,,,,";
    }
    out << '\n';
    return kExitOk;
  }
  ordered_json j;
  j["value"] = q.value;
  j["method"] = method;
  j["branch"] = branch;
  j["t0"] = q.t0;
  if (mc) {
    j["seed"] = q.mc->seed;
    j["n_paths"] = q.mc->n_paths;
    j["stderr"] = q.mc->std_error;
    j["ci95_lo"] = q.mc->ci95_lo;
    j["ci95_hi"] = q.mc->ci95_hi;
    j["antithetic"] = q.mc->antithetic;
  }
  emit_json(out, j);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_hedge(const RunConfig& cfg, OutputFormat fmt, std::ostream& out) {
  if (!cfg.history_path.empty()) {
    const auto pos = hedge_position(load_history(cfg), cfg.params, cfg.g);
    if (fmt == OutputFormat::Csv) {
      out << "t,S,pi_S,pi_B,V\n"
          << format_double(pos.t) << ',' << format_double(pos.S) << ',' << format_double(pos.pi_S)
          << ',' << format_double(pos.pi_B) << ',' << format_double(pos.V) << '\n';
    } else {
      emit_json(out, {{"t", pos.t}, {"S", pos.S}, {"pi_S", pos.pi_S}, {"pi_B", pos.pi_B},
                      {"V", pos.V}});
    }
    return kExitOk;
  }

  const auto seg = load_segment(cfg);
  const ReplicationOptions opts{cfg.n_paths, cfg.seed, cfg.measure, cfg.workers};
  const auto report = replicate(cfg.params, cfg.g, seg, cfg.grid, opts);
  const auto path0 = simulate_path(cfg.params, cfg.g, seg, cfg.grid, cfg.measure, cfg.seed, 0);
  const auto series = replicate_path(path0, cfg.params, cfg.g);

  if (fmt == OutputFormat::Csv) {
    out << "# h=" << format_double(report.h) << '\n'
        << "# n_paths=" << report.n_paths << '\n'
        << "# rms_error=" << format_double(report.rms_error) << '\n'
        << "# mean_error=" << format_double(report.mean_error) << '\n'
        << "# stderr_mean_error=" << format_double(report.stderr_mean_error) << '\n'
        << "# mean_initial_value=" << format_double(report.mean_initial_value) << '\n';
    out << "t,S,pi_S,pi_B,model_value,portfolio_value\n";
    for (const auto& s : series.steps) {
      out << format_double(s.t) << ',' << format_double(s.S) << ',' << format_double(s.pi_S) << ','
          << format_double(s.pi_B) << ',' << format_double(s.model_value) << ','
          << format_double(s.portfolio_value) << '\n';
    }
    return kExitOk;
  }
  ordered_json j;
  j["report"] = {{"h", report.h},
                 {"n_paths", report.n_paths},
                 {"measure", std::string(to_string(cfg.measure))},
                 {"seed", cfg.seed},
                 {"rms_error", report.rms_error},
                 {"mean_error", report.mean_error},
                 {"stderr_mean_error", report.stderr_mean_error},
                 {"mean_initial_value", report.mean_initial_value}};
  auto& arr = j["series"] = ordered_json::array();
  for (const auto& s : series.steps) {
    arr.push_back({{"t", s.t},
                   {"S", s.S},
                   {"pi_S", s.pi_S},
                   {"pi_B", s.pi_B},
                   {"model_value", s.model_value},
                   {"portfolio_value", s.portfolio_value}});
  }
  emit_json(out, j);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_validate(const RunConfig& cfg, OutputFormat fmt, std::ostream& out) {
  const auto checks = run_validation(cfg);
  bool all = true;
  for (const auto& c : checks) all = all && c.passed;

  if (fmt == OutputFormat::Csv) {
    out << "check,statistic,target,tolerance,passed,detail\n";
    for (const auto& c : checks) {
      out << c.name << ',' << format_double(c.statistic) << ',' << format_double(c.target) << ','
          << format_double(c.tolerance) << ',' << (c.passed ? "true" : "false") << ','
          << csv_quote(c.detail) << '\n';
    }
  } else {
    ordered_json j;
    j["passed"] = all;
    j["seed"] = cfg.seed;
    j["n_paths"] = cfg.n_paths;
    auto& arr = j["checks"] = ordered_json::array();
    for (const auto& c : checks) {
      arr.push_back({{"check", c.name},
                     {"statistic", c.statistic},
                     {"target", c.target},
                     {"tolerance", c.tolerance},
                     {"passed", c.passed},
                     {"detail", c.detail}});
    }
    emit_json(out, j);
  }
  return all ? kExitOk : kExitCheckFailed;
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

CheckResult band_check(std::string name, double stat, double target, double tol,
                       std::string detail) {
  return {std::move(name), stat, target, tol, std::abs(stat - target) <= tol, std::move(detail)};
}

// Absolute slack for zero-variance estimators.
constexpr double kSlack = 1e-12;

}  // namespace

InitialSegment load_segment(const RunConfig& cfg) {
  if (!cfg.segment_path.empty()) {
    const auto samples = read_history_csv(cfg.segment_path);
    return InitialSegment::from_samples(cfg.grid, samples);
  }
  if (!cfg.phi0) throw ValidationError("missing `phi0` or `segment`");
  return InitialSegment::constant(cfg.grid, *cfg.phi0);
}

ObservedHistory load_history(const RunConfig& cfg) {
  if (!cfg.history_path.empty()) {
    const auto samples = read_history_csv(cfg.history_path);
    return ObservedHistory::from_samples(cfg.grid, cfg.t0, samples);
  }
  if (cfg.grid.index_of(cfg.t0) != 0) {
    throw ValidationError("t0 > 0 needs a `history` CSV covering [t0 - max(a, b), t0]");
  }
  return ObservedHistory::from_segment(load_segment(cfg));
}

PriceQuote price_call(const ObservedHistory& hist, const RunConfig& cfg) {
  if (hist.valuation_index() >= hist.grid().closed_form_start()) {
    return closed_form_price(hist, cfg.params, cfg.g);
  }
  return mc_price(hist, cfg.params, cfg.g, McOptions{cfg.n_paths, cfg.seed, cfg.antithetic, cfg.workers});
}

std::vector<CheckResult> run_validation(const RunConfig& cfg) {
  require_nonzero_volatility(cfg.g);
  const auto seg = load_segment(cfg);
  const auto& grid = cfg.grid;
  const auto& p = cfg.params;
  const std::size_t n = cfg.n_paths;
  const double phi0 = seg.phi0();
  std::vector<CheckResult> out;

  // P- and Q-ensembles: positivity, the density's mean and the discounted
  // terminal price, one pass each.
  std::vector<double> rho(n), disc(n);
  std::vector<std::size_t> nonpos_p(n), nonpos_q(n), overflow(n);
  const double discount_T = std::exp(-p.r * grid.time(grid.n_post));
  parallel_blocks(n, cfg.workers, [&](unsigned, std::size_t begin, std::size_t end) {
    auto count_nonpos = [&](const PathRealization& path) {
      std::size_t c = 0;
      for (std::int64_t i = 0; i <= grid.n_post; ++i) {
        const double s = path.s(i);
        if (!(s > 0.0) || !std::isfinite(s)) ++c;
      }
      return c;
    };
    for (std::size_t k = begin; k < end; ++k) {
      const auto pp = simulate_path(p, cfg.g, seg, grid, Measure::P, cfg.seed, k);
      nonpos_p[k] = count_nonpos(pp);
      try {
        rho[k] = density_process(pp, p, cfg.g).rho_T;
      } catch (const Overflow&) {
        overflow[k] = 1;
        rho[k] = 0.0;
      }
      const auto qp = simulate_path(p, cfg.g, seg, grid, Measure::Q, cfg.seed + 1, k);
      nonpos_q[k] = count_nonpos(qp);
      disc[k] = discount_T * qp.s(grid.n_post);
    }
  });

  std::size_t bad = 0, overflows = 0;
  for (std::size_t k = 0; k < n; ++k) {
    bad += nonpos_p[k] + nonpos_q[k];
    overflows += overflow[k];
  }
  out.push_back(band_check("positivity", static_cast<double>(bad), 0.0, 0.0,
                           "non-positive or non-finite prices over " + std::to_string(2 * n) +
                               " P- and Q-paths"));

  const auto rho_stats = mean_se(rho);
  auto girsanov = band_check("girsanov_normalization", rho_stats.mean, 1.0,
                             3.0 * rho_stats.se + kSlack, "E_P[rho_T] = 1 within 3 stderr");
  if (overflows > 0) {
    girsanov.passed = false;
    girsanov.detail = std::to_string(overflows) + " paths left the log-density band";
  }
  out.push_back(girsanov);

  const auto disc_stats = mean_se(disc);
  out.push_back(band_check("q_martingale", disc_stats.mean, phi0, 3.0 * disc_stats.se + kSlack,
                           "E_Q[exp(-rT) S(T)] = phi(0) within 3 stderr"));

  // Constant volatility sigma0 = g(phi(0)): the closed form must equal the
  // classical formula with the same remaining time.
  {
    const double sigma0 = cfg.g(phi0);
    const auto g0 = VolatilityFunction::constant(sigma0);
    const auto half = std::max<std::int64_t>(1, grid.lag_l / 2);
    const auto i = std::max<std::int64_t>(0, grid.n_post - half);
    const auto path = simulate_path(p, g0, seg, grid, Measure::Q, cfg.seed + 2, 0);
    const auto hist = ObservedHistory::from_path(path, i);
    const double tau = static_cast<double>(grid.n_post - i) * grid.h;
    const double cf = closed_form_price(hist, p, g0).value;
    const double bs = classical_bs(hist.spot(), p.K, p.r, std::abs(sigma0), tau);
    const double rel = std::abs(cf - bs) / std::abs(bs);
    std::ostringstream d;
    d.precision(17);
    d << "g = " << sigma0 << ", t0 = " << hist.t0() << ": closed form " << cf << " vs classical "
      << bs;
    out.push_back({"classical_reduction", rel, 0.0, 1e-12, rel <= 1e-12, d.str()});
  }

  // One step before T - l the Monte Carlo branch conditions on a history
  // that already fixes the whole variance, so it must agree with the
  // classical price at that variance.
  if (grid.closed_form_start() >= 1) {
    const auto i0 = grid.closed_form_start() - 1;
    const auto path = simulate_path(p, cfg.g, seg, grid, Measure::Q, cfg.seed + 3, 0);
    const auto hist = ObservedHistory::from_path(path, i0);
    double v = 0.0;
    for (std::int64_t i = i0; i < grid.n_post; ++i) {
      const double g = cfg.g(path.s(i - grid.lag_b));
      v += g * g * grid.h;
    }
    const double tau = static_cast<double>(grid.n_post - i0) * grid.h;
    const double oracle = classical_bs(hist.spot(), p.K, p.r, std::sqrt(v / tau), tau);
    const auto q = mc_price(hist, p, cfg.g, McOptions{n, cfg.seed + 4, false, cfg.workers});
    out.push_back(band_check("closed_form_mc_consistency", q.value, oracle,
                             3.0 * q.mc->std_error + kSlack,
                             "Monte Carlo at t0 = T - l - h vs the known-variance price"));
  } else {
    out.push_back({"closed_form_mc_consistency", 0.0, 0.0, 0.0, true,
                   "skipped: T <= l leaves no Monte Carlo branch"});
  }

  {
    const auto hist = ObservedHistory::from_segment(seg);
    const auto call = mc_price_payoff(Payoff::Call, hist, p, cfg.g,
                                      McOptions{n, cfg.seed + 5, false, cfg.workers});
    const auto put = mc_price_payoff(Payoff::Put, hist, p, cfg.g,
                                     McOptions{n, cfg.seed + 6, false, cfg.workers});
    const double se = std::hypot(call.mc->std_error, put.mc->std_error);
    out.push_back(band_check("put_call_parity", call.value - put.value,
                             phi0 - p.K * discount_T, 3.0 * se + kSlack,
                             "C - P = phi(0) - K exp(-rT) within 3 joint stderr"));
  }
  return out;
}

int run_command(Command cmd, const RunConfig& cfg, std::ostream& out) {
  const auto fmt = cfg.format.value_or(default_format(cmd));
  switch (cmd) {
    case Command::Simulate: return cmd_simulate(cfg, fmt, out);
    case Command::Price: return cmd_price(cfg, fmt, out);
    case Command::Hedge: return cmd_hedge(cfg, fmt, out);
    case Command::Validate: return cmd_validate(cfg, fmt, out);
  }
  return kExitInternal;
}

}  // namespace delaybs::cli

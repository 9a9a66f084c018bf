#include "delaybs/hedging.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "delaybs/errors.hpp"
#include "delaybs/parallel.hpp"

namespace delaybs {

HedgePosition hedge_position(const ObservedHistory& hist, const ModelParams& params,
                             const VolatilityFunction& g) {
  const auto& grid = hist.grid();
  const auto i0 = hist.valuation_index();
  if (i0 < grid.closed_form_start() || i0 >= grid.n_post) {
    std::ostringstream os;
    os.precision(17);
    os << "explicit hedge exists only for t0 in [T - l, T); got t0 = " << hist.t0();
    throw OutOfWindow(os.str());
  }
  const double variance = integrated_variance(hist.window(), g, grid, i0, grid.n_post);
  const double tau = static_cast<double>(grid.n_post - i0) * grid.h;
  const auto call = detail::delayed_call(hist.spot(), params.K, params.r, grid.time(grid.n_post),
                                         tau, variance, g.engine_test_mode());
  HedgePosition pos;
  pos.t = hist.t0();
  pos.S = hist.spot();
  pos.pi_S = call.pi_stock;
  pos.pi_B = call.pi_bond;
  pos.V = pos.pi_B * std::exp(params.r * pos.t) + pos.pi_S * pos.S;
  return pos;
}

PathReplication replicate_path(const PathRealization& path, const ModelParams& params,
                               const VolatilityFunction& g) {
  const auto& grid = path.grid;
  const auto n = grid.n_post;
  const auto start = std::max<std::int64_t>(0, grid.closed_form_start());
  const double T = grid.time(n);

  // remaining[i - start] = integrated variance over [t_i, T], summed from the
  // top down exactly like integrated_variance().
  std::vector<double> remaining(static_cast<std::size_t>(n - start + 1), 0.0);
  for (std::int64_t i = n - 1; i >= start; --i) {
    const double v = g(path.s(i - grid.lag_b));
    remaining[static_cast<std::size_t>(i - start)] =
        remaining[static_cast<std::size_t>(i - start + 1)] + v * v * grid.h;
  }

  PathReplication out;
  out.steps.reserve(static_cast<std::size_t>(n - start + 1));
  double value = 0.0;
  for (std::int64_t i = start; i < n; ++i) {
    const double tau = static_cast<double>(n - i) * grid.h;
    const auto call = detail::delayed_call(path.s(i), params.K, params.r, T, tau,
                                           remaining[static_cast<std::size_t>(i - start)],
                                           g.engine_test_mode());
    if (i == start) {
      value = call.value;
      out.initial_value = value;
    }
    out.steps.push_back({grid.time(i), path.s(i), call.pi_stock, call.pi_bond, call.value, value});
    value += call.pi_bond * (std::exp(params.r * grid.time(i + 1)) - std::exp(params.r * grid.time(i))) +
             call.pi_stock * (path.s(i + 1) - path.s(i));
  }
  out.payoff = std::max(path.s(n) - params.K, 0.0);
  out.terminal_value = value;
  out.error = value - out.payoff;
  const ReplicationStep last = out.steps.back();  // start < n, so never empty
  out.steps.push_back({T, path.s(n), last.pi_S, last.pi_B, out.payoff, value});
  return out;
}

ReplicationReport replicate(const ModelParams& params, const VolatilityFunction& g,
                            const InitialSegment& seg, const TimeGrid& grid,
                            const ReplicationOptions& opts) {
  if (opts.n_paths < 2) throw ValidationError("replication needs n_paths >= 2");
  ReplicationReport report;
  report.h = grid.h;
  report.n_paths = opts.n_paths;
  report.terminal_errors.resize(opts.n_paths);
  report.initial_values.resize(opts.n_paths);

  parallel_blocks(opts.n_paths, opts.workers, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto path = simulate_path(params, g, seg, grid, opts.measure, opts.seed, k);
      const auto rep = replicate_path(path, params, g);
      report.terminal_errors[k] = rep.error;
      report.initial_values[k] = rep.initial_value;
    }
  });

  const auto n = static_cast<double>(opts.n_paths);
  double sum = 0.0, sum_v0 = 0.0;
  for (std::size_t k = 0; k < opts.n_paths; ++k) {
    sum += report.terminal_errors[k];
    sum_v0 += report.initial_values[k];
  }
  const double mean = sum / n;
  double ss = 0.0;
  for (double e : report.terminal_errors) ss += (e - mean) * (e - mean);
  report.mean_error = mean;
  // sqrt(mean^2 + population variance) >= |mean| holds in floating point too.
  report.rms_error = std::sqrt(mean * mean + ss / n);
  report.stderr_mean_error = std::sqrt(ss / (n - 1.0) / n);
  report.mean_initial_value = sum_v0 / n;
  return report;
}

}  // namespace delaybs

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "delaybs/cli/config.hpp"
#include "delaybs/grid.hpp"
#include "delaybs/pricing.hpp"

namespace delaybs::cli {

/// Exit statuses besides the ErrorCode values.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 70;

/// Initial segment from `phi0` or the `segment` CSV.
[[nodiscard]] InitialSegment load_segment(const RunConfig& cfg);

/// History at cfg.t0: the initial segment when t0 = 0 and no history file
/// is given, otherwise the `history` CSV resampled onto [t0 - L, t0].
[[nodiscard]] ObservedHistory load_history(const RunConfig& cfg);

/// Chooses the closed form when t0 >= T - l and Monte Carlo otherwise.
[[nodiscard]] PriceQuote price_call(const ObservedHistory& hist, const RunConfig& cfg);

struct CheckResult {
  std::string name;
  double statistic = 0.0;
  double target = 0.0;
  double tolerance = 0.0;  // pass iff |statistic - target| <= tolerance
  bool passed = false;
  std::string detail;
};

/// positivity, girsanov_normalization, q_martingale, classical_reduction,
/// closed_form_mc_consistency, put_call_parity.
[[nodiscard]] std::vector<CheckResult> run_validation(const RunConfig& cfg);

/// Runs one command, writing its artifact to `out`. Returns kExitOk, or
/// kExitCheckFailed when a validate check fails. Library errors propagate
/// as delaybs::Error.
int run_command(Command cmd, const RunConfig& cfg, std::ostream& out);

/// %.17g
[[nodiscard]] std::string format_double(double x);

}  // namespace delaybs::cli

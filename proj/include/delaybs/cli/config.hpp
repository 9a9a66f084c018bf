#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "delaybs/grid.hpp"
#include "delaybs/model.hpp"
#include "delaybs/sdde.hpp"

namespace delaybs::cli {

inline constexpr int kSchemaVersion = 1;

enum class OutputFormat { Csv, Json };
enum class Command { Simulate, Price, Hedge, Validate };

[[nodiscard]] Command parse_command(std::string_view name);
[[nodiscard]] std::string_view to_string(Command c) noexcept;
[[nodiscard]] OutputFormat parse_format(std::string_view name);
[[nodiscard]] Measure parse_measure(std::string_view name);
[[nodiscard]] OutputFormat default_format(Command c) noexcept;

struct RunConfig {
  ModelParams params;
  VolatilityFunction g = VolatilityFunction::constant(0.2);
  std::int64_t steps_per_l = 1;
  TimeGrid grid;  // derived from params and steps_per_l

  std::optional<double> phi0;  // constant initial segment ...
  std::string segment_path;    // ... or a `t,S` CSV on [-L, 0]
  std::string history_path;    // `t,S` CSV on [t0 - L, t0], needed when t0 > 0

  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  double t0 = 0.0;
  bool antithetic = false;
  std::optional<OutputFormat> format;  // unset: CSV for simulate/hedge, JSON otherwise
  Measure measure = Measure::Q;
  unsigned workers = 0;
};

/// Parses the INI-style grammar printed by `schema_text()`. Throws
/// ParseError (syntax) or ValidationError (semantics), both naming the
/// offending line or key, and IncommensurableDelays from the grid check.
[[nodiscard]] RunConfig parse_config(std::string_view text);

/// Reads and parses a config file; IoError if it cannot be read.
[[nodiscard]] RunConfig load_config(const std::string& path);

/// Grammar, output fields and exit-code map.
[[nodiscard]] std::string schema_text();

/// Reads a CSV with header `t,S`.
[[nodiscard]] std::vector<TimedValue> read_history_csv(const std::string& path);
[[nodiscard]] std::vector<TimedValue> parse_history_csv(std::string_view text,
                                                        std::string_view source = "<input>");

}  // namespace delaybs::cli

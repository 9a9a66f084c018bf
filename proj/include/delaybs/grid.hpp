#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "delaybs/model.hpp"

namespace delaybs {

/// Uniform grid t_i = i * h, i in [-n_pre, n_post], on which every delay is
/// an exact whole number of steps.
struct TimeGrid {
  double h = 0.0;
  std::int64_t n_pre = 0;   // L / h
  std::int64_t n_post = 0;  // T / h
  std::int64_t lag_a = 0;   // a / h
  std::int64_t lag_b = 0;   // b / h
  std::int64_t lag_l = 0;   // l / h

  [[nodiscard]] double time(std::int64_t i) const noexcept { return static_cast<double>(i) * h; }

  /// Grid index of `t`; throws ValidationError when t is not a grid point
  /// (relative tolerance 1e-9) or lies outside [-L, T].
  [[nodiscard]] std::int64_t index_of(double t) const;

  /// Index of T - l, the first time at which the call has a closed form.
  /// Negative when T < l.
  [[nodiscard]] std::int64_t closed_form_start() const noexcept { return n_post - lag_l; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Builds the grid with h = l / steps_per_l. Throws IncommensurableDelays
/// when a, b or T is not a whole multiple of h (relative tolerance 1e-9).
[[nodiscard]] TimeGrid build_grid(const ModelParams& params, std::int64_t steps_per_l);

struct TimedValue {
  double t;
  double value;
};

/// Linear interpolation of strictly increasing samples onto grid indices
/// [first, last]. The samples must cover the window and contain the exact
/// time t_last, whose value is taken verbatim.
[[nodiscard]] std::vector<double> resample_onto_grid(std::span<const TimedValue> samples,
                                                     const TimeGrid& grid,
                                                     std::int64_t first, std::int64_t last);

/// The initial path phi on [-L, 0], one value per grid index.
class InitialSegment {
 public:
  static InitialSegment constant(const TimeGrid& grid, double phi);
  /// Samples (t, phi(t)) with t spanning [-L, 0]; phi(0) supplied exactly.
  static InitialSegment from_samples(const TimeGrid& grid, std::span<const TimedValue> samples);
  /// Values for grid indices -n_pre..0 in order.
  static InitialSegment from_values(const TimeGrid& grid, std::vector<double> values);

  [[nodiscard]] const TimeGrid& grid() const noexcept { return grid_; }
  /// i in [-n_pre, 0].
  [[nodiscard]] double at(std::int64_t i) const { return values_.at(static_cast<std::size_t>(i + grid_.n_pre)); }
  [[nodiscard]] double phi0() const noexcept { return values_.back(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

 private:
  InitialSegment(TimeGrid grid, std::vector<double> values);

  TimeGrid grid_;
  std::vector<double> values_;
};

}  // namespace delaybs

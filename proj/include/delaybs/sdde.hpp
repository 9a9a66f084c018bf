#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "delaybs/grid.hpp"
#include "delaybs/model.hpp"

namespace delaybs {

/// P: physical measure, drift mu S(t-a). Q: the equivalent martingale
/// measure, under which dS = S [r dt + g(S(t-b)) dW^Q].
enum class Measure { P, Q };

[[nodiscard]] std::string_view to_string(Measure m) noexcept;

/// Read-only view of price samples on consecutive grid indices
/// [first, first + values.size()).
struct PathWindow {
  std::int64_t first = 0;
  std::span<const double> values;

  [[nodiscard]] std::int64_t last() const noexcept {
    return first + static_cast<std::int64_t>(values.size()) - 1;
  }
  [[nodiscard]] bool covers(std::int64_t lo, std::int64_t hi) const noexcept {
    return lo >= first && hi <= last();
  }
  [[nodiscard]] double at(std::int64_t i) const noexcept {
    return values[static_cast<std::size_t>(i - first)];
  }
};

struct PathRealization {
  Measure measure = Measure::P;
  TimeGrid grid;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::vector<double> S;   // grid indices [-n_pre, n_post]
  std::vector<double> dW;  // step increments for [0, n_post); of W under P, of W^Q under Q

  [[nodiscard]] double s(std::int64_t i) const { return S.at(static_cast<std::size_t>(i + grid.n_pre)); }
  [[nodiscard]] double dw(std::int64_t i) const { return dW.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] PathWindow window() const noexcept { return {-grid.n_pre, S}; }
};

/// One exact conditionally-lognormal path. Coefficients are frozen at the
/// left end of each step:
///   S[i+1] = S[i] exp((d_i - v_i^2 / 2) h + v_i dW_i),
///   d_i = mu S[i - a/h] (P) or r (Q),  v_i = g(S[i - b/h]),
/// with dW_i = sqrt(h) * z drawn from the (seed, path_index) substream at
/// step i. `antithetic` flips the sign of every increment.
[[nodiscard]] PathRealization simulate_path(const ModelParams& params, const VolatilityFunction& g,
                                            const InitialSegment& seg, const TimeGrid& grid,
                                            Measure measure, std::uint64_t seed,
                                            std::uint64_t path_index, bool antithetic = false);

/// Same stepping rule driven by caller-supplied increments (n_post of them).
[[nodiscard]] PathRealization replay_path(const ModelParams& params, const VolatilityFunction& g,
                                          const InitialSegment& seg, const TimeGrid& grid,
                                          Measure measure, std::span<const double> increments);

/// N paths with path_index 0..N-1, identical for any worker count.
[[nodiscard]] std::vector<PathRealization> simulate_ensemble(
    const ModelParams& params, const VolatilityFunction& g, const InitialSegment& seg,
    const TimeGrid& grid, Measure measure, std::uint64_t seed, std::size_t n_paths,
    unsigned workers = 0);

/// Left Riemann sum  sum_{i = i_from}^{i_to - 1} g(S[i - b/h])^2 h,
/// accumulated from i_to - 1 downwards, matching a running
/// remaining-variance recursion bit for bit.
/// Requires 0 <= i_from <= i_to <= n_post; throws WindowNotCovered when the
/// lagged indices fall outside `path`.
[[nodiscard]] double integrated_variance(const PathWindow& path, const VolatilityFunction& g,
                                         const TimeGrid& grid, std::int64_t i_from,
                                         std::int64_t i_to);

[[nodiscard]] double integrated_variance(const PathRealization& path, const VolatilityFunction& g,
                                         std::int64_t i_from, std::int64_t i_to);

}  // namespace delaybs

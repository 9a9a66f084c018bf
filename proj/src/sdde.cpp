#include "delaybs/sdde.hpp"

#include <cmath>
#include <string>

#include "delaybs/detail/stepping.hpp"
#include "delaybs/errors.hpp"
#include "delaybs/parallel.hpp"
#include "delaybs/rng.hpp"

namespace delaybs {

std::string_view to_string(Measure m) noexcept { return m == Measure::P ? "P" : "Q"; }

namespace {

PathRealization start_path(const InitialSegment& seg, const TimeGrid& grid, Measure measure) {
  if (!(seg.grid() == grid)) {
    throw ValidationError("initial segment was gridded on a different time grid");
  }
  PathRealization path;
  path.measure = measure;
  path.grid = grid;
  path.S.resize(static_cast<std::size_t>(grid.n_pre + grid.n_post + 1));
  const auto phi = seg.values();
  std::copy(phi.begin(), phi.end(), path.S.begin());
  path.dW.resize(static_cast<std::size_t>(grid.n_post));
  return path;
}

}  // namespace

PathRealization simulate_path(const ModelParams& params, const VolatilityFunction& g,
                              const InitialSegment& seg, const TimeGrid& grid, Measure measure,
                              std::uint64_t seed, std::uint64_t path_index, bool antithetic) {
  PathRealization path = start_path(seg, grid, measure);
  path.seed = seed;
  path.path_index = path_index;
  const GaussianStream stream(seed, path_index);
  const double scale = (antithetic ? -1.0 : 1.0) * std::sqrt(grid.h);
  detail::advance(params, g, grid, measure, path.S, -grid.n_pre, 0, grid.n_post,
                  [&](std::int64_t i) {
                    const double dw = scale * stream.normal(static_cast<std::uint64_t>(i));
                    path.dW[static_cast<std::size_t>(i)] = dw;
                    return dw;
                  });
  return path;
}

PathRealization replay_path(const ModelParams& params, const VolatilityFunction& g,
                            const InitialSegment& seg, const TimeGrid& grid, Measure measure,
                            std::span<const double> increments) {
  if (increments.size() != static_cast<std::size_t>(grid.n_post)) {
    throw ValidationError("replay needs n_post = " + std::to_string(grid.n_post) +
                          " increments, got " + std::to_string(increments.size()));
  }
  PathRealization path = start_path(seg, grid, measure);
  std::copy(increments.begin(), increments.end(), path.dW.begin());
  detail::advance(params, g, grid, measure, path.S, -grid.n_pre, 0, grid.n_post,
                  [&](std::int64_t i) { return increments[static_cast<std::size_t>(i)]; });
  return path;
}

std::vector<PathRealization> simulate_ensemble(const ModelParams& params,
                                               const VolatilityFunction& g,
                                               const InitialSegment& seg, const TimeGrid& grid,
                                               Measure measure, std::uint64_t seed,
                                               std::size_t n_paths, unsigned workers) {
  std::vector<PathRealization> paths(n_paths);
  parallel_blocks(n_paths, workers, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      paths[k] = simulate_path(params, g, seg, grid, measure, seed, k);
    }
  });
  return paths;
}

double integrated_variance(const PathWindow& path, const VolatilityFunction& g,
                           const TimeGrid& grid, std::int64_t i_from, std::int64_t i_to) {
  if (i_from < 0 || i_from > i_to || i_to > grid.n_post) {
    throw ValidationError("integrated_variance: need 0 <= i_from <= i_to <= n_post, got [" +
                          std::to_string(i_from) + ", " + std::to_string(i_to) + ")");
  }
  if (i_from == i_to) return 0.0;
  if (!path.covers(i_from - grid.lag_b, i_to - 1 - grid.lag_b)) {
    throw WindowNotCovered("integrated_variance: lagged indices [" +
                           std::to_string(i_from - grid.lag_b) + ", " +
                           std::to_string(i_to - 1 - grid.lag_b) + "] not in path window [" +
                           std::to_string(path.first) + ", " + std::to_string(path.last()) + "]");
  }
  double acc = 0.0;
  for (std::int64_t i = i_to - 1; i >= i_from; --i) {
    const double v = g(path.at(i - grid.lag_b));
    acc += v * v * grid.h;
  }
  return acc;
}

double integrated_variance(const PathRealization& path, const VolatilityFunction& g,
                           std::int64_t i_from, std::int64_t i_to) {
  return integrated_variance(path.window(), g, path.grid, i_from, i_to);
}

}  // namespace delaybs

#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "delaybs/grid.hpp"
#include "delaybs/model.hpp"
#include "delaybs/sdde.hpp"

namespace delaybs::detail {

/// Fills grid indices from+1..to of `path` (which starts at grid index
/// `first`), taking the increment for step i from noise(i).
template <class Noise>
inline void advance(const ModelParams& p, const VolatilityFunction& g, const TimeGrid& grid,
                    Measure measure, std::span<double> path, std::int64_t first,
                    std::int64_t from, std::int64_t to, Noise&& noise) {
  const double h = grid.h;
  const auto at = [&](std::int64_t i) -> double& {
    return path[static_cast<std::size_t>(i - first)];
  };
  for (std::int64_t i = from; i < to; ++i) {
    const double vol = g(at(i - grid.lag_b));
    const double drift = measure == Measure::P ? p.mu * at(i - grid.lag_a) : p.r;
    const double dw = noise(i);
    at(i + 1) = at(i) * std::exp((drift - 0.5 * vol * vol) * h + vol * dw);
  }
}

}  // namespace delaybs::detail

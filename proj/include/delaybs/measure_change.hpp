#pragma once

#include <cstdint>
#include <vector>

#include "delaybs/grid.hpp"
#include "delaybs/model.hpp"
#include "delaybs/sdde.hpp"

namespace delaybs {

/// Radon-Nikodym density dQ/dP along one P-path.
struct DensityPath {
  TimeGrid grid;
  std::vector<double> sigma_vals;  // market price of risk per step [0, n_post)
  std::vector<double> log_rho;     // grid indices [0, n_post]; log_rho[0] = 0
  double rho_T = 1.0;
};

/// Girsanov kernel at step i:  -(mu S[i - a/h] - r) / g(S[i - b/h]).
/// Throws ZeroVolatility if g vanishes there.
[[nodiscard]] double market_price_of_risk(const PathRealization& path, std::int64_t i,
                                          const ModelParams& params, const VolatilityFunction& g);

/// log rho_{i+1} = log rho_i + Sigma_i dW_i - Sigma_i^2 h / 2 (left-point Ito sum).
/// Throws Overflow when |log rho| leaves `log_band` at any grid point.
[[nodiscard]] DensityPath density_process(const PathRealization& path, const ModelParams& params,
                                          const VolatilityFunction& g, double log_band = 700.0);

/// Increments of the Q-Brownian motion: dW^Q_i = dW_i - Sigma_i h.
[[nodiscard]] std::vector<double> q_increments(const PathRealization& path,
                                               const ModelParams& params,
                                               const VolatilityFunction& g);

}  // namespace delaybs

#pragma once

#include <cstdint>
#include <vector>

#include "delaybs/grid.hpp"
#include "delaybs/model.hpp"
#include "delaybs/pricing.hpp"
#include "delaybs/sdde.hpp"

namespace delaybs {

/// Stock and bond holdings replicating the call, with V = pi_B e^{rt} + pi_S S.
struct HedgePosition {
  double t = 0.0;
  double S = 0.0;
  double pi_S = 0.0;
  double pi_B = 0.0;
  double V = 0.0;
};

/// pi_S = Phi(beta_+), pi_B = -K e^{-rT} Phi(beta_-) for t0 in [T - l, T).
/// Throws OutOfWindow otherwise.
[[nodiscard]] HedgePosition hedge_position(const ObservedHistory& hist, const ModelParams& params,
                                           const VolatilityFunction& g);

/// One rebalancing date of a replication run.
struct ReplicationStep {
  double t = 0.0;
  double S = 0.0;
  double pi_S = 0.0;            // held over [t, t + h)
  double pi_B = 0.0;
  double model_value = 0.0;     // closed-form price at t
  double portfolio_value = 0.0; // self-financing portfolio carried from T - l
};

struct PathReplication {
  std::vector<ReplicationStep> steps;  // t in [max(0, T - l), T]
  double initial_value = 0.0;
  double terminal_value = 0.0;
  double payoff = 0.0;
  double error = 0.0;  // terminal_value - payoff
};

/// Runs the discrete hedge on [max(0, T - l), T] along a given path,
///   V_{i+1} = V_i + pi_B(t_i) (e^{r t_{i+1}} - e^{r t_i}) + pi_S(t_i) (S_{i+1} - S_i),
/// starting from the closed-form price. Uses only the prices on the path,
/// never its measure tag.
[[nodiscard]] PathReplication replicate_path(const PathRealization& path,
                                             const ModelParams& params,
                                             const VolatilityFunction& g);

struct ReplicationOptions {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  Measure measure = Measure::Q;
  unsigned workers = 0;
};

struct ReplicationReport {
  double h = 0.0;
  std::size_t n_paths = 0;
  std::vector<double> terminal_errors;
  std::vector<double> initial_values;
  double rms_error = 0.0;
  double mean_error = 0.0;
  double stderr_mean_error = 0.0;
  double mean_initial_value = 0.0;
};

[[nodiscard]] ReplicationReport replicate(const ModelParams& params, const VolatilityFunction& g,
                                          const InitialSegment& seg, const TimeGrid& grid,
                                          const ReplicationOptions& opts);

}  // namespace delaybs

#include "delaybs/measure_change.hpp"

#include <cmath>
#include <sstream>

#include "delaybs/errors.hpp"

namespace delaybs {

namespace {

void require_p_path(const PathRealization& path) {
  if (path.measure != Measure::P) {
    throw ValidationError("measure change expects a path simulated under P");
  }
}

}  // namespace

double market_price_of_risk(const PathRealization& path, std::int64_t i,
                            const ModelParams& params, const VolatilityFunction& g) {
  if (i < 0 || i >= path.grid.n_post) {
    throw ValidationError("market_price_of_risk: step " + std::to_string(i) + " outside [0, n_post)");
  }
  const double vol = g(path.s(i - path.grid.lag_b));
  if (vol == 0.0) {
    std::ostringstream os;
    os.precision(17);
    os << "g(S(t - b)) = 0 at step " << i << " (S = " << path.s(i - path.grid.lag_b) << ")";
    throw ZeroVolatility(os.str());
  }
  return -(params.mu * path.s(i - path.grid.lag_a) - params.r) / vol;
}

DensityPath density_process(const PathRealization& path, const ModelParams& params,
                            const VolatilityFunction& g, double log_band) {
  require_p_path(path);
  const auto n = path.grid.n_post;
  const double h = path.grid.h;

  DensityPath out;
  out.grid = path.grid;
  out.sigma_vals.resize(static_cast<std::size_t>(n));
  out.log_rho.assign(static_cast<std::size_t>(n + 1), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double sigma = market_price_of_risk(path, i, params, g);
    out.sigma_vals[k] = sigma;
    out.log_rho[k + 1] = out.log_rho[k] + sigma * path.dW[k] - 0.5 * sigma * sigma * h;
    if (!(std::abs(out.log_rho[k + 1]) <= log_band)) {
      std::ostringstream os;
      os.precision(17);
      os << "log density " << out.log_rho[k + 1] << " left the band [-" << log_band << ", "
         << log_band << "] at step " << i + 1;
      throw Overflow(os.str());
    }
  }
  out.rho_T = std::exp(out.log_rho.back());
  return out;
}

std::vector<double> q_increments(const PathRealization& path, const ModelParams& params,
                                 const VolatilityFunction& g) {
  require_p_path(path);
  std::vector<double> out(static_cast<std::size_t>(path.grid.n_post));
  for (std::int64_t i = 0; i < path.grid.n_post; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = path.dW[k] - market_price_of_risk(path, i, params, g) * path.grid.h;
  }
  return out;
}

}  // namespace delaybs

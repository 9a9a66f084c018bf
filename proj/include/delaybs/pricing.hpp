#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "delaybs/grid.hpp"
#include "delaybs/model.hpp"
#include "delaybs/sdde.hpp"

namespace delaybs {

/// Observed prices on grid indices [first_index, valuation_index]. The
/// valuation time t0 is the last observed point.
///
/// In the delayed model the call price at t0 depends on the whole stretch
/// S(v), v in [t0 - b, T - b], not only on S(t0), so this is the pricing
/// input rather than a spot price.
class ObservedHistory {
 public:
  ObservedHistory(const TimeGrid& grid, std::int64_t first_index, std::vector<double> values);

  /// t0 = 0 with the initial segment as the observed past.
  static ObservedHistory from_segment(const InitialSegment& seg);
  /// Prefix of a simulated path up to (and including) `valuation_index`.
  static ObservedHistory from_path(const PathRealization& path, std::int64_t valuation_index);
  /// Linear interpolation of (t, S) samples onto [t0 - L, t0].
  static ObservedHistory from_samples(const TimeGrid& grid, double t0,
                                      std::span<const TimedValue> samples);

  [[nodiscard]] const TimeGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::int64_t first_index() const noexcept { return first_; }
  [[nodiscard]] std::int64_t valuation_index() const noexcept {
    return first_ + static_cast<std::int64_t>(values_.size()) - 1;
  }
  [[nodiscard]] double t0() const noexcept { return grid_.time(valuation_index()); }
  [[nodiscard]] double spot() const noexcept { return values_.back(); }
  [[nodiscard]] double at(std::int64_t i) const { return window().at(i); }
  [[nodiscard]] PathWindow window() const noexcept { return {first_, values_}; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

 private:
  TimeGrid grid_;
  std::int64_t first_;
  std::vector<double> values_;
};

enum class PricingMethod { ClosedForm, MonteCarlo };

/// "closed-form" / "monte-carlo".
[[nodiscard]] std::string_view branch_name(PricingMethod m) noexcept;

struct MonteCarloStats {
  std::size_t n_paths = 0;
  double std_error = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  std::uint64_t seed = 0;
  bool antithetic = false;
};

struct PriceQuote {
  double value = 0.0;
  PricingMethod method = PricingMethod::ClosedForm;
  double t0 = 0.0;
  std::optional<MonteCarloStats> mc;  // present iff method == MonteCarlo
};

struct McOptions {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  /// Pairs paths (2j, 2j+1) on substream j with increments dW and -dW;
  /// the error estimate then uses the n_paths/2 pair means.
  bool antithetic = false;
  unsigned workers = 0;
};

enum class Payoff { Call, Put, Digital };

struct BetaPair {
  double plus = 0.0;
  double minus = 0.0;
  double variance = 0.0;  // integral of g(S(u - b))^2 over [t0, T]
  double tau = 0.0;       // T - t0
};

[[nodiscard]] double classical_bs(double S, double K, double r, double sigma, double tau);

/// H(x, m, s2) = E (x e^{m + sqrt(s2) xi} - K e^{-rT})^+ for xi ~ N(0, 1),
/// in closed form; for s2 < 1e-14 the deterministic limit.
[[nodiscard]] double h_function(double x, double m, double sigma2, double K, double r, double T);

/// beta_{+/-} = [log(S(t0)/K) + r tau +/- V/2] / sqrt(V), V the integrated
/// variance over [t0, T]. Requires t0 in [T - l, T).
[[nodiscard]] BetaPair beta_pm(const ObservedHistory& hist, const ModelParams& params,
                               const VolatilityFunction& g);

/// S(t0) Phi(beta_+) - K e^{-r(T - t0)} Phi(beta_-) for t0 in [T - l, T];
/// the intrinsic value at t0 = T. Throws OutOfWindow for t0 < T - l.
[[nodiscard]] PriceQuote closed_form_price(const ObservedHistory& hist, const ModelParams& params,
                                           const VolatilityFunction& g);

/// Price for t0 < T - l: simulate Q-paths to T - l, where the rest of the
/// variance integral is already known, and average
/// e^{r t0} H(e^{-r(T-l)} S(T-l), -V/2, V) with V over [T - l, T].
[[nodiscard]] PriceQuote mc_price(const ObservedHistory& hist, const ModelParams& params,
                                  const VolatilityFunction& g, const McOptions& opts);

/// Discounted Q-expectation of a terminal payoff, simulating all the way to
/// T. Valid for any t0 < T.
[[nodiscard]] PriceQuote mc_price_payoff(Payoff payoff, const ObservedHistory& hist,
                                         const ModelParams& params, const VolatilityFunction& g,
                                         const McOptions& opts);

namespace detail {

/// Closed-form call value and replicating hedge for spot S, remaining time
/// tau and integrated variance V over [t0, T]. With `allow_degenerate`, V
/// below 1e-14 takes the deterministic limit instead of throwing.
struct DelayedCall {
  double value;
  double beta_plus;
  double beta_minus;
  double pi_stock;  // Phi(beta_+)
  double pi_bond;   // -K e^{-rT} Phi(beta_-)
};

[[nodiscard]] DelayedCall delayed_call(double spot, double K, double r, double T, double tau,
                                       double variance, bool allow_degenerate);

inline constexpr double kVarianceFloor = 1e-14;

}  // namespace detail

}  // namespace delaybs

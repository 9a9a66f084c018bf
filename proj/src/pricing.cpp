#include "delaybs/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "delaybs/detail/stepping.hpp"
#include "delaybs/errors.hpp"
#include "delaybs/normal.hpp"
#include "delaybs/parallel.hpp"
#include "delaybs/rng.hpp"

namespace delaybs {

// ---------------------------------------------------------------------------
// ObservedHistory

ObservedHistory::ObservedHistory(const TimeGrid& grid, std::int64_t first_index,
                                 std::vector<double> values)
    : grid_(grid), first_(first_index), values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("observed history is empty");
  const auto i0 = valuation_index();
  if (i0 < 0 || i0 > grid_.n_post) {
    throw ValidationError("valuation index " + std::to_string(i0) + " outside [0, n_post]");
  }
  if (first_ < -grid_.n_pre) {
    throw ValidationError("observed history starts before -L");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw ValidationError("observed prices must be finite and > 0");
    }
  }
  if (first_ > i0 - grid_.lag_b) {
    std::ostringstream os;
    os.precision(17);
    os << "history must cover [t0 - b, t0] = [" << grid_.time(i0 - grid_.lag_b) << ", "
       << grid_.time(i0) << "], starts at " << grid_.time(first_);
    throw WindowNotCovered(os.str());
  }
}

ObservedHistory ObservedHistory::from_segment(const InitialSegment& seg) {
  const auto v = seg.values();
  return {seg.grid(), -seg.grid().n_pre, std::vector<double>(v.begin(), v.end())};
}

ObservedHistory ObservedHistory::from_path(const PathRealization& path,
                                           std::int64_t valuation_index) {
  if (valuation_index < 0 || valuation_index > path.grid.n_post) {
    throw ValidationError("valuation index outside [0, n_post]");
  }
  const auto end = path.S.begin() + (valuation_index + path.grid.n_pre + 1);
  return {path.grid, -path.grid.n_pre, std::vector<double>(path.S.begin(), end)};
}

ObservedHistory ObservedHistory::from_samples(const TimeGrid& grid, double t0,
                                              std::span<const TimedValue> samples) {
  const auto i0 = grid.index_of(t0);
  if (i0 < 0) throw ValidationError("valuation time t0 must be >= 0");
  return {grid, i0 - grid.n_pre, resample_onto_grid(samples, grid, i0 - grid.n_pre, i0)};
}

std::string_view branch_name(PricingMethod m) noexcept {
  return m == PricingMethod::ClosedForm ? "closed-form" : "monte-carlo";
}

// ---------------------------------------------------------------------------
// Closed forms

double classical_bs(double S, double K, double r, double sigma, double tau) {
  if (!(S > 0.0) || !(K > 0.0) || !(sigma > 0.0) || !(tau > 0.0)) {
    throw DomainError("classical_bs requires S, K, sigma, tau > 0");
  }
  const double discount_K = K * std::exp(-r * tau);
  const double var = sigma * sigma * tau;
  if (var < detail::kVarianceFloor) return std::max(S - discount_K, 0.0);
  const double sd = sigma * std::sqrt(tau);
  const double d1 = (std::log(S / K) + (r + 0.5 * sigma * sigma) * tau) / sd;
  const double d2 = d1 - sd;
  return S * std_normal_cdf(d1) - discount_K * std_normal_cdf(d2);
}

double h_function(double x, double m, double sigma2, double K, double r, double T) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("h_function requires x > 0");
  if (!(K > 0.0) || !std::isfinite(K)) throw DomainError("h_function requires K > 0");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2) || !std::isfinite(m)) {
    throw DomainError("h_function requires finite m and sigma2 >= 0");
  }
  const double discount_K = K * std::exp(-r * T);
  if (sigma2 < detail::kVarianceFloor) return std::max(x * std::exp(m) - discount_K, 0.0);
  const double s = std::sqrt(sigma2);
  const double base = std::log(x / K) + r * T + m;
  const double alpha1 = (base + sigma2) / s;
  const double alpha2 = base / s;
  return x * std::exp(m + 0.5 * sigma2) * std_normal_cdf(alpha1) -
         discount_K * std_normal_cdf(alpha2);
}

namespace detail {

DelayedCall delayed_call(double spot, double K, double r, double T, double tau, double variance,
                         bool allow_degenerate) {
  const double discount_K = K * std::exp(-r * tau);
  const double bond_K = K * std::exp(-r * T);
  if (variance < kVarianceFloor) {
    if (!allow_degenerate) {
      std::ostringstream os;
      os << "integrated variance " << variance << " below " << kVarianceFloor
         << "; g violates g(v) != 0 numerically";
      throw DegenerateVariance(os.str());
    }
    const bool in_money = spot > discount_K;
    const double inf = std::numeric_limits<double>::infinity();
    return {std::max(spot - discount_K, 0.0), in_money ? inf : -inf, in_money ? inf : -inf,
            in_money ? 1.0 : 0.0, in_money ? -bond_K : 0.0};
  }
  const double sd = std::sqrt(variance);
  const double base = std::log(spot / K) + r * tau;
  const double bp = (base + 0.5 * variance) / sd;
  const double bm = (base - 0.5 * variance) / sd;
  const double phi_p = std_normal_cdf(bp);
  const double phi_m = std_normal_cdf(bm);
  return {spot * phi_p - discount_K * phi_m, bp, bm, phi_p, -bond_K * phi_m};
}

}  // namespace detail

namespace {

void require_closed_form_window(const ObservedHistory& hist) {
  const auto& grid = hist.grid();
  if (hist.valuation_index() < grid.closed_form_start()) {
    std::ostringstream os;
    os.precision(17);
    os << "t0 = " << hist.t0() << " < T - l = " << grid.time(grid.closed_form_start())
       << "; the closed form does not apply, use the Monte Carlo branch";
    throw OutOfWindow(os.str());
  }
}

double variance_to_maturity(const ObservedHistory& hist, const VolatilityFunction& g) {
  return integrated_variance(hist.window(), g, hist.grid(), hist.valuation_index(),
                             hist.grid().n_post);
}

}  // namespace

BetaPair beta_pm(const ObservedHistory& hist, const ModelParams& params,
                 const VolatilityFunction& g) {
  require_nonzero_volatility(g);
  require_closed_form_window(hist);
  const auto& grid = hist.grid();
  if (hist.valuation_index() >= grid.n_post) {
    throw OutOfWindow("beta_pm is undefined at maturity (t0 = T)");
  }
  const double variance = variance_to_maturity(hist, g);
  const double tau = static_cast<double>(grid.n_post - hist.valuation_index()) * grid.h;
  const auto call = detail::delayed_call(hist.spot(), params.K, params.r,
                                         grid.time(grid.n_post), tau, variance, false);
  return {call.beta_plus, call.beta_minus, variance, tau};
}

PriceQuote closed_form_price(const ObservedHistory& hist, const ModelParams& params,
                             const VolatilityFunction& g) {
  require_nonzero_volatility(g);
  PriceQuote quote;
  quote.method = PricingMethod::ClosedForm;
  quote.t0 = hist.t0();
  const auto& grid = hist.grid();
  if (hist.valuation_index() == grid.n_post) {
    quote.value = std::max(hist.spot() - params.K, 0.0);
    return quote;
  }
  require_closed_form_window(hist);
  const double variance = variance_to_maturity(hist, g);
  const double tau = static_cast<double>(grid.n_post - hist.valuation_index()) * grid.h;
  quote.value = detail::delayed_call(hist.spot(), params.K, params.r, grid.time(grid.n_post), tau,
                                     variance, false)
                    .value;
  return quote;
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

void check_mc_inputs(const ObservedHistory& hist, const McOptions& opts) {
  const auto& grid = hist.grid();
  const auto i0 = hist.valuation_index();
  if (!hist.window().covers(i0 - grid.n_pre, i0)) {
    std::ostringstream os;
    os.precision(17);
    os << "Monte Carlo pricing needs the observed path on [t0 - L, t0] = ["
       << grid.time(i0 - grid.n_pre) << ", " << grid.time(i0) << "]";
    throw WindowNotCovered(os.str());
  }
  if (opts.n_paths < 2) throw ValidationError("n_paths must be >= 2");
  if (opts.antithetic && opts.n_paths % 2 != 0) {
    throw ValidationError("antithetic sampling needs an even n_paths");
  }
}

// Runs `per_path(buffer, stream, sign)` for every path and turns the
// per-sample estimates into a quote. `buffer` starts at grid index
// i0 - n_pre and is pre-filled with the observed history.
template <class PerPath>
PriceQuote run_ensemble(const ObservedHistory& hist, std::int64_t last_index,
                        const McOptions& opts, PerPath&& per_path) {
  const auto& grid = hist.grid();
  const auto i0 = hist.valuation_index();
  const std::int64_t first = i0 - grid.n_pre;
  const auto history = hist.values().subspan(static_cast<std::size_t>(first - hist.first_index()));

  const std::size_t n_samples = opts.antithetic ? opts.n_paths / 2 : opts.n_paths;
  std::vector<double> samples(n_samples);

  parallel_blocks(n_samples, opts.workers, [&](unsigned, std::size_t begin, std::size_t end) {
    std::vector<double> buffer(static_cast<std::size_t>(last_index - first + 1));
    for (std::size_t k = begin; k < end; ++k) {
      const GaussianStream stream(opts.seed, k);
      std::copy(history.begin(), history.end(), buffer.begin());
      double y = per_path(std::span<double>(buffer), first, stream, 1.0);
      if (opts.antithetic) {
        std::copy(history.begin(), history.end(), buffer.begin());
        y = 0.5 * (y + per_path(std::span<double>(buffer), first, stream, -1.0));
      }
      samples[k] = y;
    }
  });

  double sum = 0.0;
  for (double y : samples) sum += y;
  const double mean = sum / static_cast<double>(n_samples);
  double ss = 0.0;
  for (double y : samples) ss += (y - mean) * (y - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n_samples - 1));
  const double se = sd / std::sqrt(static_cast<double>(n_samples));

  PriceQuote quote;
  quote.value = mean;
  quote.method = PricingMethod::MonteCarlo;
  quote.t0 = hist.t0();
  quote.mc = MonteCarloStats{opts.n_paths, se, mean - 1.96 * se, mean + 1.96 * se, opts.seed,
                             opts.antithetic};
  return quote;
}

}  // namespace

PriceQuote mc_price(const ObservedHistory& hist, const ModelParams& params,
                    const VolatilityFunction& g, const McOptions& opts) {
  require_nonzero_volatility(g);
  const auto& grid = hist.grid();
  const auto i0 = hist.valuation_index();
  const auto i_split = grid.closed_form_start();
  if (i0 >= i_split) {
    std::ostringstream os;
    os.precision(17);
    os << "t0 = " << hist.t0() << " >= T - l; use the closed form";
    throw OutOfWindow(os.str());
  }
  check_mc_inputs(hist, opts);

  const double sqrt_h = std::sqrt(grid.h);
  const double T = grid.time(grid.n_post);
  const double grow_t0 = std::exp(params.r * hist.t0());
  const double discount_split = std::exp(-params.r * grid.time(i_split));

  return run_ensemble(hist, i_split, opts,
                      [&](std::span<double> buf, std::int64_t first, const GaussianStream& stream,
                          double sign) {
                        detail::advance(params, g, grid, Measure::Q, buf, first, i0, i_split,
                                        [&](std::int64_t i) {
                                          return sign * sqrt_h *
                                                 stream.normal(static_cast<std::uint64_t>(i));
                                        });
                        const PathWindow window{first, buf};
                        // The lagged window [T-l-b, T-b) is already simulated since b >= l.
                        const double v = integrated_variance(window, g, grid, i_split, grid.n_post);
                        const double x = discount_split * window.at(i_split);
                        return grow_t0 * h_function(x, -0.5 * v, v, params.K, params.r, T);
                      });
}

PriceQuote mc_price_payoff(Payoff payoff, const ObservedHistory& hist, const ModelParams& params,
                           const VolatilityFunction& g, const McOptions& opts) {
  require_nonzero_volatility(g);
  const auto& grid = hist.grid();
  const auto i0 = hist.valuation_index();
  if (i0 >= grid.n_post) throw OutOfWindow("t0 = T: nothing to simulate");
  check_mc_inputs(hist, opts);

  const double sqrt_h = std::sqrt(grid.h);
  const double discount =
      std::exp(-params.r * static_cast<double>(grid.n_post - i0) * grid.h);
  const double K = params.K;

  return run_ensemble(hist, grid.n_post, opts,
                      [&](std::span<double> buf, std::int64_t first, const GaussianStream& stream,
                          double sign) {
                        detail::advance(params, g, grid, Measure::Q, buf, first, i0, grid.n_post,
                                        [&](std::int64_t i) {
                                          return sign * sqrt_h *
                                                 stream.normal(static_cast<std::uint64_t>(i));
                                        });
                        const double sT = buf.back();
                        double pay = 0.0;
                        switch (payoff) {
                          case Payoff::Call: pay = std::max(sT - K, 0.0); break;
                          case Payoff::Put: pay = std::max(K - sT, 0.0); break;
                          case Payoff::Digital: pay = sT > K ? 1.0 : 0.0; break;
                        }
                        return discount * pay;
                      });
}

}  // namespace delaybs

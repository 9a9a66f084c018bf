#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "delaybs/errors.hpp"
#include "delaybs/normal.hpp"
#include "delaybs/pricing.hpp"
#include "quadrature.hpp"

namespace delaybs {
namespace {

ModelParams market(double a, double b, double T, double K = 100, double r = 0.05) {
  ModelParams p;
  p.mu = 0.001;
  p.a = a;
  p.b = b;
  p.r = r;
  p.K = K;
  p.T = T;
  return p;
}

const auto kAffine = VolatilityFunction::affine_clipped(0.5, -0.003, 0.05, 0.5);

// History on [t0 - L, t0] given as a function of time.
template <class F>
ObservedHistory history_at(const TimeGrid& grid, std::int64_t i0, F&& f) {
  std::vector<double> v;
  for (std::int64_t i = i0 - grid.n_pre; i <= i0; ++i) v.push_back(f(grid.time(i)));
  return {grid, i0 - grid.n_pre, v};
}

// ---------------------------------------------------------------------------

TEST(ClassicalBs, ReferenceValue) {
  const double oracle = oracle::call_expectation(100, -0.02, 0.04, 100, 0.05, 1);
  EXPECT_NEAR(oracle, 10.450584, 1e-5);
  EXPECT_NEAR(classical_bs(100, 100, 0.05, 0.2, 1), oracle, 1e-12);
}

TEST(ClassicalBs, AtForwardMoney) {
  const double K = 100, r = 0.05, s = 0.3, tau = 0.7;
  const double S = K * std::exp(-r * tau);
  const double half = 0.5 * s * std::sqrt(tau);
  EXPECT_NEAR(classical_bs(S, K, r, s, tau),
              S * (std_normal_cdf(half) - std_normal_cdf(-half)), 1e-12);
}

TEST(ClassicalBs, DeterministicLimitAndDomain) {
  EXPECT_EQ(classical_bs(120, 100, 0.05, 1e-9, 1), 120 - 100 * std::exp(-0.05));
  EXPECT_EQ(classical_bs(80, 100, 0.05, 1e-9, 1), 0.0);
  EXPECT_THROW((void)classical_bs(0, 100, 0.05, 0.2, 1), DomainError);
  EXPECT_THROW((void)classical_bs(100, -1, 0.05, 0.2, 1), DomainError);
  EXPECT_THROW((void)classical_bs(100, 100, 0.05, 0, 1), DomainError);
  EXPECT_THROW((void)classical_bs(100, 100, 0.05, 0.2, 0), DomainError);
}

// ---------------------------------------------------------------------------

TEST(HFunction, MatchesQuadratureOnGrid) {
  for (double x : {50.0, 100.0, 150.0}) {
    for (double m : {-0.1, 0.0, 0.1}) {
      for (double s2 : {1e-4, 0.01, 0.09}) {
        const double oracle = oracle::call_expectation(x, m, s2, 100, 0.05, 1);
        EXPECT_NEAR(h_function(x, m, s2, 100, 0.05, 1), oracle, 1e-8)
            << "x=" << x << " m=" << m << " s2=" << s2;
      }
    }
  }
}

TEST(HFunction, ReferencePoint) {
  EXPECT_NEAR(h_function(100, -0.02, 0.04, 100, 0.05, 1),
              oracle::call_expectation(100, -0.02, 0.04, 100, 0.05, 1), 1e-8);
}

TEST(HFunction, ZeroStrikeSurrogate) {
  const double x = 90, m = 0.03, s2 = 0.05;
  EXPECT_NEAR(h_function(x, m, s2, 1e-300, 0.05, 1), x * std::exp(m + 0.5 * s2), 1e-12);
}

TEST(HFunction, DegenerateVariance) {
  EXPECT_EQ(h_function(100, 0.01, 0.0, 90, 0.05, 1),
            std::max(100 * std::exp(0.01) - 90 * std::exp(-0.05), 0.0));
  EXPECT_EQ(h_function(80, 0.01, 0.0, 100, 0.05, 1), 0.0);
  EXPECT_EQ(h_function(100, 0.0, 5e-15, 90, 0.05, 1), 100 - 90 * std::exp(-0.05));
}

TEST(HFunction, Domain) {
  EXPECT_THROW((void)h_function(0, 0, 0.1, 100, 0.05, 1), DomainError);
  EXPECT_THROW((void)h_function(100, 0, 0.1, 0, 0.05, 1), DomainError);
  EXPECT_THROW((void)h_function(100, 0, -0.1, 100, 0.05, 1), DomainError);
}

// ---------------------------------------------------------------------------

TEST(ObservedHistory, Coverage) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 4);  // h = 1/16, lag_b = 8
  EXPECT_THROW((ObservedHistory{grid, 5, std::vector<double>(8, 100.0)}), WindowNotCovered);
  EXPECT_NO_THROW((ObservedHistory{grid, 4, std::vector<double>(9, 100.0)}));
  EXPECT_THROW((ObservedHistory{grid, 4, std::vector<double>{100, 100, 100, 100, -1, 100, 100, 100, 100}}),
               ValidationError);
  EXPECT_THROW((ObservedHistory{grid, 10, std::vector<double>(9, 100.0)}), ValidationError);
}

TEST(ObservedHistory, FromSamples) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 4);
  const std::vector<TimedValue> s{{0.25, 90}, {0.75, 110}};
  const auto h = ObservedHistory::from_samples(grid, 0.75, s);
  EXPECT_EQ(h.valuation_index(), 12);
  EXPECT_EQ(h.first_index(), 4);
  EXPECT_EQ(h.spot(), 110);
  EXPECT_DOUBLE_EQ(h.at(8), 100);
  EXPECT_THROW((void)ObservedHistory::from_samples(grid, 0.8125, s), WindowNotCovered);
  EXPECT_THROW((void)ObservedHistory::from_samples(grid, 0.8, s), ValidationError);
}

// ---------------------------------------------------------------------------

TEST(BetaPm, ConstantVolIsClassicalD1D2) {
  const auto p = market(0.5, 0.5, 1);
  const auto grid = build_grid(p, 16);
  const auto g = VolatilityFunction::constant(0.2);
  const auto i0 = grid.n_post - 5;
  const auto hist = history_at(grid, i0, [](double t) { return 95 + 10 * t; });
  const auto beta = beta_pm(hist, p, g);
  const double tau = 5 * grid.h;
  const double S = hist.spot();
  const double sd = 0.2 * std::sqrt(tau);
  EXPECT_NEAR(beta.plus, (std::log(S / 100) + (0.05 + 0.02) * tau) / sd, 1e-13);
  EXPECT_NEAR(beta.minus, (std::log(S / 100) + (0.05 - 0.02) * tau) / sd, 1e-13);
  EXPECT_NEAR(beta.plus - beta.minus, std::sqrt(beta.variance), 1e-15 * (std::abs(beta.plus) + std::abs(beta.minus)));
  EXPECT_DOUBLE_EQ(beta.tau, tau);
}

TEST(BetaPm, AlgebraicZero) {
  const auto p = market(0.5, 0.5, 1);
  const auto grid = build_grid(p, 16);
  const auto g = VolatilityFunction::constant(0.3);
  const auto i0 = grid.n_post - 4;
  const double tau = 4 * grid.h;
  const double spot = 100 * std::exp(-0.05 * tau) * std::exp(-0.5 * 0.09 * tau);
  const auto hist = history_at(grid, i0, [&](double) { return spot; });
  EXPECT_NEAR(beta_pm(hist, p, g).plus, 0.0, 1e-14);
}

TEST(BetaPm, StateDependentMatchesRawSums) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 32);
  const auto i0 = grid.closed_form_start() + 3;
  const auto hist = history_at(grid, i0, [](double t) { return 100 + 30 * std::sin(9 * t); });
  const auto beta = beta_pm(hist, p, kAffine);
  double v = 0;
  for (std::int64_t i = i0; i < grid.n_post; ++i) {
    const double g = kAffine(hist.at(i - grid.lag_b));
    v += g * g * grid.h;
  }
  const double tau = static_cast<double>(grid.n_post - i0) * grid.h;
  const double base = std::log(hist.spot() / 100) + 0.05 * tau;
  EXPECT_NEAR(beta.variance, v, 1e-12 * v);
  EXPECT_NEAR(beta.plus, (base + v / 2) / std::sqrt(v), 1e-12);
  EXPECT_NEAR(beta.minus, (base - v / 2) / std::sqrt(v), 1e-12);
  EXPECT_NEAR(beta.plus - beta.minus, std::sqrt(beta.variance), 1e-15 * (std::abs(beta.plus) + std::abs(beta.minus)));
}

TEST(BetaPm, Errors) {
  const auto p = market(0.5, 0.5, 1);
  const auto grid = build_grid(p, 4);
  const auto g = VolatilityFunction::constant(0.2);
  const auto early = history_at(grid, 1, [](double) { return 100.0; });
  EXPECT_THROW((void)beta_pm(early, p, g), OutOfWindow);
  const auto at_T = history_at(grid, grid.n_post, [](double) { return 100.0; });
  EXPECT_THROW((void)beta_pm(at_T, p, g), OutOfWindow);
  const auto tiny = VolatilityFunction::constant(1e-9);
  const auto ok = history_at(grid, grid.n_post - 1, [](double) { return 100.0; });
  EXPECT_THROW((void)beta_pm(ok, p, tiny), DegenerateVariance);
  EXPECT_THROW((void)beta_pm(ok, p, VolatilityFunction::zero_for_engine_tests()), ZeroVolatility);
}

// ---------------------------------------------------------------------------

TEST(ClosedForm, ReducesToClassical) {
  const auto p = market(0.5, 0.5, 1);
  const auto grid = build_grid(p, 64);
  const auto g = VolatilityFunction::constant(0.2);
  const auto i0 = grid.index_of(0.5);
  const auto hist = history_at(grid, i0, [](double t) { return 100 + 20 * std::cos(7 * t); });
  const auto flat = history_at(grid, i0, [](double) { return 100.0; });
  const double bs = classical_bs(100, 100, 0.05, 0.2, 0.5);
  const auto q = closed_form_price(flat, p, g);
  EXPECT_EQ(q.method, PricingMethod::ClosedForm);
  EXPECT_FALSE(q.mc.has_value());
  EXPECT_LE(std::abs(q.value - bs) / bs, 1e-12);
  const double bs2 = classical_bs(hist.spot(), 100, 0.05, 0.2, 0.5);
  EXPECT_LE(std::abs(closed_form_price(hist, p, g).value - bs2) / bs2, 1e-12);
}

TEST(ClosedForm, ReducesToClassicalAcrossWindow) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 16);
  const auto g = VolatilityFunction::constant(0.35);
  for (auto i0 = grid.closed_form_start(); i0 < grid.n_post; ++i0) {
    const auto hist = history_at(grid, i0, [](double t) { return 90 + 15 * t; });
    const double tau = static_cast<double>(grid.n_post - i0) * grid.h;
    const double bs = classical_bs(hist.spot(), 100, 0.05, 0.35, tau);
    EXPECT_LE(std::abs(closed_form_price(hist, p, g).value - bs) / bs, 1e-12) << "i0 " << i0;
  }
}

TEST(ClosedForm, IntrinsicAtMaturityAndOutOfWindow) {
  const auto p = market(0.5, 0.5, 1);
  const auto grid = build_grid(p, 4);
  const auto T = history_at(grid, grid.n_post, [](double) { return 112.0; });
  EXPECT_EQ(closed_form_price(T, p, kAffine).value, 12.0);
  const auto early = history_at(grid, grid.closed_form_start() - 1, [](double) { return 100.0; });
  EXPECT_THROW((void)closed_form_price(early, p, kAffine), OutOfWindow);
}

TEST(ClosedForm, ZeroStrikeSurrogate) {
  const auto p = market(0.5, 0.5, 1, 1e-300);
  const auto grid = build_grid(p, 8);
  const auto hist = history_at(grid, grid.n_post - 3, [](double) { return 100.0; });
  EXPECT_NEAR(closed_form_price(hist, p, kAffine).value, 100.0, 1e-12);
}

TEST(ClosedForm, SegmentDependence) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 16);
  const auto i0 = grid.closed_form_start();
  const auto low = history_at(grid, i0, [&](double t) { return t < grid.time(i0) ? 60.0 : 100.0; });
  const auto high = history_at(grid, i0, [&](double t) { return t < grid.time(i0) ? 140.0 : 100.0; });
  ASSERT_EQ(low.spot(), high.spot());
  const double a = closed_form_price(low, p, kAffine).value;
  const double b = closed_form_price(high, p, kAffine).value;
  EXPECT_GT(std::abs(a - b), 1e-6);
  EXPECT_GT(a, b);  // lower past prices mean higher volatility here
}

TEST(ClosedForm, ArbitrageBandAndMonotoneInStrike) {
  const auto grid = build_grid(market(0.25, 0.5, 1), 16);
  for (auto i0 = grid.closed_form_start(); i0 < grid.n_post; i0 += 2) {
    for (double shift : {40.0, 80.0, 100.0, 130.0, 250.0}) {
      const auto hist = history_at(grid, i0, [&](double t) { return shift + 10 * std::sin(5 * t); });
      double prev = std::numeric_limits<double>::infinity();
      for (double K : {50.0, 90.0, 100.0, 110.0, 200.0}) {
        const auto p = market(0.25, 0.5, 1, K);
        const double tau = static_cast<double>(grid.n_post - i0) * grid.h;
        const double v = closed_form_price(hist, p, kAffine).value;
        const double lower = std::max(hist.spot() - K * std::exp(-0.05 * tau), 0.0);
        EXPECT_GE(v, lower - 1e-12 * hist.spot());
        EXPECT_LE(v, hist.spot());
        EXPECT_LE(v, prev);
        prev = v;
      }
    }
  }
}

TEST(ClosedForm, MonotoneInSpotForConstantVol) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 16);
  const auto g = VolatilityFunction::constant(0.25);
  const auto i0 = grid.n_post - 6;
  double prev = -1;
  for (double scale : {0.5, 0.8, 1.0, 1.2, 2.0}) {
    const auto hist = history_at(grid, i0, [&](double t) { return scale * (100 + 5 * t); });
    const double v = closed_form_price(hist, p, g).value;
    EXPECT_GT(v, prev);
    prev = v;
  }
}

// ---------------------------------------------------------------------------

TEST(McPrice, AgreesWithClassicalForConstantVol) {
  const auto p = market(0.5, 0.5, 1);
  const auto grid = build_grid(p, 8);
  const auto g = VolatilityFunction::constant(0.2);
  const auto seg = InitialSegment::constant(grid, 100);
  const auto q = mc_price(ObservedHistory::from_segment(seg), p, g, McOptions{200000, 17, false, 0});
  ASSERT_TRUE(q.mc.has_value());
  EXPECT_EQ(q.method, PricingMethod::MonteCarlo);
  EXPECT_NEAR(q.value, classical_bs(100, 100, 0.05, 0.2, 1), 3 * q.mc->std_error);
  EXPECT_NEAR(q.mc->ci95_hi - q.value, 1.96 * q.mc->std_error, 1e-14);
  EXPECT_NEAR(q.value - q.mc->ci95_lo, 1.96 * q.mc->std_error, 1e-14);
}

TEST(McPrice, DeterministicAndWorkerIndependent) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 8);
  const auto seg = InitialSegment::constant(grid, 100);
  const auto hist = ObservedHistory::from_segment(seg);
  const auto a = mc_price(hist, p, kAffine, McOptions{5000, 3, false, 1});
  const auto b = mc_price(hist, p, kAffine, McOptions{5000, 3, false, 7});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.mc->std_error, b.mc->std_error);
  const auto c = mc_price(hist, p, kAffine, McOptions{5000, 4, false, 1});
  EXPECT_NE(a.value, c.value);
}

TEST(McPrice, AntitheticConsistent) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 8);
  const auto hist = ObservedHistory::from_segment(InitialSegment::constant(grid, 100));
  const auto plain = mc_price(hist, p, kAffine, McOptions{100000, 9, false, 0});
  const auto anti = mc_price(hist, p, kAffine, McOptions{100000, 10, true, 0});
  EXPECT_TRUE(anti.mc->antithetic);
  EXPECT_LT(anti.mc->std_error, plain.mc->std_error);
  EXPECT_NEAR(plain.value, anti.value, 3 * std::hypot(plain.mc->std_error, anti.mc->std_error));
  EXPECT_THROW((void)mc_price(hist, p, kAffine, McOptions{101, 1, true, 0}), ValidationError);
}

TEST(McPrice, OneStepBeforeClosedFormWindow) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 16);
  const auto seg = InitialSegment::constant(grid, 100);
  const auto path = simulate_path(p, kAffine, seg, grid, Measure::Q, 2, 0);
  const auto i0 = grid.closed_form_start() - 1;
  const auto hist = ObservedHistory::from_path(path, i0);
  double v = 0;
  for (std::int64_t i = i0; i < grid.n_post; ++i) {
    const double g = kAffine(path.s(i - grid.lag_b));
    v += g * g * grid.h;
  }
  const double tau = static_cast<double>(grid.n_post - i0) * grid.h;
  const double oracle = classical_bs(hist.spot(), 100, 0.05, std::sqrt(v / tau), tau);
  const auto q = mc_price(hist, p, kAffine, McOptions{100000, 6, false, 0});
  EXPECT_NEAR(q.value, oracle, 3 * q.mc->std_error);
}

TEST(McPrice, Windows) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 4);
  const auto late = history_at(grid, grid.closed_form_start(), [](double) { return 100.0; });
  EXPECT_THROW((void)mc_price(late, p, kAffine, McOptions{}), OutOfWindow);
  // With a > b, a history covering [t0 - b, t0] misses [t0 - L, t0].
  const auto p2 = market(0.5, 0.25, 1);
  const auto grid2 = build_grid(p2, 4);
  const ObservedHistory short_hist(grid2, 3 - grid2.lag_b,
                                   std::vector<double>(static_cast<std::size_t>(grid2.lag_b + 1), 100.0));
  EXPECT_THROW((void)mc_price(short_hist, p2, kAffine, McOptions{}), WindowNotCovered);
  EXPECT_THROW((void)mc_price(ObservedHistory::from_segment(InitialSegment::constant(grid, 100)), p,
                              VolatilityFunction::zero_for_engine_tests(), McOptions{}),
               ZeroVolatility);
}

TEST(McPricePayoff, PutCallParityStateDependent) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 8);
  const auto hist = ObservedHistory::from_segment(InitialSegment::constant(grid, 100));
  const auto c = mc_price_payoff(Payoff::Call, hist, p, kAffine, McOptions{100000, 21, false, 0});
  const auto put = mc_price_payoff(Payoff::Put, hist, p, kAffine, McOptions{100000, 22, false, 0});
  EXPECT_NEAR(c.value - put.value, 100 - 100 * std::exp(-0.05),
              3 * std::hypot(c.mc->std_error, put.mc->std_error));
}

TEST(McPricePayoff, DigitalZeroStrike) {
  const auto p = market(0.25, 0.5, 1, 1e-300);
  const auto grid = build_grid(p, 8);
  const auto hist = ObservedHistory::from_segment(InitialSegment::constant(grid, 100));
  const auto d = mc_price_payoff(Payoff::Digital, hist, p, kAffine, McOptions{1000, 1, false, 0});
  EXPECT_NEAR(d.value, std::exp(-0.05), 1e-12);
  EXPECT_LT(d.mc->std_error, 1e-12);
}

TEST(McPricePayoff, TowerPropertyAgainstConditionalEstimator) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 8);
  const auto hist = ObservedHistory::from_segment(InitialSegment::constant(grid, 100));
  const auto full = mc_price_payoff(Payoff::Call, hist, p, kAffine, McOptions{200000, 31, false, 0});
  const auto cond = mc_price(hist, p, kAffine, McOptions{200000, 32, false, 0});
  EXPECT_NEAR(full.value, cond.value, 3 * std::hypot(full.mc->std_error, cond.mc->std_error));
  EXPECT_LT(cond.mc->std_error, full.mc->std_error);
}

TEST(McPricePayoff, ArbitrageBand) {
  const auto p = market(0.25, 0.5, 1);
  const auto grid = build_grid(p, 8);
  const auto hist = ObservedHistory::from_segment(InitialSegment::constant(grid, 100));
  const auto q = mc_price(hist, p, kAffine, McOptions{20000, 41, false, 0});
  EXPECT_GE(q.value + 3 * q.mc->std_error, 100 - 100 * std::exp(-0.05));
  EXPECT_LE(q.value - 3 * q.mc->std_error, 100);
}

}  // namespace
}  // namespace delaybs

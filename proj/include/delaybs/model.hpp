#pragma once

#include <string>
#include <variant>
#include <vector>

namespace delaybs {

/// Market and contract constants.
///
/// Price dynamics dS = mu S(t-a) S(t) dt + g(S(t-b)) S(t) dW(t), a riskless
/// bond B(t) = e^{rt}, and a European call struck at K maturing at T.
/// `mu` carries units 1/(price * time): the drift rate is mu * S(t - a).
struct ModelParams {
  double mu = 0.0;
  double a = 1.0;  // drift delay
  double b = 1.0;  // volatility delay
  double r = 0.0;
  double K = 1.0;
  double T = 1.0;

  /// Throws ValidationError naming the first violated constraint.
  void validate() const;

  [[nodiscard]] double L() const noexcept { return a > b ? a : b; }
  [[nodiscard]] double l() const noexcept { return a < b ? a : b; }
};

/// The volatility function g, restricted to parametric forms with
/// g(v) != 0 for v != 0.
class VolatilityFunction {
 public:
  struct Constant {
    double sigma0;
  };
  /// g(v) = clamp(c0 + c1 v, sigma_min, sigma_max).
  struct AffineClipped {
    double c0;
    double c1;
    double sigma_min;
    double sigma_max;
  };
  struct TablePoint {
    double price;
    double vol;
  };
  /// Piecewise-linear through `points` (flat beyond the end points), then
  /// floored: g(v) = max(floor, interp(v)).
  struct Table {
    std::vector<TablePoint> points;
    double floor;
  };
  using Form = std::variant<Constant, AffineClipped, Table>;

  static VolatilityFunction constant(double sigma0);
  static VolatilityFunction affine_clipped(double c0, double c1, double sigma_min,
                                           double sigma_max);
  static VolatilityFunction table(std::vector<TablePoint> points, double floor);

  /// g == 0. Only the path engine and the hedge accept this; every pricing
  /// entry point rejects it.
  static VolatilityFunction zero_for_engine_tests();

  [[nodiscard]] double operator()(double v) const noexcept;

  [[nodiscard]] const Form& form() const noexcept { return form_; }
  [[nodiscard]] bool engine_test_mode() const noexcept { return engine_test_; }
  [[nodiscard]] bool is_constant() const noexcept {
    return std::holds_alternative<Constant>(form_);
  }
  [[nodiscard]] std::string describe() const;

 private:
  VolatilityFunction(Form form, bool engine_test) : form_(std::move(form)), engine_test_(engine_test) {}

  Form form_;
  bool engine_test_ = false;
};

/// Throws ZeroVolatility unless g was built through a validated factory
/// (i.e. rejects engine-test mode).
void require_nonzero_volatility(const VolatilityFunction& g);

}  // namespace delaybs

#include "delaybs/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "delaybs/errors.hpp"

namespace delaybs {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void ModelParams::validate() const {
  require(finite(mu), "mu must be finite");
  require(finite(a) && a > 0.0, "a must be > 0");
  require(finite(b) && b > 0.0, "b must be > 0");
  require(finite(r) && r >= 0.0, "r must be >= 0");
  require(finite(K) && K > 0.0, "K must be > 0");
  require(finite(T) && T > 0.0, "T must be > 0");
}

VolatilityFunction VolatilityFunction::constant(double sigma0) {
  require(finite(sigma0) && sigma0 != 0.0,
          "constant volatility sigma0 must be finite and nonzero");
  return {Constant{sigma0}, false};
}

VolatilityFunction VolatilityFunction::affine_clipped(double c0, double c1,
                                                      double sigma_min,
                                                      double sigma_max) {
  require(finite(c0) && finite(c1), "affine volatility coefficients must be finite");
  require(finite(sigma_min) && sigma_min > 0.0, "volatility floor sigma_min must be > 0");
  require(finite(sigma_max) && sigma_max >= sigma_min,
          "volatility cap sigma_max must be >= sigma_min");
  return {AffineClipped{c0, c1, sigma_min, sigma_max}, false};
}

VolatilityFunction VolatilityFunction::table(std::vector<TablePoint> points, double floor) {
  require(!points.empty(), "volatility table needs at least one point");
  require(finite(floor) && floor > 0.0, "volatility table floor must be > 0");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    require(finite(p.price) && finite(p.vol), "volatility table entries must be finite");
    require(!(p.price > 0.0 && p.vol <= 0.0),
            "volatility table value must be > 0 at positive price " + std::to_string(p.price));
    require(i == 0 || points[i - 1].price < p.price,
            "volatility table prices must be strictly increasing");
  }
  return {Table{std::move(points), floor}, false};
}

VolatilityFunction VolatilityFunction::zero_for_engine_tests() {
  return {Constant{0.0}, true};
}

double VolatilityFunction::operator()(double v) const noexcept {
  struct Eval {
    double v;
    double operator()(const Constant& c) const noexcept { return c.sigma0; }
    double operator()(const AffineClipped& f) const noexcept {
      return std::clamp(f.c0 + f.c1 * v, f.sigma_min, f.sigma_max);
    }
    double operator()(const Table& t) const noexcept {
      const auto& pts = t.points;
      double raw;
      if (v <= pts.front().price) {
        raw = pts.front().vol;
      } else if (v >= pts.back().price) {
        raw = pts.back().vol;
      } else {
        const auto hi = std::upper_bound(
            pts.begin(), pts.end(), v,
            [](double x, const TablePoint& p) { return x < p.price; });
        const auto lo = hi - 1;
        const double w = (v - lo->price) / (hi->price - lo->price);
        raw = lo->vol + w * (hi->vol - lo->vol);
      }
      return std::max(t.floor, raw);
    }
  };
  return std::visit(Eval{v}, form_);
}

std::string VolatilityFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (engine_test_) return "zero (engine-test mode)";
  if (const auto* c = std::get_if<Constant>(&form_)) {
    os << "constant(" << c->sigma0 << ")";
  } else if (const auto* f = std::get_if<AffineClipped>(&form_)) {
    os << "affine_clipped(" << f->c0 << ", " << f->c1 << ", " << f->sigma_min << ", "
       << f->sigma_max << ")";
  } else {
    const auto& t = std::get<Table>(form_);
    os << "table(" << t.points.size() << " points, floor " << t.floor << ")";
  }
  return os.str();
}

void require_nonzero_volatility(const VolatilityFunction& g) {
  if (g.engine_test_mode()) {
    throw ZeroVolatility("volatility function is identically zero (engine-test mode); "
                         "pricing requires g(v) != 0 for v != 0");
  }
}

}  // namespace delaybs

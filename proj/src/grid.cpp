#include "delaybs/grid.hpp"

#include <cmath>
#include <sstream>

#include "delaybs/errors.hpp"

namespace delaybs {

namespace {

constexpr double kGridTol = 1e-9;

// Nearest integer to x if x is within relative tolerance of it.
bool snap(double x, std::int64_t& out) {
  const double n = std::round(x);
  if (std::abs(x - n) > kGridTol * std::max(1.0, std::abs(x))) return false;
  out = static_cast<std::int64_t>(n);
  return true;
}

}  // namespace

std::int64_t TimeGrid::index_of(double t) const {
  std::int64_t i = 0;
  if (!std::isfinite(t) || !snap(t / h, i)) {
    std::ostringstream os;
    os.precision(17);
    os << "time " << t << " is not a grid point (h = " << h << ")";
    throw ValidationError(os.str());
  }
  if (i < -n_pre || i > n_post) {
    std::ostringstream os;
    os.precision(17);
    os << "time " << t << " outside grid range [" << time(-n_pre) << ", " << time(n_post) << "]";
    throw ValidationError(os.str());
  }
  return i;
}

TimeGrid build_grid(const ModelParams& params, std::int64_t steps_per_l) {
  params.validate();
  if (steps_per_l < 1) throw ValidationError("steps_per_l must be >= 1");

  TimeGrid g;
  g.h = params.l() / static_cast<double>(steps_per_l);
  g.lag_l = steps_per_l;

  auto whole = [&](double span, const char* name, std::int64_t& out) {
    if (!snap(span / g.h, out) || out < 1) {
      std::ostringstream os;
      os.precision(17);
      os << name << " = " << span << " is not a whole multiple of h = " << g.h
         << " (l / steps_per_l with steps_per_l = " << steps_per_l
         << "); adjust steps_per_l or the delays";
      throw IncommensurableDelays(os.str());
    }
  };
  whole(params.a, "a", g.lag_a);
  whole(params.b, "b", g.lag_b);
  whole(params.T, "T", g.n_post);
  g.n_pre = std::max(g.lag_a, g.lag_b);
  return g;
}

std::vector<double> resample_onto_grid(std::span<const TimedValue> samples, const TimeGrid& grid,
                                       std::int64_t first, std::int64_t last) {
  if (samples.empty()) throw ValidationError("no samples supplied");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!std::isfinite(samples[k].t) || !std::isfinite(samples[k].value)) {
      throw ValidationError("sample " + std::to_string(k) + " is not finite");
    }
    if (k > 0 && !(samples[k - 1].t < samples[k].t)) {
      throw ValidationError("sample times must be strictly increasing (row " +
                            std::to_string(k) + ")");
    }
  }

  const double t_first = grid.time(first);
  const double t_last = grid.time(last);
  const double slack = kGridTol * std::max(1.0, std::abs(grid.time(grid.n_post)) +
                                                    std::abs(grid.time(-grid.n_pre)));
  if (samples.front().t > t_first + slack || samples.back().t < t_last - slack) {
    std::ostringstream os;
    os.precision(17);
    os << "samples span [" << samples.front().t << ", " << samples.back().t
       << "] but the window [" << t_first << ", " << t_last << "] is required";
    throw WindowNotCovered(os.str());
  }

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(last - first + 1));
  std::size_t k = 0;
  for (std::int64_t i = first; i <= last; ++i) {
    const double t = grid.time(i);
    while (k + 1 < samples.size() && samples[k + 1].t <= t) ++k;
    // t <= samples[k].t only within slack of the first sample; past the last
    // sample only within slack of it.
    if (t <= samples[k].t || k + 1 == samples.size()) {
      out.push_back(samples[k].value);
    } else {
      const auto& lo = samples[k];
      const auto& hi = samples[k + 1];
      const double w = (t - lo.t) / (hi.t - lo.t);
      out.push_back(lo.value + w * (hi.value - lo.value));
    }
  }

  bool anchored = false;
  for (const auto& s : samples) {
    if (std::abs(s.t - t_last) <= slack) {
      out.back() = s.value;
      anchored = true;
    }
  }
  if (!anchored) {
    std::ostringstream os;
    os.precision(17);
    os << "no sample at the anchor time t = " << t_last << "; it must be supplied exactly";
    throw ValidationError(os.str());
  }
  return out;
}

InitialSegment::InitialSegment(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid_.n_pre + 1)) {
    throw ValidationError("initial segment needs n_pre + 1 = " + std::to_string(grid_.n_pre + 1) +
                          " values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("initial segment values must be finite");
  }
  if (!(values_.back() > 0.0)) throw ValidationError("initial segment requires phi(0) > 0");
}

InitialSegment InitialSegment::constant(const TimeGrid& grid, double phi) {
  return {grid, std::vector<double>(static_cast<std::size_t>(grid.n_pre + 1), phi)};
}

InitialSegment InitialSegment::from_samples(const TimeGrid& grid,
                                            std::span<const TimedValue> samples) {
  return {grid, resample_onto_grid(samples, grid, -grid.n_pre, 0)};
}

InitialSegment InitialSegment::from_values(const TimeGrid& grid, std::vector<double> values) {
  return {grid, std::move(values)};
}

}  // namespace delaybs

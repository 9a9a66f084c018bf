#pragma once

#include <array>
#include <cstdint>

namespace delaybs {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
///
/// Stateless: the output is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  [[nodiscard]] static Counter generate(Counter ctr, Key key) noexcept;
};

/// Gaussian substream addressed by (seed, path_index, step).
///
/// The Philox key is the 64-bit seed; the counter is {step_lo, step_hi,
/// path_lo, path_hi}. The first two output words form a 64-bit integer whose
/// top 53 bits give a uniform in the open interval (0, 1), which is mapped to
/// N(0, 1) by the AS 241 inverse normal CDF.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t path_index) noexcept;

  [[nodiscard]] double uniform(std::uint64_t step) const noexcept;
  [[nodiscard]] double normal(std::uint64_t step) const noexcept;

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t path_index() const noexcept { return path_index_; }

 private:
  std::uint64_t seed_;
  std::uint64_t path_index_;
  Philox4x32::Key key_;
};

}  // namespace delaybs

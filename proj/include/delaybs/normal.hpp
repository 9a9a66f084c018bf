#pragma once

namespace delaybs {

/// Standard normal distribution function Phi(x) = erfc(-x / sqrt 2) / 2.
///
/// Backed by the C library's erfc, which is the fdlibm rational minimax
/// approximation (sub-ulp relative error). Saturates to exactly 1 for
/// x >= ~38.5 and underflows gracefully to 0 on the left.
[[nodiscard]] double std_normal_cdf(double x) noexcept;

[[nodiscard]] double std_normal_pdf(double x) noexcept;

/// Inverse of Phi on the open interval (0, 1), Wichura's AS 241 (PPND16),
/// relative accuracy about 1e-16. Returns -inf / +inf at 0 / 1 and NaN
/// outside [0, 1].
[[nodiscard]] double std_normal_quantile(double p) noexcept;

}  // namespace delaybs

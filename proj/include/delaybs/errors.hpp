#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace delaybs {

// Values double as CLI process exit codes (see README, `--schema`).
enum class ErrorCode : int {
  ParseError = 3,
  ValidationError = 4,
  IncommensurableDelays = 5,
  WindowNotCovered = 6,
  OutOfWindow = 7,
  ZeroVolatility = 8,
  DegenerateVariance = 9,
  Overflow = 10,
  DomainError = 11,
  IoError = 12,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <ErrorCode C>
class CodedError : public Error {
 public:
  explicit CodedError(const std::string& what) : Error(C, what) {}
};

using ParseError = CodedError<ErrorCode::ParseError>;
using ValidationError = CodedError<ErrorCode::ValidationError>;
using IncommensurableDelays = CodedError<ErrorCode::IncommensurableDelays>;
using WindowNotCovered = CodedError<ErrorCode::WindowNotCovered>;
using OutOfWindow = CodedError<ErrorCode::OutOfWindow>;
using ZeroVolatility = CodedError<ErrorCode::ZeroVolatility>;
using DegenerateVariance = CodedError<ErrorCode::DegenerateVariance>;
using Overflow = CodedError<ErrorCode::Overflow>;
using DomainError = CodedError<ErrorCode::DomainError>;
using IoError = CodedError<ErrorCode::IoError>;

}  // namespace delaybs

#include "delaybs/errors.hpp"

namespace delaybs {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IncommensurableDelays: return "IncommensurableDelays";
    case ErrorCode::WindowNotCovered: return "WindowNotCovered";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::ZeroVolatility: return "ZeroVolatility";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace delaybs

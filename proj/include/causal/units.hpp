#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

#include "causal/error.hpp"

namespace causal {

/// Unit in which information quantities are reported.
enum class LogBase { bits, nats };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Converts a quantity measured in nats into `base`.
inline double from_nats(double nats, LogBase base) {
  return base == LogBase::bits ? nats / std::numbers::ln2 : nats;
}

inline double to_nats(double value, LogBase base) {
  return base == LogBase::bits ? value * std::numbers::ln2 : value;
}

inline LogBase parse_log_base(std::string_view text) {
  if (text == "bits") return LogBase::bits;
  if (text == "nats") return LogBase::nats;
  throw UsageError("unknown log base '" + std::string(text) + "' (expected bits or nats)");
}

inline std::string_view to_string(LogBase base) {
  return base == LogBase::bits ? "bits" : "nats";
}

}  // namespace causal

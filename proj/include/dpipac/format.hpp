#pragma once

#include <optional>
#include <string>

namespace dpipac {

/// %.17g rendering: 17 significant digits, so the value
/// round-trips exactly through text.
std::string format_double(double value);

/// Empty string for nullopt.
std::string format_optional(const std::optional<double>& value);

}  // namespace dpipac

#pragma once

#include <optional>
#include <string>

namespace myo {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_shortest(double x);

/// Fixed four-decimal text for reports; "-0.0000" is printed as "0.0000".
std::string format_fixed4(double x);

/// format_fixed4, or "--" when absent.
std::string format_fixed4(const std::optional<double>& x);

/// Strict parse of a full decimal string; throws std::invalid_argument.
double parse_double(const std::string& text);

}  // namespace myo

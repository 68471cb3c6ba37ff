#include "myo/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <system_error>

namespace myo {

std::string format_shortest(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

std::string format_fixed4(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    std::string s(buf);
    if (s == "-0.0000") s = "0.0000";
    return s;
}

std::string format_fixed4(const std::optional<double>& x) {
    return x ? format_fixed4(*x) : std::string("--");
}

double parse_double(const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    return v;
}

}  // namespace myo

#include "escape/scalar.hpp"

#include "escape/errors.hpp"

#include <cstdio>
#include <cstdlib>

extern "C" {
#include <quadmath.h>
}

namespace escape {

std::string_view to_string(Precision p) {
    return p == Precision::Standard ? "standard" : "extended";
}

Precision parse_precision(std::string_view s) {
    if (s == "standard") {
        return Precision::Standard;
    }
    if (s == "extended") {
        return Precision::Extended;
    }
    throw ConfigError("precision must be \"standard\" or \"extended\", got \"" + std::string(s) + "\"");
}

std::string to_hex(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", x);
    return buf;
}

std::string to_hex(const Extended& x) {
    char buf[96];
    quadmath_snprintf(buf, sizeof(buf), "%Qa", x.backend().value());
    return buf;
}

double parse_hex_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) {
        throw ConfigError("not a hexadecimal scalar: " + s);
    }
    return v;
}

Extended parse_hex_extended(const std::string& s) {
    char* end = nullptr;
    const __float128 v = strtoflt128(s.c_str(), &end);
    if (end == s.c_str()) {
        throw ConfigError("not a hexadecimal scalar: " + s);
    }
    return Extended(v);
}

}  // namespace escape

#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/next.hpp>
#include <boost/math/special_functions/ulp.hpp>
#include <boost/multiprecision/float128.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace escape {

/// Software quad precision (113-bit significand) used for deep cascade levels.
using Extended = boost::multiprecision::float128;

enum class Precision { Standard, Extended };

template <class Real>
constexpr Precision precision_of() {
    if constexpr (std::is_same_v<Real, double>) {
        return Precision::Standard;
    } else {
        return Precision::Extended;
    }
}

std::string_view to_string(Precision p);
Precision parse_precision(std::string_view s);

template <class Real>
Real pi() {
    return boost::math::constants::pi<Real>();
}

template <class Real>
Real two_pi() {
    return boost::math::constants::two_pi<Real>();
}

inline double to_double(double x) { return x; }
inline double to_double(const Extended& x) { return x.convert_to<double>(); }

template <class Real>
std::int64_t floor_to_int(const Real& x) {
    using std::floor;
    return static_cast<std::int64_t>(floor(x));
}

template <class Real>
std::int64_t ceil_to_int(const Real& x) {
    using std::ceil;
    return static_cast<std::int64_t>(ceil(x));
}

template <class Real>
Real ulp(const Real& x) {
    return boost::math::ulp(x);
}

/// Exact hexadecimal encodings (C99 %a style) used by the extended-precision sidecar.
std::string to_hex(double x);
std::string to_hex(const Extended& x);
double parse_hex_double(const std::string& s);
Extended parse_hex_extended(const std::string& s);

}  // namespace escape

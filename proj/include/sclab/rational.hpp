#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace sclab {

// Exact arithmetic everywhere a finite expectation or an expert weight is
// compared against a threshold. Floating point is reserved for Monte Carlo
// estimates and display.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(long long num, long long den = 1) {
    return Rational(BigInt(num), BigInt(den));
}

inline double to_double(const Rational& r) {
    return r.convert_to<double>();
}

}  // namespace sclab

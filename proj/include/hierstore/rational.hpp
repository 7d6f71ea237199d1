#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace hierstore {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p", "p/q", "-p/q" or a plain decimal such as "0.25" / "1e6".
/// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form; integers are rendered without a denominator.
std::string to_string(const Rational& value);

/// Fixed-point rendering with `digits` fractional digits, rounded half away from zero.
std::string to_decimal(const Rational& value, int digits);

/// to_decimal when digits are given, to_string otherwise.
std::string format_rational(const Rational& value, std::optional<int> digits);

double to_double(const Rational& value);

BigInt factorial(std::uint64_t n);

/// C(a, b) with the convention C(a, b) = 0 when b < 0 or b > a.
BigInt binomial(std::int64_t a, std::int64_t b);

Rational pow(const Rational& base, std::uint64_t exponent);

inline const Rational& min_of(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max_of(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace hierstore

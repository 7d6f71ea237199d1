#include "hierstore/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace hierstore {
namespace {

BigInt parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) {
    throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
  }
  BigInt value = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

BigInt pow10(std::uint64_t e) {
  BigInt r = 1;
  for (std::uint64_t i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(std::string_view text, std::string_view whole) {
  std::string_view mantissa = text;
  std::int64_t exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string_view exp_text = text.substr(e + 1);
    bool negative_exp = false;
    if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
      negative_exp = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    BigInt ev = parse_digits(exp_text, whole);
    if (ev > 4096) throw std::invalid_argument("exponent too large: '" + std::string(whole) + "'");
    exponent = static_cast<std::int64_t>(ev);
    if (negative_exp) exponent = -exponent;
  }
  std::string_view int_part = mantissa;
  std::string_view frac_part;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    int_part = mantissa.substr(0, dot);
    frac_part = mantissa.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) {
    throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
  }
  BigInt num = int_part.empty() ? BigInt(0) : parse_digits(int_part, whole);
  if (!frac_part.empty()) num = num * pow10(frac_part.size()) + parse_digits(frac_part, whole);
  exponent -= static_cast<std::int64_t>(frac_part.size());
  if (exponent >= 0) return Rational(num * pow10(static_cast<std::uint64_t>(exponent)));
  return Rational(num, pow10(static_cast<std::uint64_t>(-exponent)));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_digits(text.substr(0, slash), whole);
    BigInt den = parse_digits(text.substr(slash + 1), whole);
    if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(whole) + "'");
    value = Rational(num, den);
  } else {
    value = parse_decimal(text, whole);
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) {
  const BigInt& num = boost::multiprecision::numerator(value);
  const BigInt& den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string to_decimal(const Rational& value, int digits) {
  if (digits < 0) digits = 0;
  const bool negative = value < 0;
  Rational magnitude = negative ? Rational(-value) : value;
  const BigInt scale = pow10(static_cast<std::uint64_t>(digits));
  Rational scaled = magnitude * scale;
  BigInt num = boost::multiprecision::numerator(scaled);
  BigInt den = boost::multiprecision::denominator(scaled);
  BigInt q = num / den;
  BigInt r = num % den;
  if (2 * r >= den) q += 1;
  std::string int_digits = BigInt(q / scale).str();
  std::string out = (negative && q != 0) ? "-" : "";
  out += int_digits;
  if (digits > 0) {
    std::string frac = BigInt(q % scale).str();
    out += '.';
    out += std::string(static_cast<std::size_t>(digits) - frac.size(), '0');
    out += frac;
  }
  return out;
}

std::string format_rational(const Rational& value, std::optional<int> digits) {
  return digits ? to_decimal(value, *digits) : to_string(value);
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

BigInt factorial(std::uint64_t n) {
  BigInt r = 1;
  for (std::uint64_t i = 2; i <= n; ++i) r *= i;
  return r;
}

BigInt binomial(std::int64_t a, std::int64_t b) {
  if (a < 0 || b < 0 || b > a) return 0;
  if (b > a - b) b = a - b;
  BigInt r = 1;
  for (std::int64_t i = 1; i <= b; ++i) {
    r *= (a - b + i);
    r /= i;
  }
  return r;
}

Rational pow(const Rational& base, std::uint64_t exponent) {
  Rational result = 1;
  Rational b = base;
  while (exponent > 0) {
    if (exponent & 1U) result *= b;
    b *= b;
    exponent >>= 1U;
  }
  return result;
}

}  // namespace hierstore

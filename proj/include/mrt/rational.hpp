#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace mrt {

/// Exact rational number, always in lowest terms with a positive denominator.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

/// Raised when an operation receives arguments outside its contract.
class argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline bool is_zero(const Rational& r) { return r.is_zero(); }
inline bool is_zero(double d) { return d == 0.0; }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline Rational binomial(unsigned n, unsigned k) {
  if (k > n) return Rational(0);
  Integer acc = 1;
  for (unsigned i = 1; i <= k; ++i) {
    acc *= (n - k + i);
    acc /= i;
  }
  return Rational(acc);
}

inline Rational factorial(unsigned n) {
  Integer acc = 1;
  for (unsigned i = 2; i <= n; ++i) acc *= i;
  return Rational(acc);
}

inline Rational pow(const Rational& base, unsigned e) {
  Rational acc(1);
  for (unsigned i = 0; i < e; ++i) acc *= base;
  return acc;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double d) { return d; }

/// Exact square root of a non-negative rational, if it is a perfect square.
inline std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  Integer num = boost::multiprecision::numerator(r);
  Integer den = boost::multiprecision::denominator(r);
  Integer sn = boost::multiprecision::sqrt(num);
  Integer sd = boost::multiprecision::sqrt(den);
  if (sn * sn != num || sd * sd != den) return std::nullopt;
  return Rational(sn, sd);
}

/// "p/q" or "p"; the result is reduced, so "3/6" becomes 1/2.
inline Rational parse_rational(std::string_view text) {
  auto bad = [&] { return argument_error("malformed rational '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  auto slash = text.find('/');
  auto valid_int = [](std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!valid_int(num, true) || !valid_int(den, false)) throw bad();
  std::string ns(num);
  if (!ns.empty() && ns[0] == '+') ns.erase(0, 1);
  Integer d{std::string(den)};
  if (d == 0) throw argument_error("zero denominator in '" + std::string(text) + "'");
  return Rational(Integer(ns), d);
}

inline std::string format_rational(const Rational& r) {
  Integer den = boost::multiprecision::denominator(r);
  if (den == 1) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" + den.str();
}

template <class T>
T from_rational(const Rational& r);

template <>
inline Rational from_rational<Rational>(const Rational& r) {
  return r;
}

template <>
inline double from_rational<double>(const Rational& r) {
  return r.convert_to<double>();
}

}  // namespace mrt

#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace paramcert {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

namespace detail {

inline Rat parse_decimal(std::string_view s) {
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    negative = s[i] == '-';
    ++i;
  }
  std::string digits;
  long fraction_digits = 0;
  bool seen_digit = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    digits += s[i++];
    seen_digit = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      digits += s[i++];
      ++fraction_digits;
      seen_digit = true;
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed number '" + std::string(s) + "'");
  long exponent = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      exp_negative = s[i] == '-';
      ++i;
    }
    std::string exp_digits;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) exp_digits += s[i++];
    if (exp_digits.empty() || exp_digits.size() > 6)
      throw std::invalid_argument("malformed exponent in '" + std::string(s) + "'");
    exponent = std::stol(exp_digits);
    if (exp_negative) exponent = -exponent;
  }
  if (i != s.size()) throw std::invalid_argument("malformed number '" + std::string(s) + "'");

  Int num(digits, 10);
  if (negative) num = -num;
  long scale = exponent - fraction_digits;
  Int power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  return scale >= 0 ? Rat(num * power) : make_rat(num, power);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Reads "12", "-1.56", "2.5e-3" or "p/q" exactly; decimals never pass through binary floating point.
inline Rat parse_rational(std::string_view text) {
  auto s = detail::trim(text);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return detail::parse_decimal(s);
  Rat num = detail::parse_decimal(detail::trim(s.substr(0, slash)));
  Rat den = detail::parse_decimal(detail::trim(s.substr(slash + 1)));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(s) + "'");
  return num / den;
}

inline std::string to_string(const Rat& r) { return r.get_str(); }

// Truncates toward zero (mpq_get_d); callers needing enclosures use dyadic_floor/ceil instead.
inline double to_double(const Rat& r) { return r.get_d(); }

inline Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Int ceil_div(const Int& a, const Int& b) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Int pow2(unsigned long bits) {
  Int p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, bits);
  return p;
}

/// Largest k/2^bits that is <= x.
inline Rat dyadic_floor(const Rat& x, unsigned long bits) {
  Int scale = pow2(bits);
  return make_rat(floor_div(x.get_num() * scale, x.get_den()), scale);
}

/// Smallest k/2^bits that is >= x.
inline Rat dyadic_ceil(const Rat& x, unsigned long bits) {
  Int scale = pow2(bits);
  return make_rat(ceil_div(x.get_num() * scale, x.get_den()), scale);
}

inline Rat abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

inline Rat rat_pow(const Rat& base, unsigned long e) {
  Rat out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), e);
  out.canonicalize();
  return out;
}

}  // namespace paramcert

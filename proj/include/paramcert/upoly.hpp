#pragma once

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "paramcert/errors.hpp"
#include "paramcert/rational.hpp"

namespace paramcert {

/// Dense univariate polynomial over Q, coefficients from degree 0 upward.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }
  UPoly(std::initializer_list<Rat> coeffs) : c_(coeffs) { trim(); }

  static UPoly constant(const Rat& a) { return UPoly(std::vector<Rat>{a}); }
  static UPoly monomial(std::size_t k, const Rat& a = 1) {
    std::vector<Rat> c(k + 1, Rat(0));
    c[k] = a;
    return UPoly(std::move(c));
  }
  /// T - a
  static UPoly linear_root(const Rat& a) { return UPoly{Rat(-a), Rat(1)}; }

  bool is_zero() const { return c_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Rat>& coeffs() const { return c_; }
  Rat coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rat(0); }
  const Rat& leading_coeff() const { return c_.back(); }

  friend UPoly operator+(const UPoly& a, const UPoly& b) {
    std::vector<Rat> c(std::max(a.c_.size(), b.c_.size()), Rat(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return UPoly(std::move(c));
  }
  friend UPoly operator-(const UPoly& a, const UPoly& b) {
    std::vector<Rat> c(std::max(a.c_.size(), b.c_.size()), Rat(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
    return UPoly(std::move(c));
  }
  UPoly operator-() const {
    UPoly r(*this);
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rat> c(a.c_.size() + b.c_.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    }
    return UPoly(std::move(c));
  }
  friend UPoly operator*(const Rat& s, const UPoly& p) {
    if (s == 0) return {};
    UPoly r(p);
    for (auto& x : r.c_) x *= s;
    return r;
  }

  friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }

  /// Euclidean division: returns (quotient, remainder).
  friend std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) throw StructuralError("univariate division by zero");
    if (a.degree() < b.degree()) return {UPoly{}, a};
    std::vector<Rat> rem = a.c_;
    std::vector<Rat> quo(a.c_.size() - b.c_.size() + 1, Rat(0));
    Rat inv = 1 / b.leading_coeff();
    for (std::size_t k = quo.size(); k-- > 0;) {
      Rat q = rem[k + b.c_.size() - 1] * inv;
      quo[k] = q;
      if (q == 0) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) rem[k + j] -= q * b.c_[j];
    }
    rem.resize(b.c_.size() - 1);
    return {UPoly(std::move(quo)), UPoly(std::move(rem))};
  }
  friend UPoly operator%(const UPoly& a, const UPoly& b) { return divmod(a, b).second; }
  friend UPoly operator/(const UPoly& a, const UPoly& b) { return divmod(a, b).first; }

  UPoly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rat> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<unsigned long>(i);
    return UPoly(std::move(d));
  }

  Rat eval(const Rat& x) const {
    Rat acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }

  double eval(double x) const {
    double acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i].get_d();
    return acc;
  }

  UPoly monic() const {
    if (is_zero()) return *this;
    return Rat(1 / leading_coeff()) * *this;
  }

  /// p(T + a)
  UPoly taylor_shift(const Rat& a) const {
    std::vector<Rat> c = c_;
    auto n = c.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = n - 1; j-- > i;) c[j] += a * c[j + 1];
    return UPoly(std::move(c));
  }

  /// p(s * T)
  UPoly scale_argument(const Rat& s) const {
    std::vector<Rat> c = c_;
    Rat p = 1;
    for (auto& x : c) {
      x *= p;
      p *= s;
    }
    return UPoly(std::move(c));
  }

  /// Coefficients scaled to coprime integers with positive leading coefficient.
  std::vector<Int> integer_coefficients() const {
    Int l = 1;
    for (const auto& x : c_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    std::vector<Int> out(c_.size());
    Int g = 0;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      out[i] = c_[i].get_num() * (l / c_[i].get_den());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[i].get_mpz_t());
    }
    if (g == 0) return out;
    if (out.back() < 0) g = -g;
    for (auto& x : out) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
    return out;
  }

  /// Same polynomial rescaled to integer primitive form.
  UPoly primitive() const {
    auto ints = integer_coefficients();
    std::vector<Rat> c(ints.begin(), ints.end());
    return UPoly(std::move(c));
  }

  std::string to_string(const std::string& var = "T") const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = c_.size(); i-- > 0;) {
      if (c_[i] == 0) continue;
      Rat a = c_[i];
      bool neg = a < 0;
      if (neg) a = -a;
      if (first)
        os << (neg ? "-" : "");
      else
        os << (neg ? " - " : " + ");
      first = false;
      if (a != 1 || i == 0) {
        os << a.get_str();
        if (i > 0) os << "*";
      }
      if (i > 0) os << var;
      if (i > 1) os << "^" << i;
    }
    return os.str();
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<Rat> c_;
};

/// Monic gcd; gcd(0, 0) = 0.
inline UPoly gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    auto r = (a % b).primitive();
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// Returns (g, s) with s*a = g (mod m), g = gcd(a, m) monic.
inline std::pair<UPoly, UPoly> half_extended_gcd(const UPoly& a, const UPoly& m) {
  UPoly r0 = m, r1 = a % m;
  UPoly s0, s1 = UPoly::constant(1);
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    UPoly s = s0 - q * s1;
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s);
  }
  if (r0.is_zero()) return {r0, s0};
  Rat inv = 1 / r0.leading_coeff();
  return {inv * r0, inv * s0};
}

/// Inverse of a modulo m; throws when gcd(a, m) != 1.
inline UPoly inverse_mod(const UPoly& a, const UPoly& m) {
  auto [g, s] = half_extended_gcd(a, m);
  if (g.degree() != 0) throw StructuralError("polynomial is not invertible modulo " + m.to_string());
  return s % m;
}

inline std::ostream& operator<<(std::ostream& os, const UPoly& p) { return os << p.to_string(); }

}  // namespace paramcert

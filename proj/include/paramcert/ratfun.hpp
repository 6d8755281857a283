#pragma once

#include <utility>

#include "paramcert/polynomial.hpp"

namespace paramcert {

/// Quotient of polynomials. The denominator is never zero and is kept monic
/// in the canonical order; constant denominators are folded into the numerator.
class RatFun {
 public:
  RatFun() = default;
  explicit RatFun(Poly num) : num_(std::move(num)), den_(Poly::constant(num_.registry(), 1)) {}
  RatFun(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw StructuralError("rational function with zero denominator");
    normalize();
  }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  const RegistryPtr& registry() const { return num_.registry(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_zero() const { return num_.is_zero(); }

  friend RatFun operator+(const RatFun& a, const RatFun& b) {
    if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend RatFun operator-(const RatFun& a, const RatFun& b) {
    if (a.den_ == b.den_) return {a.num_ - b.num_, a.den_};
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend RatFun operator*(const RatFun& a, const RatFun& b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
  friend RatFun operator/(const RatFun& a, const RatFun& b) {
    if (b.num_.is_zero()) throw StructuralError("division by zero rational function");
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  RatFun operator-() const { return {-num_, den_}; }

  /// Integer power; negative exponents invert.
  RatFun pow(int e) const {
    if (e >= 0) return {num_.pow(static_cast<unsigned>(e)), den_.pow(static_cast<unsigned>(e))};
    if (num_.is_zero()) throw StructuralError("negative power of zero");
    return {den_.pow(static_cast<unsigned>(-e)), num_.pow(static_cast<unsigned>(-e))};
  }

  RatFun diff(std::size_t var) const {
    if (is_polynomial()) return RatFun(num_.diff(var));
    return {num_.diff(var) * den_ - num_ * den_.diff(var), den_ * den_};
  }

  Rat eval(std::span<const Rat> point) const {
    Rat d = den_.eval(point);
    if (d == 0) throw StructuralError("denominator vanishes at evaluation point");
    return num_.eval(point) / d;
  }

  RatFun substitute(std::size_t var, const Rat& v) const { return {num_.substitute(var, v), den_.substitute(var, v)}; }
  RatFun substitute(std::size_t var, const Poly& v) const { return {num_.substitute(var, v), den_.substitute(var, v)}; }

  RatFun remap(const RegistryPtr& target, std::span<const std::size_t> index_map) const {
    return {num_.remap(target, index_map), den_.remap(target, index_map)};
  }

  std::vector<std::size_t> variables() const {
    auto a = num_.variables();
    auto b = den_.variables();
    std::vector<std::size_t> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
  }

  friend bool operator==(const RatFun& a, const RatFun& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  std::string to_string() const {
    if (is_polynomial()) return num_.to_string();
    return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
  }

 private:
  void normalize() {
    if (den_.is_constant()) {
      num_ = Rat(1 / den_.constant_value()) * num_;
      den_ = Poly::constant(num_.registry() ? num_.registry() : den_.registry(), 1);
      return;
    }
    if (num_.is_zero()) {
      den_ = Poly::constant(den_.registry(), 1);
      return;
    }
    if (auto q = num_.divide_exact(den_)) {
      num_ = std::move(*q);
      den_ = Poly::constant(num_.registry(), 1);
      return;
    }
    cancel_monomial_content();
    Rat lc = den_.leading_term().coef;
    if (lc != 1) {
      Rat inv = 1 / lc;
      num_ = inv * num_;
      den_ = inv * den_;
    }
  }

  // Divides out the largest monomial dividing both numerator and denominator.
  void cancel_monomial_content() {
    auto n = num_.nvars();
    std::vector<std::uint32_t> g(n, UINT32_MAX);
    for (const auto* p : {&num_, &den_})
      for (const auto& t : p->terms())
        for (std::size_t i = 0; i < n; ++i) g[i] = std::min(g[i], t.mono[i]);
    Monomial common(g);
    if (common.is_one()) return;
    auto divide = [&](const Poly& p) {
      std::vector<Term> out;
      for (const auto& t : p.terms()) out.push_back({t.mono / common, t.coef});
      return Poly::from_terms(p.registry(), std::move(out));
    };
    num_ = divide(num_);
    den_ = divide(den_);
  }

  Poly num_;
  Poly den_;
};

/// Returns (numerator, denominator) with integer coefficients and no common integer content,
/// denominator leading coefficient positive.
inline std::pair<Poly, Poly> clear_denominators(const RatFun& r) {
  if (r.den().is_zero()) throw StructuralError("zero denominator");
  Poly num = r.num();
  Poly den = r.den();
  Int l = 1;
  mpz_lcm(l.get_mpz_t(), num.denominator_lcm().get_mpz_t(), den.denominator_lcm().get_mpz_t());
  num = Rat(l) * num;
  den = Rat(l) * den;
  Int g = 0;
  for (const auto* p : {&num, &den})
    for (const auto& t : p->terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coef.get_num_mpz_t());
  if (g != 0 && g != 1) {
    Rat inv = make_rat(1, g);
    num = inv * num;
    den = inv * den;
  }
  if (!den.is_zero() && den.leading_term().coef < 0) {
    num = -num;
    den = -den;
  }
  return {num, den};
}

}  // namespace paramcert

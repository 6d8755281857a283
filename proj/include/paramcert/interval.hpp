#pragma once

#include <algorithm>
#include <span>

#include "paramcert/polynomial.hpp"
#include "paramcert/upoly.hpp"

namespace paramcert {

/// Closed interval with exact rational endpoints.
struct Interval {
  Rat lo;
  Rat hi;

  Interval() = default;
  Interval(const Rat& point) : lo(point), hi(point) {}  // NOLINT(google-explicit-constructor)
  Interval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw StructuralError("interval with lo > hi");
  }

  Rat width() const { return hi - lo; }
  Rat midpoint() const { return (lo + hi) / 2; }
  bool contains(const Rat& x) const { return lo <= x && x <= hi; }
  bool contains_zero() const { return lo <= 0 && hi >= 0; }
  bool is_point() const { return lo == hi; }

  friend Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
  friend Interval operator-(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }
  Interval operator-() const { return {-hi, -lo}; }

  friend Interval operator*(const Interval& a, const Interval& b) {
    Rat p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
  }

  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw StructuralError("interval division by an interval containing zero");
    return a * Interval(1 / b.hi, 1 / b.lo);
  }

  Interval pow(unsigned e) const {
    if (e == 0) return Interval(Rat(1));
    Rat a = rat_pow(lo, e), b = rat_pow(hi, e);
    if (e % 2 == 1) return {a, b};
    if (lo >= 0) return {a, b};
    if (hi <= 0) return {b, a};
    return {Rat(0), std::max(a, b)};
  }

  friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }
};

/// Widens to endpoints on the grid 2^-bits.
inline Interval round_outward(const Interval& x, unsigned long bits) {
  return {dyadic_floor(x.lo, bits), dyadic_ceil(x.hi, bits)};
}

/// Horner enclosure of p over x.
inline Interval eval(const UPoly& p, const Interval& x) {
  if (x.is_point()) return Interval(p.eval(x.lo));
  Interval acc(Rat(0));
  const auto& c = p.coeffs();
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + Interval(c[i]);
  return acc;
}

/// Term-wise enclosure of a multivariate polynomial over a box.
inline Interval eval(const Poly& p, std::span<const Interval> box) {
  if (box.size() != p.nvars()) throw StructuralError("box dimension does not match registry");
  Interval acc(Rat(0));
  std::vector<std::vector<Interval>> powers(box.size());
  for (const auto& t : p.terms()) {
    Interval v(t.coef);
    for (std::size_t i = 0; i < box.size(); ++i) {
      auto e = t.mono[i];
      if (e == 0) continue;
      auto& pw = powers[i];
      if (pw.empty()) pw.push_back(Interval(Rat(1)));
      while (pw.size() <= e) pw.push_back(box[i].pow(static_cast<unsigned>(pw.size())));
      v = v * pw[e];
    }
    acc = acc + v;
  }
  return acc;
}

}  // namespace paramcert

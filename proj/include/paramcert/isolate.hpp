#pragma once

#include <algorithm>
#include <vector>

#include "paramcert/interval.hpp"
#include "paramcert/upoly.hpp"

namespace paramcert {

/// [lo, hi] holding exactly one real root; `exact` when lo == hi is the root itself.
struct IsolatingInterval {
  Rat lo;
  Rat hi;
  bool exact = false;

  Rat width() const { return hi - lo; }
  Interval as_interval() const { return {lo, hi}; }
};

namespace detail {

using IntPoly = std::vector<Int>;  // degree 0 upward

inline void drop_content(IntPoly& p) {
  Int g = 0;
  for (const auto& a : p) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
  if (g > 1)
    for (auto& a : p) mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
}

inline void taylor_shift_one(IntPoly& c) {
  auto n = c.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = n - 1; j-- > i;) c[j] += c[j + 1];
}

inline unsigned sign_variations(const IntPoly& c) {
  unsigned v = 0;
  int last = 0;
  for (const auto& a : c) {
    int s = sgn(a);
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

/// Descartes bound for roots in the open unit interval.
inline unsigned descartes_unit(const IntPoly& p) {
  IntPoly q(p.rbegin(), p.rend());
  taylor_shift_one(q);
  return sign_variations(q);
}

/// 2^n p(x/2)
inline IntPoly halve(const IntPoly& p) {
  IntPoly q(p.size());
  auto n = p.size() - 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Int s;
    mpz_mul_2exp(s.get_mpz_t(), p[i].get_mpz_t(), n - i);
    q[i] = s;
  }
  return q;
}

/// Sign of the integer polynomial at a rational point, without forming fractions.
inline int sign_at(const IntPoly& f, const Rat& x) {
  const Int& p = x.get_num();
  const Int& q = x.get_den();
  Int acc = 0;
  for (std::size_t i = f.size(); i-- > 0;) {
    acc *= p;
    Int qpow;
    mpz_pow_ui(qpow.get_mpz_t(), q.get_mpz_t(), f.size() - 1 - i);
    acc += f[i] * qpow;
  }
  return sgn(acc);
}

inline IntPoly integer_form(const UPoly& f) { return f.integer_coefficients(); }

/// Integer form of f(lo + (hi - lo) x).
inline IntPoly on_unit_interval(const UPoly& f, const Rat& lo, const Rat& hi) {
  return f.taylor_shift(lo).scale_argument(hi - lo).integer_coefficients();
}

}  // namespace detail

/// f / gcd(f, f'), scaled to a primitive integer polynomial with positive leading coefficient.
inline UPoly squarefree_part(const UPoly& f) {
  if (f.is_zero()) throw StructuralError("squarefree part of the zero polynomial");
  if (f.degree() == 0) return UPoly::constant(1);
  UPoly g = gcd(f, f.derivative());
  return (f / g).primitive();
}

/// Sign variations of f carried onto (lo, hi); 0 means no root there, 1 exactly one.
inline unsigned descartes_bound(const UPoly& f, const Rat& lo, const Rat& hi) {
  if (!(lo < hi)) throw StructuralError("descartes_bound needs lo < hi");
  if (f.degree() <= 0) return 0;
  return detail::descartes_unit(detail::on_unit_interval(f, lo, hi));
}

inline int sign_at(const UPoly& f, const Rat& x) { return sgn(f.eval(x)); }

/// Power of two strictly above the modulus of every complex root.
inline Rat cauchy_bound(const UPoly& f) {
  Rat m = 0;
  const Rat& lc = f.leading_coeff();
  for (int i = 0; i < f.degree(); ++i) m = std::max(m, Rat(abs(f.coeff(static_cast<std::size_t>(i)) / lc)));
  Rat bound = m + 1;
  Rat p = 1;
  while (p < bound) p *= 2;
  return p;
}

namespace detail {

// Moves endpoints off roots of f while keeping the single interior root.
inline IsolatingInterval tighten(const IntPoly& f, const UPoly& fq, IsolatingInterval iv) {
  while (!iv.exact && (sign_at(f, iv.lo) == 0 || sign_at(f, iv.hi) == 0)) {
    Rat m = (iv.lo + iv.hi) / 2;
    if (sign_at(f, m) == 0) return {m, m, true};
    if (descartes_bound(fq, iv.lo, m) == 1)
      iv.hi = m;
    else
      iv.lo = m;
  }
  return iv;
}

}  // namespace detail

/// Bisects an isolating interval by exact sign evaluation until its width is at most eps.
inline IsolatingInterval refine(const UPoly& f, IsolatingInterval iv, const Rat& eps) {
  if (iv.exact || iv.width() <= eps) return iv;
  UPoly g = squarefree_part(f);
  auto ints = detail::integer_form(g);
  iv = detail::tighten(ints, g, iv);
  int slo = detail::sign_at(ints, iv.lo);
  while (!iv.exact && iv.width() > eps) {
    Rat m = (iv.lo + iv.hi) / 2;
    int sm = detail::sign_at(ints, m);
    if (sm == 0) return {m, m, true};
    if (sm == slo)
      iv.lo = m;
    else
      iv.hi = m;
  }
  return iv;
}

/// Vincent-Collins-Akritas bisection on the Cauchy bound; one interval per distinct real root,
/// sorted ascending, each of width at most maxwidth.
inline std::vector<IsolatingInterval> isolate_real_roots(const UPoly& f, const Rat& maxwidth) {
  if (f.is_zero()) throw StructuralError("cannot isolate roots of the zero polynomial");
  UPoly g = squarefree_part(f);
  std::vector<IsolatingInterval> out;
  if (g.degree() <= 0) return out;

  Rat bound = cauchy_bound(g);
  Rat span = 2 * bound;
  auto to_t = [&](const Rat& x) { return Rat(-bound + span * x); };

  struct Node {
    detail::IntPoly poly;
    Int c;
    unsigned long k;
  };
  std::vector<Node> stack;
  stack.push_back({detail::on_unit_interval(g, -bound, bound), 0, 0});
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    unsigned v = detail::descartes_unit(node.poly);
    if (v == 0) continue;
    Int scale = pow2(node.k);
    if (v == 1) {
      out.push_back({to_t(make_rat(node.c, scale)), to_t(make_rat(node.c + 1, scale)), false});
      continue;
    }
    auto left = detail::halve(node.poly);
    Int mid_value = 0;
    for (const auto& a : left) mid_value += a;
    if (mid_value == 0) {
      Rat m = to_t(make_rat(2 * node.c + 1, pow2(node.k + 1)));
      out.push_back({m, m, true});
    }
    auto right = left;
    detail::taylor_shift_one(right);
    detail::drop_content(left);
    detail::drop_content(right);
    stack.push_back({std::move(right), 2 * node.c + 1, node.k + 1});
    stack.push_back({std::move(left), 2 * node.c, node.k + 1});
  }

  auto ints = detail::integer_form(g);
  for (auto& iv : out) {
    iv = detail::tighten(ints, g, iv);
    iv = refine(g, iv, maxwidth);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  return out;
}

}  // namespace paramcert

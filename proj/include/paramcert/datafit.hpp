#pragma once

#include <numeric>
#include <vector>

#include "paramcert/model.hpp"
#include "paramcert/upoly.hpp"

namespace paramcert {

enum class InterpKind { polynomial, rational };

inline const char* to_string(InterpKind k) { return k == InterpKind::polynomial ? "poly" : "rational"; }

/// Exact interpolant through data nodes.
///  - polynomial: Newton divided differences, coefficients[k] multiplies prod_{i<k} (t - nodes[i]).
///  - rational: Thiele continued fraction a0 + (t-x0)/(a1 + (t-x1)/(a2 + ...)).
struct Interpolant {
  InterpKind kind = InterpKind::polynomial;
  std::vector<Rat> coefficients;
  std::vector<Rat> nodes;
};

inline Interpolant fit_polynomial(std::span<const Rat> nodes, std::span<const Rat> values) {
  if (nodes.size() != values.size() || nodes.empty()) throw DataError("interpolation needs matching, nonempty nodes");
  std::vector<Rat> dd(values.begin(), values.end());
  auto n = dd.size();
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = n - 1; i >= k; --i) {
      Rat h = nodes[i] - nodes[i - k];
      if (h == 0) throw DataError("repeated interpolation node");
      dd[i] = (dd[i] - dd[i - 1]) / h;
    }
  return {InterpKind::polynomial, std::move(dd), std::vector<Rat>(nodes.begin(), nodes.end())};
}

inline Interpolant fit_thiele(std::span<const Rat> nodes, std::span<const Rat> values) {
  auto n = nodes.size();
  if (n != values.size() || n == 0) throw DataError("interpolation needs matching, nonempty nodes");
  // rho[k][i] = reciprocal difference of order k over nodes i..i+k.
  std::vector<std::vector<Rat>> rho(n);
  rho[0].assign(values.begin(), values.end());
  std::size_t terms = n;
  for (std::size_t k = 1; k < n && terms == n; ++k) {
    rho[k].resize(n - k);
    for (std::size_t i = 0; i + k < n; ++i) {
      Rat diff = rho[k - 1][i] - rho[k - 1][i + 1];
      if (diff == 0) {
        // A constant previous column means the fraction already terminated.
        bool constant = true;
        for (std::size_t j = 0; j + k < n; ++j) constant = constant && rho[k - 1][j] == rho[k - 1][0];
        if (!constant) throw ThieleBreakdown("reciprocal difference of order " + std::to_string(k) + " is infinite");
        terms = k;
        rho[k].clear();
        break;
      }
      Rat v = (nodes[i] - nodes[i + k]) / diff;
      if (k >= 2) v += rho[k - 2][i + 1];
      rho[k][i] = v;
    }
  }
  std::vector<Rat> a(terms);
  a[0] = rho[0][0];
  if (terms > 1) a[1] = rho[1][0];
  for (std::size_t k = 2; k < terms; ++k) a[k] = rho[k][0] - rho[k - 2][0];
  return {InterpKind::rational, std::move(a), std::vector<Rat>(nodes.begin(), nodes.end())};
}

inline Interpolant fit_interpolant(const Dataset& data, std::size_t output, InterpKind kind) {
  if (output >= data.observations.size()) throw DataError("output index out of range");
  if (data.samples() < 2) throw DataError("interpolation needs at least 2 samples");
  const auto& ys = data.observations[output];
  return kind == InterpKind::polynomial ? fit_polynomial(data.times, ys) : fit_thiele(data.times, ys);
}

/// The interpolant as numerator/denominator in t; the denominator is 1 for the polynomial kind.
inline std::pair<UPoly, UPoly> as_fraction(const Interpolant& ip) {
  const auto& c = ip.coefficients;
  const auto& x = ip.nodes;
  if (ip.kind == InterpKind::polynomial) {
    UPoly p;
    for (std::size_t k = c.size(); k-- > 0;) p = p * UPoly::linear_root(x[k]) + UPoly::constant(c[k]);
    return {p, UPoly::constant(1)};
  }
  // Evaluate the continued fraction from the bottom: value = num/den.
  auto n = c.size();
  UPoly num = UPoly::constant(c[n - 1]), den = UPoly::constant(1);
  for (std::size_t k = n - 1; k-- > 0;) {
    // c[k] + (t - x[k]) / (num/den) = (c[k]*num + (t - x[k])*den) / num
    UPoly nn = c[k] * num + UPoly::linear_root(x[k]) * den;
    den = std::move(num);
    num = std::move(nn);
  }
  if (den.is_zero()) throw PoleError("degenerate continued fraction");
  return {num, den};
}

inline Rat evaluate(const Interpolant& ip, const Rat& t) {
  auto [num, den] = as_fraction(ip);
  Rat d = den.eval(t);
  if (d == 0) throw PoleError("interpolant has a pole at t = " + t.get_str());
  return num.eval(t) / d;
}

/// Exact derivatives of orders 0..maxorder of the interpolant at tstar.
inline std::vector<Rat> estimate_derivatives(const Interpolant& ip, const Rat& tstar, int maxorder) {
  if (maxorder < 0) throw DataError("maxorder must be non-negative");
  if (static_cast<std::size_t>(maxorder) >= ip.nodes.size())
    throw DataError("derivative order " + std::to_string(maxorder) + " needs more than " +
                    std::to_string(ip.nodes.size()) + " data points");
  auto [num, den] = as_fraction(ip);
  // Taylor coefficients at tstar by series division.
  UPoly ns = num.taylor_shift(tstar), ds = den.taylor_shift(tstar);
  if (ds.coeff(0) == 0) throw PoleError("interpolant has a pole at t* = " + tstar.get_str());
  auto m = static_cast<std::size_t>(maxorder);
  std::vector<Rat> q(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    Rat acc = ns.coeff(k);
    for (std::size_t j = 1; j <= k; ++j) acc -= ds.coeff(j) * q[k - j];
    q[k] = acc / ds.coeff(0);
  }
  Rat fact = 1;
  for (std::size_t k = 0; k <= m; ++k) {
    if (k > 0) fact *= static_cast<unsigned long>(k);
    q[k] *= fact;
  }
  return q;
}

}  // namespace paramcert

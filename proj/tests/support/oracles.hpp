#pragma once
// Independent reference implementations used only by the tests.

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "paramcert/paramcert.hpp"

namespace oracle {

using paramcert::Int;
using paramcert::Poly;
using paramcert::Rat;
using paramcert::UPoly;

//-----------------------------------------------------------------------------
// Sturm sequences
//-----------------------------------------------------------------------------

inline int sign(const Rat& r) { return sgn(r); }

inline std::vector<UPoly> sturm_chain(const UPoly& f) {
  std::vector<UPoly> chain{f, f.derivative()};
  while (!chain.back().is_zero() && chain.back().degree() > 0) {
    UPoly r = chain[chain.size() - 2] % chain.back();
    if (r.is_zero()) break;
    chain.push_back(Rat(-1) * r);
  }
  return chain;
}

inline int variations(const std::vector<int>& signs) {
  int v = 0, last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

// Signs at -infinity / +infinity from leading coefficients.
inline int sturm_count_all(const UPoly& f) {
  auto chain = sturm_chain(f);
  std::vector<int> lo, hi;
  for (const auto& p : chain) {
    int lc = sign(p.leading_coeff());
    hi.push_back(lc);
    lo.push_back(p.degree() % 2 == 0 ? lc : -lc);
  }
  return variations(lo) - variations(hi);
}

// Distinct real roots in (a, b], a and b not roots.
inline int sturm_count(const UPoly& f, const Rat& a, const Rat& b) {
  auto chain = sturm_chain(f);
  std::vector<int> sa, sb;
  for (const auto& p : chain) {
    sa.push_back(sign(p.eval(a)));
    sb.push_back(sign(p.eval(b)));
  }
  return variations(sa) - variations(sb);
}

//-----------------------------------------------------------------------------
// Random objects
//-----------------------------------------------------------------------------

inline Rat random_rat(std::mt19937_64& rng, int num_range = 9, int den_range = 4) {
  std::uniform_int_distribution<int> n(-num_range, num_range), d(1, den_range);
  return paramcert::make_rat(n(rng), d(rng));
}

inline UPoly random_upoly(std::mt19937_64& rng, int max_degree) {
  std::uniform_int_distribution<int> deg(1, max_degree), coin(0, 3);
  int d = deg(rng);
  std::vector<Rat> c(static_cast<std::size_t>(d) + 1);
  for (auto& x : c) x = coin(rng) == 0 ? Rat(0) : random_rat(rng);
  if (c.back() == 0) c.back() = 1;
  // Sometimes plant rational roots and repeated factors.
  if (coin(rng) == 0) {
    UPoly p(c);
    p = p * UPoly::linear_root(random_rat(rng)) * UPoly::linear_root(random_rat(rng));
    return p;
  }
  return UPoly(c);
}

inline Poly random_poly(std::mt19937_64& rng, const paramcert::RegistryPtr& reg, int max_degree, int max_terms) {
  std::uniform_int_distribution<int> terms(0, max_terms);
  std::uniform_int_distribution<unsigned> e(0, static_cast<unsigned>(max_degree));
  std::vector<paramcert::Term> ts;
  int n = terms(rng);
  for (int k = 0; k < n; ++k) {
    std::vector<std::uint32_t> ex(reg->size(), 0);
    unsigned budget = e(rng);
    std::uniform_int_distribution<std::size_t> var(0, reg->size() - 1);
    for (unsigned b = 0; b < budget; ++b) ++ex[var(rng)];
    Rat c = random_rat(rng);
    if (c == 0) continue;
    ts.push_back({paramcert::Monomial(ex), c});
  }
  return Poly::from_terms(reg, ts);
}

// Dense Gauss-Jordan elimination; A square and nonsingular.
inline std::vector<Rat> solve_linear(std::vector<std::vector<Rat>> A, std::vector<Rat> b) {
  auto n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (A[p][c] == 0) ++p;
    std::swap(A[p], A[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c] == 0) continue;
      Rat f = A[r][c] / A[c][c];
      for (std::size_t j = c; j < n; ++j) A[r][j] -= f * A[c][j];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= A[i][i];
  return b;
}

// Derivatives at t of the interpolating polynomial, from monomial coefficients (Vandermonde solve).
inline std::vector<Rat> vandermonde_derivatives(const std::vector<Rat>& nodes, const std::vector<Rat>& values,
                                                const Rat& t, std::size_t maxorder) {
  auto n = nodes.size();
  std::vector<std::vector<Rat>> A(n, std::vector<Rat>(n));
  for (std::size_t i = 0; i < n; ++i) {
    Rat pw = 1;
    for (std::size_t j = 0; j < n; ++j, pw *= nodes[i] - t) A[i][j] = pw;
  }
  auto c = solve_linear(A, values);
  std::vector<Rat> out;
  Rat fact = 1;
  for (std::size_t k = 0; k <= maxorder; ++k) {
    if (k > 0) fact *= static_cast<unsigned long>(k);
    out.push_back(k < n ? Rat(c[k] * fact) : Rat(0));
  }
  return out;
}

//-----------------------------------------------------------------------------
// Systems with a known finite variety
//-----------------------------------------------------------------------------

struct ConstructedSystem {
  paramcert::PolySystem system;
  std::vector<std::vector<Rat>> real_points;
  std::size_t complex_points = 0;  // total solution count over C (distinct)
};

// Grid of points per coordinate, each factor of degree <= 3 (possibly with an irreducible
// quadratic part), carried by a unimodular integer change of coordinates.
inline ConstructedSystem constructed_system(std::mt19937_64& rng, std::size_t nvars) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < nvars; ++i) names.push_back("x" + std::to_string(i));
  auto reg = paramcert::make_registry(names);

  // Sizes with product <= 8.
  std::vector<std::vector<Rat>> coords(nvars);
  std::vector<bool> complex_pair(nvars, false);
  std::size_t total = 1;
  for (std::size_t i = 0; i < nvars; ++i) {
    std::size_t room = 8 / total;
    std::size_t rest = nvars - i - 1;
    std::size_t cap = std::min<std::size_t>(3, rest > 0 ? std::max<std::size_t>(1, room / 2) : room);
    std::uniform_int_distribution<std::size_t> k(1, std::max<std::size_t>(cap, 1));
    std::size_t count = k(rng);
    std::set<Rat> vals;
    while (vals.size() < count) vals.insert(random_rat(rng, 5, 3));
    coords[i].assign(vals.begin(), vals.end());
    total *= count;
    std::uniform_int_distribution<int> coin(0, 3);
    complex_pair[i] = count == 1 && coin(rng) == 0;
  }

  // Unimodular M = lower-triangular(1s on diagonal) * upper-triangular(1s on diagonal).
  std::uniform_int_distribution<int> small(-1, 1);
  std::vector<std::vector<Int>> L(nvars, std::vector<Int>(nvars, 0)), U = L;
  for (std::size_t i = 0; i < nvars; ++i) {
    L[i][i] = U[i][i] = 1;
    for (std::size_t j = 0; j < i; ++j) L[i][j] = small(rng);
    for (std::size_t j = i + 1; j < nvars; ++j) U[i][j] = small(rng);
  }
  std::vector<std::vector<Int>> M(nvars, std::vector<Int>(nvars, 0));
  for (std::size_t i = 0; i < nvars; ++i)
    for (std::size_t j = 0; j < nvars; ++j)
      for (std::size_t k = 0; k < nvars; ++k) M[i][j] += L[i][k] * U[k][j];

  // New coordinates q = M x; equations f_i(q_i) = 0.
  std::vector<Poly> q(nvars, Poly(reg));
  for (std::size_t i = 0; i < nvars; ++i)
    for (std::size_t j = 0; j < nvars; ++j)
      if (M[i][j] != 0) q[i] += Rat(M[i][j]) * Poly::variable(reg, j);

  ConstructedSystem cs;
  cs.system.registry = reg;
  std::size_t complex_total = 1;
  for (std::size_t i = 0; i < nvars; ++i) {
    Poly f = Poly::constant(reg, 1);
    for (const auto& a : coords[i]) f *= q[i] - Poly::constant(reg, a);
    std::size_t factor_count = coords[i].size();
    if (complex_pair[i]) {
      f *= q[i] * q[i] + Poly::constant(reg, 1);
      factor_count += 2;
    }
    complex_total *= factor_count;
    cs.system.equations.push_back(f);
  }
  cs.complex_points = complex_total;
  // Mix the equations with constant multiples.
  std::uniform_int_distribution<int> mix(-2, 2);
  for (std::size_t i = 1; i < nvars; ++i) cs.system.equations[i] += Rat(mix(rng)) * cs.system.equations[i - 1];
  cs.system.square = true;

  // Real points: solve M x = q for each grid point q (exact rational Gaussian elimination).
  std::vector<std::vector<Rat>> grid{{}};
  for (std::size_t i = 0; i < nvars; ++i) {
    std::vector<std::vector<Rat>> next;
    for (const auto& g : grid)
      for (const auto& a : coords[i]) {
        auto h = g;
        h.push_back(a);
        next.push_back(h);
      }
    grid = next;
  }
  for (const auto& g : grid) {
    paramcert::Matrix A(nvars, nvars + 1);
    for (std::size_t i = 0; i < nvars; ++i) {
      for (std::size_t j = 0; j < nvars; ++j) A(i, j) = Rat(M[i][j]);
      A(i, nvars) = g[i];
    }
    for (std::size_t c = 0; c < nvars; ++c) {
      std::size_t p = c;
      while (A(p, c) == 0) ++p;
      for (std::size_t j = 0; j <= nvars; ++j) std::swap(A(p, j), A(c, j));
      for (std::size_t r = 0; r < nvars; ++r) {
        if (r == c || A(r, c) == 0) continue;
        Rat f = A(r, c) / A(c, c);
        for (std::size_t j = 0; j <= nvars; ++j) A(r, j) -= f * A(c, j);
      }
    }
    std::vector<Rat> x(nvars);
    for (std::size_t i = 0; i < nvars; ++i) x[i] = A(i, nvars) / A(i, i);
    cs.real_points.push_back(x);
  }
  return cs;
}

//-----------------------------------------------------------------------------
// Taylor-series integration of polynomial ODEs
//-----------------------------------------------------------------------------

// Truncated power series product.
template <class S>
std::vector<S> series_mul(const std::vector<S>& a, const std::vector<S>& b, std::size_t n) {
  std::vector<S> c(n, S(0));
  for (std::size_t i = 0; i < std::min(n, a.size()); ++i)
    for (std::size_t j = 0; i + j < n && j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

template <class S>
std::vector<S> series_eval(const Poly& p, const std::vector<std::vector<S>>& vars, std::size_t n) {
  std::vector<S> out(n, S(0));
  for (const auto& t : p.terms()) {
    std::vector<S> term(n, S(0));
    term[0] = S(t.coef);
    for (std::size_t i = 0; i < vars.size(); ++i)
      for (std::uint32_t k = 0; k < t.mono[i]; ++k) term = series_mul(term, vars[i], n);
    for (std::size_t k = 0; k < n; ++k) out[k] += term[k];
  }
  return out;
}

// Taylor coefficients (order < n) of the states of a polynomial model around the point where the
// states equal x0. `point` holds the full model registry vector (params filled in; state slots ignored).
template <class S>
std::vector<std::vector<S>> taylor_states(const paramcert::Model& m, const std::vector<S>& params,
                                          const std::vector<S>& x0, std::size_t n) {
  auto ns = m.states.size();
  std::vector<std::vector<S>> vars(m.registry->size(), std::vector<S>(n, S(0)));
  for (std::size_t k = 0; k < params.size(); ++k) vars[m.param_var(k)][0] = params[k];
  for (std::size_t i = 0; i < ns; ++i) vars[m.state_var(i)][0] = x0[i];
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::vector<S> next(ns);
    for (std::size_t i = 0; i < ns; ++i) {
      if (!m.rhs[i].is_polynomial()) throw std::runtime_error("series oracle needs polynomial dynamics");
      auto f = series_eval(m.rhs[i].num(), vars, k + 1);
      next[i] = f[k] / S(static_cast<long>(k + 1));
    }
    for (std::size_t i = 0; i < ns; ++i) vars[m.state_var(i)][k + 1] = next[i];
  }
  std::vector<std::vector<S>> out;
  for (std::size_t i = 0; i < ns; ++i) out.push_back(vars[m.state_var(i)]);
  return out;
}

template <class S>
std::vector<S> taylor_output(const paramcert::Model& m, const std::vector<S>& params,
                             const std::vector<std::vector<S>>& states, std::size_t j, std::size_t n) {
  std::vector<std::vector<S>> vars(m.registry->size(), std::vector<S>(n, S(0)));
  for (std::size_t k = 0; k < params.size(); ++k) vars[m.param_var(k)][0] = params[k];
  for (std::size_t i = 0; i < states.size(); ++i) vars[m.state_var(i)] = states[i];
  if (!m.outputs[j].is_polynomial()) throw std::runtime_error("series oracle needs polynomial outputs");
  return series_eval(m.outputs[j].num(), vars, n);
}

// High-precision synthetic data: Taylor steps between consecutive sample times.
inline paramcert::Dataset synthetic_data(const paramcert::Model& m, const std::vector<Rat>& params,
                                         const std::vector<Rat>& x0, const std::vector<Rat>& times,
                                         int digits = 25, std::size_t terms = 40) {
  const mp_bitcnt_t prec = 256;
  mpf_set_default_prec(prec);
  auto F = [&](const Rat& r) { return mpf_class(r, prec); };
  std::vector<mpf_class> p, x;
  for (const auto& v : params) p.push_back(F(v));
  for (const auto& v : x0) x.push_back(F(v));
  paramcert::Dataset d;
  d.times = times;
  d.output_names = m.output_names;
  d.observations.assign(m.outputs.size(), {});
  mpf_class t(F(times.front()));
  auto to_rat = [&](const mpf_class& v) {
    mp_exp_t e;
    std::string s = v.get_str(e, 10, static_cast<std::size_t>(digits));
    bool neg = !s.empty() && s[0] == '-';
    if (neg) s.erase(0, 1);
    if (s.empty()) return Rat(0);
    Rat r(Int(s), 1);
    long shift = static_cast<long>(e) - static_cast<long>(s.size());
    Int ten = 1;
    for (long k = 0; k < std::labs(shift); ++k) ten *= 10;
    r = shift >= 0 ? Rat(r * ten) : Rat(r / ten);
    r.canonicalize();
    return neg ? Rat(-r) : r;
  };
  for (std::size_t s = 0; s < times.size(); ++s) {
    mpf_class target = F(times[s]);
    // Sub-steps of at most 1/20.
    while (t < target) {
      mpf_class h = target - t;
      if (h > mpf_class(0.05, prec)) h = mpf_class(0.05, prec);
      auto series = taylor_states<mpf_class>(m, p, x, terms);
      for (std::size_t i = 0; i < x.size(); ++i) {
        mpf_class acc(0, prec);
        for (std::size_t k = terms; k-- > 0;) acc = acc * h + series[i][k];
        x[i] = acc;
      }
      t += h;
    }
    auto series = taylor_states<mpf_class>(m, p, x, 1);
    for (std::size_t j = 0; j < m.outputs.size(); ++j) {
      auto y = taylor_output<mpf_class>(m, p, series, j, 1);
      d.observations[j].push_back(to_rat(y[0]));
    }
  }
  return d;
}

}  // namespace oracle

namespace oracle {

// Exact output derivatives at the expansion point and the matching values of every unknown of `sys`
// (state derivatives j! c_j, parameters as given), from rational Taylor coefficients.
struct ExactPoint {
  std::vector<std::vector<Rat>> output_derivatives;  // [output][k]
  std::vector<Rat> unknowns;
};

inline ExactPoint exact_point(const paramcert::Model& m, const std::vector<Rat>& params, const std::vector<Rat>& x0,
                              int max_order) {
  auto n = static_cast<std::size_t>(max_order) + 2;
  auto states = taylor_states<Rat>(m, params, x0, n);
  ExactPoint e;
  for (std::size_t j = 0; j < m.outputs.size(); ++j) {
    auto y = taylor_output<Rat>(m, params, states, j, n);
    Rat fact = 1;
    e.output_derivatives.emplace_back();
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (k > 0) fact *= static_cast<unsigned long>(k);
      e.output_derivatives.back().push_back(y[k] * fact);
    }
  }
  return e;
}

inline std::vector<Rat> unknown_values(const paramcert::PolySystem& sys, const paramcert::Model& m,
                                       const std::vector<Rat>& params, const std::vector<Rat>& x0) {
  int K = 0;
  for (const auto& r : sys.roles) K = std::max(K, r.order);
  auto states = taylor_states<Rat>(m, params, x0, static_cast<std::size_t>(K) + 1);
  std::vector<Rat> out;
  for (const auto& r : sys.roles) {
    if (r.kind == paramcert::UnknownRole::Kind::param) {
      out.push_back(params[r.index]);
      continue;
    }
    Rat fact = 1;
    for (int k = 2; k <= r.order; ++k) fact *= k;
    out.push_back(states[r.index][static_cast<std::size_t>(r.order)] * fact);
  }
  return out;
}

}  // namespace oracle

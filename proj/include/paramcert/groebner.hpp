#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <set>
#include <unordered_map>
#include <variant>
#include <vector>

#include "paramcert/polynomial.hpp"

namespace paramcert {

/// Reduced Groebner basis: monic generators sorted by ascending leading monomial.
struct GroebnerBasis {
  RegistryPtr registry;
  TermOrder order;
  std::vector<Poly> generators;
  std::vector<Monomial> leading;                 // leading monomial of each generator under `order`
  std::vector<std::vector<Term>> ordered_terms;  // generator terms sorted descending under `order`

  bool is_unit() const { return generators.size() == 1 && generators[0].is_constant(); }
};

struct QuotientBasis {
  std::vector<Monomial> monomials;  // ascending in the basis order
  std::unordered_map<Monomial, std::size_t, MonomialHash> index;

  std::size_t size() const { return monomials.size(); }
};

/// The ideal is not zero-dimensional; listed variables have no pure power among leading terms.
struct NotZeroDimensional {
  std::vector<std::size_t> free_indices;
  std::vector<std::string> free_variables;
};

struct BuchbergerOptions {
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

namespace detail {

inline std::vector<Term> sorted_terms(const Poly& p, const TermOrder& order) {
  std::vector<Term> t = p.terms();
  std::sort(t.begin(), t.end(), [&](const Term& a, const Term& b) { return order.compare(a.mono, b.mono) > 0; });
  return t;
}

inline const Monomial& leading_monomial(const std::vector<Term>& sorted) { return sorted.front().mono; }

// Integer-coefficient polynomial sorted descending in the working order.
struct IPoly {
  std::vector<Monomial> mons;
  std::vector<Int> cfs;
  unsigned sugar = 0;

  bool empty() const { return mons.empty(); }
  std::size_t size() const { return mons.size(); }
};

inline void make_primitive(IPoly& p) {
  if (p.empty()) return;
  Int g = 0;
  for (const auto& c : p.cfs) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 1) break;
  }
  if (p.cfs.front() < 0) g = -g;
  if (g != 1)
    for (auto& c : p.cfs) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
}

inline IPoly to_ipoly(const Poly& p, const TermOrder& order) {
  IPoly out;
  auto terms = sorted_terms(p.primitive(), order);
  for (auto& t : terms) {
    out.mons.push_back(t.mono);
    out.cfs.push_back(t.coef.get_num());
  }
  out.sugar = p.is_zero() ? 0 : static_cast<unsigned>(p.total_degree());
  make_primitive(out);
  return out;
}

inline Poly to_poly(const IPoly& p, const RegistryPtr& reg) {
  std::vector<Term> terms;
  terms.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) terms.push_back({p.mons[i], Rat(p.cfs[i])});
  return Poly::from_terms(reg, std::move(terms));
}

// ma * p[from..] - mb * shift * g[1..]; the leading terms are assumed to cancel.
inline IPoly combine(const IPoly& p, std::size_t from, const Int& ma, const Int& mb, const Monomial& shift,
                     const IPoly& g, const TermOrder& order) {
  IPoly r;
  r.sugar = p.sugar;
  r.mons.reserve(p.size() - from + g.size());
  r.cfs.reserve(p.size() - from + g.size());
  std::size_t i = from, j = 1;
  while (i < p.size() || j < g.size()) {
    int c;
    Monomial gm;
    if (j < g.size()) gm = g.mons[j] * shift;
    if (i == p.size())
      c = -1;
    else if (j == g.size())
      c = 1;
    else
      c = order.compare(p.mons[i], gm);
    if (c > 0) {
      r.mons.push_back(p.mons[i]);
      r.cfs.push_back(ma * p.cfs[i]);
      ++i;
    } else if (c < 0) {
      r.mons.push_back(std::move(gm));
      r.cfs.push_back(-mb * g.cfs[j]);
      ++j;
    } else {
      Int v = ma * p.cfs[i] - mb * g.cfs[j];
      if (v != 0) {
        r.mons.push_back(p.mons[i]);
        r.cfs.push_back(std::move(v));
      }
      ++i;
      ++j;
    }
  }
  return r;
}

/// Full fraction-free reduction of p by `basis`; result is primitive.
inline IPoly reduce(IPoly p, const std::vector<const IPoly*>& basis, const TermOrder& order) {
  IPoly done;
  done.sugar = p.sugar;
  unsigned steps = 0;
  std::size_t head = 0;  // p.mons[0..head) are already irreducible and moved out
  while (head < p.size()) {
    const IPoly* div = nullptr;
    for (const auto* g : basis) {
      if (g->mons.front().divides(p.mons[head])) {
        div = g;
        break;
      }
    }
    if (!div) {
      done.mons.push_back(std::move(p.mons[head]));
      done.cfs.push_back(std::move(p.cfs[head]));
      ++head;
      continue;
    }
    const Int& lg = div->cfs.front();
    const Int& lp = p.cfs[head];
    Int g;
    mpz_gcd(g.get_mpz_t(), lg.get_mpz_t(), lp.get_mpz_t());
    Int ma = lg / g;
    Int mb = lp / g;
    if (ma < 0) {
      ma = -ma;
      mb = -mb;
    }
    Monomial shift = p.mons[head] / div->mons.front();
    p.sugar = std::max(p.sugar, div->sugar + shift.degree());
    p = combine(p, head + 1, ma, mb, shift, *div, order);
    head = 0;
    if (ma != 1)
      for (auto& c : done.cfs) c *= ma;
    if (++steps % 16 == 0) {
      // Common content of the remainder and the pending part.
      Int cont = 0;
      for (const auto& c : done.cfs) mpz_gcd(cont.get_mpz_t(), cont.get_mpz_t(), c.get_mpz_t());
      for (const auto& c : p.cfs) mpz_gcd(cont.get_mpz_t(), cont.get_mpz_t(), c.get_mpz_t());
      if (cont > 1) {
        for (auto& c : done.cfs) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), cont.get_mpz_t());
        for (auto& c : p.cfs) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), cont.get_mpz_t());
      }
    }
    done.sugar = std::max(done.sugar, p.sugar);
  }
  make_primitive(done);
  return done;
}

inline IPoly s_polynomial(const IPoly& f, const IPoly& g, const TermOrder& order) {
  Monomial l = lcm(f.mons.front(), g.mons.front());
  Monomial mf = l / f.mons.front();
  Monomial mg = l / g.mons.front();
  Int d;
  mpz_gcd(d.get_mpz_t(), f.cfs.front().get_mpz_t(), g.cfs.front().get_mpz_t());
  Int a = g.cfs.front() / d;  // multiplies f
  Int b = f.cfs.front() / d;  // multiplies g
  // a*mf*f - b*mg*g: shift f first, then combine with g.
  IPoly fs;
  fs.sugar = std::max(f.sugar + mf.degree(), g.sugar + mg.degree());
  for (std::size_t i = 0; i < f.size(); ++i) {
    fs.mons.push_back(f.mons[i] * mf);
    fs.cfs.push_back(f.cfs[i]);
  }
  IPoly r = combine(fs, 1, a, b, mg, g, order);
  r.sugar = fs.sugar;
  make_primitive(r);
  return r;
}

struct CriticalPair {
  std::size_t i;
  std::size_t j;
  Monomial lcm;
  unsigned sugar;
};

}  // namespace detail

/// Reduced Groebner basis by Buchberger's algorithm with sugar selection and
/// Gebauer-Moeller pair elimination. An inconsistent system yields {1}.
inline GroebnerBasis buchberger(const std::vector<Poly>& input, const TermOrder& order,
                                const BuchbergerOptions& options = {}) {
  if (input.empty()) throw StructuralError("buchberger needs at least one polynomial");
  const RegistryPtr reg = input.front().registry();
  for (const auto& p : input)
    if (!same_registry(reg, p.registry())) throw StructuralError("polynomials belong to different registries");

  GroebnerBasis out;
  out.registry = reg;
  out.order = order;
  auto check_deadline = [&]() {
    if (options.deadline && std::chrono::steady_clock::now() > *options.deadline)
      throw Timeout("Groebner basis computation exceeded its time budget");
  };
  check_deadline();
  auto finish_unit = [&]() {
    out.generators = {Poly::constant(reg, 1)};
    out.leading = {Monomial(reg->size())};
    out.ordered_terms = {out.generators[0].terms()};
    return out;
  };

  std::vector<detail::IPoly> polys;
  std::vector<std::size_t> active;
  std::vector<detail::CriticalPair> pairs;

  auto lt = [&](std::size_t k) -> const Monomial& { return polys[k].mons.front(); };

  auto update = [&](std::size_t h) {
    const Monomial& lh = lt(h);
    std::vector<detail::CriticalPair> cand;
    for (auto g : active) {
      Monomial l = lcm(lt(g), lh);
      unsigned sugar = std::max(polys[g].sugar + (l.degree() - lt(g).degree()), polys[h].sugar + (l.degree() - lh.degree()));
      cand.push_back({g, h, std::move(l), sugar});
    }
    std::vector<detail::CriticalPair> kept;
    for (std::size_t a = 0; a < cand.size(); ++a) {
      const auto& p = cand[a];
      bool keep = coprime(lh, lt(p.i));
      if (!keep) {
        bool dominated = false;
        for (std::size_t b = a + 1; b < cand.size() && !dominated; ++b) dominated = cand[b].lcm.divides(p.lcm);
        for (std::size_t b = 0; b < kept.size() && !dominated; ++b) dominated = kept[b].lcm.divides(p.lcm);
        keep = !dominated;
      }
      if (keep) kept.push_back(p);
    }
    std::vector<detail::CriticalPair> next;
    for (auto& p : pairs) {
      bool drop = lh.divides(p.lcm) && lcm(lt(p.i), lh) != p.lcm && lcm(lt(p.j), lh) != p.lcm;
      if (!drop) next.push_back(std::move(p));
    }
    for (auto& p : kept)
      if (!coprime(lh, lt(p.i))) next.push_back(std::move(p));
    pairs = std::move(next);
    std::vector<std::size_t> act;
    for (auto g : active)
      if (!lh.divides(lt(g))) act.push_back(g);
    act.push_back(h);
    active = std::move(act);
  };

  auto basis_view = [&]() {
    std::vector<const detail::IPoly*> v;
    v.reserve(active.size());
    for (auto g : active) v.push_back(&polys[g]);
    return v;
  };

  // Seed with the inputs, each reduced by what is already there.
  std::vector<detail::IPoly> seeds;
  for (const auto& p : input)
    if (!p.is_zero()) seeds.push_back(detail::to_ipoly(p, order));
  if (seeds.empty()) throw StructuralError("buchberger input is the zero ideal");
  std::sort(seeds.begin(), seeds.end(), [&](const auto& a, const auto& b) {
    return order.compare(a.mons.front(), b.mons.front()) < 0;
  });
  for (auto& s : seeds) {
    auto h = detail::reduce(std::move(s), basis_view(), order);
    if (h.empty()) continue;
    if (h.mons.front().is_one()) return finish_unit();
    polys.push_back(std::move(h));
    update(polys.size() - 1);
  }

  while (!pairs.empty()) {
    check_deadline();
    auto best = pairs.begin();
    for (auto it = pairs.begin() + 1; it != pairs.end(); ++it) {
      if (it->sugar != best->sugar) {
        if (it->sugar < best->sugar) best = it;
        continue;
      }
      int c = order.compare(it->lcm, best->lcm);
      if (c < 0 || (c == 0 && std::tie(it->j, it->i) < std::tie(best->j, best->i))) best = it;
    }
    detail::CriticalPair pair = *best;
    pairs.erase(best);
    auto s = detail::s_polynomial(polys[pair.i], polys[pair.j], order);
    s.sugar = pair.sugar;
    auto h = detail::reduce(std::move(s), basis_view(), order);
    if (h.empty()) continue;
    if (h.mons.front().is_one()) return finish_unit();
    polys.push_back(std::move(h));
    update(polys.size() - 1);
  }

  // Interreduce the minimal basis and normalize to monic form over Q.
  std::vector<std::pair<Monomial, Poly>> reduced;
  for (auto g : active) {
    std::vector<const detail::IPoly*> others;
    for (auto k : active)
      if (k != g) others.push_back(&polys[k]);
    auto r = detail::reduce(polys[g], others, order);
    Poly p = make_rat(1, r.cfs.front()) * detail::to_poly(r, reg);
    reduced.emplace_back(r.mons.front(), std::move(p));
  }
  std::sort(reduced.begin(), reduced.end(),
            [&](const auto& a, const auto& b) { return order.compare(a.first, b.first) < 0; });
  for (auto& [m, p] : reduced) {
    out.leading.push_back(m);
    out.ordered_terms.push_back(detail::sorted_terms(p, order));
    out.generators.push_back(std::move(p));
  }
  return out;
}

/// Remainder of p modulo the basis; no remaining term is divisible by a leading monomial.
inline Poly normal_form(const Poly& p, const GroebnerBasis& gb) {
  if (!same_registry(p.registry(), gb.registry) && !p.is_zero())
    throw StructuralError("normal_form: registry mismatch");
  const auto& order = gb.order;
  std::vector<Term> cur = detail::sorted_terms(p, order);
  std::vector<Term> rem;
  while (!cur.empty()) {
    std::size_t k = 0;
    for (; k < gb.leading.size(); ++k)
      if (gb.leading[k].divides(cur.front().mono)) break;
    if (k == gb.leading.size()) {
      rem.push_back(std::move(cur.front()));
      cur.erase(cur.begin());
      continue;
    }
    const auto& g = gb.ordered_terms[k];
    Rat c = cur.front().coef;  // generators are monic
    Monomial shift = cur.front().mono / g.front().mono;
    std::vector<Term> next;
    next.reserve(cur.size() + g.size());
    std::size_t i = 1, j = 1;
    while (i < cur.size() || j < g.size()) {
      int cmp;
      Monomial gm;
      if (j < g.size()) gm = g[j].mono * shift;
      if (i == cur.size())
        cmp = -1;
      else if (j == g.size())
        cmp = 1;
      else
        cmp = order.compare(cur[i].mono, gm);
      if (cmp > 0) {
        next.push_back(std::move(cur[i++]));
      } else if (cmp < 0) {
        next.push_back({std::move(gm), Rat(-c * g[j].coef)});
        ++j;
      } else {
        Rat v = cur[i].coef - c * g[j].coef;
        if (v != 0) next.push_back({cur[i].mono, std::move(v)});
        ++i;
        ++j;
      }
    }
    cur = std::move(next);
  }
  return Poly::from_terms(gb.registry ? gb.registry : p.registry(), std::move(rem));
}

inline GroebnerBasis buchberger(const std::vector<Poly>& input) {
  if (input.empty()) throw StructuralError("buchberger needs at least one polynomial");
  return buchberger(input, TermOrder::grevlex(input.front().nvars()));
}

/// S-polynomial over Q under `order` (monic normalization of leading terms).
inline Poly s_polynomial(const Poly& f, const Poly& g, const TermOrder& order) {
  auto tf = detail::sorted_terms(f, order);
  auto tg = detail::sorted_terms(g, order);
  Monomial l = lcm(tf.front().mono, tg.front().mono);
  const auto& reg = f.registry();
  std::vector<Term> a{{l / tf.front().mono, Rat(1 / tf.front().coef)}};
  std::vector<Term> b{{l / tg.front().mono, Rat(1 / tg.front().coef)}};
  return Poly::from_terms(reg, a) * f - Poly::from_terms(reg, b) * g;
}

/// Staircase of the leading-term ideal, or the variables that make it infinite.
inline std::variant<QuotientBasis, NotZeroDimensional> quotient_basis(const GroebnerBasis& gb) {
  auto n = gb.registry->size();
  QuotientBasis qb;
  if (gb.is_unit()) return qb;
  std::vector<bool> bounded(n, false);
  for (const auto& m : gb.leading)
    if (auto v = m.pure_power_variable()) bounded[*v] = true;
  NotZeroDimensional nz;
  for (std::size_t v = 0; v < n; ++v)
    if (!bounded[v]) {
      nz.free_indices.push_back(v);
      nz.free_variables.push_back(gb.registry->name(v));
    }
  if (!nz.free_indices.empty()) return nz;

  auto in_staircase = [&](const Monomial& m) {
    for (const auto& l : gb.leading)
      if (l.divides(m)) return false;
    return true;
  };
  std::vector<Monomial> stack{Monomial(n)};
  std::unordered_map<Monomial, bool, MonomialHash> seen;
  seen[stack.front()] = true;
  while (!stack.empty()) {
    Monomial m = std::move(stack.back());
    stack.pop_back();
    if (!in_staircase(m)) continue;
    qb.monomials.push_back(m);
    for (std::size_t v = 0; v < n; ++v) {
      Monomial next = m * Monomial::variable(n, v);
      if (seen.emplace(next, true).second) stack.push_back(std::move(next));
    }
  }
  std::sort(qb.monomials.begin(), qb.monomials.end(),
            [&](const Monomial& a, const Monomial& b) { return gb.order.compare(a, b) < 0; });
  for (std::size_t k = 0; k < qb.monomials.size(); ++k) qb.index.emplace(qb.monomials[k], k);
  return qb;
}

}  // namespace paramcert

#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "paramcert/expr_parser.hpp"
#include "paramcert/groebner.hpp"
#include "paramcert/isolate.hpp"
#include "paramcert/linalg.hpp"
#include "paramcert/prolongation.hpp"

namespace paramcert {

/// Matrix of p -> NF(v p) in the quotient basis: column j holds the coordinates of NF(v * b_j).
inline Matrix multiplication_matrix(const Poly& v, const QuotientBasis& qb, const GroebnerBasis& gb) {
  auto d = qb.size();
  Matrix m(d, d);
  if (v.is_zero()) return m;
  for (std::size_t j = 0; j < d; ++j) {
    Poly bj = Poly::from_terms(gb.registry, {{qb.monomials[j], Rat(1)}});
    Poly r = normal_form(v * bj, gb);
    for (const auto& t : r.terms()) m(qb.index.at(t.mono), j) = t.coef;
  }
  return m;
}

/// Zero-dimensional quotient ring with the multiplication matrices of every variable.
class QuotientRing {
 public:
  QuotientRing(GroebnerBasis gb, QuotientBasis qb) : gb_(std::move(gb)), qb_(std::move(qb)) {
    for (std::size_t v = 0; v < gb_.registry->size(); ++v)
      mult_.push_back(multiplication_matrix(Poly::variable(gb_.registry, v), qb_, gb_));
  }

  const GroebnerBasis& groebner() const { return gb_; }
  const QuotientBasis& basis() const { return qb_; }
  std::size_t dimension() const { return qb_.size(); }
  std::size_t nvars() const { return mult_.size(); }
  const Matrix& mult(std::size_t var) const { return mult_.at(var); }

  Matrix mult(const std::vector<Int>& lambda) const {
    Matrix m(dimension(), dimension());
    for (std::size_t v = 0; v < lambda.size(); ++v)
      if (lambda[v] != 0) m = m + Rat(lambda[v]) * mult_[v];
    return m;
  }

  /// Number of distinct complex solutions: rank of the trace form Tr(b_i b_j).
  std::size_t distinct_solutions() const {
    if (distinct_) return *distinct_;
    auto d = dimension();
    std::vector<Matrix> mb(d);
    for (std::size_t i = 0; i < d; ++i) {
      const auto& m = qb_.monomials[i];
      if (m.is_one()) {
        mb[i] = Matrix::identity(d);
        continue;
      }
      std::size_t v = 0;
      while (m[v] == 0) ++v;
      mb[i] = mult_[v] * mb[qb_.index.at(m / Monomial::variable(m.size(), v))];
    }
    Matrix h(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) h(i, j) = h(j, i) = trace_of_product(mb[i], mb[j]);
    distinct_ = rank(h);
    return *distinct_;
  }

 private:
  GroebnerBasis gb_;
  QuotientBasis qb_;
  std::vector<Matrix> mult_;
  mutable std::optional<std::size_t> distinct_;
};

inline std::size_t count_distinct_solutions(const GroebnerBasis& gb, const QuotientBasis& qb) {
  return QuotientRing(gb, qb).distinct_solutions();
}

/// t = sum lambda_i x_i
struct SeparatingForm {
  std::vector<Int> lambda;

  Poly as_poly(const RegistryPtr& reg) const {
    Poly p(reg);
    for (std::size_t i = 0; i < lambda.size(); ++i)
      if (lambda[i] != 0) p += Rat(lambda[i]) * Poly::variable(reg, i);
    return p;
  }
  std::string to_string(const Registry& reg) const {
    return as_poly(std::make_shared<const Registry>(reg)).to_string();
  }
  friend bool operator==(const SeparatingForm&, const SeparatingForm&) = default;
};

/// {fbar(T) = 0, x_i = coords[i](T) / fprime(T)}
struct RUR {
  std::vector<std::string> variables;
  SeparatingForm form;
  UPoly f;       // characteristic polynomial of the form on the quotient
  UPoly fbar;    // monic squarefree part
  UPoly fprime;  // fbar'
  std::vector<UPoly> coords;
  std::size_t distinct = 0;
};

inline UPoly monic_squarefree(const UPoly& f) {
  if (f.degree() <= 0) return UPoly::constant(1);
  return (f / gcd(f, f.derivative())).monic();
}

/// Squarefree part of the characteristic polynomial of the form.
inline UPoly form_polynomial(const QuotientRing& ring, const SeparatingForm& form) {
  return monic_squarefree(characteristic_polynomial(ring.mult(form.lambda)));
}

inline bool is_separating(const QuotientRing& ring, const SeparatingForm& form) {
  return static_cast<std::size_t>(form_polynomial(ring, form).degree()) == ring.distinct_solutions();
}

/// Variables in order, then small integer combinations by increasing weight, then random
/// combinations over widening ranges from a fixed seed.
inline SeparatingForm find_separating_form(const QuotientRing& ring, std::size_t max_random = 10000) {
  auto n = ring.nvars();
  auto try_form = [&](std::vector<Int> l) -> std::optional<SeparatingForm> {
    SeparatingForm f{std::move(l)};
    if (is_separating(ring, f)) return f;
    return std::nullopt;
  };
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<Int> l(n, 0);
    l[v] = 1;
    if (auto f = try_form(l)) return *f;
  }
  // Pairs and triples with coefficients in {-2..2}, by increasing weight, first coefficient positive.
  for (int weight = 2; weight <= 4; ++weight) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (int a = 1; a <= 2; ++a)
          for (int b : {1, -1, 2, -2}) {
            if (a + std::abs(b) != weight) continue;
            std::vector<Int> l(n, 0);
            l[i] = a;
            l[j] = b;
            if (auto f = try_form(l)) return *f;
          }
    if (weight != 3) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
          for (int b : {1, -1})
            for (int c : {1, -1}) {
              std::vector<Int> l(n, 0);
              l[i] = 1;
              l[j] = b;
              l[k] = c;
              if (auto f = try_form(l)) return *f;
            }
  }
  std::mt19937_64 rng(20240607);
  long range = 3;
  for (std::size_t attempt = 0; attempt < max_random; ++attempt) {
    if (attempt % 20 == 19) range *= 2;
    std::uniform_int_distribution<long> dist(-range, range);
    std::vector<Int> l(n);
    for (auto& c : l) c = dist(rng);
    if (auto f = try_form(l)) return *f;
  }
  throw StructuralError("no separating linear form found");
}

/// Trace-formula RUR for a separating form.
inline RUR compute_rur(const QuotientRing& ring, const SeparatingForm& form) {
  RUR r;
  r.variables = ring.groebner().registry->names();
  r.form = form;
  r.distinct = ring.distinct_solutions();
  Matrix mt = ring.mult(form.lambda);
  r.f = characteristic_polynomial(mt);
  r.fbar = monic_squarefree(r.f);
  r.fprime = r.fbar.derivative();
  auto dbar = static_cast<std::size_t>(std::max(r.fbar.degree(), 0));
  if (dbar != r.distinct) throw StructuralError("linear form does not separate the solutions");
  if (dbar == 0) return r;

  auto d = ring.dimension();
  std::vector<Matrix> powers{Matrix::identity(d)};
  for (std::size_t k = 1; k < dbar; ++k) powers.push_back(powers.back() * mt);
  const auto& c = r.fbar.coeffs();

  // g_v(T) = sum_k T^k sum_{j>k} c_j Tr(M_v M_t^{j-k-1})
  auto trace_poly = [&](const Matrix* mv) {
    std::vector<Rat> tr(dbar);
    for (std::size_t m = 0; m < dbar; ++m) tr[m] = mv ? trace_of_product(*mv, powers[m]) : powers[m].trace();
    std::vector<Rat> g(dbar, Rat(0));
    for (std::size_t k = 0; k < dbar; ++k)
      for (std::size_t j = k + 1; j <= dbar; ++j) g[k] += c[j] * tr[j - k - 1];
    return UPoly(std::move(g));
  };
  UPoly g1 = trace_poly(nullptr);
  UPoly scale = (r.fprime * inverse_mod(g1, r.fbar)) % r.fbar;
  for (std::size_t v = 0; v < ring.nvars(); ++v) r.coords.push_back((trace_poly(&ring.mult(v)) * scale) % r.fbar);
  return r;
}

struct Certificate {
  bool certified = false;
  std::string reason;
  explicit operator bool() const { return certified; }
};

namespace detail {

inline UPoly mod_pow(const UPoly& base, unsigned e, const UPoly& m, std::vector<UPoly>& cache) {
  if (cache.empty()) cache.push_back(UPoly::constant(1) % m);
  while (cache.size() <= e) cache.push_back((cache.back() * base) % m);
  return cache[e];
}

}  // namespace detail

/// Exact check that every root of fbar maps to a solution of sys and the parametrization is consistent.
inline Certificate certify_rur(const RUR& r, const PolySystem& sys) {
  auto fail = [](std::string why) { return Certificate{false, std::move(why)}; };
  if (r.coords.size() != sys.unknown_count()) return fail("coordinate count differs from the number of unknowns");
  if (r.fbar.degree() < 0) return fail("zero univariate polynomial");
  if (static_cast<std::size_t>(r.fbar.degree()) != r.distinct)
    return fail("degree of the squarefree part differs from the number of distinct solutions");
  if (r.fbar.degree() == 0) {
    // Empty variety: nothing to parametrize.
    return {true, ""};
  }
  if (!(r.fprime == r.fbar.derivative())) return fail("fprime is not the derivative of fbar");
  if (gcd(r.fbar, r.fprime).degree() != 0) return fail("fbar is not squarefree");
  UPoly lin;
  for (std::size_t i = 0; i < r.coords.size(); ++i) {
    if (r.coords[i].degree() >= r.fbar.degree()) return fail("coordinate " + r.variables.at(i) + " has degree >= deg fbar");
    if (i < r.form.lambda.size() && r.form.lambda[i] != 0) lin = lin + Rat(r.form.lambda[i]) * r.coords[i];
  }
  UPoly t_fprime = (UPoly::monomial(1) * r.fprime) % r.fbar;
  if (!((lin % r.fbar) == t_fprime)) return fail("linear form is not reproduced by the parametrization");

  UPoly inv = inverse_mod(r.fprime, r.fbar);
  std::vector<UPoly> x;
  for (const auto& g : r.coords) x.push_back((g * inv) % r.fbar);
  std::vector<std::vector<UPoly>> cache(x.size());
  for (std::size_t k = 0; k < sys.equations.size(); ++k) {
    UPoly acc;
    for (const auto& t : sys.equations[k].terms()) {
      UPoly term = UPoly::constant(t.coef);
      for (std::size_t i = 0; i < x.size(); ++i)
        if (t.mono[i] > 0) term = (term * detail::mod_pow(x[i], t.mono[i], r.fbar, cache[i])) % r.fbar;
      acc = acc + term;
    }
    if (!(acc % r.fbar).is_zero()) return fail("equation " + std::to_string(k + 1) + " does not vanish on the parametrization");
  }
  return {true, ""};
}

/// Finds a separating form, builds the RUR and certifies it; throws if certification fails.
inline RUR solve_rur(const QuotientRing& ring, const PolySystem& sys) {
  SeparatingForm form = find_separating_form(ring);
  RUR r = compute_rur(ring, form);
  auto cert = certify_rur(r, sys);
  if (!cert) throw StructuralError("RUR certification failed: " + cert.reason);
  return r;
}

//-----------------------------------------------------------------------------
// Text format
//-----------------------------------------------------------------------------

inline std::string write_rur(const RUR& r) {
  std::ostringstream os;
  os << "# rur\n";
  os << "variables:";
  for (std::size_t i = 0; i < r.variables.size(); ++i) os << (i ? ", " : " ") << r.variables[i];
  os << "\nform:";
  for (const auto& l : r.form.lambda) os << " " << l.get_str();
  os << "\ndistinct: " << r.distinct << "\n";
  os << "f: " << r.f.to_string() << "\n";
  os << "fbar: " << r.fbar.to_string() << "\n";
  os << "fprime: " << r.fprime.to_string() << "\n";
  for (std::size_t i = 0; i < r.coords.size(); ++i) os << "g " << r.variables[i] << ": " << r.coords[i].to_string() << "\n";
  return os.str();
}

inline UPoly parse_upoly(std::string_view text, const std::string& var = "T") {
  auto reg = make_registry({var});
  Poly p = parse_poly(text, reg);
  std::vector<Rat> c(static_cast<std::size_t>(std::max(p.total_degree(), 0)) + 1, Rat(0));
  for (const auto& t : p.terms()) c[t.mono[0]] = t.coef;
  return UPoly(std::move(c));
}

inline RUR read_rur(std::string_view text) {
  RUR r;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  bool have_fbar = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected `key: value`", number, 1);
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    if (key == "variables") {
      std::string cur;
      for (char ch : value + ",") {
        if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
          if (!cur.empty()) r.variables.push_back(cur);
          cur.clear();
        } else {
          cur += ch;
        }
      }
    } else if (key == "form") {
      std::istringstream vs(value);
      std::string tok;
      while (vs >> tok) r.form.lambda.emplace_back(tok);
    } else if (key == "distinct") {
      r.distinct = std::stoul(value);
    } else if (key == "f") {
      r.f = parse_upoly(value);
    } else if (key == "fbar") {
      r.fbar = parse_upoly(value);
      have_fbar = true;
    } else if (key == "fprime") {
      r.fprime = parse_upoly(value);
    } else if (key.rfind("g ", 0) == 0) {
      r.coords.push_back(parse_upoly(value));
    } else {
      throw ParseError("unknown RUR field `" + key + "`", number, 1);
    }
  }
  if (!have_fbar) throw ParseError("RUR without fbar", number, 1);
  return r;
}

}  // namespace paramcert

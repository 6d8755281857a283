#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "paramcert/errors.hpp"
#include "paramcert/rational.hpp"

namespace paramcert {

//-----------------------------------------------------------------------------
// Variable registry
//-----------------------------------------------------------------------------

/// Ordered list of variable names shared by every polynomial of one ring.
class Registry {
 public:
  explicit Registry(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!index_.emplace(names_[i], i).second)
        throw StructuralError("duplicate variable name '" + names_[i] + "'");
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index(std::string_view name) const {
    auto i = find(name);
    if (!i) throw StructuralError("unknown variable '" + std::string(name) + "'");
    return *i;
  }

  friend bool operator==(const Registry& a, const Registry& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

using RegistryPtr = std::shared_ptr<const Registry>;

inline RegistryPtr make_registry(std::vector<std::string> names) {
  return std::make_shared<const Registry>(std::move(names));
}

inline bool same_registry(const RegistryPtr& a, const RegistryPtr& b) {
  return a == b || (a && b && *a == *b);
}

//-----------------------------------------------------------------------------
// Monomial
//-----------------------------------------------------------------------------

class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exps_(nvars, 0) {}
  explicit Monomial(std::vector<std::uint32_t> exps) : exps_(std::move(exps)) {
    degree_ = std::accumulate(exps_.begin(), exps_.end(), std::uint32_t{0});
  }

  static Monomial variable(std::size_t nvars, std::size_t var, std::uint32_t power = 1) {
    Monomial m(nvars);
    m.exps_.at(var) = power;
    m.degree_ = power;
    return m;
  }

  std::size_t size() const { return exps_.size(); }
  std::uint32_t operator[](std::size_t i) const { return exps_[i]; }
  std::uint32_t degree() const { return degree_; }
  const std::vector<std::uint32_t>& exponents() const { return exps_; }
  bool is_one() const { return degree_ == 0; }

  Monomial operator*(const Monomial& o) const {
    Monomial r(*this);
    for (std::size_t i = 0; i < exps_.size(); ++i) r.exps_[i] += o.exps_[i];
    r.degree_ += o.degree_;
    return r;
  }

  bool divides(const Monomial& o) const {
    if (degree_ > o.degree_) return false;
    for (std::size_t i = 0; i < exps_.size(); ++i)
      if (exps_[i] > o.exps_[i]) return false;
    return true;
  }

  // Exact quotient; caller guarantees o.divides(*this).
  Monomial operator/(const Monomial& o) const {
    Monomial r(*this);
    for (std::size_t i = 0; i < exps_.size(); ++i) r.exps_[i] -= o.exps_[i];
    r.degree_ -= o.degree_;
    return r;
  }

  /// Index of the variable if this is a pure power x_i^k with k >= 1.
  std::optional<std::size_t> pure_power_variable() const {
    std::optional<std::size_t> var;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      if (exps_[i] == 0) continue;
      if (var) return std::nullopt;
      var = i;
    }
    return var;
  }

  friend Monomial lcm(const Monomial& a, const Monomial& b) {
    std::vector<std::uint32_t> e(a.exps_.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::max(a.exps_[i], b.exps_[i]);
    return Monomial(std::move(e));
  }

  friend bool coprime(const Monomial& a, const Monomial& b) {
    for (std::size_t i = 0; i < a.exps_.size(); ++i)
      if (a.exps_[i] != 0 && b.exps_[i] != 0) return false;
    return true;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

 private:
  std::vector<std::uint32_t> exps_;
  std::uint32_t degree_ = 0;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const {
    std::size_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < m.size(); ++i) h = (h ^ m[i]) * 1099511628211ull;
    return h;
  }
};

//-----------------------------------------------------------------------------
// Term orders
//-----------------------------------------------------------------------------

enum class OrderKind { grevlex, lex };

/// Monomial order over a variable permutation; position 0 is the most significant variable.
class TermOrder {
 public:
  TermOrder() = default;
  TermOrder(OrderKind kind, std::vector<std::size_t> perm) : kind_(kind), perm_(std::move(perm)) {}

  static TermOrder grevlex(std::size_t nvars) { return {OrderKind::grevlex, identity(nvars)}; }
  static TermOrder lex(std::size_t nvars) { return {OrderKind::lex, identity(nvars)}; }

  OrderKind kind() const { return kind_; }
  const std::vector<std::size_t>& permutation() const { return perm_; }

  /// Negative when a < b, positive when a > b.
  int compare(const Monomial& a, const Monomial& b) const {
    if (kind_ == OrderKind::grevlex) {
      if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
      for (std::size_t k = perm_.size(); k-- > 0;) {
        auto v = perm_[k];
        if (a[v] != b[v]) return a[v] > b[v] ? -1 : 1;
      }
      return 0;
    }
    for (auto v : perm_) {
      if (a[v] != b[v]) return a[v] < b[v] ? -1 : 1;
    }
    return 0;
  }

  bool less(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }

  friend bool operator==(const TermOrder& a, const TermOrder& b) {
    return a.kind_ == b.kind_ && a.perm_ == b.perm_;
  }

 private:
  static std::vector<std::size_t> identity(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return p;
  }

  OrderKind kind_ = OrderKind::grevlex;
  std::vector<std::size_t> perm_;
};

// Canonical storage order for Poly: grevlex over registry order, descending.
inline int canonical_compare(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
  for (std::size_t k = a.size(); k-- > 0;) {
    if (a[k] != b[k]) return a[k] > b[k] ? -1 : 1;
  }
  return 0;
}

struct CanonicalGreater {
  bool operator()(const Monomial& a, const Monomial& b) const { return canonical_compare(a, b) > 0; }
};

//-----------------------------------------------------------------------------
// Sparse multivariate polynomial over Q
//-----------------------------------------------------------------------------

struct Term {
  Monomial mono;
  Rat coef;

  friend bool operator==(const Term& a, const Term& b) { return a.mono == b.mono && a.coef == b.coef; }
};

class Poly {
 public:
  Poly() = default;
  explicit Poly(RegistryPtr reg) : reg_(std::move(reg)) {}

  static Poly constant(RegistryPtr reg, const Rat& c) {
    Poly p(std::move(reg));
    if (c != 0) p.terms_.push_back({Monomial(p.nvars()), c});
    return p;
  }

  static Poly variable(RegistryPtr reg, std::size_t var, std::uint32_t power = 1) {
    Poly p(std::move(reg));
    p.terms_.push_back({Monomial::variable(p.nvars(), var, power), Rat(1)});
    return p;
  }

  static Poly variable(RegistryPtr reg, std::string_view name) {
    auto i = reg->index(name);
    return variable(std::move(reg), i);
  }

  /// Combines duplicate monomials and drops zero coefficients.
  static Poly from_terms(RegistryPtr reg, std::vector<Term> terms) {
    Poly p(std::move(reg));
    std::map<Monomial, Rat, CanonicalGreater> acc;
    for (auto& t : terms) {
      if (t.mono.size() != p.nvars()) throw StructuralError("monomial length does not match registry");
      acc[t.mono] += t.coef;
    }
    for (auto& [m, c] : acc)
      if (c != 0) p.terms_.push_back({m, c});
    return p;
  }

  const RegistryPtr& registry() const { return reg_; }
  std::size_t nvars() const { return reg_ ? reg_->size() : 0; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }

  Rat constant_value() const {
    if (terms_.empty()) return 0;
    if (!is_constant()) throw StructuralError("polynomial is not constant");
    return terms_[0].coef;
  }

  /// Total degree; -1 for the zero polynomial.
  int total_degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.front().mono.degree()); }

  int degree_in(std::size_t var) const {
    int d = terms_.empty() ? -1 : 0;
    for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.mono[var]));
    return d;
  }

  /// Leading term in the canonical (graded reverse lexicographic) order.
  const Term& leading_term() const { return terms_.front(); }

  std::vector<std::size_t> variables() const {
    std::vector<bool> used(nvars(), false);
    for (const auto& t : terms_)
      for (std::size_t i = 0; i < nvars(); ++i)
        if (t.mono[i] != 0) used[i] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < used.size(); ++i)
      if (used[i]) out.push_back(i);
    return out;
  }

  Poly operator-() const {
    Poly r(*this);
    for (auto& t : r.terms_) t.coef = -t.coef;
    return r;
  }

  friend Poly operator+(const Poly& a, const Poly& b) { return merge(a, b, false); }
  friend Poly operator-(const Poly& a, const Poly& b) { return merge(a, b, true); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    check_registry(a, b);
    if (a.is_zero() || b.is_zero()) return Poly(a.reg_);
    std::map<Monomial, Rat, CanonicalGreater> acc;
    for (const auto& s : a.terms_)
      for (const auto& t : b.terms_) acc[s.mono * t.mono] += s.coef * t.coef;
    Poly r(a.reg_);
    r.terms_.reserve(acc.size());
    for (auto& [m, c] : acc)
      if (c != 0) r.terms_.push_back({m, c});
    return r;
  }

  friend Poly operator*(const Rat& c, const Poly& p) {
    if (c == 0) return Poly(p.reg_);
    Poly r(p);
    for (auto& t : r.terms_) t.coef *= c;
    return r;
  }

  friend Poly operator*(const Poly& p, const Rat& c) { return c * p; }

  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  Poly pow(unsigned e) const {
    Poly result = constant(reg_, 1);
    Poly base = *this;
    while (e) {
      if (e & 1u) result *= base;
      e >>= 1u;
      if (e) base *= base;
    }
    return result;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.terms_ == b.terms_ && (a.terms_.empty() || same_registry(a.reg_, b.reg_));
  }

  Rat eval(std::span<const Rat> point) const {
    if (point.size() != nvars()) throw StructuralError("evaluation point has wrong length");
    std::vector<std::vector<Rat>> powers(nvars());
    Rat sum = 0;
    for (const auto& t : terms_) {
      Rat v = t.coef;
      for (std::size_t i = 0; i < nvars(); ++i) {
        auto e = t.mono[i];
        if (e == 0) continue;
        auto& pw = powers[i];
        if (pw.empty()) pw.push_back(1);
        while (pw.size() <= e) pw.push_back(pw.back() * point[i]);
        v *= pw[e];
      }
      sum += v;
    }
    return sum;
  }

  template <class Scalar>
  Scalar eval_as(std::span<const Scalar> point) const {
    Scalar sum = Scalar(0);
    for (const auto& t : terms_) {
      Scalar v = static_cast<Scalar>(to_double(t.coef));
      for (std::size_t i = 0; i < nvars(); ++i)
        for (std::uint32_t k = 0; k < t.mono[i]; ++k) v *= point[i];
      sum += v;
    }
    return sum;
  }

  Poly diff(std::size_t var) const {
    std::vector<Term> out;
    for (const auto& t : terms_) {
      auto e = t.mono[var];
      if (e == 0) continue;
      auto exps = t.mono.exponents();
      exps[var] -= 1;
      out.push_back({Monomial(std::move(exps)), t.coef * e});
    }
    return from_terms(reg_, std::move(out));
  }

  /// Replaces variable `var` by the constant `value`.
  Poly substitute(std::size_t var, const Rat& value) const {
    std::vector<Term> out;
    for (const auto& t : terms_) {
      auto exps = t.mono.exponents();
      auto e = exps[var];
      exps[var] = 0;
      out.push_back({Monomial(std::move(exps)), t.coef * rat_pow(value, e)});
    }
    return from_terms(reg_, std::move(out));
  }

  /// Replaces variable `var` by the polynomial `value` (same registry).
  Poly substitute(std::size_t var, const Poly& value) const {
    check_registry(*this, value);
    Poly out(reg_);
    std::vector<Poly> powers{constant(reg_, 1)};
    for (const auto& t : terms_) {
      auto exps = t.mono.exponents();
      auto e = exps[var];
      exps[var] = 0;
      while (powers.size() <= e) powers.push_back(powers.back() * value);
      Poly rest(reg_);
      rest.terms_.push_back({Monomial(std::move(exps)), t.coef});
      out += rest * powers[e];
    }
    return out;
  }

  /// Moves the polynomial into `target`; variable i becomes target variable index_map[i].
  Poly remap(RegistryPtr target, std::span<const std::size_t> index_map) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
      std::vector<std::uint32_t> e(target->size(), 0);
      for (std::size_t i = 0; i < nvars(); ++i) {
        if (t.mono[i] == 0) continue;
        if (index_map[i] >= e.size())
          throw StructuralError("variable '" + reg_->name(i) + "' has no image in target registry");
        e[index_map[i]] += t.mono[i];
      }
      out.push_back({Monomial(std::move(e)), t.coef});
    }
    return from_terms(std::move(target), std::move(out));
  }

  /// Moves the polynomial into `target`, matching variables by name.
  Poly rename_into(const RegistryPtr& target) const {
    std::vector<std::size_t> map(nvars(), static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < nvars(); ++i)
      if (auto j = target->find(reg_->name(i))) map[i] = *j;
    return remap(target, map);
  }

  /// Least common multiple of coefficient denominators.
  Int denominator_lcm() const {
    Int l = 1;
    for (const auto& t : terms_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coef.get_den_mpz_t());
    return l;
  }

  /// Scales to integer coefficients with gcd 1; the leading coefficient keeps its sign.
  Poly primitive() const {
    if (terms_.empty()) return *this;
    Int l = denominator_lcm();
    Int g = 0;
    for (const auto& t : terms_) {
      Int n = t.coef.get_num() * (l / t.coef.get_den());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    }
    return make_rat(l, g) * *this;
  }

  Poly monic() const {
    if (terms_.empty()) return *this;
    return Rat(1 / terms_.front().coef) * *this;
  }

  /// Exact quotient when `d` divides this polynomial, otherwise nullopt.
  std::optional<Poly> divide_exact(const Poly& d) const {
    check_registry(*this, d);
    if (d.is_zero()) throw StructuralError("division by the zero polynomial");
    Poly rem = *this;
    Poly quo(reg_);
    const auto& lt = d.leading_term();
    while (!rem.is_zero()) {
      const auto& t = rem.leading_term();
      if (!lt.mono.divides(t.mono)) return std::nullopt;
      Poly q(reg_);
      q.terms_.push_back({t.mono / lt.mono, t.coef / lt.coef});
      quo += q;
      rem -= q * d;
    }
    return quo;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
      Rat c = t.coef;
      bool neg = c < 0;
      if (neg) c = -c;
      if (first)
        os << (neg ? "-" : "");
      else
        os << (neg ? " - " : " + ");
      first = false;
      bool unit = c == 1;
      if (!unit || t.mono.is_one()) {
        os << c.get_str();
        if (!t.mono.is_one()) os << "*";
      }
      bool first_var = true;
      for (std::size_t i = 0; i < nvars(); ++i) {
        if (t.mono[i] == 0) continue;
        if (!first_var) os << "*";
        first_var = false;
        os << reg_->name(i);
        if (t.mono[i] > 1) os << "^" << t.mono[i];
      }
    }
    return os.str();
  }

 private:
  static void check_registry(const Poly& a, const Poly& b) {
    if (!same_registry(a.reg_, b.reg_)) throw StructuralError("polynomials belong to different registries");
  }

  static Poly merge(const Poly& a, const Poly& b, bool subtract) {
    check_registry(a, b);
    Poly r(a.reg_ ? a.reg_ : b.reg_);
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      int c;
      if (i == a.terms_.size())
        c = -1;
      else if (j == b.terms_.size())
        c = 1;
      else
        c = canonical_compare(a.terms_[i].mono, b.terms_[j].mono);
      if (c > 0) {
        r.terms_.push_back(a.terms_[i++]);
      } else if (c < 0) {
        Term t = b.terms_[j++];
        if (subtract) t.coef = -t.coef;
        r.terms_.push_back(std::move(t));
      } else {
        Rat s = subtract ? Rat(a.terms_[i].coef - b.terms_[j].coef) : Rat(a.terms_[i].coef + b.terms_[j].coef);
        if (s != 0) r.terms_.push_back({a.terms_[i].mono, s});
        ++i;
        ++j;
      }
    }
    return r;
  }

  RegistryPtr reg_;
  std::vector<Term> terms_;
};

inline std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.to_string(); }

}  // namespace paramcert

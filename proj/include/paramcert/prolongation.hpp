#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "paramcert/model.hpp"

namespace paramcert {

/// Registry of derivative symbols x_0, x_1, ... per state plus the parameters.
struct ProlongedVars {
  RegistryPtr registry;
  std::vector<std::vector<std::size_t>> state_symbol;  // [state][order] -> variable
  std::vector<std::size_t> param_symbol;
  std::optional<std::size_t> time_symbol;              // present when the model has inputs
  int max_order = 0;
};

inline std::string derivative_symbol(const std::string& state, int order) {
  return state + "_" + std::to_string(order);
}

struct Prolongation {
  ProlongedVars vars;
  std::vector<std::vector<RatFun>> outputs;      // [output][k]: y^(k) in derivative symbols
  std::vector<std::vector<RatFun>> state_rates;  // [state][j]: j-th time derivative of x' (j < max_order)
};

/// What an unknown of a constructed system stands for.
struct UnknownRole {
  enum class Kind { state, param } kind;
  std::size_t index;  // state or parameter index in the model
  int order = 0;      // derivative order for states
};

/// Polynomial equations (each = 0) with their variable registry.
struct PolySystem {
  RegistryPtr registry;
  std::vector<Poly> equations;
  std::vector<Poly> denominators;  // cleared denominators; solutions on their zero sets are spurious
  std::vector<UnknownRole> roles;  // empty for systems not built from a model
  bool square = false;

  std::size_t unknown_count() const { return registry ? registry->size() : 0; }
  std::vector<int> degrees() const {
    std::vector<int> d;
    for (const auto& e : equations) d.push_back(e.total_degree());
    return d;
  }
};

namespace detail {

// Total time derivative: x_{i,j} -> x_{i,j+1}, d/dt on the time symbol.
inline Poly total_derivative(const Poly& p, const ProlongedVars& v) {
  Poly out(v.registry);
  for (std::size_t s = 0; s < v.state_symbol.size(); ++s) {
    const auto& syms = v.state_symbol[s];
    for (std::size_t j = 0; j < syms.size(); ++j) {
      Poly d = p.diff(syms[j]);
      if (d.is_zero()) continue;
      if (j + 1 >= syms.size())
        throw StructuralError("derivative order exceeds prolongation depth for state symbol " +
                              v.registry->name(syms[j]));
      out += d * Poly::variable(v.registry, syms[j + 1]);
    }
  }
  if (v.time_symbol) out += p.diff(*v.time_symbol);
  return out;
}

inline RatFun total_derivative(const RatFun& r, const ProlongedVars& v) {
  if (r.is_polynomial()) return RatFun(total_derivative(r.num(), v));
  Poly dn = total_derivative(r.num(), v);
  Poly dd = total_derivative(r.den(), v);
  return {dn * r.den() - r.num() * dd, r.den() * r.den()};
}

}  // namespace detail

/// Lie derivatives of every output up to orders[j], and time derivatives of the right-hand sides
/// needed for the ODE relations, all in fresh derivative symbols.
inline Prolongation lie_prolong(const Model& model, std::span<const int> orders) {
  if (orders.size() != model.outputs.size()) throw OrderSelectionError("one derivative order per output required");
  int K = 0;
  for (int o : orders) {
    if (o < 0) throw OrderSelectionError("derivative orders must be non-negative");
    K = std::max(K, o);
  }
  Prolongation pr;
  auto& v = pr.vars;
  v.max_order = K;
  std::vector<std::string> names;
  for (const auto& s : model.states)
    for (int j = 0; j <= K; ++j) names.push_back(derivative_symbol(s, j));
  names.insert(names.end(), model.params.begin(), model.params.end());
  if (!model.inputs.empty()) {
    names.push_back("t");
    for (const auto& u : model.inputs) names.push_back(u.name);
  }
  try {
    v.registry = make_registry(names);
  } catch (const StructuralError&) {
    throw SemanticError("a parameter or input name collides with a derivative symbol such as x_0");
  }
  const auto nstates = model.states.size();
  v.state_symbol.resize(nstates);
  for (std::size_t i = 0; i < nstates; ++i)
    for (int j = 0; j <= K; ++j) v.state_symbol[i].push_back(i * static_cast<std::size_t>(K + 1) + static_cast<std::size_t>(j));
  for (std::size_t k = 0; k < model.params.size(); ++k) v.param_symbol.push_back(nstates * (K + 1) + k);
  std::vector<std::size_t> input_slot;
  if (!model.inputs.empty()) {
    v.time_symbol = nstates * (K + 1) + model.params.size();
    for (std::size_t k = 0; k < model.inputs.size(); ++k) input_slot.push_back(*v.time_symbol + 1 + k);
  }

  // Model variables -> working registry; inputs become their time polynomials.
  std::vector<std::size_t> map(model.registry->size());
  for (std::size_t i = 0; i < nstates; ++i) map[model.state_var(i)] = v.state_symbol[i][0];
  for (std::size_t k = 0; k < model.params.size(); ++k) map[model.param_var(k)] = v.param_symbol[k];
  for (std::size_t k = 0; k < model.inputs.size(); ++k) map[model.input_var(k)] = input_slot[k];
  std::vector<Poly> input_polys;
  for (const auto& u : model.inputs) {
    std::vector<std::size_t> tmap{*v.time_symbol};
    input_polys.push_back(u.signal.remap(v.registry, tmap));
  }
  auto lift = [&](const RatFun& r) {
    RatFun out = r.remap(v.registry, map);
    for (std::size_t k = 0; k < input_polys.size(); ++k) out = out.substitute(input_slot[k], input_polys[k]);
    return out;
  };

  pr.outputs.resize(model.outputs.size());
  for (std::size_t j = 0; j < model.outputs.size(); ++j) {
    pr.outputs[j].push_back(lift(model.outputs[j]));
    for (int k = 1; k <= orders[j]; ++k) pr.outputs[j].push_back(detail::total_derivative(pr.outputs[j].back(), v));
  }
  pr.state_rates.resize(nstates);
  for (std::size_t i = 0; i < nstates; ++i) {
    if (K == 0) continue;
    pr.state_rates[i].push_back(lift(model.rhs[i]));
    for (int j = 1; j < K; ++j) pr.state_rates[i].push_back(detail::total_derivative(pr.state_rates[i].back(), v));
  }
  return pr;
}

/// Output-derivative equations y^(k) = estimate, then ODE relations x^(j+1) = (x')^(j) in increasing j
/// until the number of equations equals the number of unknowns.
inline PolySystem build_square_system(const Model& model, const std::vector<std::vector<Rat>>& derivs,
                                      std::span<const int> orders, const Rat& tstar = 0) {
  auto pr = lie_prolong(model, orders);
  const auto& v = pr.vars;
  if (derivs.size() != model.outputs.size()) throw OrderSelectionError("derivative estimates missing for some output");

  auto at_tstar = [&](const RatFun& r) { return v.time_symbol ? r.substitute(*v.time_symbol, tstar) : r; };

  std::vector<Poly> eqs;
  std::vector<Poly> dens;
  auto add_den = [&](const Poly& d) {
    if (d.is_constant()) return;
    for (const auto& e : dens)
      if (e == d) return;
    dens.push_back(d);
  };
  for (std::size_t j = 0; j < model.outputs.size(); ++j) {
    if (derivs[j].size() < static_cast<std::size_t>(orders[j]) + 1)
      throw OrderSelectionError("derivative estimates missing for output " + model.output_names[j]);
    for (int k = 0; k <= orders[j]; ++k) {
      auto [n, d] = clear_denominators(at_tstar(pr.outputs[j][static_cast<std::size_t>(k)]));
      Poly e = n - derivs[j][static_cast<std::size_t>(k)] * d;
      if (e.is_zero()) continue;
      eqs.push_back(e);
      add_den(d);
    }
  }
  if (!model.known.empty()) {
    if (tstar != 0) throw SemanticError("known initial values require the expansion time t* = 0");
    for (const auto& kv : model.known) {
      auto i = *model.state_index(kv.state);
      eqs.push_back(Poly::variable(v.registry, v.state_symbol[i][0]) - Poly::constant(v.registry, kv.value));
    }
  }

  std::set<std::size_t> syms(v.param_symbol.begin(), v.param_symbol.end());
  auto absorb = [&](const Poly& p) {
    for (auto x : p.variables()) syms.insert(x);
  };
  for (const auto& e : eqs) absorb(e);

  std::set<std::pair<int, std::size_t>> added;  // (j, state)
  const auto nstates = model.states.size();
  while (eqs.size() < syms.size()) {
    std::optional<std::pair<int, std::size_t>> pick;
    for (int j = 0; j < v.max_order && !pick; ++j)
      for (std::size_t i = 0; i < nstates && !pick; ++i)
        if (!added.count({j, i}) && syms.count(v.state_symbol[i][static_cast<std::size_t>(j + 1)])) pick = {j, i};
    if (!pick)
      throw OrderSelectionError("system is underdetermined (" + std::to_string(eqs.size()) + " equations, " +
                                std::to_string(syms.size()) + " unknowns); increase the derivative orders");
    auto [j, i] = *pick;
    added.insert(*pick);
    auto [n, d] = clear_denominators(at_tstar(pr.state_rates[i][static_cast<std::size_t>(j)]));
    Poly e = d * Poly::variable(v.registry, v.state_symbol[i][static_cast<std::size_t>(j + 1)]) - n;
    add_den(d);
    absorb(e);
    eqs.push_back(std::move(e));
  }
  if (eqs.size() > syms.size())
    throw OrderSelectionError("system is overdetermined (" + std::to_string(eqs.size()) + " equations, " +
                              std::to_string(syms.size()) + " unknowns); decrease the derivative orders");

  // Unknowns: derivative symbols by state and order, then parameters.
  PolySystem sys;
  std::vector<std::string> names;
  std::vector<std::size_t> remap(v.registry->size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < nstates; ++i)
    for (std::size_t j = 0; j < v.state_symbol[i].size(); ++j)
      if (syms.count(v.state_symbol[i][j])) {
        remap[v.state_symbol[i][j]] = names.size();
        names.push_back(v.registry->name(v.state_symbol[i][j]));
        sys.roles.push_back({UnknownRole::Kind::state, i, static_cast<int>(j)});
      }
  for (std::size_t k = 0; k < v.param_symbol.size(); ++k) {
    remap[v.param_symbol[k]] = names.size();
    names.push_back(model.params[k]);
    sys.roles.push_back({UnknownRole::Kind::param, k, 0});
  }
  sys.registry = make_registry(names);
  for (const auto& e : eqs) sys.equations.push_back(e.remap(sys.registry, remap));
  for (const auto& d : dens) {
    bool inside = true;
    for (auto x : d.variables()) inside = inside && remap[x] != static_cast<std::size_t>(-1);
    if (inside) sys.denominators.push_back(d.remap(sys.registry, remap));
  }
  sys.square = sys.equations.size() == sys.unknown_count();
  return sys;
}

/// Exact output derivatives at t* for a random rational point (parameters and state values at t*),
/// honouring known pins. Used to probe the structure of a system independently of the data.
inline std::vector<std::vector<Rat>> generic_derivatives(const Model& model, std::span<const int> orders,
                                                         const Rat& tstar, std::uint64_t seed = 7) {
  auto pr = lie_prolong(model, orders);
  const auto& v = pr.vars;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(1, 97), den(1, 13);
  for (int attempt = 0; attempt < 50; ++attempt) {
    std::vector<Rat> point(v.registry->size(), Rat(0));
    for (auto p : v.param_symbol) point[p] = make_rat(num(rng), den(rng));
    for (std::size_t i = 0; i < model.states.size(); ++i) point[v.state_symbol[i][0]] = make_rat(num(rng), den(rng));
    for (const auto& kv : model.known) point[v.state_symbol[*model.state_index(kv.state)][0]] = kv.value;
    if (v.time_symbol) point[*v.time_symbol] = tstar;
    try {
      for (int j = 0; j < v.max_order; ++j)
        for (std::size_t i = 0; i < model.states.size(); ++i) {
          RatFun r = pr.state_rates[i][static_cast<std::size_t>(j)];
          point[v.state_symbol[i][static_cast<std::size_t>(j + 1)]] = r.eval(point);
        }
      std::vector<std::vector<Rat>> out;
      for (const auto& ys : pr.outputs) {
        out.emplace_back();
        for (const auto& y : ys) out.back().push_back(y.eval(point));
      }
      return out;
    } catch (const StructuralError&) {
      // a denominator vanished at this point; draw another
    }
  }
  throw StructuralError("could not find a generic point avoiding every denominator");
}

/// Smallest uniform derivative order that yields a square system with the available samples.
inline std::vector<int> select_orders(const Model& model, std::size_t samples) {
  std::string last_error = "no samples";
  for (std::size_t nu = 0; nu < samples; ++nu) {
    std::vector<int> orders(model.outputs.size(), static_cast<int>(nu));
    std::vector<std::vector<Rat>> probe(model.outputs.size(), std::vector<Rat>(nu + 1, Rat(1)));
    try {
      build_square_system(model, probe, orders, 0);
      return orders;
    } catch (const OrderSelectionError& e) {
      last_error = e.what();
    } catch (const SemanticError&) {
      // known pins are checked against the real t* later
      std::vector<int> o = orders;
      Model relaxed = model;
      relaxed.known.clear();
      try {
        build_square_system(relaxed, probe, o, 0);
        return orders;
      } catch (const OrderSelectionError& e) {
        last_error = e.what();
      }
    }
  }
  throw OrderSelectionError("no uniform derivative order gives a square system with " + std::to_string(samples) +
                            " samples: " + last_error);
}

//-----------------------------------------------------------------------------
// Bezout bound
//-----------------------------------------------------------------------------

struct BezoutBound {
  Int value;
  std::map<unsigned, unsigned> factors;  // prime -> exponent

  /// e.g. "2^4" or "2^13 * 3^16"; "1" for an all-linear system.
  std::string factored() const {
    if (factors.empty()) return "1";
    std::string s;
    for (const auto& [p, e] : factors) {
      if (!s.empty()) s += " * ";
      s += std::to_string(p);
      if (e > 1) s += "^" + std::to_string(e);
    }
    return s;
  }
};

inline BezoutBound bezout_bound(std::span<const int> degrees) {
  BezoutBound b;
  b.value = 1;
  for (int d : degrees) {
    if (d < 0) throw StructuralError("Bezout bound of a zero equation");
    if (d == 0) {
      b.value = 0;
      b.factors.clear();
      return b;
    }
    b.value *= d;
    unsigned n = static_cast<unsigned>(d);
    for (unsigned p = 2; p * p <= n; ++p)
      while (n % p == 0) {
        ++b.factors[p];
        n /= p;
      }
    if (n > 1) ++b.factors[n];
  }
  return b;
}

inline BezoutBound bezout_bound(const PolySystem& sys) {
  auto d = sys.degrees();
  return bezout_bound(d);
}

//-----------------------------------------------------------------------------
// Text format
//-----------------------------------------------------------------------------

/// "# unknowns: a, b" header, then one polynomial per line.
inline std::string write_system(const PolySystem& sys) {
  std::ostringstream os;
  os << "# unknowns:";
  for (std::size_t i = 0; i < sys.unknown_count(); ++i) os << (i ? ", " : " ") << sys.registry->name(i);
  os << "\n";
  for (const auto& d : sys.denominators) os << "# denominator: " << d.to_string() << "\n";
  for (const auto& e : sys.equations) os << e.to_string() << "\n";
  return os.str();
}

/// Reads the text format; lines may be written as `lhs = rhs`. Without a header the unknowns
/// are the identifiers in order of first appearance.
inline PolySystem read_system(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::optional<std::vector<std::string>> unknowns;
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::vector<std::string> denominator_lines;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    auto line = detail::trimmed(number, raw).text;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto body = detail::trimmed(number, line.substr(1)).text;
      if (body.rfind("unknowns:", 0) == 0) {
        std::vector<std::string> names;
        std::string list = body.substr(9);
        std::string cur;
        for (char c : list + ",") {
          if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) names.push_back(cur);
            cur.clear();
          } else {
            cur += c;
          }
        }
        unknowns = names;
      } else if (body.rfind("denominator:", 0) == 0) {
        denominator_lines.push_back(body.substr(12));
      }
      continue;
    }
    lines.emplace_back(number, line);
  }
  if (!unknowns) {
    std::vector<std::string> names;
    for (const auto& [n, l] : lines) {
      std::size_t i = 0;
      while (i < l.size()) {
        if (std::isalpha(static_cast<unsigned char>(l[i])) || l[i] == '_') {
          std::size_t b = i;
          while (i < l.size() && (std::isalnum(static_cast<unsigned char>(l[i])) || l[i] == '_')) ++i;
          auto id = l.substr(b, i - b);
          bool exponent_marker = (id == "e" || id == "E") && b > 0 && std::isdigit(static_cast<unsigned char>(l[b - 1]));
          if (!exponent_marker && std::find(names.begin(), names.end(), id) == names.end()) names.push_back(id);
        } else if (std::isdigit(static_cast<unsigned char>(l[i])) || l[i] == '.') {
          while (i < l.size() && (std::isalnum(static_cast<unsigned char>(l[i])) || l[i] == '.')) ++i;
        } else {
          ++i;
        }
      }
    }
    unknowns = names;
  }
  PolySystem sys;
  sys.registry = make_registry(*unknowns);
  for (const auto& [n, l] : lines) {
    auto eq = l.find('=');
    RatFun r = eq == std::string::npos
                   ? parse_ratfun(l, sys.registry, n)
                   : parse_ratfun(std::string_view(l).substr(0, eq), sys.registry, n) -
                         parse_ratfun(std::string_view(l).substr(eq + 1), sys.registry, n, eq + 1);
    if (!r.is_polynomial()) throw ParseError("equation is not polynomial", n, 1);
    sys.equations.push_back(r.num());
  }
  for (const auto& d : denominator_lines) sys.denominators.push_back(parse_poly(d, sys.registry));
  if (sys.equations.empty()) throw ParseError("system has no equations", number, 1);
  sys.square = sys.equations.size() == sys.unknown_count();
  return sys;
}

}  // namespace paramcert

#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "paramcert/datafit.hpp"
#include "paramcert/interval.hpp"
#include "paramcert/rur.hpp"
#include "paramcert/simulate.hpp"

namespace paramcert {

/// Enclosure of one solution: an interval per unknown of the system.
struct CandidateBox {
  std::vector<Interval> values;
  IsolatingInterval root;
};

/// Interval evaluation of x_i = g_i(T)/fprime(T) over each root interval; a root is refined
/// until the fprime enclosure excludes zero.
inline std::vector<CandidateBox> back_substitute(const RUR& rur, const std::vector<IsolatingInterval>& roots,
                                                 const Rat& eps) {
  std::vector<CandidateBox> out;
  for (auto iv : roots) {
    iv = refine(rur.fbar, iv, eps);
    CandidateBox box;
    while (true) {
      Interval den = eval(rur.fprime, iv.as_interval());
      if (den.contains_zero()) {
        iv = refine(rur.fbar, iv, iv.width() / 4);
        continue;
      }
      box.values.clear();
      bool narrow = true;
      for (const auto& g : rur.coords) {
        box.values.push_back(eval(g, iv.as_interval()) / den);
        narrow = narrow && box.values.back().width() <= eps;
      }
      if (narrow || iv.exact) break;
      iv = refine(rur.fbar, iv, iv.width() / 16);
    }
    box.root = iv;
    out.push_back(std::move(box));
  }
  return out;
}

/// Every equation's interval enclosure over the box contains zero.
inline bool residual_certify(const PolySystem& sys, const CandidateBox& box) {
  for (const auto& e : sys.equations)
    if (!eval(e, box.values).contains_zero()) return false;
  return true;
}

inline bool residual_certify(const PolySystem& sys, std::span<const Interval> box) {
  for (const auto& e : sys.equations)
    if (!eval(e, box).contains_zero()) return false;
  return true;
}

/// Exact test whether p vanishes at the root of fbar isolated by iv.
inline bool vanishes_at_root(const RUR& rur, const Poly& p, const IsolatingInterval& iv) {
  if (rur.fbar.degree() <= 0) return false;
  UPoly inv = inverse_mod(rur.fprime, rur.fbar);
  std::vector<UPoly> x;
  for (const auto& g : rur.coords) x.push_back((g * inv) % rur.fbar);
  std::vector<std::vector<UPoly>> cache(x.size());
  UPoly acc;
  for (const auto& t : p.terms()) {
    UPoly term = UPoly::constant(t.coef);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (t.mono[i] > 0) term = (term * detail::mod_pow(x[i], t.mono[i], rur.fbar, cache[i])) % rur.fbar;
    acc = acc + term;
  }
  acc = acc % rur.fbar;
  UPoly common = acc.is_zero() ? rur.fbar : gcd(acc, rur.fbar);
  if (common.degree() <= 0) return false;
  if (iv.exact) return common.eval(iv.lo) == 0;
  return sign_at(common, iv.lo) != sign_at(common, iv.hi) || sign_at(common, iv.lo) == 0 ||
         sign_at(common, iv.hi) == 0;
}

//-----------------------------------------------------------------------------
// Polynomial system solving
//-----------------------------------------------------------------------------

struct SolveTimings {
  double groebner = 0;
  double rur = 0;
  double isolate = 0;
};

struct SolveOutcome {
  std::optional<GroebnerBasis> gb;
  std::vector<std::string> free_variables;  // nonempty iff not zero-dimensional
  std::size_t quotient_dimension = 0;
  std::size_t distinct_solutions = 0;
  std::optional<RUR> rur;
  std::vector<CandidateBox> boxes;   // one per real root of fbar
  std::vector<bool> certified;       // residual_certify per box
  SolveTimings timings;

  bool zero_dimensional() const { return free_variables.empty(); }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void check_deadline(const std::optional<std::chrono::steady_clock::time_point>& deadline) {
  if (deadline && std::chrono::steady_clock::now() > *deadline) throw Timeout("time limit exceeded");
}

}  // namespace detail

/// Groebner basis, RUR with certificate, real root isolation and certified boxes.
inline SolveOutcome solve_system(const PolySystem& sys, const Rat& eps,
                                 std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt) {
  SolveOutcome out;
  auto t0 = std::chrono::steady_clock::now();
  BuchbergerOptions bo;
  bo.deadline = deadline;
  out.gb = buchberger(sys.equations, TermOrder::grevlex(sys.unknown_count()), bo);
  out.timings.groebner = detail::seconds_since(t0);
  auto q = quotient_basis(*out.gb);
  if (auto* nz = std::get_if<NotZeroDimensional>(&q)) {
    out.free_variables = nz->free_variables;
    return out;
  }
  auto& qb = std::get<QuotientBasis>(q);
  out.quotient_dimension = qb.size();
  if (out.gb->is_unit()) return out;

  t0 = std::chrono::steady_clock::now();
  QuotientRing ring(*out.gb, qb);
  out.distinct_solutions = ring.distinct_solutions();
  detail::check_deadline(deadline);
  out.rur = solve_rur(ring, sys);
  out.timings.rur = detail::seconds_since(t0);
  detail::check_deadline(deadline);

  t0 = std::chrono::steady_clock::now();
  auto roots = isolate_real_roots(out.rur->fbar, eps);
  out.boxes = back_substitute(*out.rur, roots, eps);
  for (const auto& b : out.boxes) out.certified.push_back(residual_certify(sys, b));
  out.timings.isolate = detail::seconds_since(t0);
  return out;
}

//-----------------------------------------------------------------------------
// Estimation
//-----------------------------------------------------------------------------

/// lo (<|<=) param (<|<=) hi; either side optional.
struct ParamBound {
  std::string name;  // "*" applies to every parameter
  std::optional<Rat> lo, hi;
  bool lo_strict = false, hi_strict = false;

  bool admits(const Rat& v) const {
    if (lo && (lo_strict ? !(v > *lo) : !(v >= *lo))) return false;
    if (hi && (hi_strict ? !(v < *hi) : !(v <= *hi))) return false;
    return true;
  }
};

/// Parses constraints such as "k>0", "mu<=2", "a in [0,10]", "*>=0", separated by ';' or ','.
inline std::vector<ParamBound> parse_bounds(std::string_view text) {
  std::vector<std::string> items;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') --depth;
    if ((c == ';' || c == ',') && depth == 0) {
      items.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  items.push_back(cur);
  std::vector<ParamBound> out;
  for (auto item : items) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (item.empty()) continue;
    ParamBound b;
    auto in = item.find("in[");
    if (in == std::string::npos) in = item.find("in(");
    if (in != std::string::npos) {
      b.name = item.substr(0, in);
      auto body = item.substr(in + 2);
      auto comma = body.find(',');
      if (comma == std::string::npos || body.size() < 4) throw ParseError("malformed bound `" + item + "`", 1, 1);
      b.lo_strict = body.front() == '(';
      b.hi_strict = body.back() == ')';
      b.lo = parse_rational(body.substr(1, comma - 1));
      b.hi = parse_rational(body.substr(comma + 1, body.size() - comma - 2));
    } else {
      auto op = item.find_first_of("<>");
      if (op == std::string::npos || op == 0) throw ParseError("malformed bound `" + item + "`", 1, 1);
      b.name = item.substr(0, op);
      bool greater = item[op] == '>';
      bool strict = !(op + 1 < item.size() && item[op + 1] == '=');
      Rat v = parse_rational(item.substr(op + (strict ? 1 : 2)));
      if (greater) {
        b.lo = v;
        b.lo_strict = strict;
      } else {
        b.hi = v;
        b.hi_strict = strict;
      }
    }
    if (b.name.empty() || (b.name != "*" && !detail::is_identifier(b.name)))
      throw ParseError("malformed bound `" + item + "`", 1, 1);
    out.push_back(std::move(b));
  }
  return out;
}

struct EstimateOptions {
  std::optional<Rat> tstar;               // default: first data time
  std::optional<std::vector<int>> orders; // default: smallest uniform order giving a square system
  InterpKind interp = InterpKind::polynomial;
  Rat eps = Rat(1, 1000000000);
  std::vector<ParamBound> bounds;
  std::optional<double> timeout_seconds;
};

enum class Status { ok, no_estimate, not_zero_dimensional, timeout, out_of_memory };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::no_estimate: return "no-estimate";
    case Status::not_zero_dimensional: return "not-zero-dimensional";
    case Status::timeout: return "timeout";
    case Status::out_of_memory: return "out-of-memory";
  }
  return "?";
}

struct Candidate {
  CandidateBox box;
  std::map<std::string, Interval> params;   // parameter enclosures
  std::map<std::string, Interval> initial;  // state values at t*
  double residual = std::numeric_limits<double>::infinity();  // RMS against the data
  bool simulated = false;
  bool certified = false;
  std::string rejected;  // nonempty when filtered out

  std::map<std::string, double> point_estimate() const {
    std::map<std::string, double> m;
    for (const auto& [k, v] : params) m[k] = to_double(v.midpoint());
    for (const auto& [k, v] : initial) m[k] = to_double(v.midpoint());
    return m;
  }
};

struct StageTimes {
  double datafit = 0;
  double prolongation = 0;
  double groebner = 0;
  double rur = 0;
  double isolate = 0;
  double ranking = 0;
  double total = 0;
};

struct Diagnostics {
  Rat tstar;
  std::vector<int> orders;
  std::string interpolation;
  std::vector<std::vector<Rat>> derivatives;  // [output][order]
  std::size_t equations = 0;
  std::size_t unknowns = 0;
  std::vector<std::string> unknown_names;
  std::optional<BezoutBound> bezout;
  std::size_t quotient_dimension = 0;
  std::size_t distinct_solutions = 0;
  std::size_t real_solutions = 0;
  std::string separating_form;
  std::vector<std::string> free_variables;
  std::vector<std::string> notes;
};

struct EstimationResult {
  Status status = Status::no_estimate;
  std::vector<Candidate> candidates;  // survivors, best first
  std::vector<Candidate> rejected;
  Diagnostics diagnostics;
  StageTimes times;
  std::string message;
  std::optional<PolySystem> system;
  std::optional<SolveOutcome> solution;
};

/// RMS deviation between simulated outputs and data; throws PoleError if the model cannot be simulated.
inline double rms_residual(const Model& model, const Dataset& data, const std::map<std::string, double>& values,
                           double tstar) {
  std::vector<double> p, x0, ts;
  for (const auto& name : model.params) p.push_back(values.at(name));
  for (const auto& name : model.states) x0.push_back(values.at(name));
  for (const auto& t : data.times) ts.push_back(to_double(t));
  auto tr = simulate(model, p, x0, tstar, ts);
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < model.outputs.size(); ++j)
    for (std::size_t k = 0; k < ts.size(); ++k) {
      double d = tr.outputs[j][k] - to_double(data.observations[j][k]);
      sum += d * d;
      ++n;
    }
  double r = std::sqrt(sum / static_cast<double>(n));
  if (!std::isfinite(r)) throw PoleError("trajectory is not finite");
  return r;
}

/// Drops uncertified, denominator-singular and out-of-bounds candidates, then ranks the rest by RMS.
inline void filter_rank(EstimationResult& res, const Model& model, const Dataset& data, const PolySystem& sys,
                        const RUR& rur, const std::vector<ParamBound>& bounds) {
  std::vector<Candidate> keep;
  for (auto& c : res.candidates) {
    if (!c.certified) c.rejected = "residual check failed";
    for (const auto& d : sys.denominators)
      if (c.rejected.empty() && vanishes_at_root(rur, d, c.box.root)) c.rejected = "denominator vanishes";
    for (const auto& b : bounds)
      for (const auto& [name, iv] : c.params)
        if (c.rejected.empty() && (b.name == "*" || b.name == name) && !b.admits(iv.midpoint()))
          c.rejected = "outside bounds for " + name;
    if (!c.rejected.empty()) {
      res.rejected.push_back(std::move(c));
      continue;
    }
    if (c.initial.size() == model.states.size()) {
      try {
        c.residual = rms_residual(model, data, c.point_estimate(), to_double(res.diagnostics.tstar));
        c.simulated = true;
      } catch (const PoleError&) {
        c.simulated = false;
      }
    }
    keep.push_back(std::move(c));
  }
  std::stable_sort(keep.begin(), keep.end(), [](const Candidate& a, const Candidate& b) {
    if (a.simulated != b.simulated) return a.simulated;
    return a.residual < b.residual;
  });
  res.candidates = std::move(keep);
}

/// Full pipeline: interpolation, prolongation, exact solving, certified boxes, ranking.
inline EstimationResult estimate(const Model& model, const Dataset& data, const EstimateOptions& opt = {}) {
  auto start = std::chrono::steady_clock::now();
  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (opt.timeout_seconds)
    deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(*opt.timeout_seconds));
  EstimationResult res;
  auto& diag = res.diagnostics;
  if (data.output_names.size() != model.outputs.size()) throw DataError("dataset does not match the model outputs");
  diag.tstar = opt.tstar ? *opt.tstar : data.times.front();
  if (diag.tstar < data.times.front() || diag.tstar > data.times.back())
    throw DataError("expansion time lies outside the data span");

  auto t0 = std::chrono::steady_clock::now();
  diag.orders = opt.orders ? *opt.orders : select_orders(model, data.samples());
  if (diag.orders.size() != model.outputs.size()) throw OrderSelectionError("one derivative order per output required");
  diag.interpolation = to_string(opt.interp);
  for (std::size_t j = 0; j < model.outputs.size(); ++j) {
    Interpolant ip;
    if (opt.interp == InterpKind::rational) {
      try {
        ip = fit_interpolant(data, j, InterpKind::rational);
        diag.derivatives.push_back(estimate_derivatives(ip, diag.tstar, diag.orders[j]));
        continue;
      } catch (const ThieleBreakdown& e) {
        diag.notes.push_back("output " + model.output_names[j] + ": " + e.what() + "; using polynomial interpolation");
      } catch (const PoleError& e) {
        diag.notes.push_back("output " + model.output_names[j] + ": " + e.what() + "; using polynomial interpolation");
      }
    }
    ip = fit_interpolant(data, j, InterpKind::polynomial);
    if (static_cast<std::size_t>(diag.orders[j]) >= data.samples())
      throw OrderSelectionError("derivative order " + std::to_string(diag.orders[j]) + " needs more than " +
                                std::to_string(data.samples()) + " samples");
    diag.derivatives.push_back(estimate_derivatives(ip, diag.tstar, diag.orders[j]));
  }
  res.times.datafit = detail::seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  PolySystem sys = build_square_system(model, diag.derivatives, diag.orders, diag.tstar);
  res.times.prolongation = detail::seconds_since(t0);
  diag.equations = sys.equations.size();
  diag.unknowns = sys.unknown_count();
  diag.unknown_names = sys.registry->names();
  diag.bezout = bezout_bound(sys);
  res.system = sys;

  auto timed_out = [&](const Timeout& e) {
    res.status = Status::timeout;
    res.message = e.what();
    res.times.total = detail::seconds_since(start);
    return res;
  };
  try {
    res.solution = solve_system(sys, opt.eps, deadline);
  } catch (const Timeout& e) {
    return timed_out(e);
  }
  auto& sol = *res.solution;
  res.times.groebner = sol.timings.groebner;
  res.times.rur = sol.timings.rur;
  res.times.isolate = sol.timings.isolate;
  diag.quotient_dimension = sol.quotient_dimension;
  diag.distinct_solutions = sol.distinct_solutions;
  if (!sol.zero_dimensional()) {
    res.status = Status::not_zero_dimensional;
    diag.free_variables = sol.free_variables;
    res.message = "system is not zero-dimensional; free variables:";
    for (const auto& v : sol.free_variables) res.message += " " + v;
    res.times.total = detail::seconds_since(start);
    return res;
  }
  if (!sol.rur) {
    // Inconsistent data system: check whether the structure itself is positive-dimensional.
    auto probe = build_square_system(model, generic_derivatives(model, diag.orders, diag.tstar), diag.orders, diag.tstar);
    BuchbergerOptions bo;
    bo.deadline = deadline;
    std::variant<QuotientBasis, NotZeroDimensional> q;
    try {
      q = quotient_basis(buchberger(probe.equations, TermOrder::grevlex(probe.unknown_count()), bo));
    } catch (const Timeout& e) {
      return timed_out(e);
    }
    if (auto* nz = std::get_if<NotZeroDimensional>(&q)) {
      res.status = Status::not_zero_dimensional;
      diag.free_variables = nz->free_variables;
      res.message = "structurally non-identifiable: system is not zero-dimensional at a generic point; free variables:";
      for (const auto& v : nz->free_variables) res.message += " " + v;
      res.times.total = detail::seconds_since(start);
      return res;
    }
    res.status = Status::no_estimate;
    res.message = "system has no solutions";
    res.times.total = detail::seconds_since(start);
    return res;
  }
  diag.separating_form = sol.rur->form.to_string(*sys.registry);
  diag.real_solutions = sol.boxes.size();

  t0 = std::chrono::steady_clock::now();
  for (std::size_t b = 0; b < sol.boxes.size(); ++b) {
    Candidate c;
    c.box = sol.boxes[b];
    c.certified = sol.certified[b];
    for (std::size_t u = 0; u < sys.roles.size(); ++u) {
      const auto& role = sys.roles[u];
      if (role.kind == UnknownRole::Kind::param)
        c.params[model.params[role.index]] = c.box.values[u];
      else if (role.order == 0)
        c.initial[model.states[role.index]] = c.box.values[u];
    }
    res.candidates.push_back(std::move(c));
  }
  filter_rank(res, model, data, sys, *sol.rur, opt.bounds);
  res.times.ranking = detail::seconds_since(t0);
  res.status = res.candidates.empty() ? Status::no_estimate : Status::ok;
  if (res.candidates.empty()) res.message = "no candidate survived filtering";
  res.times.total = detail::seconds_since(start);
  return res;
}

/// max over keys of |est - truth| / |truth| in percent; keys with zero truth go to `absolute`.
struct ErrorReport {
  double max_relative_pct = 0;
  std::map<std::string, double> relative_pct;
  std::map<std::string, double> absolute;
};

inline ErrorReport relative_error(const std::map<std::string, double>& estimated,
                                  const std::map<std::string, double>& truth) {
  ErrorReport r;
  for (const auto& [k, tv] : truth) {
    auto it = estimated.find(k);
    if (it == estimated.end()) throw DataError("no estimate for `" + k + "`");
    if (tv == 0) {
      r.absolute[k] = std::abs(it->second);
      continue;
    }
    double e = std::abs(it->second - tv) / std::abs(tv) * 100.0;
    r.relative_pct[k] = e;
    r.max_relative_pct = std::max(r.max_relative_pct, e);
  }
  return r;
}

}  // namespace paramcert

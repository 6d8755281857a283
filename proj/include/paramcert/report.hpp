#pragma once

#include <nlohmann/json.hpp>

#include "paramcert/estimate.hpp"

namespace paramcert {

inline constexpr const char* kReportSchemaVersion = "1.0";

enum ExitCode : int {
  exit_ok = 0,
  exit_error = 1,
  exit_no_estimate = 2,
  exit_not_zero_dimensional = 3,
  exit_timeout = 4,
  exit_out_of_memory = 5,
};

inline int exit_code(Status s) {
  switch (s) {
    case Status::ok: return exit_ok;
    case Status::no_estimate: return exit_no_estimate;
    case Status::not_zero_dimensional: return exit_not_zero_dimensional;
    case Status::timeout: return exit_timeout;
    case Status::out_of_memory: return exit_out_of_memory;
  }
  return exit_error;
}

namespace report {

using nlohmann::json;
using nlohmann::ordered_json;

inline ordered_json rational(const Rat& r) {
  ordered_json j;
  j["exact"] = to_string(r);
  j["value"] = to_double(r);
  return j;
}

inline ordered_json interval(const Interval& iv) {
  ordered_json j;
  j["estimate"] = to_double(iv.midpoint());
  j["lo"] = to_double(iv.lo);
  j["hi"] = to_double(iv.hi);
  j["radius"] = to_double(iv.width() / 2);
  j["lo_exact"] = to_string(iv.lo);
  j["hi_exact"] = to_string(iv.hi);
  return j;
}

inline ordered_json bezout(const BezoutBound& b) {
  ordered_json j;
  j["value"] = b.value.get_str();
  j["factored"] = b.factored();
  return j;
}

inline ordered_json header(const char* command, const std::string& status, int code, const std::string& message) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = command;
  j["status"] = status;
  j["exit_code"] = code;
  j["message"] = message;
  return j;
}

inline ordered_json error(const char* command, const std::string& message) {
  return header(command, "error", exit_error, message);
}

inline ordered_json candidate(const Candidate& c, std::size_t rank) {
  ordered_json j;
  j["rank"] = rank;
  ordered_json p = ordered_json::object(), x = ordered_json::object();
  for (const auto& [k, v] : c.params) p[k] = interval(v);
  for (const auto& [k, v] : c.initial) x[k] = interval(v);
  j["params"] = p;
  j["initial"] = x;
  if (c.simulated)
    j["residual_rms"] = c.residual;
  else
    j["residual_rms"] = nullptr;
  j["simulated"] = c.simulated;
  j["certified"] = c.certified;
  j["root"] = {{"lo", to_string(c.box.root.lo)}, {"hi", to_string(c.box.root.hi)}, {"exact", c.box.root.exact}};
  if (!c.rejected.empty()) j["reason"] = c.rejected;
  return j;
}

inline ordered_json estimation(const Model& model, const EstimationResult& r) {
  auto j = header("estimate", to_string(r.status), exit_code(r.status), r.message);
  j["model"] = {{"states", model.states}, {"params", model.params}, {"outputs", model.output_names}};
  const auto& d = r.diagnostics;
  ordered_json diag;
  diag["tstar"] = rational(d.tstar);
  diag["orders"] = d.orders;
  diag["interpolation"] = d.interpolation;
  ordered_json ders = ordered_json::array();
  for (std::size_t o = 0; o < d.derivatives.size(); ++o) {
    ordered_json row = ordered_json::array();
    for (const auto& v : d.derivatives[o]) row.push_back(rational(v));
    ders.push_back({{"output", model.output_names.at(o)}, {"values", row}});
  }
  diag["derivatives"] = ders;
  diag["equations"] = d.equations;
  diag["unknowns"] = d.unknowns;
  diag["unknown_names"] = d.unknown_names;
  if (d.bezout)
    diag["bezout_bound"] = bezout(*d.bezout);
  else
    diag["bezout_bound"] = nullptr;
  diag["quotient_dimension"] = d.quotient_dimension;
  diag["distinct_solutions"] = d.distinct_solutions;
  diag["real_solutions"] = d.real_solutions;
  diag["separating_form"] = d.separating_form;
  diag["free_variables"] = d.free_variables;
  diag["notes"] = d.notes;
  j["diagnostics"] = diag;
  ordered_json cands = ordered_json::array(), rej = ordered_json::array();
  for (std::size_t i = 0; i < r.candidates.size(); ++i) cands.push_back(candidate(r.candidates[i], i + 1));
  for (std::size_t i = 0; i < r.rejected.size(); ++i) rej.push_back(candidate(r.rejected[i], 0));
  j["candidates"] = cands;
  j["rejected"] = rej;
  const auto& t = r.times;
  j["timings"] = {{"datafit", t.datafit},   {"prolongation", t.prolongation}, {"groebner", t.groebner},
                  {"rur", t.rur},           {"isolate", t.isolate},           {"ranking", t.ranking},
                  {"total", t.total}};
  return j;
}

inline ordered_json solve(const PolySystem& sys, const SolveOutcome& s, double total_seconds) {
  Status st = s.zero_dimensional() ? Status::ok : Status::not_zero_dimensional;
  std::string msg;
  if (!s.zero_dimensional()) {
    msg = "system is not zero-dimensional; free variables:";
    for (const auto& v : s.free_variables) msg += " " + v;
  } else if (!s.rur) {
    msg = "system has no solutions";
  }
  auto j = header("solve", to_string(st), exit_code(st), msg);
  j["unknowns"] = sys.registry->names();
  j["equations"] = sys.equations.size();
  if (sys.square)
    j["bezout_bound"] = bezout(bezout_bound(sys));
  else
    j["bezout_bound"] = nullptr;
  j["quotient_dimension"] = s.quotient_dimension;
  j["distinct_solutions"] = s.distinct_solutions;
  j["real_solutions"] = s.boxes.size();
  j["free_variables"] = s.free_variables;
  j["separating_form"] = s.rur ? s.rur->form.to_string(*sys.registry) : std::string();
  ordered_json sols = ordered_json::array();
  for (std::size_t b = 0; b < s.boxes.size(); ++b) {
    ordered_json v = ordered_json::object();
    for (std::size_t i = 0; i < s.boxes[b].values.size(); ++i) v[sys.registry->name(i)] = interval(s.boxes[b].values[i]);
    const auto& root = s.boxes[b].root;
    sols.push_back({{"values", v},
                    {"certified", static_cast<bool>(s.certified[b])},
                    {"root", {{"lo", to_string(root.lo)}, {"hi", to_string(root.hi)}, {"exact", root.exact}}}});
  }
  j["solutions"] = sols;
  j["timings"] = {{"groebner", s.timings.groebner},
                  {"rur", s.timings.rur},
                  {"isolate", s.timings.isolate},
                  {"total", total_seconds}};
  return j;
}

}  // namespace report
}  // namespace paramcert

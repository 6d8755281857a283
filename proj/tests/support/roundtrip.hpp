#pragma once
// Synthetic round-trip cases: identifiable polynomial models with random truth and oracle data.

#include <random>
#include <string>
#include <vector>

#include "paramcert/paramcert.hpp"
#include "support/oracles.hpp"

namespace roundtrip {

using paramcert::Rat;

struct Range {
  int lo, hi;  // hundredths
};

struct Template {
  const char* name;
  const char* model;
  std::vector<Range> params;
  std::vector<Range> states;
};

inline const std::vector<Template>& templates() {
  static const std::vector<Template> t = {
      {"decay", "states: x\nparams: a\ndynamics:\n  x' = -a*x\noutputs:\n  y = x\n", {{20, 150}}, {{50, 200}}},
      {"inflow", "states: x\nparams: a, b\ndynamics:\n  x' = a - b*x\noutputs:\n  y = x\n", {{50, 200}, {20, 150}},
       {{10, 100}}},
      {"logistic", "states: x\nparams: r, k\ndynamics:\n  x' = r*x - k*x^2\noutputs:\n  y = x\n",
       {{50, 200}, {20, 100}}, {{10, 50}}},
      {"dimer", "states: x\nparams: a\ndynamics:\n  x' = -a*x^2\noutputs:\n  y = x\n", {{20, 60}}, {{50, 100}}},
      {"riccati", "states: x\nparams: a, b\ndynamics:\n  x' = a - b*x^2\noutputs:\n  y = x\n",
       {{50, 150}, {20, 80}}, {{10, 80}}},
      {"cascade",
       "states: u, v\nparams: a, b\ndynamics:\n  u' = -a*u + v\n  v' = -b*v\noutputs:\n  y1 = u\n  y2 = v\n",
       {{30, 150}, {20, 100}}, {{50, 150}, {20, 100}}},
      {"chain",
       "states: u, v\nparams: a, b\ndynamics:\n  u' = -a*u\n  v' = a*u - b*v\noutputs:\n  y1 = u\n  y2 = v\n",
       {{30, 150}, {20, 100}}, {{50, 150}, {10, 60}}},
      {"epidemic",
       "states: s, i\nparams: k1, k2\ndynamics:\n  s' = -k1*s*i\n  i' = k1*s*i - k2*i\noutputs:\n  ys = s\n  yi = i\n",
       {{30, 120}, {20, 80}}, {{50, 150}, {10, 50}}},
      {"oscillator", "states: u, v\nparams: w\ndynamics:\n  u' = v\n  v' = -w*u\noutputs:\n  y = u\n", {{50, 300}},
       {{50, 150}, {20, 60}}},
      {"damped", "states: u, v\nparams: a, b\ndynamics:\n  u' = v\n  v' = -a*u - b*v\noutputs:\n  y = u\n",
       {{100, 400}, {20, 100}}, {{50, 150}, {20, 60}}},
  };
  return t;
}

struct Case {
  std::string name;
  paramcert::Model model;
  paramcert::Dataset data;
  std::map<std::string, double> truth;  // parameters and initial values
};

inline Rat draw(std::mt19937_64& rng, const Range& r) {
  std::uniform_int_distribution<int> d(r.lo, r.hi);
  return paramcert::make_rat(d(rng), 100);
}

/// Eleven samples on [0, 1] with `digits` significant digits.
inline Case make_case(const Template& t, std::mt19937_64& rng, int digits = 25) {
  Case c;
  c.name = t.name;
  c.model = paramcert::parse_model(t.model);
  std::vector<Rat> p, x;
  for (const auto& r : t.params) p.push_back(draw(rng, r));
  for (const auto& r : t.states) x.push_back(draw(rng, r));
  std::vector<Rat> times;
  for (int k = 0; k <= 10; ++k) times.push_back(paramcert::make_rat(k, 10));
  c.data = oracle::synthetic_data(c.model, p, x, times, digits);
  for (std::size_t i = 0; i < p.size(); ++i) c.truth[c.model.params[i]] = paramcert::to_double(p[i]);
  for (std::size_t i = 0; i < x.size(); ++i) c.truth[c.model.states[i]] = paramcert::to_double(x[i]);
  c.name += " " + [&] {
    std::string s;
    for (const auto& [k, v] : c.truth) s += (s.empty() ? "" : ",") + k + "=" + std::to_string(v).substr(0, 4);
    return s;
  }();
  return c;
}

/// Two draws per template.
inline std::vector<Case> twenty_cases(std::uint64_t seed = 606, int digits = 25) {
  std::mt19937_64 rng(seed);
  std::vector<Case> out;
  for (int round = 0; round < 2; ++round)
    for (const auto& t : templates()) out.push_back(make_case(t, rng, digits));
  return out;
}

}  // namespace roundtrip

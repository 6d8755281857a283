#pragma once

#include <cmath>
#include <vector>

#include "paramcert/model.hpp"

namespace paramcert {

struct SimulationOptions {
  double rel_tol = 1e-8;
  std::size_t initial_steps = 16;
  std::size_t max_steps = std::size_t{1} << 20;
};

/// Outputs sampled at the requested times: [output][sample].
struct Trajectory {
  std::vector<std::vector<double>> outputs;
  std::vector<std::vector<double>> states;  // [state][sample]
};

namespace detail {

// Double-precision view of a model with parameters bound.
class NumericModel {
 public:
  NumericModel(const Model& m, std::span<const double> params) : m_(m), point_(m.registry->size(), 0.0) {
    for (std::size_t k = 0; k < params.size(); ++k) point_[m.param_var(k)] = params[k];
  }

  void set(double t, std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) point_[m_.state_var(i)] = x[i];
    for (std::size_t k = 0; k < m_.inputs.size(); ++k) {
      double tt = t;
      point_[m_.input_var(k)] = m_.inputs[k].signal.eval_as<double>(std::span<const double>(&tt, 1));
    }
  }

  double eval(const RatFun& r) const {
    std::span<const double> p(point_);
    double d = r.is_polynomial() ? 1.0 : r.den().eval_as<double>(p);
    if (!(std::abs(d) > 1e-300)) throw PoleError("denominator vanishes along the trajectory");
    double v = r.num().eval_as<double>(p) / (r.is_polynomial() ? to_double(r.den().constant_value()) : d);
    if (!std::isfinite(v)) throw PoleError("trajectory is not finite");
    return v;
  }

  std::vector<double> rate(double t, std::span<const double> x) {
    set(t, x);
    std::vector<double> dx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dx[i] = eval(m_.rhs[i]);
    return dx;
  }

  std::vector<double> outputs(double t, std::span<const double> x) {
    set(t, x);
    std::vector<double> y;
    for (const auto& g : m_.outputs) y.push_back(eval(g));
    return y;
  }

 private:
  const Model& m_;
  std::vector<double> point_;
};

inline std::vector<double> rk4(NumericModel& nm, std::vector<double> x, double t0, double t1, std::size_t steps) {
  double h = (t1 - t0) / static_cast<double>(steps);
  auto n = x.size();
  std::vector<double> tmp(n);
  for (std::size_t s = 0; s < steps; ++s) {
    double t = t0 + h * static_cast<double>(s);
    auto k1 = nm.rate(t, x);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    auto k2 = nm.rate(t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    auto k3 = nm.rate(t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    auto k4 = nm.rate(t + h, tmp);
    for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return x;
}

// Halves the step until the end state changes by less than rel_tol.
inline std::vector<double> integrate(NumericModel& nm, const std::vector<double>& x, double t0, double t1,
                                     const SimulationOptions& opt) {
  if (t0 == t1) return x;
  std::size_t steps = opt.initial_steps;
  auto prev = rk4(nm, x, t0, t1, steps);
  while (steps < opt.max_steps) {
    steps *= 2;
    auto next = rk4(nm, x, t0, t1, steps);
    bool done = true;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (std::abs(next[i] - prev[i]) > opt.rel_tol * std::max(std::abs(next[i]), 1e-12)) done = false;
    prev = std::move(next);
    if (done) break;
  }
  return prev;
}

}  // namespace detail

/// Fixed-step RK4 from (tstar, x0), forward and backward, sampled at `times`.
inline Trajectory simulate(const Model& model, std::span<const double> params, std::span<const double> x0,
                           double tstar, std::span<const double> times, const SimulationOptions& opt = {}) {
  if (params.size() != model.params.size() || x0.size() != model.states.size())
    throw StructuralError("simulate: parameter or state vector has the wrong length");
  detail::NumericModel nm(model, params);
  Trajectory tr;
  tr.outputs.assign(model.outputs.size(), std::vector<double>(times.size()));
  tr.states.assign(model.states.size(), std::vector<double>(times.size()));
  std::vector<std::size_t> order(times.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });

  auto record = [&](std::size_t idx, const std::vector<double>& x) {
    auto y = nm.outputs(times[idx], x);
    for (std::size_t j = 0; j < y.size(); ++j) tr.outputs[j][idx] = y[j];
    for (std::size_t i = 0; i < x.size(); ++i) tr.states[i][idx] = x[i];
  };
  std::vector<double> start(x0.begin(), x0.end());
  // Forward leg.
  std::vector<double> x = start;
  double t = tstar;
  for (auto idx : order) {
    if (times[idx] < tstar) continue;
    x = detail::integrate(nm, x, t, times[idx], opt);
    t = times[idx];
    record(idx, x);
  }
  // Backward leg.
  x = start;
  t = tstar;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (times[*it] >= tstar) continue;
    x = detail::integrate(nm, x, t, times[*it], opt);
    t = times[*it];
    record(*it, x);
  }
  return tr;
}

}  // namespace paramcert

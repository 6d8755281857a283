#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "paramcert/paramcert.hpp"
#include "support/oracles.hpp"

using namespace paramcert;

namespace {

const char* kToy = "states: x\nparams: mu\ndynamics:\n  x' = -mu*x\noutputs:\n  y = x^2 + x\n";

struct PolyModel {
  const char* text;
  int extra_orders;
};

// Polynomial models with identifiable parameters; some need more than the minimal order.
const PolyModel kModels[] = {
    {kToy, 0},
    {"states: x\nparams: a, b\ndynamics:\n  x' = a - b*x\noutputs:\n  y = x\n", 0},
    {"states: x\nparams: r, k\ndynamics:\n  x' = r*x - k*x^2\noutputs:\n  y = x\n", 0},
    {"states: u, v\nparams: a, b\ndynamics:\n  u' = -a*u + v\n  v' = -b*v\noutputs:\n  y1 = u\n  y2 = v\n", 0},
    {"states: a, b\nparams: k1, k2\ndynamics:\n  a' = -k1*a^2\n  b' = k1*a^2 - k2*b\noutputs:\n  ya = a\n  yb = b\n", 0},
    {"states: u, v\nparams: w\ndynamics:\n  u' = v\n  v' = -w*u\noutputs:\n  y = u\n", 1},
    {"states: c, p\nparams: k10, k12, k21\ndynamics:\n  c' = -(k10 + k12)*c + k21*p\n  p' = k12*c - k21*p\n"
     "outputs:\n  y = c\nknown:\n  p(0) = 0\n",
     0},
};

std::vector<Rat> random_values(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> num(1, 30), den(1, 7);
  std::vector<Rat> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(make_rat(num(rng), den(rng)));
  return v;
}

}  // namespace

TEST(Prolongation, ToySystemShape) {
  Model m = parse_model(kToy);
  std::vector<int> orders{2};
  std::vector<std::vector<Rat>> d{{Rat(2), make_rat(-3, 2), make_rat(61, 50)}};
  PolySystem sys = build_square_system(m, d, orders);
  EXPECT_EQ(sys.equations.size(), 4u);
  EXPECT_EQ(sys.unknown_count(), 4u);
  EXPECT_TRUE(sys.square);
  EXPECT_EQ(sys.registry->names(), (std::vector<std::string>{"x_0", "x_1", "x_2", "mu"}));
  for (int deg : sys.degrees()) EXPECT_LE(deg, 2);
  auto b = bezout_bound(sys);
  EXPECT_EQ(b.value, 16);
  EXPECT_EQ(b.factored(), "2^4");
  // The printed constants are consistent with mu = 1/2, x(0) = 1.
  std::vector<Rat> pt{Rat(1), make_rat(-1, 2), make_rat(6, 25), make_rat(1, 2)};
  for (const auto& e : sys.equations) EXPECT_EQ(e.eval(pt), 0) << e;
}

TEST(Prolongation, LieDerivativesMatchTaylorOracle) {
  std::mt19937_64 rng(21);
  for (const auto& pm : kModels) {
    Model m = parse_model(pm.text);
    std::vector<int> orders(m.outputs.size(), 3);
    auto pr = lie_prolong(m, orders);
    for (int trial = 0; trial < 3; ++trial) {
      auto params = random_values(rng, m.params.size());
      auto x0 = random_values(rng, m.states.size());
      auto exact = oracle::exact_point(m, params, x0, 3);
      auto states = oracle::taylor_states<Rat>(m, params, x0, 5);
      std::vector<Rat> point(pr.vars.registry->size(), Rat(0));
      for (std::size_t k = 0; k < params.size(); ++k) point[pr.vars.param_symbol[k]] = params[k];
      for (std::size_t i = 0; i < m.states.size(); ++i) {
        Rat fact = 1;
        for (std::size_t j = 0; j < pr.vars.state_symbol[i].size(); ++j) {
          if (j > 0) fact *= static_cast<unsigned long>(j);
          point[pr.vars.state_symbol[i][j]] = states[i][j] * fact;
        }
      }
      for (std::size_t j = 0; j < m.outputs.size(); ++j)
        for (std::size_t k = 0; k <= 3; ++k)
          EXPECT_EQ(pr.outputs[j][k].eval(point), exact.output_derivatives[j][k]) << pm.text << " k=" << k;
    }
  }
}

TEST(Prolongation, TruePointSatisfiesEverySystem) {
  std::mt19937_64 rng(22);
  for (const auto& pm : kModels) {
    Model m = parse_model(pm.text);
    auto base = select_orders(m, 12);
    for (int extra = 0; extra <= 1; ++extra) {
      std::vector<int> orders = base;
      for (auto& o : orders) o += pm.extra_orders + extra;
      for (int trial = 0; trial < 3; ++trial) {
        auto params = random_values(rng, m.params.size());
        auto x0 = random_values(rng, m.states.size());
        for (const auto& kv : m.known) x0[*m.state_index(kv.state)] = kv.value;
        int K = *std::max_element(orders.begin(), orders.end());
        auto exact = oracle::exact_point(m, params, x0, K);
        PolySystem sys;
        try {
          sys = build_square_system(m, exact.output_derivatives, orders);
        } catch (const OrderSelectionError&) {
          continue;  // overdetermined at this order
        }
        EXPECT_TRUE(sys.square);
        auto values = oracle::unknown_values(sys, m, params, x0);
        for (const auto& e : sys.equations) EXPECT_EQ(e.eval(values), 0) << pm.text << "\n" << e;
      }
    }
  }
}

TEST(Prolongation, InputsAreExpandedAtTstar) {
  // The input u = t is reproduced by an extra state tau' = 1 in the oracle model.
  Model m = parse_model("states: x\nparams: a\ninputs:\n  u = t\ndynamics:\n  x' = -a*x + u\noutputs:\n  y = x\n");
  Model aug = parse_model("states: x, tau\nparams: a\ndynamics:\n  x' = -a*x + tau\n  tau' = 1\noutputs:\n  y = x\n");
  Rat tstar = make_rat(1, 2), a = make_rat(3, 4), x = make_rat(5, 3);
  auto exact = oracle::exact_point(aug, {a}, {x, tstar}, 2);
  std::vector<int> orders{2};
  auto sys = build_square_system(m, exact.output_derivatives, orders, tstar);
  EXPECT_TRUE(sys.square);
  auto values = oracle::unknown_values(sys, aug, {a}, {x, tstar});
  for (const auto& e : sys.equations) EXPECT_EQ(e.eval(values), 0) << e;
}

TEST(Prolongation, RationalDynamicsRecordDenominators) {
  Model m = parse_model("states: x\nparams: V, K\ndynamics:\n  x' = -V*x/(K + x)\noutputs:\n  y = x\n");
  std::vector<int> orders = select_orders(m, 10);
  auto d = generic_derivatives(m, orders, 0);
  auto sys = build_square_system(m, d, orders);
  EXPECT_TRUE(sys.square);
  EXPECT_FALSE(sys.denominators.empty());
  for (const auto& e : sys.equations) EXPECT_GE(e.total_degree(), 1);
}

TEST(Prolongation, LieDerivativeAgreesWithNumericalDifferences) {
  Model m = parse_model("states: x\nparams: V, K\ndynamics:\n  x' = -V*x/(K + x)\noutputs:\n  y = x^2\n");
  std::vector<int> orders{2};
  auto pr = lie_prolong(m, orders);
  double V = 1.3, K = 0.7, x0 = 0.9, h = 1e-3;
  std::vector<double> p{V, K}, x{x0};
  auto tr = simulate(m, p, x, 0.0, std::vector<double>{-h, 0.0, h});
  double d1 = (tr.outputs[0][2] - tr.outputs[0][0]) / (2 * h);
  double d2 = (tr.outputs[0][2] - 2 * tr.outputs[0][1] + tr.outputs[0][0]) / (h * h);
  // exact values through the Lie derivatives at x_0 = x0 with x_1 = f(x0)
  Rat Vr = make_rat(13, 10), Kr = make_rat(7, 10), xr = make_rat(9, 10);
  Rat x1 = -Vr * xr / (Kr + xr);
  Rat x2 = -Vr * Kr / ((Kr + xr) * (Kr + xr)) * x1;
  std::vector<Rat> point(pr.vars.registry->size(), Rat(0));
  point[pr.vars.state_symbol[0][0]] = xr;
  point[pr.vars.state_symbol[0][1]] = x1;
  point[pr.vars.state_symbol[0][2]] = x2;
  point[pr.vars.param_symbol[0]] = Vr;
  point[pr.vars.param_symbol[1]] = Kr;
  EXPECT_NEAR(to_double(pr.outputs[0][1].eval(point)), d1, 1e-5);
  EXPECT_NEAR(to_double(pr.outputs[0][2].eval(point)), d2, 1e-4);
}

TEST(Prolongation, SelectOrdersPicksSmallestSquareOrder) {
  EXPECT_EQ(select_orders(parse_model(kToy), 4), (std::vector<int>{1}));
  EXPECT_THROW(select_orders(parse_model(kToy), 1), OrderSelectionError);
  Model cascade = parse_model(kModels[3].text);
  auto o = select_orders(cascade, 11);
  EXPECT_EQ(o.size(), 2u);
  EXPECT_TRUE(build_square_system(cascade, generic_derivatives(cascade, o, 0), o).square);
}

TEST(Prolongation, OverAndUnderdeterminedOrdersAreRejected) {
  Model m = parse_model(kToy);
  std::vector<int> zero{0};
  EXPECT_THROW(build_square_system(m, {{Rat(2)}}, zero), OrderSelectionError);
  std::vector<int> two{2};
  EXPECT_THROW(build_square_system(m, {{Rat(2), Rat(1)}}, two), OrderSelectionError);
  std::vector<int> wrong{1, 1};
  EXPECT_THROW(lie_prolong(m, wrong), OrderSelectionError);
}

TEST(Prolongation, KnownPinsRequireExpansionAtZero) {
  Model m = parse_model(kModels[6].text);
  auto o = select_orders(m, 21);
  auto d = generic_derivatives(m, o, 0);
  EXPECT_NO_THROW(build_square_system(m, d, o, 0));
  EXPECT_THROW(build_square_system(m, d, o, make_rat(1, 2)), SemanticError);
}

TEST(Prolongation, NameCollisionsAreReported) {
  Model m = parse_model("states: x\nparams: x_1\ndynamics:\n  x' = -x_1*x\noutputs:\n  y = x\n");
  std::vector<int> o{1};
  EXPECT_THROW(lie_prolong(m, o), SemanticError);
}

TEST(Bezout, MultisetProductsAndFactoredForm) {
  auto multiset = [](std::initializer_list<std::pair<int, int>> counts) {
    std::vector<int> d;
    for (auto [deg, count] : counts) d.insert(d.end(), static_cast<std::size_t>(count), deg);
    return d;
  };
  struct Case {
    std::vector<int> degrees;
    std::string factored;
  } cases[] = {
      {multiset({{2, 5}, {3, 20}, {1, 18}}), "2^5 * 3^20"},
      {multiset({{2, 13}, {3, 16}, {1, 14}}), "2^13 * 3^16"},
      {multiset({{2, 23}, {3, 11}, {1, 9}}), "2^23 * 3^11"},
  };
  for (const auto& c : cases) {
    auto b = bezout_bound(c.degrees);
    EXPECT_EQ(b.factored(), c.factored);
    Int expect = 1;
    for (int d : c.degrees) expect *= d;
    EXPECT_EQ(b.value, expect);
  }
  std::vector<int> linear{1, 1, 1};
  EXPECT_EQ(bezout_bound(linear).factored(), "1");
  std::vector<int> mixed{6, 4, 5};
  EXPECT_EQ(bezout_bound(mixed).factored(), "2^3 * 3 * 5");
}

TEST(Bezout, InvariantUnderPermutation) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> deg(1, 7);
  for (int k = 0; k < 50; ++k) {
    std::vector<int> d(8);
    for (auto& x : d) x = deg(rng);
    auto b = bezout_bound(d);
    std::shuffle(d.begin(), d.end(), rng);
    EXPECT_EQ(bezout_bound(d).value, b.value);
    EXPECT_EQ(bezout_bound(d).factored(), b.factored());
  }
}

TEST(SystemText, WriteReadRoundTrip) {
  Model m = parse_model(kModels[4].text);
  auto o = select_orders(m, 11);
  auto sys = build_square_system(m, generic_derivatives(m, o, 0), o);
  auto again = read_system(write_system(sys));
  EXPECT_EQ(again.registry->names(), sys.registry->names());
  ASSERT_EQ(again.equations.size(), sys.equations.size());
  for (std::size_t i = 0; i < sys.equations.size(); ++i)
    EXPECT_EQ(again.equations[i].to_string(), sys.equations[i].to_string());
  EXPECT_EQ(write_system(again), write_system(sys));
}

TEST(SystemText, EquationsAndInferredUnknowns) {
  auto sys = read_system("x^2 + y = 3\n# comment\ny - 2*x = 0\n");
  EXPECT_EQ(sys.registry->names(), (std::vector<std::string>{"x", "y"}));
  std::vector<Rat> pt{Rat(1), Rat(2)};
  for (const auto& e : sys.equations) EXPECT_EQ(e.eval(pt), 0);
  EXPECT_THROW(read_system("x/y = 1\n"), ParseError);
  EXPECT_THROW(read_system("# nothing\n"), ParseError);
  auto sci = read_system("x - 1e-3\n");
  EXPECT_EQ(sci.registry->names(), (std::vector<std::string>{"x"}));
}

#include <gtest/gtest.h>

#include <random>

#include "paramcert/paramcert.hpp"
#include "support/oracles.hpp"

using namespace paramcert;

namespace {

// Exactly one distinct root of f inside each interval (Sturm oracle), intervals disjoint and sorted.
void expect_isolation(const UPoly& f, const std::vector<IsolatingInterval>& roots, const Rat& maxwidth) {
  UPoly g = f / gcd(f, f.derivative());
  ASSERT_EQ(static_cast<int>(roots.size()), oracle::sturm_count_all(g)) << f;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const auto& iv = roots[i];
    EXPECT_LE(iv.width(), maxwidth);
    if (iv.exact) {
      EXPECT_EQ(iv.lo, iv.hi);
      EXPECT_EQ(f.eval(iv.lo), 0);
    } else {
      ASSERT_NE(g.eval(iv.lo), 0);
      ASSERT_NE(g.eval(iv.hi), 0);
      EXPECT_EQ(oracle::sturm_count(g, iv.lo, iv.hi), 1) << f << " on [" << iv.lo << ", " << iv.hi << "]";
    }
    if (i > 0) {
      EXPECT_LT(roots[i - 1].hi, iv.lo);
    }
  }
}

}  // namespace

TEST(Isolate, AgreesWithSturmOnRandomPolynomials) {
  std::mt19937_64 rng(41);
  Rat w = make_rat(1, 1 << 20);
  for (int k = 0; k < 200; ++k) {
    UPoly f = oracle::random_upoly(rng, 12);
    expect_isolation(f, isolate_real_roots(f, w), w);
  }
}

TEST(Isolate, RationalRootsAndMultiplicities) {
  // (T - 1)^3 (T + 1/2)^2 (T - 7/3)
  UPoly f = UPoly::linear_root(1) * UPoly::linear_root(1) * UPoly::linear_root(1) *
            UPoly::linear_root(make_rat(-1, 2)) * UPoly::linear_root(make_rat(-1, 2)) *
            UPoly::linear_root(make_rat(7, 3));
  Rat w = make_rat(1, 1000);
  auto roots = isolate_real_roots(f, w);
  expect_isolation(f, roots, w);
  ASSERT_EQ(roots.size(), 3u);
  Rat expect[] = {make_rat(-1, 2), Rat(1), make_rat(7, 3)};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(roots[i].as_interval().contains(expect[i]));
}

TEST(Isolate, NoRealRoots) {
  UPoly f{Rat(1), Rat(0), Rat(1)};
  EXPECT_TRUE(isolate_real_roots(f, Rat(1)).empty());
  EXPECT_TRUE(isolate_real_roots(UPoly::constant(3), Rat(1)).empty());
  EXPECT_THROW(isolate_real_roots(UPoly(), Rat(1)), StructuralError);
}

TEST(Isolate, ClusteredRootsSeparate) {
  UPoly f = UPoly::linear_root(make_rat(1, 1000)) * UPoly::linear_root(make_rat(2, 1000)) *
            UPoly::linear_root(make_rat(3, 1000)) * UPoly{Rat(-2), Rat(0), Rat(1)};
  Rat w = make_rat(1, 1 << 30);
  auto roots = isolate_real_roots(f, w);
  expect_isolation(f, roots, w);
  EXPECT_EQ(roots.size(), 5u);
}

TEST(Isolate, WilkinsonTen) {
  UPoly f = UPoly::constant(1);
  for (int k = 1; k <= 10; ++k) f = f * UPoly::linear_root(k);
  auto roots = isolate_real_roots(f, make_rat(1, 1 << 10));
  expect_isolation(f, roots, make_rat(1, 1 << 10));
  ASSERT_EQ(roots.size(), 10u);
  for (int k = 0; k < 10; ++k) EXPECT_TRUE(roots[static_cast<std::size_t>(k)].as_interval().contains(k + 1));
}

TEST(Isolate, RefinementKeepsTheRoot) {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 50; ++k) {
    UPoly f = oracle::random_upoly(rng, 9);
    UPoly g = f / gcd(f, f.derivative());
    for (const auto& iv : isolate_real_roots(f, Rat(1))) {
      Rat eps = make_rat(1, Int(1) << 40);
      auto r = refine(f, iv, eps);
      EXPECT_LE(r.width(), eps);
      EXPECT_GE(r.lo, iv.lo);
      EXPECT_LE(r.hi, iv.hi);
      if (r.exact)
        EXPECT_EQ(f.eval(r.lo), 0);
      else
        EXPECT_EQ(oracle::sturm_count(g, r.lo, r.hi), 1);
    }
  }
}

TEST(Isolate, SqrtTwoBracket) {
  UPoly f{Rat(-2), Rat(0), Rat(1)};
  auto roots = isolate_real_roots(f, make_rat(1, 1000000));
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(to_double(roots[1].lo), 1.41421356, 1e-6);
  EXPECT_LT(roots[1].lo * roots[1].lo, 2);
  EXPECT_GT(roots[1].hi * roots[1].hi, 2);
}

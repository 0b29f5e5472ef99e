#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "herglotz/errors.hpp"
#include "herglotz/expr.hpp"
#include "herglotz/parse.hpp"
#include "support/models.hpp"
#include "support/oracles.hpp"
#include "support/random_models.hpp"

using namespace herglotz;
using models::P;

namespace {

const Coordinate q00 = Coordinate::jet(0, 0);
const Coordinate q01 = Coordinate::jet(0, 1);
const Coordinate q02 = Coordinate::jet(0, 2);

Point random_point(const std::set<Coordinate>& coords, std::mt19937_64& rng, double box = 1.0) {
  std::uniform_real_distribution<double> u(-box, box);
  Point p;
  for (const auto& c : coords) p[c] = u(rng);
  return p;
}

}  // namespace

TEST(Parse, DampedPaisUhlenbeckLagrangian) {
  const auto ctx = ParseContext::lagrangian(1, 2, {"w", "lam", "gam"});
  const Expr L = parse("0.5*(q0_1^2 - w^2*q0_0^2 - lam*q0_2^2) - gam*z", ctx);
  const Expr exact = parse("(q0_1^2 - w^2*q0_0^2 - lam*q0_2^2)/2 - gam*z", ctx);
  EXPECT_TRUE(equivalent(L, exact));
  const auto fc = free_coordinates(L);
  EXPECT_TRUE(fc.count(Coordinate::z()));
  EXPECT_TRUE(fc.count(q02));
  EXPECT_TRUE(fc.count(Coordinate::param("lam")));
}

TEST(Parse, SingleZ) {
  const Expr e = parse("z", ParseContext::lagrangian(1, 1, {}));
  EXPECT_TRUE(equivalent(e, Expr::z()));
  EXPECT_EQ(render(e), "z");
}

TEST(Parse, OrderBoundIsEnforced) {
  EXPECT_THROW(parse("q0_3", ParseContext::lagrangian(1, 2, {})), OrderOutOfRange);
  EXPECT_THROW(parse("q1_0", ParseContext::lagrangian(1, 2, {})), UnknownVariable);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse("q0_1 +", ParseContext::lagrangian(1, 1, {})), SyntaxError);
  EXPECT_THROW(parse("(q0_1", ParseContext::lagrangian(1, 1, {})), SyntaxError);
  EXPECT_THROW(parse("mass*q0_1", ParseContext::lagrangian(1, 1, {})), UnknownVariable);
  EXPECT_THROW(parse("p0_0", ParseContext::lagrangian(1, 1, {})), UnknownVariable);
  try {
    parse("q0_1 * * 2", ParseContext::lagrangian(1, 1, {}));
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 7u);
  }
}

TEST(Parse, IntegersStayExact) {
  const Expr e = simplify(P("1/3 + 1/6"));
  EXPECT_EQ(render(e), "1/2");
  const Expr r = simplify(P("0.5 + 0.25"));
  EXPECT_NEAR(evaluate(r, {}), 0.75, 0);
}

TEST(Parse, PrecedenceAndUnaryMinus) {
  EXPECT_DOUBLE_EQ(evaluate(P("-2^2"), {}), -4.0);
  EXPECT_DOUBLE_EQ(evaluate(P("2^3^2"), {}), 512.0);
  EXPECT_DOUBLE_EQ(evaluate(P("1 - 2 - 3"), {}), -4.0);
  EXPECT_DOUBLE_EQ(evaluate(P("8/2/2"), {}), 2.0);
}

TEST(Differentiate, Basics) {
  EXPECT_TRUE(equivalent(differentiate(P("q0_1^2/2"), q01), P("q0_1")));
  EXPECT_TRUE(equivalent(differentiate(P("-gam*z"), Coordinate::z()), P("-gam")));
  EXPECT_TRUE(equivalent(differentiate(P("sin(q0_0)"), q00), P("cos(q0_0)")));
  EXPECT_TRUE(equivalent(differentiate(P("exp(2*q0_0)"), q00), P("2*exp(2*q0_0)")));
  EXPECT_TRUE(equivalent(differentiate(P("log(q0_0)"), q00), P("1/q0_0"), {.fixed = {{q00, 0.7}}}));
  EXPECT_TRUE(is_zero_expr(differentiate(P("q0_1"), q00)));
}

TEST(Evaluate, Values) {
  EXPECT_DOUBLE_EQ(evaluate(P("q0_1^2"), {{q01, 3.0}}), 9.0);
  EXPECT_THROW(evaluate(P("q0_0 + z"), {{q00, 1.0}}), UnboundCoordinate);
  // hand arithmetic: (0 - 4*1 - 0)/2 - 0
  const Point pt = {{q00, 1.0},
                    {q01, 0.0},
                    {q02, 0.0},
                    {Coordinate::z(), 0.0},
                    {Coordinate::param("w"), 2.0},
                    {Coordinate::param("lam"), 1.0},
                    {Coordinate::param("gam"), 0.1}};
  EXPECT_DOUBLE_EQ(evaluate(P("0.5*(q0_1^2 - w^2*q0_0^2 - lam*q0_2^2) - gam*z"), pt), -2.0);
  EXPECT_THROW(evaluate(P("log(q0_0)"), {{q00, -1.0}}), DomainError);
}

TEST(Substitute, Cases) {
  const Bindings b = {{Coordinate::momentum(0, 0), P("-lam*q0_2")}};
  EXPECT_TRUE(equivalent(substitute(P("p0_0 + q0_1"), b), P("q0_1 - lam*q0_2")));
  const Expr x = P("q0_0*z + 1");
  EXPECT_EQ(render(substitute(x, {})), render(simplify(x)));
  EXPECT_TRUE(equivalent(substitute(P("q0_1^2"), {{q01, P("q0_2 + 1")}}), P("q0_2^2 + 2*q0_2 + 1")));
}

TEST(Equivalent, Cases) {
  EXPECT_TRUE(equivalent(P("(q0_1+1)^2"), P("q0_1^2+2*q0_1+1")));
  EXPECT_FALSE(equivalent(P("q0_1"), P("q0_1 + 0.001"), 20, 1e-9));
  EXPECT_EQ(check_equivalent(P("sin(q0_0)^2 + cos(q0_0)^2"), P("1")), Equivalence::Equivalent);
  EXPECT_EQ(check_equivalent(P("q0_0"), P("q0_1")), Equivalence::NotEquivalent);
}

TEST(Equivalent, K2ExpansionMatchesMachineryForPU) {
  const auto m = models::pais_uhlenbeck();
  const Expr oracle = oracle::k2_expanded(m, 0);
  const Expr expected = P("-(lam*q0_4 + 2*gam*lam*q0_3 + (1 + lam*gam^2)*q0_2 + gam*q0_1 + w^2*q0_0)");
  EXPECT_TRUE(equivalent(oracle, expected));
}

TEST(AffineIn, SplitsLinearPart) {
  const auto parts = affine_in(P("3*q0_2*z + q0_1 - 2"), q02);
  ASSERT_TRUE(parts.has_value());
  EXPECT_TRUE(equivalent(parts->first, P("3*z")));
  EXPECT_TRUE(equivalent(parts->second, P("q0_1 - 2")));
  EXPECT_FALSE(affine_in(P("q0_2^2"), q02).has_value());
}

TEST(Render, RoundTripsThroughParser) {
  std::mt19937_64 rng(7);
  const std::vector<Expr> atoms = {Expr::jet(0, 0), Expr::jet(0, 1), Expr::z(), Expr::param("a")};
  for (int c = 0; c < 50; ++c) {
    const Expr e = simplify(testgen::random_expr(atoms, rng));
    const Expr back = P(render(e));
    EXPECT_TRUE(equivalent(e, back, {.trials = 10, .tol = 1e-9, .seed = 1, .box = 0.8, .fixed = {}})) << render(e);
  }
}

// ---- properties -------------------------------------------------------------

TEST(Property, SimplifyIsIdempotent) {
  std::mt19937_64 rng(11);
  const std::vector<Expr> atoms = {Expr::jet(0, 0), Expr::jet(1, 1), Expr::z(), Expr::param("g")};
  int cases = 0;
  for (; cases < 60; ++cases) {
    const Expr once = simplify(testgen::random_expr(atoms, rng, 4));
    const Expr twice = simplify(once);
    ASSERT_EQ(render(once), render(twice));
  }
  EXPECT_GE(cases, 50);
}

TEST(Property, SimplifyPreservesValue) {
  std::mt19937_64 rng(12);
  const std::vector<Expr> atoms = {Expr::jet(0, 0), Expr::jet(0, 1), Expr::z()};
  for (int c = 0; c < 60; ++c) {
    const Expr raw = testgen::random_expr(atoms, rng, 3);
    const Expr s = simplify(raw);
    const Point pt = random_point({q00, q01, Coordinate::z()}, rng, 0.8);
    double a = 0.0, b = 0.0;
    try {
      a = evaluate(raw, pt);
      b = evaluate(s, pt);
    } catch (const DomainError&) {
      continue;
    }
    EXPECT_NEAR(a, b, 1e-9 * (1.0 + std::abs(a))) << render(raw);
  }
}

TEST(Property, DifferentiateMatchesFiniteDifference) {
  std::mt19937_64 rng(13);
  const std::vector<Expr> atoms = {Expr::jet(0, 0), Expr::jet(0, 1), Expr::z()};
  const std::vector<Coordinate> wrt = {q00, q01, Coordinate::z()};
  int checked = 0;
  for (int c = 0; c < 80 && checked < 60; ++c) {
    const Expr e = testgen::random_expr(atoms, rng, 3);
    const Coordinate x = wrt[static_cast<std::size_t>(c) % wrt.size()];
    const Expr de = differentiate(e, x);
    Point pt = random_point({q00, q01, Coordinate::z()}, rng, 0.7);
    auto f = [&](double v) {
      Point p = pt;
      p[x] = v;
      return evaluate(e, p);
    };
    double exact = 0.0, fd = 0.0;
    try {
      exact = evaluate(de, pt);
      fd = oracle::central_difference(f, pt[x], 1e-4);
    } catch (const DomainError&) {
      continue;
    }
    ++checked;
    EXPECT_NEAR(exact, fd, 1e-6 * (1.0 + std::abs(exact))) << render(e) << " d/d" << x.render();
  }
  EXPECT_GE(checked, 50);
}

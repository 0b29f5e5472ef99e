#include <gtest/gtest.h>

#include <random>

#include "herglotz/errors.hpp"
#include "herglotz/hamiltonian.hpp"
#include "herglotz/lagrangian.hpp"
#include "support/models.hpp"
#include "support/random_models.hpp"

using namespace herglotz;
using models::P;

namespace {

Coordinate q(int i, int a) { return Coordinate::jet(i, a); }
Coordinate p(int r, int i) { return Coordinate::momentum(r, i); }

bool same(const Expr& a, const Expr& b) {
  EquivalenceOptions o;
  o.fixed = {{Coordinate::param("lam"), 0.7}, {Coordinate::param("m"), 1.3}};
  return equivalent(a, b, o);
}

}  // namespace

TEST(Hamiltonian, Space) {
  const auto s = hamiltonian_space(1, 2);
  ASSERT_EQ(s.size(), 5u);
  EXPECT_EQ(s.back(), Coordinate::z());
}

TEST(Legendre, PaisUhlenbeckInverse) {
  const auto leg = legendre(models::pais_uhlenbeck());
  ASSERT_EQ(leg.inverse_kind(), LegendreMap::InverseKind::Symbolic);
  EXPECT_TRUE(same(leg.inverse().at(q(0, 2)), P("-p1_0/lam")));
  EXPECT_TRUE(same(leg.inverse().at(q(0, 3)), P("(p0_0 - q0_1 + gam*p1_0)/lam")));
  const auto k1 = legendre(models::damped_oscillator());
  EXPECT_TRUE(equivalent(k1.inverse().at(q(0, 1)), P("p0_0")));
}

TEST(Legendre, SingularModelsThrow) {
  EXPECT_THROW(legendre(models::singular_az()), NotInvertible);
  EXPECT_THROW(legendre(models::make(1, 1, "q0_1*q0_0 - q0_0^2", {})), NotInvertible);
}

TEST(Legendre, NewtonInverseRoundTrip) {
  // quartic in the velocity: no symbolic inverse, Newton must recover it
  const auto m = models::make(1, 1, "q0_1^2/2 + q0_1^4/12 - q0_0^2/2 - z/10", {});
  const auto leg = legendre(m);
  const Point x = {{q(0, 0), 0.3}, {q(0, 1), -0.8}, {Coordinate::z(), 0.2}};
  const Point y = leg.apply(x);
  const Point back = leg.invert(y);
  EXPECT_NEAR(back.at(q(0, 1)), -0.8, 1e-10);
}

TEST(Hamiltonian, KnownCases) {
  EXPECT_TRUE(equivalent(hamiltonian(models::damped_oscillator()), P("p0_0^2/2 + w^2*q0_0^2/2 + gam*z")));
  EXPECT_TRUE(same(hamiltonian(models::pais_uhlenbeck()),
                   P("p0_0*q0_1 - p1_0^2/(2*lam) - q0_1^2/2 + w^2*q0_0^2/2 + gam*z")));
  EXPECT_THROW(hamiltonian(models::make(1, 1, "q0_1*q0_0", {})), NotInvertible);
}

TEST(Hamiltonian, PullbackIsEnergy) {
  for (const auto& m : {models::pais_uhlenbeck(), models::damped_oscillator(), models::electron()}) {
    const auto leg = legendre(m);
    EXPECT_TRUE(same(substitute(hamiltonian(m, leg), leg.forward()), energy(m)));
  }
}

TEST(HamiltonField, BundledModels) {
  const auto pu = models::pais_uhlenbeck();
  const auto X = hamiltonian_vector_field(hamiltonian(pu), 1, 2);
  EXPECT_TRUE(same(X.component(q(0, 0)), P("q0_1")));
  EXPECT_TRUE(same(X.component(q(0, 1)), P("-p1_0/lam")));
  EXPECT_TRUE(same(X.component(p(0, 0)), P("-(w^2*q0_0 + gam*p0_0)")));
  EXPECT_TRUE(same(X.component(p(1, 0)), P("q0_1 - p0_0 - gam*p1_0")));
  EXPECT_TRUE(same(X.component(Coordinate::z()), P("(q0_1^2 - w^2*q0_0^2 - p1_0^2/lam)/2 - gam*z")));

  const auto d = hamiltonian_vector_field(hamiltonian(models::damped_oscillator()), 1, 1);
  EXPECT_TRUE(equivalent(d.component(q(0, 0)), P("p0_0")));
  EXPECT_TRUE(equivalent(d.component(p(0, 0)), P("-w^2*q0_0 - gam*p0_0")));
  EXPECT_TRUE(equivalent(d.component(Coordinate::z()), P("p0_0^2/2 - w^2*q0_0^2/2 - gam*z")));

  const auto c = hamiltonian_vector_field(P("c"), 1, 1);
  EXPECT_TRUE(is_zero_expr(c.component(q(0, 0))));
  EXPECT_TRUE(is_zero_expr(c.component(p(0, 0))));
  EXPECT_TRUE(equivalent(c.component(Coordinate::z()), P("-c")));
}

TEST(HamiltonField, PushforwardOfLagrangianField) {
  // Leg_* X_L = X_H at random points, via a numeric Jacobian of Leg
  std::mt19937_64 rng(31);
  for (int c = 0; c < 5; ++c) {
    const auto m = testgen::random_regular(1 + c % 2, 1 + c % 2, rng);
    const auto leg = legendre(m);
    const auto XL = lagrangian_vector_field(m);
    const auto XH = hamiltonian_vector_field(hamiltonian(m, leg), m.n(), m.k());
    for (int s = 0; s < 4; ++s) {
      const Point x = random_state(m, 2 * m.k() - 1, rng, 0.5);
      const Point v = XL.evaluate(x);
      const Point y = leg.apply(x);
      const double h = 1e-6;
      Point xp = x, xm = x;
      for (const auto& [cc, vv] : v) {
        xp[cc] += h * vv;
        xm[cc] -= h * vv;
      }
      const Point yp = leg.apply(xp), ym = leg.apply(xm);
      const Point w = XH.evaluate(y);
      for (const auto& cc : hamiltonian_space(m.n(), m.k())) {
        EXPECT_NEAR((yp.at(cc) - ym.at(cc)) / (2 * h), w.at(cc), 1e-6 * (1 + std::abs(w.at(cc)))) << cc.render();
      }
    }
  }
}

TEST(CanonicalForm, Coefficients) {
  const auto eta = canonical_contact_form(1, 2);
  EXPECT_TRUE(equivalent(eta.dz(), P("1")));
  EXPECT_TRUE(equivalent(eta.at(q(0, 0)), P("-p0_0")));
  EXPECT_TRUE(equivalent(eta.at(q(0, 1)), P("-p1_0")));
}

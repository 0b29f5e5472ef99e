#include <gtest/gtest.h>

#include <algorithm>

#include "herglotz/errors.hpp"
#include "herglotz/lagrangian.hpp"
#include "herglotz/verify.hpp"
#include "support/models.hpp"

using namespace herglotz;

namespace {

Trajectory rk4(const ContactLagrangian& m, std::vector<double> x0, double t1, double h = 1e-3) {
  IntegrateOptions o;
  o.h = h;
  o.estimate_error = true;
  return integrate(NumericField(lagrangian_vector_field(m), m.parameter_point()), x0, 0.0, t1, o);
}

const CheckReport& find(const std::vector<CheckReport>& rs, const std::string& name) {
  const auto it = std::find_if(rs.begin(), rs.end(), [&](const auto& r) { return r.name == name; });
  if (it == rs.end()) throw std::runtime_error("missing report " + name);
  return *it;
}

std::string failures(const std::vector<CheckReport>& rs) {
  std::string s;
  for (const auto& r : rs)
    if (!r.pass) s += r.name + " " + std::to_string(r.max_residual) + "; ";
  return s;
}

}  // namespace

TEST(Report, PassRule) {
  EXPECT_TRUE(make_report("a", "x", 1e-10, 1e-9).pass);
  EXPECT_FALSE(make_report("a", "x", 1e-8, 1e-9).pass);
  EXPECT_FALSE(make_report("a", "x", std::nan(""), 1e-9).pass);
  EXPECT_TRUE(all_pass({}));
}

TEST(Contact, RegularModelsPass) {
  for (const auto& m : {models::pais_uhlenbeck(), models::damped_oscillator(), models::electron()}) {
    const auto rs = check_contact(m);
    EXPECT_TRUE(all_pass(rs)) << render(m.L()) << ": " << failures(rs);
    EXPECT_NO_THROW(find(rs, "nondegeneracy"));
  }
}

TEST(Contact, SingularModelThrows) {
  EXPECT_THROW(check_contact(models::singular_az()), SingularLagrangian);
}

TEST(Dissipation, PaisUhlenbeck) {
  const auto m = models::pais_uhlenbeck();
  const auto tr = rk4(m, {1.0, 0.0, 0.0, 0.0, 0.0}, 10.0);
  const auto rs = check_dissipation(m, tr);
  EXPECT_TRUE(all_pass(rs)) << failures(rs);
  EXPECT_LE(dissipation_residual(m, tr), 1e-5);
}

TEST(Dissipation, ConservativeLimitConservesEnergy) {
  const auto m = models::pais_uhlenbeck(1.0, 0.1, 0.0);
  const auto tr = rk4(m, {1.0, 0.0, 0.0, 0.0, 0.0}, 10.0);
  const auto rs = check_dissipation(m, tr);
  EXPECT_TRUE(all_pass(rs)) << failures(rs);
  EXPECT_LE(find(rs, "energy_conservation").max_residual, 1e-8);
}

TEST(Dissipation, WrongTrajectoryIsCaught) {
  // a trajectory of a different damping rate must violate the law
  const auto m = models::pais_uhlenbeck(1.0, 0.1, 0.2);
  const auto tr = rk4(models::pais_uhlenbeck(1.0, 0.1, 0.25), {1.0, 0.0, 0.0, 0.0, 0.0}, 5.0);
  EXPECT_FALSE(all_pass(check_dissipation(m, tr)));
}

TEST(Dissipation, NonUniformGridRejected) {
  const auto m = models::damped_oscillator();
  auto tr = rk4(m, {1.0, 0.0, 0.0}, 0.01);
  tr.times[3] += 1e-4;
  EXPECT_THROW(check_dissipation(m, tr), EvalError);
}

TEST(Equivalence, PaisUhlenbeck) {
  const auto rs = check_equivalence(models::pais_uhlenbeck());
  EXPECT_TRUE(all_pass(rs)) << failures(rs);
  EXPECT_NO_THROW(find(rs, "legendre_pullback"));
  EXPECT_NO_THROW(find(rs, "pushforward"));
  EXPECT_NO_THROW(find(rs, "trajectory_correspondence"));
  EXPECT_NO_THROW(find(rs, "bridge_total_derivative"));
}

TEST(Equivalence, ElectronBridge) {
  const auto rs = check_equivalence(models::electron());
  EXPECT_TRUE(all_pass(rs)) << failures(rs);
  EXPECT_EQ(find(rs, "bridge_total_derivative").max_residual, 0.0);
  EXPECT_EQ(find(rs, "bridge_lagrange_differential").max_residual, 0.0);
}

TEST(Equivalence, NoBridgeWhenDissipationDependsOnState) {
  const auto m = models::make(1, 1, "q0_1^2/2 - q0_0^2/2 - q0_0*z/5", {});
  const auto rs = check_equivalence(m);
  EXPECT_TRUE(all_pass(rs)) << failures(rs);
  EXPECT_THROW(find(rs, "bridge_total_derivative"), std::runtime_error);
}

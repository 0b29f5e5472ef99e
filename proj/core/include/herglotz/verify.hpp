#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "herglotz/dynamics.hpp"
#include "herglotz/model.hpp"

namespace herglotz {

struct CheckReport {
  std::string name;
  std::string where;  // sample description or trajectory id
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

CheckReport make_report(std::string name, std::string where, double residual, double tolerance,
                        std::string detail = {});
bool all_pass(const std::vector<CheckReport>& reports);

struct CheckOptions {
  int samples = 20;
  std::uint64_t seed = 0xC0FFEE;
  double tol = 1e-9;           // pointwise identities
  double nondegenerate_floor = 1e-10;
  double pushforward_tol = 1e-8;
  double trajectory_tol = 1e-6;
  double trajectory_t1 = 1.0;
  double step = 1e-3;
  int bridge_functions = 10;
};

/// Reeb contractions and nondegeneracy of eta_L at sample points.
/// Throws SingularLagrangian.
std::vector<CheckReport> check_contact(const ContactLagrangian& m, const CheckOptions& opts = {});

/// Energy dissipation law, contact Hamiltonian identity, the z equation and
/// the Reeb energy identity along a Lagrangian-side trajectory.
std::vector<CheckReport> check_dissipation(const ContactLagrangian& m, const Trajectory& traj,
                                           const CheckOptions& opts = {});

/// H o Leg = E_L, Leg_* X_L = X_H, trajectory correspondence and, when
/// dL/dz is constant, the exponential bridge to the Tulczyjew derivative.
std::vector<CheckReport> check_equivalence(const ContactLagrangian& m, const CheckOptions& opts = {});

/// Max over the grid of |dE/dt + R(E) E| with a five-point difference of E.
/// Exposed for tests.
double dissipation_residual(const ContactLagrangian& m, const Trajectory& traj);

}  // namespace herglotz

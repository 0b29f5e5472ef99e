#pragma once

#include <optional>
#include <vector>

#include "herglotz/expr.hpp"
#include "herglotz/forms.hpp"
#include "herglotz/model.hpp"

namespace herglotz {

/// Lagrangian total derivative
///   D_L F = sum q(i,a+1) dF/dq(i,a) + L dF/dz - (dL/dz) F
/// summing over the jet orders present in F. Throws OrderOverflow when the
/// result would need jets above `max_order` (default 2k-1).
Expr apply_DL(const ContactLagrangian& m, const Expr& F, int max_order = -1);
/// D_L applied `times` times.
Expr apply_DL_power(const ContactLagrangian& m, const Expr& F, int times, int max_order = -1);

/// p[r][i], r = 0..k-1.
using MomentaTable = std::vector<std::vector<Expr>>;

/// Momenta from the top level down: p[k-1] = dL/dq_k, p[r] = dL/dq_{r+1} - D_L p[r+1].
MomentaTable momenta(const ContactLagrangian& m);
/// Momenta from the alternating sum p[r-1] = sum_a (-1)^a D_L^a(dL/dq_{r+a}).
MomentaTable momenta_direct(const ContactLagrangian& m);

/// E_L = sum p[a][i] q(i,a+1) - L. Cross-checked against the double-sum
/// formula; throws Error if the two disagree.
Expr energy(const ContactLagrangian& m);
Expr energy_direct(const ContactLagrangian& m);

struct LagrangianForms {
  std::vector<Coordinate> space;  // q(., 0..2k-1), z
  OneForm theta;
  TwoForm omega;  // -d theta, which is also d eta
  OneForm eta;
};

/// theta, omega = -d theta, eta = dz - theta. The omega coefficients are
/// spot-checked against the iterated D_L construction at one point.
LagrangianForms forms(const ContactLagrangian& m);

/// Component i: sum_a (-1)^a D_L^a(dL/dq(i,a)); jets up to order 2k.
std::vector<Expr> herglotz_equations(const ContactLagrangian& m);

/// Holonomic field on T^{2k-1}Q x R solving the Herglotz equations for the
/// top jets. Symbolic for n = 1, an implicit block otherwise.
/// Throws SingularLagrangian.
VectorFieldSym lagrangian_vector_field(const ContactLagrangian& m);

/// Reeb field of eta_L, fixed by R(p[r][i]) = 0 for every level and
/// dz-component 1. The contractions i(R)eta = 1 and i(R)d eta = 0 are
/// checked at 10 points. Throws SingularLagrangian.
VectorFieldSym reeb_field(const ContactLagrangian& m);

/// Tulczyjew total derivative sum q(i,a+1) dF/dq(i,a), plus dF/dt when a
/// time parameter is given. Throws ZDependence if F contains z.
Expr tulczyjew_dT(const Expr& F, int n, const std::optional<Coordinate>& time = std::nullopt);

/// Classical Lagrange differential of a z-free Lagrangian of order k.
std::vector<Expr> lagrange_differential(const Expr& L0, int n, int k);

/// Coordinates q(., 0..2k-1), z.
std::vector<Coordinate> lagrangian_space(const ContactLagrangian& m);

}  // namespace herglotz

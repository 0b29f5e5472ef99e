#pragma once

#include <map>
#include <optional>
#include <vector>

#include "herglotz/compiled.hpp"
#include "herglotz/expr.hpp"
#include "herglotz/forms.hpp"
#include "herglotz/lagrangian.hpp"
#include "herglotz/model.hpp"

namespace herglotz {

/// Coordinates of T*(T^{k-1}Q) x R: q(., 0..k-1), p(0..k-1, .), z.
std::vector<Coordinate> hamiltonian_space(int n, int k);

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 50;
};

/// Generalized Legendre map and its inverse on the top jets.
class LegendreMap {
 public:
  enum class InverseKind { Symbolic, NumericNewton };

  /// Leg^* of each Hamiltonian coordinate.
  const Bindings& forward() const noexcept { return forward_; }
  InverseKind inverse_kind() const noexcept { return kind_; }
  /// q(i, b) for b = k..2k-1 in Hamiltonian coordinates (Symbolic only).
  const Bindings& inverse() const;

  /// Image of a Lagrangian-side state (jets up to 2k-1, z, parameters).
  Point apply(const Point& lagrangian_state) const;
  /// Lagrangian-side state (jets up to 2k-1, z) for a Hamiltonian-side one.
  /// Throws NotInvertible if Newton fails to converge.
  Point invert(const Point& hamiltonian_state, const NewtonOptions& opts = {}) const;

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }

 private:
  friend LegendreMap legendre(const ContactLagrangian& m);

  int n_ = 1;
  int k_ = 1;
  Bindings forward_;
  InverseKind kind_ = InverseKind::NumericNewton;
  Bindings inverse_;
  // Newton data: residual p_hat - p and its Jacobian in the top jets.
  std::vector<Coordinate> unknowns_;
  std::vector<Coordinate> residual_momenta_;
  std::vector<Expr> residual_exprs_;
  std::vector<Expr> jacobian_;  // row-major
};

/// Throws NotInvertible for singular models.
LegendreMap legendre(const ContactLagrangian& m);

/// H = sum p(a,i) q(i,a+1) - L, with velocities from the symbolic inverse.
/// Checks H o Leg == E_L. Throws NotInvertible.
Expr hamiltonian(const ContactLagrangian& m);
Expr hamiltonian(const ContactLagrangian& m, const LegendreMap& leg);

/// Contact Hamilton equations on T*(T^{k-1}Q) x R.
VectorFieldSym hamiltonian_vector_field(const Expr& H, int n, int k);

/// eta = dz - sum p(a,i) dq(i,a).
OneForm canonical_contact_form(int n, int k);

}  // namespace herglotz

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "herglotz/expr.hpp"

namespace herglotz {

using ParamValues = std::map<std::string, double>;

/// Jet coordinates q(i, a) for a = 0..order, order-major then dof.
std::vector<Coordinate> jet_coordinates(int n, int order);

/// A contact Lagrangian of order k in n degrees of freedom.
///
/// L stays symbolic in its parameters; parameter values are bound only for
/// numeric work.
class ContactLagrangian {
 public:
  ContactLagrangian(int n, int k, Expr lagrangian, ParamValues params = {});

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  const Expr& L() const noexcept { return L_; }
  const ParamValues& params() const noexcept { return params_; }

  /// Parameter names occurring in L.
  std::set<std::string> referenced_params() const;
  /// Param coordinates with their bound values. Throws UnboundCoordinate if
  /// L references a parameter without a value.
  Point parameter_point() const;

  /// A copy with L replaced (same n, k, params).
  ContactLagrangian with_lagrangian(Expr lagrangian) const;
  /// A copy with some parameter values overridden.
  ContactLagrangian with_params(const ParamValues& overrides) const;

  /// dL/dc. First partials in jets and z are computed once at construction.
  Expr partial(const Coordinate& c) const;
  Expr Lz() const { return partial(Coordinate::z()); }

  /// Coordinates of T^{order}Q x R: jets up to `order`, then z.
  std::vector<Coordinate> state_coordinates(int order) const;

  /// Stable fingerprint of (n, k, L, params).
  std::uint64_t fingerprint() const;

 private:
  int n_;
  int k_;
  Expr L_;
  ParamValues params_;
  std::map<Coordinate, Expr> partials_;
};

/// Parameter values plus jets up to `order` and z drawn uniformly from
/// [-box, box].
Point random_state(const ContactLagrangian& m, int order, std::mt19937_64& rng, double box = 1.0);

enum class Verdict { Regular, Singular, Inconclusive };
const char* to_string(Verdict v);

struct RegularityReport {
  ExprMatrix hessian;
  std::optional<Expr> symbolic_det;  // absent when n is too large for cofactors
  bool symbolic_det_zero = false;
  double numeric_min_abs_det = 0.0;
  double numeric_max_abs_det = 0.0;
  int samples = 0;
  Verdict verdict = Verdict::Inconclusive;
  /// Almost-regularity is a global property; it is never certified here.
  std::string almost_regular = "Unchecked";
};

struct ClassifyOptions {
  int samples = 20;
  std::uint64_t seed = 0xC0FFEE;
  double det_tol = 1e-9;
  int max_symbolic_n = 6;
};

/// W[i][j] = d^2 L / dq(i,k) dq(j,k).
ExprMatrix hessian(const ContactLagrangian& m);

/// Determinant by cofactor expansion, simplified.
Expr symbolic_determinant(const ExprMatrix& a);

RegularityReport classify(const ContactLagrangian& m, const ClassifyOptions& opts = {});
inline RegularityReport classify(const ContactLagrangian& m, int samples) {
  ClassifyOptions o;
  o.samples = samples;
  return classify(m, o);
}

}  // namespace herglotz

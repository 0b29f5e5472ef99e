#pragma once

#include <map>
#include <utility>
#include <vector>

#include "herglotz/compiled.hpp"
#include "herglotz/expr.hpp"

namespace herglotz {

/// Sparse 1-form: coefficient of d(c) per coordinate c (Z stands for dz).
struct OneForm {
  std::map<Coordinate, Expr> coeff;

  Expr at(const Coordinate& c) const;
  Expr dz() const { return at(Coordinate::z()); }
  /// Value of the form on a vector with components `v` at `point`.
  double contract(const Point& v, const Point& point) const;
};

/// Sparse 2-form: coeff[(a, b)] for a < b, antisymmetric by convention.
struct TwoForm {
  std::map<std::pair<Coordinate, Coordinate>, Expr> coeff;

  /// Signed coefficient of da^db for any ordered pair.
  Expr at(const Coordinate& a, const Coordinate& b) const;
  /// Dense antisymmetric matrix over `space` at `point` (row-major).
  std::vector<double> matrix(const std::vector<Coordinate>& space, const Point& point) const;
  /// Components of i(v)w over `space`.
  std::vector<double> contract(const Point& v, const std::vector<Coordinate>& space, const Point& point) const;
};

/// d of a 1-form on the given coordinate space.
TwoForm exterior_derivative(const OneForm& f, const std::vector<Coordinate>& space);
TwoForm negate(const TwoForm& w);

/// A linear system matrix * x = rhs fixing the components in `targets`.
///
/// A target jet q(i, a) is available to later expressions as the coordinate
/// Unknown(i, a), so successive blocks can depend on earlier solutions.
struct ImplicitBlock {
  std::vector<Coordinate> targets;
  ExprMatrix matrix;
  std::vector<Expr> rhs;
};

/// Vector field with Expr components on an ordered coordinate space.
///
/// Components in comp may reference Unknown coordinates solved by blocks,
/// which are resolved in order at evaluation time.
struct VectorFieldSym {
  std::vector<Coordinate> space;
  std::map<Coordinate, Expr> comp;
  std::vector<ImplicitBlock> blocks;
  bool holonomic = false;

  Expr component(const Coordinate& c) const;
  bool is_explicit() const;

  /// Numeric components at `point` (which must also bind the parameters).
  /// Throws DomainError, NotInvertible.
  Point evaluate(const Point& point) const;
  std::vector<double> evaluate_dense(const Point& point) const;
};

/// Fast numeric right-hand side of a field in the state order of `space`.
class NumericField {
 public:
  NumericField() = default;
  NumericField(const VectorFieldSym& field, const Point& params);

  std::size_t dimension() const noexcept { return dim_; }
  const std::vector<Coordinate>& space() const noexcept { return space_; }
  /// dx = X(x). Throws DomainError or NotInvertible.
  void operator()(const double* x, double* dx) const;

 private:
  struct Block {
    int size = 0;
    CompiledProgram program;  // matrix entries row-major, then rhs
    std::vector<int> target_slots;
  };

  std::size_t dim_ = 0;
  std::size_t slots_ = 0;
  std::vector<Coordinate> space_;
  std::vector<double> param_values_;
  std::vector<Block> blocks_;
  CompiledProgram comps_;
};

/// Solves a small dense system; throws NotInvertible when singular.
std::vector<double> solve_dense(int n, std::vector<double> a, std::vector<double> b);

}  // namespace herglotz

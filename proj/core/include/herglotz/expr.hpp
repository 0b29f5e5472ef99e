#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "herglotz/coordinate.hpp"
#include "herglotz/number.hpp"

namespace herglotz {

enum class NodeKind { Const, Var, Add, Mul, Pow, Func };
enum class FuncKind { Sin, Cos, Exp, Log };

struct Node;

/// Immutable, structurally shared expression tree.
///
/// Division is represented as a product with a negative power and negation as
/// a product with -1, so the node set stays small. Arithmetic operators only
/// flatten and fold constants; `simplify` produces the canonical form.
class Expr {
 public:
  Expr();  // the constant 0
  Expr(Number value);                       // NOLINT(google-explicit-constructor)
  Expr(int value) : Expr(Number(value)) {}  // NOLINT(google-explicit-constructor)

  static Expr constant(Number value) { return Expr(value); }
  static Expr real(double value) { return Expr(Number::real(value)); }
  static Expr var(const Coordinate& c);
  static Expr jet(int dof, int order) { return var(Coordinate::jet(dof, order)); }
  static Expr z() { return var(Coordinate::z()); }
  static Expr momentum(int level, int dof) { return var(Coordinate::momentum(level, dof)); }
  static Expr param(std::string name) { return var(Coordinate::param(std::move(name))); }

  // Raw node constructors; no canonicalisation beyond what the caller provides.
  static Expr make_add(std::vector<Expr> terms);
  static Expr make_mul(std::vector<Expr> factors);
  static Expr make_pow(Expr base, Number exponent);
  static Expr make_func(FuncKind f, Expr arg);

  NodeKind kind() const noexcept;
  const Number& value() const;             // Const
  const Coordinate& coordinate() const;    // Var
  const std::vector<Expr>& args() const;   // Add, Mul, Pow (base), Func (argument)
  const Expr& base() const;                // Pow
  const Number& exponent() const;          // Pow
  FuncKind func() const;                   // Func
  std::size_t hash() const noexcept;
  const Node* node() const noexcept { return node_.get(); }

  bool is_const() const noexcept { return kind() == NodeKind::Const; }
  bool is_var() const noexcept { return kind() == NodeKind::Var; }
  bool is_zero() const noexcept;
  bool is_one() const noexcept;

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }

  /// Structural identity (same tree shape and constants).
  friend bool identical(const Expr& a, const Expr& b);
  /// Total order on trees, consistent with `identical`.
  friend std::strong_ordering compare(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  NodeKind kind = NodeKind::Const;
  Number number;  // Const value or Pow exponent
  std::optional<Coordinate> coordinate;
  FuncKind func = FuncKind::Sin;
  std::vector<Expr> args;
  std::size_t hash = 0;
};

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

Expr pow(const Expr& base, Number exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);

using Point = std::map<Coordinate, double>;
using Bindings = std::map<Coordinate, Expr>;
using ExprMatrix = std::vector<std::vector<Expr>>;

/// Canonical form: polynomial expansion over atoms (variables, functions,
/// non-expandable powers), like monomials merged, constants folded, terms
/// sorted. Idempotent.
Expr simplify(const Expr& e);

/// Exact partial derivative, simplified. Zero when `c` does not occur.
Expr differentiate(const Expr& e, const Coordinate& c);

/// Simultaneous substitution followed by simplify.
Expr substitute(const Expr& e, const Bindings& bindings);

/// IEEE evaluation. Throws UnboundCoordinate or DomainError.
double evaluate(const Expr& e, const Point& point);

std::set<Coordinate> free_coordinates(const Expr& e);
bool contains(const Expr& e, const Coordinate& c);
/// Highest jet order occurring in `e`, or -1 when `e` has no jet coordinates.
int max_jet_order(const Expr& e);

/// Parseable infix text (see the expression grammar).
std::string render(const Expr& e);

/// If `e` is affine in `c` (second derivative symbolically zero), returns
/// {slope, offset} with e == slope*c + offset.
std::optional<std::pair<Expr, Expr>> affine_in(const Expr& e, const Coordinate& c);

enum class Equivalence { Equivalent, NotEquivalent, Inconclusive };

struct EquivalenceOptions {
  int trials = 20;
  double tol = 1e-9;
  std::uint64_t seed = 0xC0FFEE;
  double box = 2.0;  // sample coordinates uniformly from [-box, box]
  /// Fixed values for some coordinates (e.g. positive physical parameters).
  Point fixed;
};

/// Symbolic zero test of simplify(a - b), falling back to randomized
/// evaluation with |a-b| <= tol*(1+|a|). Points raising DomainError are
/// re-drawn up to 10*trials times before reporting Inconclusive.
Equivalence check_equivalent(const Expr& a, const Expr& b, const EquivalenceOptions& opts = {});
bool equivalent(const Expr& a, const Expr& b, int trials = 20, double tol = 1e-9);
bool equivalent(const Expr& a, const Expr& b, const EquivalenceOptions& opts);

/// True when the expression is symbolically zero after simplify, or
/// numerically zero at randomized points.
bool is_zero_expr(const Expr& e, const EquivalenceOptions& opts = {});

}  // namespace herglotz

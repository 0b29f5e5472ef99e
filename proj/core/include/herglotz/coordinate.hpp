#pragma once

#include <compare>
#include <cstddef>
#include <string>

namespace herglotz {

/// A symbol an expression can depend on.
///
/// Jet(i, a) is the a-th time derivative of degree of freedom i (q{i}_{a}),
/// Z the dissipation coordinate, Momentum(r, i) the level-r momentum of dof i
/// (p{r}_{i}), Param a named model constant. Unknown(i, a) stands for a
/// not-yet-determined vector-field coefficient in the q{i}_{a} direction and
/// only appears inside the constraint algorithm and implicit field blocks.
///
/// The declaration order of Kind is the canonical coordinate order.
class Coordinate {
 public:
  enum class Kind { Jet, Z, Momentum, Unknown, Param };

  static Coordinate jet(int dof, int order) { return {Kind::Jet, dof, order, {}}; }
  static Coordinate z() { return {Kind::Z, 0, 0, {}}; }
  static Coordinate momentum(int level, int dof) { return {Kind::Momentum, dof, level, {}}; }
  static Coordinate unknown(int dof, int order) { return {Kind::Unknown, dof, order, {}}; }
  static Coordinate param(std::string name) { return {Kind::Param, 0, 0, std::move(name)}; }

  Kind kind() const noexcept { return kind_; }
  bool is_jet() const noexcept { return kind_ == Kind::Jet; }
  bool is_z() const noexcept { return kind_ == Kind::Z; }
  bool is_momentum() const noexcept { return kind_ == Kind::Momentum; }
  bool is_unknown() const noexcept { return kind_ == Kind::Unknown; }
  bool is_param() const noexcept { return kind_ == Kind::Param; }

  /// Degree-of-freedom index for Jet, Momentum and Unknown.
  int dof() const noexcept { return dof_; }
  /// Jet/Unknown derivative order.
  int order() const noexcept { return level_; }
  /// Momentum level r.
  int level() const noexcept { return level_; }
  const std::string& name() const noexcept { return name_; }

  /// q{i}_{a}, z, p{r}_{i}, F{i}_{a} or the parameter name.
  std::string render() const;

  friend bool operator==(const Coordinate&, const Coordinate&) = default;
  friend std::strong_ordering operator<=>(const Coordinate& a, const Coordinate& b);

  std::size_t hash() const noexcept;

 private:
  Coordinate(Kind kind, int dof, int level, std::string name)
      : kind_(kind), dof_(dof), level_(level), name_(std::move(name)) {}

  Kind kind_;
  int dof_;
  int level_;
  std::string name_;
};

struct CoordinateHash {
  std::size_t operator()(const Coordinate& c) const noexcept { return c.hash(); }
};

}  // namespace herglotz

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "herglotz/expr.hpp"

namespace herglotz {

/// Coordinate to input-slot assignment for compiled evaluation.
using SlotMap = std::map<Coordinate, int>;

/// Flat evaluation tape for a set of expressions sharing subtrees.
///
/// Compiling resolves every coordinate to a slot up front, so evaluation is
/// a straight pass over the tape. Evaluation is const and re-entrant.
class CompiledProgram {
 public:
  CompiledProgram() = default;
  /// Throws UnboundCoordinate when an expression uses a coordinate that has no slot.
  CompiledProgram(const std::vector<Expr>& outputs, const SlotMap& slots);

  std::size_t outputs() const noexcept { return out_.size(); }

  /// Writes outputs() values. Throws DomainError.
  void eval(const double* in, double* out) const;
  void eval(const double* in, double* out, std::vector<double>& scratch) const;
  double eval1(const double* in) const;

 private:
  enum class Op : std::uint8_t { Const, Load, Add, Mul, Neg, Inv, Sq, PowI, PowR, Sin, Cos, Exp, Log };
  struct Ins {
    Op op;
    int a = 0;
    int b = 0;
    double c = 0.0;
  };

  std::vector<Ins> tape_;
  std::vector<int> out_;
};

}  // namespace herglotz

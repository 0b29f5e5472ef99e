#pragma once

#include <set>
#include <string>
#include <string_view>

#include "herglotz/expr.hpp"

namespace herglotz {

/// What identifiers an expression may use.
struct ParseContext {
  int n = 1;           // jet and momentum dof indices must be < n
  int max_order = -1;  // highest admissible jet order; -1 means unbounded
  std::set<std::string> params;
  bool any_param = false;  // accept every free identifier as a parameter
  bool allow_z = true;
  bool allow_momenta = false;
  int momentum_levels = 0;  // admissible momentum levels are 0..momentum_levels-1
  bool allow_unknowns = false;
  bool allow_time = false;  // the identifier t becomes Param("t")

  /// Context for a Lagrangian of order k in n dof.
  static ParseContext lagrangian(int n, int k, std::set<std::string> params);
  /// Context for expressions on the unified space (jets up to 2k-1, momenta,
  /// coefficient unknowns).
  static ParseContext unified(int n, int k, std::set<std::string> params);
  /// Accepts anything the renderer can print.
  static ParseContext permissive();
};

/// Parses the infix grammar. Throws SyntaxError (with byte offset),
/// UnknownVariable or OrderOutOfRange.
Expr parse(std::string_view text, const ParseContext& ctx);

}  // namespace herglotz

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "herglotz/expr.hpp"
#include "herglotz/forms.hpp"
#include "herglotz/model.hpp"

namespace herglotz {

/// Skinner-Rusk data on W = T^{2k-1}Q x_Q T*(T^{k-1}Q) x R.
struct UnifiedSystem {
  ContactLagrangian model;
  std::vector<Coordinate> space;  // q(., 0..2k-1), p(0..k-1, .), z
  Expr coupling;                  // sum p(a,i) q(i,a+1)
  Expr hamiltonian;               // coupling - L
  OneForm eta;                    // dz - sum p(a,i) dq(i,a)
  Coordinate reeb = Coordinate::z();
};

UnifiedSystem build_unified(const ContactLagrangian& m);

enum class ChainMode { HolonomyFirst, AppendixA };
enum class ChainStatus { Determined, UnderDetermined, Inconsistent };
const char* to_string(ChainMode m);
const char* to_string(ChainStatus s);

struct Constraint {
  Expr raw;      // as produced (compatibility condition or tangency of a prior raw constraint)
  Expr reduced;  // raw with every earlier solved coordinate eliminated
  std::optional<Coordinate> solved_for;
  Expr solution;  // value of solved_for on the constraint set, in free coordinates

  bool defines_momentum() const { return solved_for && solved_for->is_momentum(); }
  /// solved_for - solution, or the reduced form when nothing was solved.
  Expr normalized() const;
};

struct ChainLevel {
  int index = 0;
  std::string origin;  // "Compatibility" or "Tangency(<level>)"
  std::vector<Constraint> constraints;
  Bindings resolved_coefficients;  // Unknown(i,a) -> value, in raw coordinates
  std::vector<std::string> notes;
};

struct ChainOptions {
  int max_levels = -1;  // default 4k + 4
  int samples = 20;
  std::uint64_t seed = 0xC0FFEE;
  double zero_tol = 1e-9;
};

struct ConstraintChain {
  explicit ConstraintChain(UnifiedSystem s) : system(std::move(s)) {}

  UnifiedSystem system;
  ChainMode mode = ChainMode::HolonomyFirst;
  std::vector<ChainLevel> levels;
  ChainStatus status = ChainStatus::UnderDetermined;
  std::vector<Coordinate> free_unknowns;
  std::vector<Expr> inconsistent_residuals;
  std::vector<std::string> warnings;

  /// Field on W before resolution; q-directions that are not fixed hold Unknown symbols.
  VectorFieldSym generic_field;
  /// Solved coordinates on the final constraint set, in free coordinates.
  Bindings solved;
  /// Unknown symbols fixed symbolically (raw coordinates).
  Bindings resolved;
  /// Unknowns fixed numerically by linear blocks.
  std::vector<ImplicitBlock> blocks;

  std::vector<Constraint> all_constraints() const;
  std::vector<Constraint> momentum_constraints() const;
  /// X_H on W with every resolved coefficient substituted.
  VectorFieldSym field() const;
  /// A random point on the final constraint set (plus parameter values).
  /// Throws EvalError after too many failed draws.
  Point sample(std::mt19937_64& rng, double box = 1.0) const;
};

/// Runs the constraint algorithm. Throws NonTermination past the level cap.
ConstraintChain constraint_algorithm(const UnifiedSystem& u, ChainMode mode, const ChainOptions& opts = {});

/// True when the constraint `expected` = 0 defines the same relation as `c`
/// on the final constraint set: both are solved for c.solved_for after the
/// other solved coordinates are eliminated and the values compared with
/// equivalent(). Unsolved constraints are compared up to sign.
bool constraint_matches(const ConstraintChain& chain, const Constraint& c, const Expr& expected);

/// Jet and z components with momenta eliminated. Throws UnderDetermined.
VectorFieldSym project_to_lagrangian(const ConstraintChain& chain);
/// (q(., <k), p, z) components with top jets eliminated by the inverse
/// Legendre map. Throws UnderDetermined or NotInvertible.
VectorFieldSym project_to_hamiltonian(const ConstraintChain& chain);

}  // namespace herglotz

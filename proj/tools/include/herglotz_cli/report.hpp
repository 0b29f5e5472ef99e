#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "herglotz/dynamics.hpp"
#include "herglotz/expr.hpp"
#include "herglotz/forms.hpp"
#include "herglotz/lagrangian.hpp"
#include "herglotz/model.hpp"
#include "herglotz/unified.hpp"
#include "herglotz/verify.hpp"

namespace herglotz::cli {

using nlohmann::json;

/// Everything `derive` computes for one model.
struct Derivation {
  RegularityReport regularity;
  MomentaTable momenta;
  Expr energy;
  LagrangianForms forms;
  std::vector<Expr> equations;
  std::optional<VectorFieldSym> lagrangian_field;
  std::optional<VectorFieldSym> reeb;
  std::optional<Expr> hamiltonian;
  std::optional<VectorFieldSym> hamiltonian_field;
  std::vector<std::string> notes;
};

Derivation derive(const ContactLagrangian& m);

json model_json(const std::string& name, const ContactLagrangian& m);
json field_json(const VectorFieldSym& x);
json derivation_json(const std::string& name, const ContactLagrangian& m, const Derivation& d);
std::string derivation_text(const std::string& name, const ContactLagrangian& m, const Derivation& d);

json chain_json(const ConstraintChain& chain);
std::string chain_text(const ConstraintChain& chain);

json checks_json(const std::vector<CheckReport>& checks);
std::string checks_text(const std::vector<CheckReport>& checks);

json variational_json(const VariationalReport& rep, double threshold);
std::string variational_text(const VariationalReport& rep, double threshold);

}  // namespace herglotz::cli

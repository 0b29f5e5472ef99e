#include "herglotz_cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "herglotz/errors.hpp"
#include "herglotz/hamiltonian.hpp"

namespace herglotz::cli {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Derivation derive(const ContactLagrangian& m) {
  Derivation d;
  d.regularity = classify(m);
  d.momenta = momenta(m);
  d.energy = energy(m);
  d.forms = forms(m);
  d.equations = herglotz_equations(m);
  if (d.regularity.verdict == Verdict::Singular) {
    d.notes.push_back(
        "singular Lagrangian: the Lagrangian field, Reeb field and Hamiltonian are not defined; run `unified`");
  } else {
    d.lagrangian_field = lagrangian_vector_field(m);
    d.reeb = reeb_field(m);
    try {
      const LegendreMap leg = legendre(m);
      d.hamiltonian = hamiltonian(m, leg);
      d.hamiltonian_field = hamiltonian_vector_field(*d.hamiltonian, m.n(), m.k());
    } catch (const NotInvertible& e) {
      d.notes.push_back(std::string("no closed-form Hamiltonian: ") + e.what());
    }
  }
  d.notes.push_back(
      "sigma(t) = exp(-int dL/dz dt) is normalized to sigma(0) = 1; the Cauchy data z0 enters only through Z(0)");
  return d;
}

json model_json(const std::string& name, const ContactLagrangian& m) {
  json j;
  j["name"] = name;
  j["n"] = m.n();
  j["k"] = m.k();
  j["lagrangian"] = render(m.L());
  j["params"] = json::object();
  for (const auto& [p, v] : m.params()) j["params"][p] = v;
  return j;
}

json field_json(const VectorFieldSym& x) {
  json j = json::object();
  for (const auto& c : x.space) j["components"][c.render()] = render(x.component(c));
  json blocks = json::array();
  for (const auto& b : x.blocks) {
    json jb;
    for (const auto& t : b.targets) jb["targets"].push_back(t.render());
    for (const auto& row : b.matrix) {
      json r = json::array();
      for (const auto& e : row) r.push_back(render(e));
      jb["matrix"].push_back(r);
    }
    for (const auto& e : b.rhs) jb["rhs"].push_back(render(e));
    blocks.push_back(jb);
  }
  j["implicit_blocks"] = blocks;
  return j;
}

json derivation_json(const std::string& name, const ContactLagrangian& m, const Derivation& d) {
  json j;
  j["model"] = model_json(name, m);
  json reg;
  reg["verdict"] = to_string(d.regularity.verdict);
  for (const auto& row : d.regularity.hessian) {
    json r = json::array();
    for (const auto& e : row) r.push_back(render(e));
    reg["hessian"].push_back(r);
  }
  reg["determinant"] = d.regularity.symbolic_det ? json(render(*d.regularity.symbolic_det)) : json(nullptr);
  reg["min_abs_det"] = d.regularity.numeric_min_abs_det;
  reg["max_abs_det"] = d.regularity.numeric_max_abs_det;
  reg["samples"] = d.regularity.samples;
  reg["almost_regular"] = d.regularity.almost_regular;
  j["regularity"] = reg;

  json mom = json::array();
  for (std::size_t r = 0; r < d.momenta.size(); ++r) {
    for (std::size_t i = 0; i < d.momenta[r].size(); ++i) {
      mom.push_back({{"coordinate", Coordinate::momentum(static_cast<int>(r), static_cast<int>(i)).render()},
                     {"level", r},
                     {"dof", i},
                     {"expr", render(d.momenta[r][i])}});
    }
  }
  j["momenta"] = mom;
  j["energy"] = render(d.energy);
  json eta = json::object();
  for (const auto& [c, e] : d.forms.eta.coeff) eta[c.render()] = render(e);
  j["eta"] = eta;
  json eqs = json::array();
  for (const auto& e : d.equations) eqs.push_back(render(e));
  j["herglotz_equations"] = eqs;
  j["lagrangian_field"] = d.lagrangian_field ? field_json(*d.lagrangian_field) : json(nullptr);
  j["reeb_field"] = d.reeb ? field_json(*d.reeb) : json(nullptr);
  j["hamiltonian"] = d.hamiltonian ? json(render(*d.hamiltonian)) : json(nullptr);
  j["hamiltonian_field"] = d.hamiltonian_field ? field_json(*d.hamiltonian_field) : json(nullptr);
  j["notes"] = d.notes;
  return j;
}

namespace {

void field_text(std::ostringstream& os, const VectorFieldSym& x) {
  for (const auto& c : x.space) os << "  d" << c.render() << "/dt = " << render(x.component(c)) << "\n";
  for (const auto& b : x.blocks) {
    os << "  implicit block for";
    for (const auto& t : b.targets) os << ' ' << t.render();
    os << "\n";
    for (std::size_t i = 0; i < b.matrix.size(); ++i) {
      os << "    [";
      for (std::size_t j2 = 0; j2 < b.matrix[i].size(); ++j2) os << (j2 ? ", " : "") << render(b.matrix[i][j2]);
      os << "] = " << render(b.rhs[i]) << "\n";
    }
  }
}

}  // namespace

std::string derivation_text(const std::string& name, const ContactLagrangian& m, const Derivation& d) {
  std::ostringstream os;
  os << "model " << name << " (n = " << m.n() << ", k = " << m.k() << ")\n";
  os << "L = " << render(m.L()) << "\n\n";
  os << "regularity: " << to_string(d.regularity.verdict);
  if (d.regularity.symbolic_det) os << ", det W = " << render(*d.regularity.symbolic_det);
  os << "\n\nmomenta\n";
  for (std::size_t r = 0; r < d.momenta.size(); ++r) {
    for (std::size_t i = 0; i < d.momenta[r].size(); ++i) {
      os << "  " << Coordinate::momentum(static_cast<int>(r), static_cast<int>(i)).render() << " = "
         << render(d.momenta[r][i]) << "\n";
    }
  }
  os << "\nenergy\n  E = " << render(d.energy) << "\n";
  os << "\ncontact form\n  eta = ";
  bool first = true;
  for (const auto& [c, e] : d.forms.eta.coeff) {
    os << (first ? "" : " + ") << "(" << render(e) << ") d" << c.render();
    first = false;
  }
  os << "\n\nHerglotz equations\n";
  for (std::size_t i = 0; i < d.equations.size(); ++i) os << "  [" << i << "] 0 = " << render(d.equations[i]) << "\n";
  if (d.lagrangian_field) {
    os << "\nLagrangian field\n";
    field_text(os, *d.lagrangian_field);
  }
  if (d.reeb) {
    os << "\nReeb field\n";
    field_text(os, *d.reeb);
  }
  if (d.hamiltonian) os << "\nHamiltonian\n  H = " << render(*d.hamiltonian) << "\n";
  if (d.hamiltonian_field) {
    os << "\nHamilton equations\n";
    field_text(os, *d.hamiltonian_field);
  }
  if (!d.notes.empty()) {
    os << "\nnotes\n";
    for (const auto& n : d.notes) os << "  - " << n << "\n";
  }
  return os.str();
}

json chain_json(const ConstraintChain& chain) {
  json j;
  j["mode"] = to_string(chain.mode);
  j["status"] = to_string(chain.status);
  json levels = json::array();
  for (const auto& l : chain.levels) {
    json jl;
    jl["index"] = l.index;
    jl["origin"] = l.origin;
    jl["constraints"] = json::array();
    for (const auto& c : l.constraints) {
      jl["constraints"].push_back({{"raw", render(c.raw)},
                                   {"reduced", render(c.reduced)},
                                   {"solved_for", c.solved_for ? json(c.solved_for->render()) : json(nullptr)},
                                   {"solution", c.solved_for ? json(render(c.solution)) : json(nullptr)}});
    }
    jl["resolved"] = json::object();
    for (const auto& [u, e] : l.resolved_coefficients) jl["resolved"][u.render()] = render(e);
    jl["notes"] = l.notes;
    levels.push_back(jl);
  }
  j["levels"] = levels;
  j["free_unknowns"] = json::array();
  for (const auto& u : chain.free_unknowns) j["free_unknowns"].push_back(u.render());
  j["inconsistent_residuals"] = json::array();
  for (const auto& e : chain.inconsistent_residuals) j["inconsistent_residuals"].push_back(render(e));
  j["warnings"] = chain.warnings;
  j["lagrangian_field"] = nullptr;
  j["hamiltonian_field"] = nullptr;
  if (chain.status == ChainStatus::Determined) {
    j["lagrangian_field"] = field_json(project_to_lagrangian(chain));
    try {
      j["hamiltonian_field"] = field_json(project_to_hamiltonian(chain));
    } catch (const NotInvertible&) {
    }
  }
  return j;
}

std::string chain_text(const ConstraintChain& chain) {
  std::ostringstream os;
  os << "constraint algorithm (" << to_string(chain.mode) << "): " << to_string(chain.status) << "\n";
  int count = 0;
  for (const auto& l : chain.levels) {
    os << "\nlevel " << l.index << " [" << l.origin << "]\n";
    for (const auto& c : l.constraints) {
      os << "  xi" << count++ << ": 0 = " << render(c.raw) << "\n";
      if (c.solved_for) os << "        => " << c.solved_for->render() << " = " << render(c.solution) << "\n";
    }
    for (const auto& [u, e] : l.resolved_coefficients) os << "  " << u.render() << " = " << render(e) << "\n";
    for (const auto& n : l.notes) os << "  note: " << n << "\n";
  }
  if (!chain.free_unknowns.empty()) {
    os << "\nundetermined:";
    for (const auto& u : chain.free_unknowns) os << ' ' << u.render();
    os << "\n";
  }
  for (const auto& w : chain.warnings) os << "warning: " << w << "\n";
  if (chain.status == ChainStatus::Determined) {
    os << "\nLagrangian field on the final constraint set\n";
    field_text(os, project_to_lagrangian(chain));
    try {
      const auto xh = project_to_hamiltonian(chain);
      os << "\nHamiltonian field\n";
      field_text(os, xh);
    } catch (const NotInvertible&) {
      os << "\nno Hamiltonian field: the Legendre map is not invertible\n";
    }
  }
  return os.str();
}

json checks_json(const std::vector<CheckReport>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"where", c.where},
                   {"max_residual", finite_or_null(c.max_residual)},
                   {"tolerance", finite_or_null(c.tolerance)},
                   {"pass", c.pass},
                   {"detail", c.detail}});
  }
  return arr;
}

std::string checks_text(const std::vector<CheckReport>& checks) {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << "  residual " << num(c.max_residual) << " <= " << num(c.tolerance)
       << "  (" << c.where << ")\n";
  }
  return os.str();
}

json variational_json(const VariationalReport& rep, double threshold) {
  json j;
  j["eps"] = rep.eps;
  j["base_action"] = rep.base_action;
  j["threshold"] = threshold;
  j["max_relative"] = rep.max_relative();
  j["rows"] = json::array();
  for (const auto& r : rep.rows) {
    j["rows"].push_back({{"index", r.index},
                         {"derivative", r.derivative},
                         {"derivative_half_eps", r.derivative_half},
                         {"richardson", r.richardson},
                         {"norm_inf", r.norm_inf},
                         {"relative", std::abs(r.derivative) / r.norm_inf}});
  }
  return j;
}

std::string variational_text(const VariationalReport& rep, double threshold) {
  std::ostringstream os;
  os << "action = " << num(rep.base_action) << "   eps = " << num(rep.eps) << "\n";
  os << "  #   dA/de         dA/de(eps/2)  richardson    |dc|inf       relative\n";
  for (const auto& r : rep.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-3d % .6e % .6e % .6e % .6e % .6e\n", r.index, r.derivative,
                  r.derivative_half, r.richardson, r.norm_inf, std::abs(r.derivative) / r.norm_inf);
    os << line;
  }
  os << "max relative " << num(rep.max_relative()) << " (threshold " << num(threshold) << ")\n";
  return os.str();
}

}  // namespace herglotz::cli

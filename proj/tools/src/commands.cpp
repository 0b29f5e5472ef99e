#include "herglotz_cli/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "herglotz/errors.hpp"
#include "herglotz/hamiltonian.hpp"
#include "herglotz/lagrangian.hpp"
#include "herglotz/parse.hpp"
#include "herglotz/unified.hpp"
#include "herglotz/verify.hpp"
#include "herglotz_cli/report.hpp"

#ifndef HERGLOTZ_MODELS_DIR
#define HERGLOTZ_MODELS_DIR "models"
#endif

namespace herglotz::cli {

namespace {

constexpr double kCriticalThreshold = 1e-3;

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

void emit_json(const json& j, const Options& opts, std::ostream& out, bool to_stdout) {
  const std::string text = j.dump(2) + "\n";
  if (opts.out) write_file(*opts.out, text);
  if (to_stdout) out << text;
}

IntegrateOptions integrate_options(const ModelFile& mf, const Options& opts) {
  IntegrateOptions io;
  if (mf.simulate) {
    io.method = mf.simulate->method;
    io.h = mf.simulate->h;
    io.rtol = mf.simulate->rtol;
    io.atol = mf.simulate->atol;
  }
  if (opts.method) {
    if (*opts.method == "rk4") {
      io.method = Method::RK4;
    } else if (*opts.method == "rk45") {
      io.method = Method::RK45;
    } else {
      throw CLI::ValidationError("--method", "must be rk4 or rk45");
    }
  }
  if (opts.step) io.h = *opts.step;
  return io;
}

SimulateSection simulate_section(const ModelFile& mf) {
  if (mf.simulate) return *mf.simulate;
  SimulateSection s;
  s.x0.assign(static_cast<std::size_t>(2 * mf.k * mf.n + 1), 0.1);
  s.x0.back() = 0.0;
  return s;
}

bool singular(const ContactLagrangian& m) { return classify(m).verdict == Verdict::Singular; }

}  // namespace

std::filesystem::path default_models_dir() { return HERGLOTZ_MODELS_DIR; }

int cmd_derive(const ModelFile& mf, const Options& opts, std::ostream& out, std::ostream&) {
  const ContactLagrangian m = mf.model();
  const Derivation d = derive(m);
  const json j = derivation_json(mf.name, m, d);
  emit_json(j, opts, out, opts.json);
  if (!opts.json) out << derivation_text(mf.name, m, d);
  return kOk;
}

int cmd_simulate(const ModelFile& mf, const Options& opts, std::ostream& out, std::ostream& err) {
  const ContactLagrangian m = mf.model();
  if (singular(m)) {
    err << "error: the Lagrangian is singular; neither side has a regular field (use `unified`)\n";
    return kSingularSide;
  }
  const SimulateSection s = simulate_section(mf);
  const IntegrateOptions io = integrate_options(mf, opts);
  const Point params = m.parameter_point();
  Trajectory tr;
  if (opts.side == "lagrangian") {
    tr = integrate(NumericField(lagrangian_vector_field(m), params), s.x0, s.t0, s.t1, io);
    tr.space = PhaseSpace::Lagrangian;
  } else if (opts.side == "hamiltonian") {
    LegendreMap leg;
    Expr H;
    try {
      leg = legendre(m);
      H = hamiltonian(m, leg);
    } catch (const NotInvertible& e) {
      err << "error: no Hamiltonian side: " << e.what() << "\n";
      return kSingularSide;
    }
    Point x0 = params;
    const auto lspace = lagrangian_space(m);
    for (std::size_t i = 0; i < lspace.size(); ++i) x0[lspace[i]] = s.x0[i];
    const Point y = leg.apply(x0);
    std::vector<double> y0;
    for (const auto& c : hamiltonian_space(m.n(), m.k())) y0.push_back(y.at(c));
    tr = integrate(NumericField(hamiltonian_vector_field(H, m.n(), m.k()), params), y0, s.t0, s.t1, io);
    tr.space = PhaseSpace::Hamiltonian;
  } else {
    err << "error: --side must be lagrangian or hamiltonian\n";
    return kUsage;
  }
  tr.model_hash = m.fingerprint();
  std::ostringstream csv;
  tr.write_csv(csv);
  if (opts.out) {
    write_file(*opts.out, csv.str());
  } else {
    out << csv.str();
  }
  return kOk;
}

int cmd_unified(const ModelFile& mf, const Options& opts, std::ostream& out, std::ostream& err) {
  ChainMode mode;
  if (opts.mode == "holonomy") {
    mode = ChainMode::HolonomyFirst;
  } else if (opts.mode == "appendix-a") {
    mode = ChainMode::AppendixA;
  } else {
    err << "error: --mode must be holonomy or appendix-a\n";
    return kUsage;
  }
  const ContactLagrangian m = mf.model();
  ChainOptions co;
  co.seed = opts.seed;
  co.samples = opts.samples;
  if (opts.tol) co.zero_tol = *opts.tol;
  const ConstraintChain chain = constraint_algorithm(build_unified(m), mode, co);
  json j = chain_json(chain);
  j["model"] = model_json(mf.name, m);
  emit_json(j, opts, out, opts.json);
  if (!opts.json) out << chain_text(chain);
  return kOk;
}

int cmd_verify(const ModelFile& mf, const Options& opts, std::ostream& out, std::ostream& err) {
  const ContactLagrangian m = mf.model();
  json j;
  j["model"] = model_json(mf.name, m);
  if (singular(m)) {
    j["checks"] = json::array();
    j["pass"] = false;
    j["skipped"] = "singular Lagrangian: contact checks require a regular Lagrangian";
    emit_json(j, opts, out, true);
    err << "error: the Lagrangian is singular; checks skipped\n";
    return kSingularSide;
  }
  CheckOptions co;
  co.seed = opts.seed;
  co.samples = opts.samples;
  if (opts.tol) co.tol = *opts.tol;

  std::vector<CheckReport> checks = check_contact(m, co);
  const SimulateSection s = simulate_section(mf);
  IntegrateOptions io = integrate_options(mf, opts);
  io.estimate_error = true;
  const Trajectory tr = integrate(NumericField(lagrangian_vector_field(m), m.parameter_point()), s.x0, s.t0, s.t1, io);
  for (auto& r : check_dissipation(m, tr, co)) checks.push_back(std::move(r));
  for (auto& r : check_equivalence(m, co)) checks.push_back(std::move(r));

  j["checks"] = checks_json(checks);
  j["pass"] = all_pass(checks);
  emit_json(j, opts, out, true);
  if (!all_pass(checks)) {
    err << checks_text(checks);
    return kVerifyFailed;
  }
  return kOk;
}

int cmd_action(const ModelFile& mf, const Options& opts, std::ostream& out, std::ostream& err) {
  if (!mf.curve) {
    err << "error: `action` needs a [curve] section\n";
    return kModelError;
  }
  const ContactLagrangian m = mf.model();
  const CurveSection& cs = *mf.curve;
  CurveSpec base;
  double z0 = cs.z0;
  if (cs.from_solution) {
    if (singular(m)) {
      err << "error: the Lagrangian is singular; there is no Lagrangian solution to fit\n";
      return kSingularSide;
    }
    IntegrateOptions io = integrate_options(mf, opts);
    const auto& x0 = mf.simulate->x0;
    const Trajectory tr = integrate(NumericField(lagrangian_vector_field(m), m.parameter_point()), x0, 0.0, 1.0, io);
    base = fit_chebyshev(tr, m.n(), 0.0, 1.0, 24);
    z0 = x0.back();
  } else {
    ParseContext ctx;
    ctx.n = m.n();
    ctx.allow_z = false;
    ctx.allow_time = true;
    std::vector<Expr> comps;
    for (const auto& s : cs.components) comps.push_back(parse(s, ctx));
    base = CurveSpec::symbolic(comps, std::max(4, m.k()));
  }

  VariationalOptions vo;
  vo.variations = cs.variations;
  vo.eps = cs.eps;
  vo.seed = opts.seed;
  const VariationalReport rep = variational_check(m, base, z0, vo);

  const Expr t = Expr::param("t");
  const Expr bump = pow(t, Number(m.k())) * pow(1 - t, Number(m.k()));
  const CurveSpec control = base.plus(CurveSpec::symbolic(std::vector<Expr>(m.n(), bump), std::max(4, m.k())), cs.perturb);
  const VariationalReport ctl = variational_check(m, control, z0, vo);

  const auto grid = uniform_grid(0.0, 1.0, 100);
  const auto sigma = sigma_factor(m, base, z0, grid);
  const auto Z = herglotz_Z(m, base, z0, grid);

  std::ostringstream csv;
  csv << "t,sigma,Z\n";
  char buf[128];
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid[j], sigma[j], Z[j]);
    csv << buf;
  }
  if (opts.out) write_file(*opts.out, csv.str());

  const bool critical = rep.max_relative() <= kCriticalThreshold;
  const bool detected = ctl.max_relative() >= 10.0 * kCriticalThreshold;
  // only the integrated solution is required to be critical
  const bool critical_ok = !cs.from_solution || critical;
  const bool control_ok = !cs.from_solution || detected;
  if (opts.json) {
    json j;
    j["model"] = model_json(mf.name, m);
    j["action"] = rep.base_action;
    j["z0"] = z0;
    j["base"] = cs.from_solution ? "solution" : "curve";
    j["variational"] = variational_json(rep, kCriticalThreshold);
    j["control"] = variational_json(ctl, 10.0 * kCriticalThreshold);
    j["sigma"] = sigma;
    j["critical"] = critical;
    j["control_detected"] = detected;
    out << j.dump(2) << "\n";
  } else {
    out << "base curve: " << (cs.from_solution ? "integrated solution (Chebyshev fit)" : "given curve") << "\n";
    out << variational_text(rep, kCriticalThreshold);
    out << "\ncontrol curve (bump amplitude " << cs.perturb << ")\n";
    out << variational_text(ctl, 10.0 * kCriticalThreshold);
    if (!opts.out) out << "\n" << csv.str();
  }
  if (!critical_ok || !control_ok) {
    err << "error: variational check failed\n";
    return kVerifyFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// reproduce

namespace {

struct Golden {
  std::ostream& out;
  int failures = 0;

  void item(const std::string& model, const std::string& what, bool ok, const std::string& why = {}) {
    out << (ok ? "PASS " : "FAIL ") << model << ": " << what;
    if (!ok && !why.empty()) out << " (" << why << ")";
    out << "\n";
    if (!ok) ++failures;
  }
};


void reproduce_model(const std::filesystem::path& file, const std::filesystem::path& expected_file, Golden& g,
                     const Options& opts) {
  const std::string stem = file.stem().string();
  json exp;
  {
    std::ifstream in(expected_file);
    if (!in) {
      g.item(stem, "expected report", false, "cannot read " + expected_file.string());
      return;
    }
    in >> exp;
  }
  const ModelFile mf = load_model(file);
  const ContactLagrangian m = mf.model();
  const ParseContext ctx = ParseContext::permissive();
  auto P = [&](const json& s) { return parse(s.get<std::string>(), ctx); };

  const Derivation d = derive(m);
  g.item(stem, "regularity verdict", exp.value("verdict", "") == to_string(d.regularity.verdict),
         std::string("got ") + to_string(d.regularity.verdict));

  if (exp.contains("momenta")) {
    for (const auto& [name, e] : exp["momenta"].items()) {
      const Expr pe = P(e);
      bool ok = false;
      for (std::size_t r = 0; r < d.momenta.size(); ++r) {
        for (std::size_t i = 0; i < d.momenta[r].size(); ++i) {
          if (Coordinate::momentum(static_cast<int>(r), static_cast<int>(i)).render() == name) {
            ok = equivalent(d.momenta[r][i], pe);
          }
        }
      }
      g.item(stem, "momentum " + name, ok);
    }
  }
  if (exp.contains("herglotz_equations")) {
    const auto& eqs = exp["herglotz_equations"];
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      g.item(stem, "Herglotz equation " + std::to_string(i), i < d.equations.size() && equivalent(d.equations[i], P(eqs[i])));
    }
  }
  if (exp.contains("lagrangian_field")) {
    for (const auto& [name, e] : exp["lagrangian_field"].items()) {
      bool ok = false;
      if (d.lagrangian_field) {
        for (const auto& c : d.lagrangian_field->space) {
          if (c.render() == name) ok = equivalent(d.lagrangian_field->component(c), P(e));
        }
      }
      g.item(stem, "Lagrangian field d" + name + "/dt", ok);
    }
  }
  if (exp.contains("hamiltonian")) {
    g.item(stem, "Hamiltonian", d.hamiltonian && equivalent(*d.hamiltonian, P(exp["hamiltonian"])));
  }
  if (exp.contains("hamiltonian_field")) {
    for (const auto& [name, e] : exp["hamiltonian_field"].items()) {
      bool ok = false;
      if (d.hamiltonian_field) {
        for (const auto& c : d.hamiltonian_field->space) {
          if (c.render() == name) ok = equivalent(d.hamiltonian_field->component(c), P(e));
        }
      }
      g.item(stem, "Hamiltonian field d" + name + "/dt", ok);
    }
  }

  if (exp.contains("unified")) {
    const UnifiedSystem u = build_unified(m);
    for (const auto& [mode_name, spec] : exp["unified"].items()) {
      const ChainMode mode = mode_name == "appendix-a" ? ChainMode::AppendixA : ChainMode::HolonomyFirst;
      ChainOptions co;
      co.seed = opts.seed;
      const ConstraintChain chain = constraint_algorithm(u, mode, co);
      const std::string tag = "unified/" + mode_name;
      g.item(stem, tag + " status", spec.value("status", "") == to_string(chain.status),
             std::string("got ") + to_string(chain.status));
      const auto cons = chain.all_constraints();
      const auto& want = spec["constraints"];
      g.item(stem, tag + " constraint count", cons.size() == want.size(),
             "got " + std::to_string(cons.size()) + ", expected " + std::to_string(want.size()));
      for (std::size_t i = 0; i < want.size() && i < cons.size(); ++i) {
        g.item(stem, tag + " constraint " + std::to_string(i), constraint_matches(chain, cons[i], P(want[i])));
      }
      if (spec.contains("resolved")) {
        for (const auto& [name, e] : spec["resolved"].items()) {
          bool ok = false;
          for (const auto& [c, val] : chain.resolved) {
            if (c.render() == name) {
              ok = equivalent(substitute(val, chain.solved), substitute(P(e), chain.solved));
            }
          }
          g.item(stem, tag + " coefficient " + name, ok);
        }
      }
      if (spec.contains("free")) {
        std::vector<std::string> got;
        for (const auto& c : chain.free_unknowns) got.push_back(c.render());
        g.item(stem, tag + " undetermined coefficients", got == spec["free"].get<std::vector<std::string>>());
      }
    }
  }

  if (exp.value("verify", false)) {
    CheckOptions co;
    co.seed = opts.seed;
    std::vector<CheckReport> checks = check_contact(m, co);
    const SimulateSection s = simulate_section(mf);
    IntegrateOptions io = integrate_options(mf, opts);
    io.estimate_error = true;
    const Trajectory tr =
        integrate(NumericField(lagrangian_vector_field(m), m.parameter_point()), s.x0, s.t0, s.t1, io);
    for (auto& r : check_dissipation(m, tr, co)) checks.push_back(std::move(r));
    for (auto& r : check_equivalence(m, co)) checks.push_back(std::move(r));
    for (const auto& c : checks) g.item(stem, "verify " + c.name, c.pass, "residual " + std::to_string(c.max_residual));
  } else {
    bool threw = false;
    try {
      check_contact(m);
    } catch (const SingularLagrangian&) {
      threw = true;
    }
    g.item(stem, "verify refuses the singular model", threw);
  }
}

}  // namespace

int cmd_reproduce(const std::filesystem::path& dir, const Options& opts, std::ostream& out, std::ostream& err) {
  Golden g{out};
  for (const char* stem : {"pais_uhlenbeck", "electron", "singular_az"}) {
    const auto file = dir / (std::string(stem) + ".toml");
    try {
      reproduce_model(file, dir / "expected" / (std::string(stem) + ".json"), g, opts);
    } catch (const Error& e) {
      g.item(stem, "run", false, e.what());
    } catch (const json::exception& e) {
      g.item(stem, "expected report", false, e.what());
    }
  }
  out << (g.failures == 0 ? "reproduce: all items match\n" : "reproduce: " + std::to_string(g.failures) + " mismatches\n");
  if (g.failures) {
    err << "error: reproduction mismatches\n";
    return kVerifyFailed;
  }
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Higher-order contact Lagrangian and Hamiltonian mechanics", "herglotz"};
  app.require_subcommand(1);
  Options opts;
  std::string out_path;
  std::string file;
  std::string models_dir = default_models_dir().string();

  auto common = [&](CLI::App* sc, bool with_file) {
    if (with_file) sc->add_option("model", file, "model file (TOML)")->required();
    sc->add_option("--out", out_path, "write the report, CSV or JSON to this path");
    sc->add_option("--seed", opts.seed, "random seed for sampling");
    sc->add_option("--samples", opts.samples, "number of sample points")->check(CLI::PositiveNumber);
    sc->add_option("--tol", opts.tol, "pointwise tolerance");
    sc->add_option("--method", opts.method, "integrator: rk4 or rk45")->check(CLI::IsMember({"rk4", "rk45"}));
    sc->add_option("--step", opts.step, "integrator step")->check(CLI::PositiveNumber);
    sc->add_flag("--json", opts.json, "print JSON instead of text");
  };
  CLI::App* derive = app.add_subcommand("derive", "momenta, energy, contact form, equations and Hamiltonian");
  common(derive, true);
  CLI::App* simulate = app.add_subcommand("simulate", "integrate the Lagrangian or Hamiltonian field, CSV output");
  common(simulate, true);
  simulate->add_option("--side", opts.side, "lagrangian or hamiltonian")
      ->check(CLI::IsMember({"lagrangian", "hamiltonian"}));
  CLI::App* unified = app.add_subcommand("unified", "run the unified constraint algorithm");
  common(unified, true);
  unified->add_option("--mode", opts.mode, "holonomy or appendix-a")->check(CLI::IsMember({"holonomy", "appendix-a"}));
  CLI::App* verify = app.add_subcommand("verify", "contact, dissipation and equivalence checks (JSON)");
  common(verify, true);
  CLI::App* act = app.add_subcommand("action", "Herglotz action, sigma factor and variational check");
  common(act, true);
  CLI::App* repro = app.add_subcommand("reproduce", "check the bundled models against their expected reports");
  common(repro, false);
  repro->add_option("dir", models_dir, "directory holding the bundled models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (!out_path.empty()) opts.out = out_path;

  try {
    if (repro->parsed()) return cmd_reproduce(models_dir, opts, out, err);
    const ModelFile mf = load_model(file);
    if (derive->parsed()) return cmd_derive(mf, opts, out, err);
    if (simulate->parsed()) return cmd_simulate(mf, opts, out, err);
    if (unified->parsed()) return cmd_unified(mf, opts, out, err);
    if (verify->parsed()) return cmd_verify(mf, opts, out, err);
    if (act->parsed()) return cmd_action(mf, opts, out, err);
  } catch (const ModelError& e) {
    err << file << ": " << e.what() << "\n";
    return kModelError;
  } catch (const SingularLagrangian& e) {
    err << "error: " << e.what() << "\n";
    return kSingularSide;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  }
  return kUsage;
}

}  // namespace herglotz::cli

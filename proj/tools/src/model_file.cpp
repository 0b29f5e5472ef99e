#include "herglotz_cli/model_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_ENABLE_FORMATTERS 0
#include <toml.hpp>

#include "herglotz/errors.hpp"
#include "herglotz/parse.hpp"

namespace herglotz::cli {

namespace {

int line_of(const toml::node& n) { return static_cast<int>(n.source().begin.line); }

double as_number(const toml::node& n, const std::string& what) {
  if (auto v = n.value<double>()) return *v;
  throw ModelError(what + " must be a number", line_of(n));
}

const toml::table* section(const toml::table& root, const char* name, bool required) {
  const toml::node* n = root.get(name);
  if (!n) {
    if (required) throw ModelError(std::string("missing [") + name + "] section", 1);
    return nullptr;
  }
  const toml::table* t = n->as_table();
  if (!t) throw ModelError(std::string("[") + name + "] must be a table", line_of(*n));
  return t;
}

const toml::node& required(const toml::table& t, const char* key, const char* sec) {
  const toml::node* n = t.get(key);
  if (!n) throw ModelError(std::string("[") + sec + "] is missing `" + key + "`", line_of(t));
  return *n;
}

int as_int(const toml::node& n, const std::string& what) {
  if (auto v = n.value<std::int64_t>()) return static_cast<int>(*v);
  throw ModelError(what + " must be an integer", line_of(n));
}

std::string as_string(const toml::node& n, const std::string& what) {
  if (auto v = n.value<std::string>()) return *v;
  throw ModelError(what + " must be a string", line_of(n));
}

void reject_unknown_keys(const toml::table& t, const std::set<std::string>& allowed, const char* sec) {
  for (const auto& [key, node] : t) {
    if (!allowed.count(std::string(key.str()))) {
      throw ModelError(std::string("unknown key `") + std::string(key.str()) + "` in [" + sec + "]", line_of(node));
    }
  }
}

}  // namespace

ContactLagrangian ModelFile::model() const {
  std::set<std::string> names;
  for (const auto& [p, v] : params) names.insert(p);
  const Expr L = parse(lagrangian, ParseContext::lagrangian(n, k, names));
  return ContactLagrangian(n, k, L, params);
}

ModelFile parse_model(std::string_view text, const std::filesystem::path& origin) {
  toml::table root;
  try {
    root = toml::parse(text, origin.string());
  } catch (const toml::parse_error& e) {
    throw ModelError(std::string(e.description()), static_cast<int>(e.source().begin.line));
  }

  ModelFile mf;
  mf.path = origin;
  reject_unknown_keys(root, {"model", "params", "simulate", "curve"}, "top level");

  const toml::table& model = *section(root, "model", true);
  reject_unknown_keys(model, {"name", "n", "k", "lagrangian"}, "model");
  if (const toml::node* nm = model.get("name")) mf.name = as_string(*nm, "model.name");
  mf.n = as_int(required(model, "n", "model"), "model.n");
  mf.k = as_int(required(model, "k", "model"), "model.k");
  if (mf.n < 1) throw ModelError("model.n must be at least 1", line_of(*model.get("n")));
  if (mf.k < 1) throw ModelError("model.k must be at least 1", line_of(*model.get("k")));
  const toml::node& lag = required(model, "lagrangian", "model");
  mf.lagrangian = as_string(lag, "model.lagrangian");
  if (mf.name.empty()) mf.name = origin.stem().string();

  if (const toml::table* params = section(root, "params", false)) {
    for (const auto& [key, node] : *params) {
      mf.params[std::string(key.str())] = as_number(node, "parameter " + std::string(key.str()));
    }
  }

  try {
    (void)mf.model();
  } catch (const Error& e) {
    throw ModelError(std::string("lagrangian: ") + e.what(), line_of(lag));
  }

  if (const toml::table* sim = section(root, "simulate", false)) {
    reject_unknown_keys(*sim, {"x0", "t0", "t1", "method", "h", "rtol", "atol"}, "simulate");
    SimulateSection s;
    const toml::node& x0 = required(*sim, "x0", "simulate");
    const toml::array* arr = x0.as_array();
    if (!arr) throw ModelError("simulate.x0 must be an array", line_of(x0));
    for (const auto& v : *arr) s.x0.push_back(as_number(v, "simulate.x0 entry"));
    const std::size_t want = static_cast<std::size_t>(2 * mf.k * mf.n + 1);
    if (s.x0.size() != want) {
      throw ModelError("simulate.x0 has " + std::to_string(s.x0.size()) + " entries, expected " +
                           std::to_string(want),
                       line_of(x0));
    }
    if (const toml::node* v = sim->get("t0")) s.t0 = as_number(*v, "simulate.t0");
    if (const toml::node* v = sim->get("t1")) s.t1 = as_number(*v, "simulate.t1");
    if (const toml::node* v = sim->get("h")) s.h = as_number(*v, "simulate.h");
    if (const toml::node* v = sim->get("rtol")) s.rtol = as_number(*v, "simulate.rtol");
    if (const toml::node* v = sim->get("atol")) s.atol = as_number(*v, "simulate.atol");
    if (const toml::node* v = sim->get("method")) {
      const std::string m = as_string(*v, "simulate.method");
      if (m == "rk4") {
        s.method = Method::RK4;
      } else if (m == "rk45") {
        s.method = Method::RK45;
      } else {
        throw ModelError("simulate.method must be \"rk4\" or \"rk45\"", line_of(*v));
      }
    }
    if (!(s.t1 > s.t0)) throw ModelError("simulate.t1 must exceed simulate.t0", line_of(*sim));
    mf.simulate = s;
  }

  if (const toml::table* cur = section(root, "curve", false)) {
    reject_unknown_keys(*cur, {"q", "source", "z0", "variations", "eps", "perturb"}, "curve");
    CurveSection c;
    if (const toml::node* v = cur->get("source")) {
      const std::string src = as_string(*v, "curve.source");
      if (src != "solution") throw ModelError("curve.source must be \"solution\"", line_of(*v));
      c.from_solution = true;
    }
    if (const toml::node* v = cur->get("q")) {
      const toml::array* arr = v->as_array();
      if (!arr) throw ModelError("curve.q must be an array of strings", line_of(*v));
      for (const auto& e : *arr) c.components.push_back(as_string(e, "curve.q entry"));
      if (static_cast<int>(c.components.size()) != mf.n) {
        throw ModelError("curve.q needs one expression per degree of freedom", line_of(*v));
      }
      ParseContext ctx;
      ctx.n = mf.n;
      ctx.allow_z = false;
      ctx.allow_time = true;
      ctx.max_order = -1;
      for (const auto& s : c.components) {
        try {
          const Expr e = parse(s, ctx);
          for (const auto& coord : free_coordinates(e)) {
            if (!(coord.is_param() && coord.name() == "t")) {
              throw ModelError("curve.q may only use t, found " + coord.render(), line_of(*v));
            }
          }
        } catch (const ModelError&) {
          throw;
        } catch (const Error& e) {
          throw ModelError(std::string("curve.q: ") + e.what(), line_of(*v));
        }
      }
    }
    if (c.from_solution == !c.components.empty()) {
      throw ModelError("[curve] needs exactly one of `q` or `source = \"solution\"`", line_of(*cur));
    }
    if (const toml::node* v = cur->get("z0")) c.z0 = as_number(*v, "curve.z0");
    if (const toml::node* v = cur->get("variations")) c.variations = as_int(*v, "curve.variations");
    if (const toml::node* v = cur->get("eps")) c.eps = as_number(*v, "curve.eps");
    if (const toml::node* v = cur->get("perturb")) c.perturb = as_number(*v, "curve.perturb");
    if (c.from_solution && !mf.simulate) {
      throw ModelError("curve.source = \"solution\" needs a [simulate] section", line_of(*cur));
    }
    mf.curve = c;
  }
  return mf;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot read model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path);
}

}  // namespace herglotz::cli

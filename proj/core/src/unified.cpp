#include "herglotz/unified.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "herglotz/errors.hpp"
#include "herglotz/hamiltonian.hpp"
#include "herglotz/lagrangian.hpp"

namespace herglotz {

const char* to_string(ChainMode m) {
  return m == ChainMode::HolonomyFirst ? "holonomy" : "appendix-a";
}

const char* to_string(ChainStatus s) {
  switch (s) {
    case ChainStatus::Determined: return "Determined";
    case ChainStatus::UnderDetermined: return "UnderDetermined";
    case ChainStatus::Inconsistent: return "Inconsistent";
  }
  return "?";
}

Expr Constraint::normalized() const {
  if (!solved_for) return reduced;
  return simplify(Expr::var(*solved_for) - solution);
}

UnifiedSystem build_unified(const ContactLagrangian& m) {
  const int n = m.n();
  const int k = m.k();
  UnifiedSystem u{m, {}, Expr(0), Expr(0), {}, Coordinate::z()};
  u.space = jet_coordinates(n, 2 * k - 1);
  for (int r = 0; r < k; ++r) {
    for (int i = 0; i < n; ++i) u.space.push_back(Coordinate::momentum(r, i));
  }
  u.space.push_back(Coordinate::z());
  Expr c(0);
  for (int a = 0; a < k; ++a) {
    for (int i = 0; i < n; ++i) c += Expr::momentum(a, i) * Expr::jet(i, a + 1);
  }
  u.coupling = simplify(c);
  u.hamiltonian = simplify(u.coupling - m.L());
  u.eta.coeff[Coordinate::z()] = Expr(1);
  for (int a = 0; a < k; ++a) {
    for (int i = 0; i < n; ++i) u.eta.coeff[Coordinate::jet(i, a)] = -Expr::momentum(a, i);
  }
  return u;
}

std::vector<Constraint> ConstraintChain::all_constraints() const {
  std::vector<Constraint> out;
  for (const auto& l : levels) out.insert(out.end(), l.constraints.begin(), l.constraints.end());
  return out;
}

std::vector<Constraint> ConstraintChain::momentum_constraints() const {
  std::vector<Constraint> out;
  for (const auto& c : all_constraints()) {
    if (c.defines_momentum()) out.push_back(c);
  }
  return out;
}

VectorFieldSym ConstraintChain::field() const {
  VectorFieldSym x = generic_field;
  for (auto& [c, e] : x.comp) e = substitute(e, resolved);
  x.blocks = blocks;
  for (auto& b : x.blocks) {
    for (auto& row : b.matrix) {
      for (auto& e : row) e = substitute(e, resolved);
    }
    for (auto& e : b.rhs) e = substitute(e, resolved);
  }
  return x;
}

Point ConstraintChain::sample(std::mt19937_64& rng, double box) const {
  std::uniform_real_distribution<double> dist(-box, box);
  const Point params = system.model.parameter_point();
  for (int attempt = 0; attempt < 200; ++attempt) {
    Point p = params;
    for (const auto& c : system.space) {
      if (!solved.count(c)) p[c] = dist(rng);
    }
    try {
      Point full = p;
      for (const auto& [c, e] : solved) full[c] = evaluate(e, p);
      return full;
    } catch (const DomainError&) {
      continue;
    }
  }
  throw EvalError("could not draw a point on the constraint set");
}

namespace {

class ChainBuilder {
 public:
  ChainBuilder(const UnifiedSystem& u, ChainMode mode, const ChainOptions& opts) : opts_(opts), rng_(opts.seed), chain_(u) {
    chain_.mode = mode;
    params_ = u.model.parameter_point();
  }

  ConstraintChain run();

 private:
  const ContactLagrangian& model() const { return chain_.system.model; }

  void build_generic_field();
  Expr reduce(const Expr& e) const { return substitute(substitute(e, chain_.resolved), chain_.solved); }
  Expr tangency(const Expr& c) const;
  std::vector<Coordinate> open_unknowns(const Expr& e) const;
  const std::vector<Point>& points();
  bool numerically_zero(const Expr& e);
  void add_constraint(ChainLevel& level, const Expr& raw);
  void process_coefficient_equations(ChainLevel& level, std::vector<Expr> eqs);
  void finish();

  ChainOptions opts_;
  std::mt19937_64 rng_;
  ConstraintChain chain_;
  Point params_;
  std::set<Coordinate> block_targets_;  // Unknown coordinates fixed by blocks
  std::vector<Point> points_;
  bool points_valid_ = false;
  bool stop_ = false;
  bool unsolved_constraint_ = false;
};

void ChainBuilder::build_generic_field() {
  const int n = model().n();
  const int k = model().k();
  VectorFieldSym& x = chain_.generic_field;
  x.space = chain_.system.space;
  const int holonomic_up_to = chain_.mode == ChainMode::HolonomyFirst ? 2 * k - 2 : k - 1;
  for (int a = 0; a <= 2 * k - 1; ++a) {
    for (int i = 0; i < n; ++i) {
      x.comp[Coordinate::jet(i, a)] =
          a <= holonomic_up_to ? Expr::jet(i, a + 1) : Expr::var(Coordinate::unknown(i, a));
    }
  }
  const Expr lz = model().Lz();
  for (int r = 0; r < k; ++r) {
    for (int i = 0; i < n; ++i) {
      Expr g = model().partial(Coordinate::jet(i, r)) + Expr::momentum(r, i) * lz;
      if (r > 0) g -= Expr::momentum(r - 1, i);
      x.comp[Coordinate::momentum(r, i)] = simplify(g);
    }
  }
  x.comp[Coordinate::z()] = model().L();
}

Expr ChainBuilder::tangency(const Expr& c) const {
  const auto deps = free_coordinates(c);
  Expr acc(0);
  for (const auto& x : chain_.system.space) {
    if (!deps.count(x)) continue;
    const Expr d = differentiate(c, x);
    if (!d.is_zero()) acc += chain_.generic_field.component(x) * d;
  }
  return substitute(acc, chain_.resolved);
}

std::vector<Coordinate> ChainBuilder::open_unknowns(const Expr& e) const {
  std::vector<Coordinate> out;
  for (const auto& c : free_coordinates(e)) {
    if (c.is_unknown() && !chain_.resolved.count(c) && !block_targets_.count(c)) out.push_back(c);
  }
  return out;
}

const std::vector<Point>& ChainBuilder::points() {
  if (!points_valid_) {
    points_.clear();
    for (int i = 0; i < opts_.samples; ++i) {
      try {
        points_.push_back(chain_.sample(rng_));
      } catch (const EvalError&) {
        break;
      }
    }
    points_valid_ = true;
  }
  return points_;
}

bool ChainBuilder::numerically_zero(const Expr& e) {
  if (e.is_zero()) return true;
  const std::vector<Expr> terms = e.kind() == NodeKind::Add ? e.args() : std::vector<Expr>{e};
  int used = 0;
  for (const auto& p : points()) {
    double sum = 0.0, mag = 0.0;
    try {
      for (const auto& t : terms) {
        const double v = evaluate(t, p);
        sum += v;
        mag += std::abs(v);
      }
    } catch (const DomainError&) {
      continue;
    } catch (const UnboundCoordinate&) {
      return false;
    }
    ++used;
    if (std::abs(sum) > opts_.zero_tol * mag || (mag == 0.0 && sum != 0.0)) return false;
  }
  return used > 0;
}

void ChainBuilder::add_constraint(ChainLevel& level, const Expr& raw) {
  const Expr red = reduce(raw);
  if (red.is_zero()) return;
  if (numerically_zero(red)) {
    const std::string msg = "level " + std::to_string(level.index) +
                            ": a tangency condition is symbolically nonzero but vanishes at every sample; "
                            "treated as dependent";
    level.notes.push_back(msg);
    chain_.warnings.push_back(msg);
    return;
  }
  bool has_coordinate = false;
  for (const auto& c : free_coordinates(red)) {
    if (!c.is_param()) has_coordinate = true;
  }
  if (!has_coordinate) {
    chain_.inconsistent_residuals.push_back(red);
    chain_.status = ChainStatus::Inconsistent;
    level.constraints.push_back(Constraint{raw, red, std::nullopt, Expr(0)});
    stop_ = true;
    return;
  }

  // Candidate variables: momenta (highest level first), then jets (highest order first), then z.
  std::vector<Coordinate> cands;
  for (const auto& c : free_coordinates(red)) {
    if (c.is_momentum() || c.is_jet() || c.is_z()) cands.push_back(c);
  }
  auto rank = [](const Coordinate& c) {
    if (c.is_momentum()) return std::make_tuple(0, -c.level(), c.dof());
    if (c.is_jet()) return std::make_tuple(1, -c.order(), c.dof());
    return std::make_tuple(2, 0, 0);
  };
  std::sort(cands.begin(), cands.end(), [&](const Coordinate& a, const Coordinate& b) { return rank(a) < rank(b); });

  for (const auto& v : cands) {
    auto af = affine_in(red, v);
    if (!af) continue;
    const Expr slope = af->first;
    if (numerically_zero(slope)) continue;
    const Expr sol = simplify(-af->second / slope);
    Bindings one{{v, sol}};
    for (auto& [c, e] : chain_.solved) e = substitute(e, one);
    chain_.solved[v] = sol;
    points_valid_ = false;
    level.constraints.push_back(Constraint{raw, red, v, sol});
    return;
  }
  level.constraints.push_back(Constraint{raw, red, std::nullopt, Expr(0)});
  const std::string msg = "level " + std::to_string(level.index) + ": constraint could not be solved explicitly";
  level.notes.push_back(msg);
  chain_.warnings.push_back(msg);
  unsolved_constraint_ = true;
}

void ChainBuilder::process_coefficient_equations(ChainLevel& level, std::vector<Expr> eqs) {
  std::vector<bool> done(eqs.size(), false);
  bool progress = true;
  while (progress && !stop_) {
    progress = false;
    for (std::size_t q = 0; q < eqs.size() && !stop_; ++q) {
      if (done[q]) continue;
      eqs[q] = substitute(eqs[q], chain_.resolved);
      const auto open = open_unknowns(eqs[q]);
      if (open.empty()) {
        done[q] = true;
        progress = true;
        bool numeric_only = false;
        for (const auto& c : free_coordinates(eqs[q])) numeric_only |= c.is_unknown();
        if (!numeric_only) add_constraint(level, eqs[q]);
        continue;
      }
      std::vector<Coordinate> nz;
      for (const auto& u : open) {
        if (!numerically_zero(reduce(differentiate(eqs[q], u)))) nz.push_back(u);
      }
      Bindings open_zero;
      for (const auto& u : open) open_zero[u] = Expr(0);
      if (nz.empty()) {
        done[q] = true;
        progress = true;
        add_constraint(level, substitute(eqs[q], open_zero));
        continue;
      }
      if (nz.size() == 1) {
        const Coordinate u = nz.front();
        const Expr a = differentiate(eqs[q], u);
        const Expr b = substitute(eqs[q], open_zero);
        const Expr sol = simplify(-b / a);
        for (auto& [c, e] : chain_.resolved) e = substitute(e, Bindings{{u, sol}});
        chain_.resolved[u] = sol;
        level.resolved_coefficients[u] = sol;
        done[q] = true;
        progress = true;
      }
    }
    if (progress || stop_) continue;

    // Several unknowns per equation: gather the lowest-order ones into a linear block.
    std::map<int, std::vector<std::size_t>> by_order;
    std::map<int, std::set<Coordinate>> unknowns_by_order;
    for (std::size_t q = 0; q < eqs.size(); ++q) {
      if (done[q]) continue;
      const auto open = open_unknowns(eqs[q]);
      int lo = 1 << 30;
      for (const auto& u : open) lo = std::min(lo, u.order());
      bool single_order = true;
      for (const auto& u : open) {
        if (u.order() != lo) single_order = false;
      }
      if (!single_order) continue;
      by_order[lo].push_back(q);
      for (const auto& u : open) unknowns_by_order[lo].insert(u);
    }
    for (const auto& [order, idx] : by_order) {
      const auto& us = unknowns_by_order[order];
      if (idx.size() != us.size()) continue;
      ImplicitBlock blk;
      Bindings zero;
      for (const auto& u : us) zero[u] = Expr(0);
      for (const auto& u : us) blk.targets.push_back(Coordinate::jet(u.dof(), u.order()));
      for (std::size_t q : idx) {
        std::vector<Expr> row;
        for (const auto& u : us) row.push_back(differentiate(eqs[q], u));
        blk.matrix.push_back(std::move(row));
        blk.rhs.push_back(simplify(-substitute(eqs[q], zero)));
      }
      // Require the reduced block to be invertible at the samples.
      bool ok = false;
      for (const auto& p : points()) {
        try {
          const int m = static_cast<int>(us.size());
          std::vector<double> a(static_cast<std::size_t>(m * m));
          for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) a[i * m + j] = evaluate(reduce(blk.matrix[i][j]), p);
          }
          std::vector<double> b(m, 0.0);
          solve_dense(m, a, b);
          ok = true;
        } catch (const Error&) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      for (const auto& u : us) block_targets_.insert(u);
      for (std::size_t q : idx) done[q] = true;
      chain_.blocks.push_back(std::move(blk));
      level.notes.push_back("coefficients of order " + std::to_string(order) + " fixed by a linear block");
      progress = true;
      break;
    }
  }
  for (std::size_t q = 0; q < eqs.size(); ++q) {
    if (!done[q]) {
      const std::string msg = "level " + std::to_string(level.index) + ": coefficient equation left unresolved";
      level.notes.push_back(msg);
      chain_.warnings.push_back(msg);
    }
  }
}

void ChainBuilder::finish() {
  if (chain_.status == ChainStatus::Inconsistent) return;
  const int n = model().n();
  const int k = model().k();
  const int first = chain_.mode == ChainMode::HolonomyFirst ? 2 * k - 1 : k;
  chain_.free_unknowns.clear();
  for (int a = first; a <= 2 * k - 1; ++a) {
    for (int i = 0; i < n; ++i) {
      const Coordinate u = Coordinate::unknown(i, a);
      if (!chain_.resolved.count(u) && !block_targets_.count(u)) chain_.free_unknowns.push_back(u);
    }
  }
  chain_.status = chain_.free_unknowns.empty() && !unsolved_constraint_ ? ChainStatus::Determined
                                                                         : ChainStatus::UnderDetermined;
}

ConstraintChain ChainBuilder::run() {
  const int n = model().n();
  const int k = model().k();
  const int cap = opts_.max_levels > 0 ? opts_.max_levels : 4 * k + 4;
  build_generic_field();

  ChainLevel level0;
  level0.index = 0;
  level0.origin = "Compatibility";
  if (chain_.mode == ChainMode::HolonomyFirst) {
    for (int i = 0; i < n; ++i) {
      add_constraint(level0, simplify(Expr::momentum(k - 1, i) - model().partial(Coordinate::jet(i, k))));
    }
  } else {
    const auto p = momenta(model());
    for (int r = k - 1; r >= 0; --r) {
      for (int i = 0; i < n; ++i) add_constraint(level0, simplify(Expr::momentum(r, i) - p[r][i]));
    }
  }
  std::vector<Constraint> pending = level0.constraints;
  chain_.levels.push_back(std::move(level0));

  for (int idx = 1; !pending.empty() && !stop_; ++idx) {
    if (idx > cap) {
      throw NonTermination("constraint algorithm exceeded " + std::to_string(cap) + " levels");
    }
    ChainLevel level;
    level.index = idx;
    level.origin = "Tangency(" + std::to_string(idx - 1) + ")";
    std::vector<Expr> coefficient_eqs;
    for (const auto& c : pending) {
      const Expr t = tangency(c.raw);
      if (open_unknowns(t).empty()) {
        add_constraint(level, t);
        if (stop_) break;
      } else {
        coefficient_eqs.push_back(t);
      }
    }
    if (!stop_) process_coefficient_equations(level, std::move(coefficient_eqs));
    pending = level.constraints;
    chain_.levels.push_back(std::move(level));
  }
  finish();
  return std::move(chain_);
}

}  // namespace

ConstraintChain constraint_algorithm(const UnifiedSystem& u, ChainMode mode, const ChainOptions& opts) {
  ChainBuilder b(u, mode, opts);
  return b.run();
}

bool constraint_matches(const ConstraintChain& chain, const Constraint& c, const Expr& expected) {
  if (!c.solved_for) {
    const Expr e = substitute(expected, chain.solved);
    return equivalent(c.reduced, e) || equivalent(c.reduced, -e);
  }
  const Coordinate v = *c.solved_for;
  Bindings others = chain.solved;
  others.erase(v);
  const Expr red = substitute(expected, others);
  const auto af = affine_in(red, v);
  if (!af || is_zero_expr(af->first)) return false;
  const Expr value = simplify(-af->second / af->first);
  return equivalent(value, substitute(c.solution, others));
}

namespace {

void require_determined(const ConstraintChain& chain) {
  if (chain.status != ChainStatus::Determined) {
    std::string msg = std::string("constraint chain is ") + to_string(chain.status);
    for (const auto& u : chain.free_unknowns) msg += " " + u.render();
    throw UnderDetermined(msg);
  }
}

}  // namespace

VectorFieldSym project_to_lagrangian(const ConstraintChain& chain) {
  require_determined(chain);
  const ContactLagrangian& m = chain.system.model;
  const VectorFieldSym full = chain.field();
  VectorFieldSym x;
  x.space = lagrangian_space(m);
  for (const auto& c : x.space) x.comp[c] = substitute(full.component(c), chain.solved);
  x.blocks = full.blocks;
  for (auto& b : x.blocks) {
    for (auto& row : b.matrix) {
      for (auto& e : row) e = substitute(e, chain.solved);
    }
    for (auto& e : b.rhs) e = substitute(e, chain.solved);
  }
  bool hol = identical(x.component(Coordinate::z()), m.L());
  for (int a = 0; a + 1 <= 2 * m.k() - 1 && hol; ++a) {
    for (int i = 0; i < m.n(); ++i) {
      if (!identical(x.component(Coordinate::jet(i, a)), Expr::jet(i, a + 1))) hol = false;
    }
  }
  x.holonomic = hol;
  return x;
}

VectorFieldSym project_to_hamiltonian(const ConstraintChain& chain) {
  require_determined(chain);
  const ContactLagrangian& m = chain.system.model;
  const LegendreMap leg = legendre(m);
  const Bindings& inv = leg.inverse();
  const VectorFieldSym full = chain.field();
  VectorFieldSym x;
  x.space = hamiltonian_space(m.n(), m.k());
  for (const auto& c : x.space) x.comp[c] = substitute(full.component(c), inv);
  return x;
}

}  // namespace herglotz

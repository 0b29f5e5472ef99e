#include "herglotz/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "herglotz/errors.hpp"

namespace herglotz {

std::vector<Coordinate> lagrangian_space(const ContactLagrangian& m) {
  return m.state_coordinates(2 * m.k() - 1);
}

Expr apply_DL(const ContactLagrangian& m, const Expr& F, int max_order) {
  if (max_order < 0) max_order = 2 * m.k() - 1;
  const int r = max_jet_order(F);
  if (r + 1 > max_order) {
    throw OrderOverflow("D_L would need jets of order " + std::to_string(r + 1) + " > " + std::to_string(max_order));
  }
  Expr acc(0);
  for (int a = 0; a <= r; ++a) {
    for (int i = 0; i < m.n(); ++i) {
      const Expr d = differentiate(F, Coordinate::jet(i, a));
      if (!d.is_zero()) acc += Expr::jet(i, a + 1) * d;
    }
  }
  const Expr dz = differentiate(F, Coordinate::z());
  if (!dz.is_zero()) acc += m.L() * dz;
  const Expr lz = m.Lz();
  if (!lz.is_zero()) acc -= lz * F;
  return simplify(acc);
}

Expr apply_DL_power(const ContactLagrangian& m, const Expr& F, int times, int max_order) {
  Expr e = F;
  for (int t = 0; t < times; ++t) e = apply_DL(m, e, max_order);
  return e;
}

MomentaTable momenta(const ContactLagrangian& m) {
  const int k = m.k();
  MomentaTable p(k, std::vector<Expr>(m.n()));
  for (int i = 0; i < m.n(); ++i) {
    p[k - 1][i] = m.partial(Coordinate::jet(i, k));
    for (int r = k - 2; r >= 0; --r) {
      p[r][i] = simplify(m.partial(Coordinate::jet(i, r + 1)) - apply_DL(m, p[r + 1][i]));
    }
  }
  return p;
}

MomentaTable momenta_direct(const ContactLagrangian& m) {
  const int k = m.k();
  MomentaTable p(k, std::vector<Expr>(m.n()));
  for (int i = 0; i < m.n(); ++i) {
    for (int r = 1; r <= k; ++r) {
      Expr sum(0);
      for (int a = 0; a <= k - r; ++a) {
        Expr term = apply_DL_power(m, m.partial(Coordinate::jet(i, r + a)), a);
        sum += (a % 2 == 0) ? term : -term;
      }
      p[r - 1][i] = simplify(sum);
    }
  }
  return p;
}

namespace {

Expr energy_from(const ContactLagrangian& m, const MomentaTable& p) {
  Expr e = -m.L();
  for (int a = 0; a < m.k(); ++a) {
    for (int i = 0; i < m.n(); ++i) e += p[a][i] * Expr::jet(i, a + 1);
  }
  return simplify(e);
}

}  // namespace

Expr energy_direct(const ContactLagrangian& m) {
  const int k = m.k();
  Expr e = -m.L();
  for (int i = 0; i < m.n(); ++i) {
    for (int b = 1; b <= k; ++b) {
      for (int a = 0; a <= k - b; ++a) {
        Expr term = apply_DL_power(m, m.partial(Coordinate::jet(i, b + a)), a);
        term = Expr::jet(i, b) * term;
        e += (a % 2 == 0) ? term : -term;
      }
    }
  }
  return simplify(e);
}

Expr energy(const ContactLagrangian& m) {
  const Expr e = energy_from(m, momenta(m));
  if (check_equivalent(e, energy_direct(m)) == Equivalence::NotEquivalent) {
    throw Error("internal error: energy formulas disagree");
  }
  return e;
}

LagrangianForms forms(const ContactLagrangian& m) {
  LagrangianForms f;
  f.space = lagrangian_space(m);
  const auto p = momenta(m);
  f.eta.coeff[Coordinate::z()] = Expr(1);
  for (int a = 0; a < m.k(); ++a) {
    for (int i = 0; i < m.n(); ++i) {
      const Coordinate q = Coordinate::jet(i, a);
      if (p[a][i].is_zero()) continue;
      f.theta.coeff[q] = p[a][i];
      f.eta.coeff[q] = simplify(-p[a][i]);
    }
  }
  f.omega = negate(exterior_derivative(f.theta, f.space));

  // Spot check against the iterated construction from the direct sums.
  OneForm theta2;
  const auto pd = momenta_direct(m);
  for (int a = 0; a < m.k(); ++a) {
    for (int i = 0; i < m.n(); ++i) theta2.coeff[Coordinate::jet(i, a)] = pd[a][i];
  }
  const TwoForm omega2 = negate(exterior_derivative(theta2, f.space));
  std::mt19937_64 rng(0xC0FFEE);
  for (int attempt = 0; attempt < 10; ++attempt) {
    const Point pt = random_state(m, 2 * m.k() - 1, rng);
    try {
      const auto a = f.omega.matrix(f.space, pt);
      const auto b = omega2.matrix(f.space, pt);
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (std::abs(a[j] - b[j]) > 1e-9 * (1.0 + std::abs(a[j]))) {
          throw Error("internal error: Lagrangian 2-form constructions disagree");
        }
      }
      break;
    } catch (const DomainError&) {
      continue;
    }
  }
  return f;
}

std::vector<Expr> herglotz_equations(const ContactLagrangian& m) {
  const int k = m.k();
  std::vector<Expr> out;
  for (int i = 0; i < m.n(); ++i) {
    Expr sum(0);
    for (int a = 0; a <= k; ++a) {
      Expr term = apply_DL_power(m, m.partial(Coordinate::jet(i, a)), a, 2 * k);
      sum += (a % 2 == 0) ? term : -term;
    }
    out.push_back(simplify(sum));
  }
  return out;
}

namespace {

void require_regular(const ContactLagrangian& m) {
  const auto rep = classify(m);
  if (rep.verdict == Verdict::Singular) throw SingularLagrangian("the Lagrangian is singular (Hessian determinant vanishes)");
}

}  // namespace

VectorFieldSym lagrangian_vector_field(const ContactLagrangian& m) {
  require_regular(m);
  const int k = m.k();
  const int n = m.n();
  VectorFieldSym x;
  x.space = lagrangian_space(m);
  x.holonomic = true;
  for (int a = 0; a + 1 <= 2 * k - 1; ++a) {
    for (int i = 0; i < n; ++i) x.comp[Coordinate::jet(i, a)] = Expr::jet(i, a + 1);
  }
  x.comp[Coordinate::z()] = m.L();

  const auto eqs = herglotz_equations(m);
  ExprMatrix a(n, std::vector<Expr>(n));
  std::vector<Expr> rhs(n);
  Bindings top_zero;
  for (int j = 0; j < n; ++j) top_zero[Coordinate::jet(j, 2 * k)] = Expr(0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = differentiate(eqs[i], Coordinate::jet(j, 2 * k));
    rhs[i] = simplify(-substitute(eqs[i], top_zero));
  }
  if (n == 1) {
    if (a[0][0].is_zero()) throw SingularLagrangian("no top-order term in the Herglotz equation");
    x.comp[Coordinate::jet(0, 2 * k - 1)] = simplify(rhs[0] / a[0][0]);
  } else {
    ImplicitBlock blk;
    for (int i = 0; i < n; ++i) {
      blk.targets.push_back(Coordinate::jet(i, 2 * k - 1));
      x.comp[Coordinate::jet(i, 2 * k - 1)] = Expr::var(Coordinate::unknown(i, 2 * k - 1));
    }
    blk.matrix = a;
    blk.rhs = rhs;
    x.blocks.push_back(std::move(blk));
  }
  return x;
}

VectorFieldSym reeb_field(const ContactLagrangian& m) {
  require_regular(m);
  const int k = m.k();
  const int n = m.n();
  const auto p = momenta(m);
  VectorFieldSym r;
  r.space = lagrangian_space(m);
  r.comp[Coordinate::z()] = Expr(1);

  // f(l, b) for b >= k: symbolic value when n == 1, the Unknown symbol otherwise.
  std::map<Coordinate, Expr> f;
  for (int lvl = k - 1; lvl >= 0; --lvl) {
    const int top = 2 * k - 1 - lvl;
    ExprMatrix a(n, std::vector<Expr>(n));
    std::vector<Expr> rhs(n);
    for (int i = 0; i < n; ++i) {
      Expr known = differentiate(p[lvl][i], Coordinate::z());
      for (int b = k; b < top; ++b) {
        for (int l = 0; l < n; ++l) {
          const Expr d = differentiate(p[lvl][i], Coordinate::jet(l, b));
          if (!d.is_zero()) known += f.at(Coordinate::jet(l, b)) * d;
        }
      }
      rhs[i] = simplify(-known);
      for (int j = 0; j < n; ++j) a[i][j] = differentiate(p[lvl][i], Coordinate::jet(j, top));
    }
    if (n == 1) {
      if (a[0][0].is_zero()) throw SingularLagrangian("Reeb recursion hit a zero pivot");
      const Expr v = simplify(rhs[0] / a[0][0]);
      f[Coordinate::jet(0, top)] = v;
      r.comp[Coordinate::jet(0, top)] = v;
    } else {
      ImplicitBlock blk;
      for (int j = 0; j < n; ++j) {
        const Coordinate c = Coordinate::jet(j, top);
        const Expr u = Expr::var(Coordinate::unknown(j, top));
        blk.targets.push_back(c);
        f[c] = u;
        r.comp[c] = u;
      }
      blk.matrix = a;
      blk.rhs = rhs;
      r.blocks.push_back(std::move(blk));
    }
  }

  // Defining contractions at sample points.
  const auto fm = forms(m);
  std::mt19937_64 rng(0x5EEB);
  int checked = 0;
  for (int attempt = 0; attempt < 100 && checked < 10; ++attempt) {
    const Point pt = random_state(m, 2 * k - 1, rng);
    try {
      const Point v = r.evaluate(pt);
      const double e1 = fm.eta.contract(v, pt) - 1.0;
      const auto w = fm.omega.contract(v, fm.space, pt);
      double scale = 1.0;
      for (const auto& [c, x] : v) scale = std::max(scale, std::abs(x));
      double e2 = 0.0;
      for (double x : w) e2 = std::max(e2, std::abs(x));
      if (std::abs(e1) > 1e-9 * scale || e2 > 1e-9 * scale * scale) {
        throw Error("Reeb field fails its defining contractions (residuals " + std::to_string(e1) + ", " +
                    std::to_string(e2) + ")");
      }
      ++checked;
    } catch (const DomainError&) {
    } catch (const NotInvertible&) {
    }
  }
  return r;
}

Expr tulczyjew_dT(const Expr& F, int n, const std::optional<Coordinate>& time) {
  if (contains(F, Coordinate::z())) throw ZDependence("the Tulczyjew derivative is defined for z-free functions");
  const int r = max_jet_order(F);
  Expr acc(0);
  for (int a = 0; a <= r; ++a) {
    for (int i = 0; i < n; ++i) {
      const Expr d = differentiate(F, Coordinate::jet(i, a));
      if (!d.is_zero()) acc += Expr::jet(i, a + 1) * d;
    }
  }
  if (time) acc += differentiate(F, *time);
  return simplify(acc);
}

std::vector<Expr> lagrange_differential(const Expr& L0, int n, int k) {
  if (contains(L0, Coordinate::z())) throw ZDependence("the Lagrange differential is defined for z-free Lagrangians");
  std::vector<Expr> out;
  for (int i = 0; i < n; ++i) {
    Expr sum(0);
    for (int a = 0; a <= k; ++a) {
      Expr term = differentiate(L0, Coordinate::jet(i, a));
      for (int t = 0; t < a; ++t) term = tulczyjew_dT(term, n);
      sum += (a % 2 == 0) ? term : -term;
    }
    out.push_back(simplify(sum));
  }
  return out;
}

}  // namespace herglotz

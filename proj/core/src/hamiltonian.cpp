#include "herglotz/hamiltonian.hpp"

#include <cmath>

#include "herglotz/errors.hpp"

namespace herglotz {

std::vector<Coordinate> hamiltonian_space(int n, int k) {
  std::vector<Coordinate> out = jet_coordinates(n, k - 1);
  for (int r = 0; r < k; ++r) {
    for (int i = 0; i < n; ++i) out.push_back(Coordinate::momentum(r, i));
  }
  out.push_back(Coordinate::z());
  return out;
}

const Bindings& LegendreMap::inverse() const {
  if (kind_ != InverseKind::Symbolic) throw NotInvertible("the Legendre map has no closed-form inverse");
  return inverse_;
}

Point LegendreMap::apply(const Point& state) const {
  Point out;
  for (const auto& c : hamiltonian_space(n_, k_)) out[c] = evaluate(forward_.at(c), state);
  return out;
}

Point LegendreMap::invert(const Point& ham, const NewtonOptions& opts) const {
  Point out;
  for (const auto& c : jet_coordinates(n_, k_ - 1)) out[c] = ham.at(c);
  out[Coordinate::z()] = ham.at(Coordinate::z());
  if (kind_ == InverseKind::Symbolic) {
    for (const auto& [c, e] : inverse_) out[c] = evaluate(e, ham);
    return out;
  }

  const std::size_t m = unknowns_.size();
  Point pt = ham;
  for (const auto& u : unknowns_) pt[u] = 0.0;
  auto residual = [&](const Point& p) {
    std::vector<double> f(m);
    for (std::size_t i = 0; i < m; ++i) f[i] = evaluate(residual_exprs_[i], p);
    return f;
  };
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
  };
  std::vector<double> f = residual(pt);
  for (int it = 0; it < opts.max_iter && norm(f) > opts.tol; ++it) {
    std::vector<double> j(m * m);
    for (std::size_t a = 0; a < m * m; ++a) j[a] = evaluate(jacobian_[a], pt);
    std::vector<double> step = solve_dense(static_cast<int>(m), j, f);
    double lambda = 1.0;
    const double f0 = norm(f);
    for (int ls = 0; ls < 30; ++ls) {
      Point trial = pt;
      for (std::size_t a = 0; a < m; ++a) trial[unknowns_[a]] -= lambda * step[a];
      std::vector<double> ft;
      try {
        ft = residual(trial);
      } catch (const DomainError&) {
        lambda *= 0.5;
        continue;
      }
      if (norm(ft) < f0 || ls == 29) {
        pt = std::move(trial);
        f = std::move(ft);
        break;
      }
      lambda *= 0.5;
    }
  }
  if (norm(f) > opts.tol * 1e3) throw NotInvertible("Newton inversion of the Legendre map did not converge");
  for (const auto& u : unknowns_) out[u] = pt.at(u);
  return out;
}

namespace {

std::optional<std::vector<Expr>> solve_affine(const std::vector<Expr>& e, const std::vector<Coordinate>& x,
                                              const std::vector<Expr>& target) {
  const std::size_t n = x.size();
  ExprMatrix a(n, std::vector<Expr>(n));
  std::vector<Expr> rhs(n);
  Bindings zero;
  for (const auto& c : x) zero[c] = Expr(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Expr d = differentiate(e[i], x[j]);
      for (const auto& c : x) {
        if (!contains(d, c)) continue;
        const Expr d2 = differentiate(d, c);
        if (!d2.is_zero() && !is_zero_expr(d2)) return std::nullopt;
      }
      a[i][j] = substitute(d, zero);
    }
    rhs[i] = simplify(target[i] - substitute(e[i], zero));
  }
  if (n == 1) {
    if (a[0][0].is_zero() || is_zero_expr(a[0][0])) throw NotInvertible("the Legendre map is singular");
    return std::vector<Expr>{simplify(rhs[0] / a[0][0])};
  }
  if (n > 3) return std::nullopt;
  const Expr det = symbolic_determinant(a);
  if (det.is_zero() || is_zero_expr(det)) throw NotInvertible("the Legendre map is singular");
  std::vector<Expr> out;
  for (std::size_t j = 0; j < n; ++j) {
    ExprMatrix aj = a;
    for (std::size_t i = 0; i < n; ++i) aj[i][j] = rhs[i];
    out.push_back(simplify(symbolic_determinant(aj) / det));
  }
  return out;
}

}  // namespace

LegendreMap legendre(const ContactLagrangian& m) {
  if (classify(m).verdict == Verdict::Singular) throw NotInvertible("the Lagrangian is singular");
  const int n = m.n();
  const int k = m.k();
  const auto p = momenta(m);
  LegendreMap leg;
  leg.n_ = n;
  leg.k_ = k;
  for (const auto& c : jet_coordinates(n, k - 1)) leg.forward_[c] = Expr::var(c);
  leg.forward_[Coordinate::z()] = Expr::z();
  for (int r = 0; r < k; ++r) {
    for (int i = 0; i < n; ++i) leg.forward_[Coordinate::momentum(r, i)] = p[r][i];
  }

  for (int b = k; b <= 2 * k - 1; ++b) {
    for (int i = 0; i < n; ++i) leg.unknowns_.push_back(Coordinate::jet(i, b));
  }
  for (int r = 0; r < k; ++r) {
    for (int i = 0; i < n; ++i) {
      leg.residual_momenta_.push_back(Coordinate::momentum(r, i));
      leg.residual_exprs_.push_back(simplify(p[r][i] - Expr::momentum(r, i)));
    }
  }
  for (const auto& f : leg.residual_exprs_) {
    for (const auto& u : leg.unknowns_) leg.jacobian_.push_back(differentiate(f, u));
  }

  Bindings sol;
  bool symbolic = true;
  for (int r = k - 1; r >= 0 && symbolic; --r) {
    const int top = 2 * k - 1 - r;
    std::vector<Expr> e;
    std::vector<Coordinate> x;
    std::vector<Expr> target;
    for (int i = 0; i < n; ++i) {
      e.push_back(substitute(p[r][i], sol));
      x.push_back(Coordinate::jet(i, top));
      target.push_back(Expr::momentum(r, i));
    }
    auto s = solve_affine(e, x, target);
    if (!s) {
      symbolic = false;
      break;
    }
    for (int i = 0; i < n; ++i) sol[x[i]] = (*s)[i];
  }
  if (symbolic) {
    leg.kind_ = LegendreMap::InverseKind::Symbolic;
    leg.inverse_ = std::move(sol);
  }
  return leg;
}

Expr hamiltonian(const ContactLagrangian& m) { return hamiltonian(m, legendre(m)); }

Expr hamiltonian(const ContactLagrangian& m, const LegendreMap& leg) {
  const Bindings& inv = leg.inverse();
  const int k = m.k();
  Expr h = -substitute(m.L(), inv);
  for (int a = 0; a < k; ++a) {
    for (int i = 0; i < m.n(); ++i) {
      const Coordinate next = Coordinate::jet(i, a + 1);
      const Expr v = a + 1 < k ? Expr::var(next) : inv.at(next);
      h += Expr::momentum(a, i) * v;
    }
  }
  h = simplify(h);
  if (check_equivalent(substitute(h, leg.forward()), energy(m)) == Equivalence::NotEquivalent) {
    throw Error("internal error: the Hamiltonian does not pull back to the Lagrangian energy");
  }
  return h;
}

VectorFieldSym hamiltonian_vector_field(const Expr& H, int n, int k) {
  VectorFieldSym x;
  x.space = hamiltonian_space(n, k);
  const Expr hz = differentiate(H, Coordinate::z());
  Expr zc = -H;
  for (int a = 0; a < k; ++a) {
    for (int i = 0; i < n; ++i) {
      const Coordinate q = Coordinate::jet(i, a);
      const Coordinate p = Coordinate::momentum(a, i);
      const Expr hp = differentiate(H, p);
      x.comp[q] = hp;
      x.comp[p] = simplify(-(differentiate(H, q) + Expr::var(p) * hz));
      zc += Expr::var(p) * hp;
    }
  }
  x.comp[Coordinate::z()] = simplify(zc);
  return x;
}

OneForm canonical_contact_form(int n, int k) {
  OneForm eta;
  eta.coeff[Coordinate::z()] = Expr(1);
  for (int a = 0; a < k; ++a) {
    for (int i = 0; i < n; ++i) eta.coeff[Coordinate::jet(i, a)] = -Expr::momentum(a, i);
  }
  return eta;
}

}  // namespace herglotz

#include "herglotz/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "herglotz/compiled.hpp"
#include "herglotz/errors.hpp"
#include "herglotz/hamiltonian.hpp"
#include "herglotz/lagrangian.hpp"

namespace herglotz {

CheckReport make_report(std::string name, std::string where, double residual, double tolerance, std::string detail) {
  CheckReport r;
  r.name = std::move(name);
  r.where = std::move(where);
  r.max_residual = residual;
  r.tolerance = tolerance;
  r.pass = residual <= tolerance;
  r.detail = std::move(detail);
  return r;
}

bool all_pass(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
}

namespace {

void require_regular(const ContactLagrangian& m) {
  if (classify(m).verdict == Verdict::Singular) {
    throw SingularLagrangian("the Lagrangian is singular; contact checks do not apply");
  }
}

std::string sample_label(int n) { return std::to_string(n) + " sample points"; }

double max_abs(const Point& v) {
  double s = 0.0;
  for (const auto& [c, x] : v) s = std::max(s, std::abs(x));
  return s;
}

/// Condition number of `a` after symmetric diagonal equilibration, so that
/// coordinates with very different scales do not read as degeneracy.
double equilibrated_condition(const std::vector<double>& a, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = a[i * n + j];
  }
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  for (int it = 0; it < 20; ++it) {
    const Eigen::MatrixXd s = d.asDiagonal() * m * d.asDiagonal();
    for (int i = 0; i < n; ++i) {
      const double r = s.row(i).cwiseAbs().maxCoeff();
      if (r == 0.0) return std::numeric_limits<double>::infinity();
      d(i) /= std::sqrt(r);
    }
  }
  const Eigen::MatrixXd s = d.asDiagonal() * m * d.asDiagonal();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(s).singularValues();
  const double lo = sv(n - 1);
  return lo > 0.0 ? sv(0) / lo : std::numeric_limits<double>::infinity();
}

/// Evaluates a set of expressions along a trajectory, one row at a time.
class RowEvaluator {
 public:
  RowEvaluator(const std::vector<Expr>& exprs, const Trajectory& traj, const Point& params) {
    SlotMap slots;
    int next = 0;
    for (const auto& c : traj.coords) slots[c] = next++;
    for (const auto& [c, v] : params) {
      if (!slots.count(c)) slots[c] = next++;
    }
    program_ = CompiledProgram(exprs, slots);
    in_.assign(static_cast<std::size_t>(next), 0.0);
    for (const auto& [c, v] : params) in_[slots.at(c)] = v;
    width_ = traj.coords.size();
    out_.resize(exprs.size());
  }

  const std::vector<double>& operator()(const std::vector<double>& row) {
    std::copy(row.begin(), row.begin() + static_cast<long>(width_), in_.begin());
    program_.eval(in_.data(), out_.data());
    return out_;
  }

 private:
  CompiledProgram program_;
  std::vector<double> in_;
  std::vector<double> out_;
  std::size_t width_ = 0;
};

bool uniform_spacing(const std::vector<double>& t) {
  if (t.size() < 5) return false;
  const double h = t[1] - t[0];
  for (std::size_t j = 1; j + 1 < t.size(); ++j) {
    if (std::abs((t[j + 1] - t[j]) - h) > 1e-9 * std::abs(h)) return false;
  }
  return true;
}

double five_point(const std::vector<double>& f, std::size_t j, double h) {
  return (-f[j + 2] + 8.0 * f[j + 1] - 8.0 * f[j - 1] + f[j - 2]) / (12.0 * h);
}

struct DissipationData {
  std::vector<double> E, RE, L, Lz, contact;
};

DissipationData dissipation_data(const ContactLagrangian& m, const Trajectory& traj) {
  const Point params = m.parameter_point();
  const auto space = lagrangian_space(m);
  for (const auto& c : space) traj.column(c);

  const Expr E = energy(m);
  const VectorFieldSym R = reeb_field(m);
  const VectorFieldSym X = lagrangian_vector_field(m);
  const LagrangianForms fm = forms(m);

  std::vector<Expr> exprs{E, m.L(), m.Lz()};
  for (const auto& c : space) exprs.push_back(differentiate(E, c));
  for (const auto& c : space) exprs.push_back(fm.eta.at(c));
  RowEvaluator eval(exprs, traj, params);
  const NumericField rn(R, params);
  const NumericField xn(X, params);

  const std::size_t d = space.size();
  std::vector<std::size_t> cols;
  for (const auto& c : space) cols.push_back(traj.column(c));
  std::vector<double> x(d), r(d), v(d);

  DissipationData out;
  for (const auto& row : traj.states) {
    const auto& vals = eval(row);
    for (std::size_t i = 0; i < d; ++i) x[i] = row[cols[i]];
    rn(x.data(), r.data());
    xn(x.data(), v.data());
    double re = 0.0, eta_x = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      re += vals[3 + i] * r[i];
      eta_x += vals[3 + d + i] * v[i];
    }
    out.E.push_back(vals[0]);
    out.L.push_back(vals[1]);
    out.Lz.push_back(vals[2]);
    out.RE.push_back(re);
    out.contact.push_back(eta_x + vals[0]);
  }
  return out;
}

}  // namespace

std::vector<CheckReport> check_contact(const ContactLagrangian& m, const CheckOptions& opts) {
  require_regular(m);
  std::vector<CheckReport> out;
  VectorFieldSym R;
  try {
    R = reeb_field(m);
  } catch (const SingularLagrangian&) {
    throw;
  } catch (const Error& e) {
    const double inf = std::numeric_limits<double>::infinity();
    out.push_back(make_report("reeb_eta", "construction", inf, opts.tol, e.what()));
    out.push_back(make_report("reeb_deta", "construction", inf, opts.tol, e.what()));
    return out;
  }
  const LagrangianForms fm = forms(m);
  const int d = static_cast<int>(fm.space.size());

  std::mt19937_64 rng(opts.seed);
  double e_eta = 0.0, e_deta = 0.0, worst_cond = 0.0;
  int used = 0;
  for (int attempt = 0; used < opts.samples && attempt < 10 * opts.samples; ++attempt) {
    const Point pt = random_state(m, 2 * m.k() - 1, rng);
    try {
      const Point v = R.evaluate(pt);
      const double scale = std::max(1.0, max_abs(v));
      e_eta = std::max(e_eta, std::abs(fm.eta.contract(v, pt) - 1.0) / scale);
      for (double w : fm.omega.contract(v, fm.space, pt)) e_deta = std::max(e_deta, std::abs(w) / (scale * scale));

      // Bordered structure matrix [[d eta, eta], [-eta^T, 0]].
      const auto om = fm.omega.matrix(fm.space, pt);
      std::vector<double> b(static_cast<std::size_t>((d + 1) * (d + 1)), 0.0);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) b[i * (d + 1) + j] = om[i * d + j];
        const double eta_i = herglotz::evaluate(fm.eta.at(fm.space[i]), pt);
        b[i * (d + 1) + d] = eta_i;
        b[d * (d + 1) + i] = -eta_i;
      }
      worst_cond = std::max(worst_cond, equilibrated_condition(b, d + 1));
      ++used;
    } catch (const DomainError&) {
    } catch (const NotInvertible&) {
    }
  }
  const std::string where = sample_label(used);
  out.push_back(make_report("reeb_eta", where, e_eta, opts.tol, "max |i(R) eta - 1|, scaled by |R|"));
  out.push_back(make_report("reeb_deta", where, e_deta, opts.tol, "max |i(R) d eta|, scaled by |R|^2"));
  out.push_back(make_report("nondegeneracy", where, worst_cond, 1.0 / opts.nondegenerate_floor,
                            "largest condition number of the equilibrated bordered structure matrix"));
  return out;
}

double dissipation_residual(const ContactLagrangian& m, const Trajectory& traj) {
  if (!uniform_spacing(traj.times)) throw EvalError("dissipation check needs a uniform time grid");
  const auto data = dissipation_data(m, traj);
  const double h = traj.times[1] - traj.times[0];
  double res = 0.0;
  for (std::size_t j = 2; j + 2 < data.E.size(); ++j) {
    res = std::max(res, std::abs(five_point(data.E, j, h) + data.RE[j] * data.E[j]));
  }
  return res;
}

std::vector<CheckReport> check_dissipation(const ContactLagrangian& m, const Trajectory& traj,
                                           const CheckOptions& opts) {
  require_regular(m);
  if (!uniform_spacing(traj.times)) throw EvalError("dissipation check needs a uniform time grid");
  const auto data = dissipation_data(m, traj);
  const auto zs = traj.channel(Coordinate::z());
  const double h = traj.times[1] - traj.times[0];
  const std::string where = traj.integrator + " trajectory, " + std::to_string(traj.times.size()) + " rows";
  const double traj_tol = std::max(opts.trajectory_tol, 10.0 * traj.error_estimate);

  double law = 0.0, zres = 0.0, contact = 0.0, reeb = 0.0;
  for (std::size_t j = 0; j < data.E.size(); ++j) {
    contact = std::max(contact, std::abs(data.contact[j]) / (1.0 + std::abs(data.E[j])));
    reeb = std::max(reeb, std::abs(data.RE[j] + data.Lz[j]) / (1.0 + std::abs(data.Lz[j])));
    if (j >= 2 && j + 2 < data.E.size()) {
      law = std::max(law, std::abs(five_point(data.E, j, h) + data.RE[j] * data.E[j]) / (1.0 + std::abs(data.E[j])));
      zres = std::max(zres, std::abs(five_point(zs, j, h) - data.L[j]) / (1.0 + std::abs(data.L[j])));
    }
  }
  std::vector<CheckReport> out;
  out.push_back(make_report("dissipation_law", where, law, traj_tol, "max |dE/dt + R(E) E| / (1 + |E|)"));
  out.push_back(make_report("contact_hamiltonian", where, contact, 1e-8, "max |i(X) eta + E| / (1 + |E|)"));
  out.push_back(make_report("z_equation", where, zres, traj_tol, "max |dz/dt - L| / (1 + |L|)"));
  out.push_back(make_report("reeb_energy", where, reeb, 1e-8, "max |R(E) + dL/dz| / (1 + |dL/dz|)"));
  Bindings bound;
  for (const auto& [c, v] : m.parameter_point()) bound[c] = Expr::real(v);
  if (simplify(substitute(m.Lz(), bound)).is_zero()) {
    double drift = 0.0;
    for (double e : data.E) drift = std::max(drift, std::abs(e - data.E.front()));
    out.push_back(make_report("energy_conservation", where, drift, std::max(1e-8, traj_tol), "max |E(t) - E(0)|"));
  }
  return out;
}

namespace {

Expr random_test_function(int n, int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-3, 3), dof(0, n - 1), order(0, k), deg(1, 3);
  Expr f(0);
  for (int term = 0; term < 3; ++term) {
    int c = coef(rng);
    if (c == 0) c = 1;
    Expr mono(c);
    const int dg = deg(rng);
    for (int j = 0; j < dg; ++j) mono = mono * Expr::jet(dof(rng), order(rng));
    f += mono;
  }
  return simplify(f);
}

bool only_params(const Expr& e) {
  for (const auto& c : free_coordinates(e)) {
    if (!c.is_param()) return false;
  }
  return true;
}

}  // namespace

std::vector<CheckReport> check_equivalence(const ContactLagrangian& m, const CheckOptions& opts) {
  require_regular(m);
  const int n = m.n(), k = m.k();
  const Point params = m.parameter_point();
  const LegendreMap leg = legendre(m);
  const Expr H = hamiltonian(m, leg);
  const Expr E = energy(m);
  std::vector<CheckReport> out;
  std::mt19937_64 rng(opts.seed);

  // H o Leg against E_L at sample points.
  {
    const Expr pulled = substitute(H, leg.forward());
    double res = 0.0;
    int used = 0;
    for (int attempt = 0; used < opts.samples && attempt < 10 * opts.samples; ++attempt) {
      const Point pt = random_state(m, 2 * k - 1, rng);
      try {
        const double e = herglotz::evaluate(E, pt);
        res = std::max(res, std::abs(herglotz::evaluate(pulled, pt) - e) / (1.0 + std::abs(e)));
        ++used;
      } catch (const DomainError&) {
      }
    }
    out.push_back(make_report("legendre_pullback", sample_label(used), res, opts.pushforward_tol,
                              "max |H(Leg(x)) - E(x)| / (1 + |E|)"));
  }

  const VectorFieldSym XL = lagrangian_vector_field(m);
  const VectorFieldSym XH = hamiltonian_vector_field(H, n, k);
  const auto lspace = lagrangian_space(m);
  const auto hspace = hamiltonian_space(n, k);

  // Leg_* X_L against X_H o Leg.
  {
    std::map<Coordinate, std::vector<std::pair<Coordinate, Expr>>> jac;
    for (const auto& y : hspace) {
      const Expr& f = leg.forward().at(y);
      for (const auto& s : lspace) {
        if (!contains(f, s)) continue;
        jac[y].emplace_back(s, differentiate(f, s));
      }
    }
    double res = 0.0;
    int used = 0;
    for (int attempt = 0; used < opts.samples && attempt < 10 * opts.samples; ++attempt) {
      const Point pt = random_state(m, 2 * k - 1, rng);
      try {
        const Point v = XL.evaluate(pt);
        Point ypt = leg.apply(pt);
        for (const auto& [c, x] : params) ypt[c] = x;
        for (const auto& y : hspace) {
          double push = 0.0;
          for (const auto& [s, d] : jac[y]) push += herglotz::evaluate(d, pt) * v.at(s);
          const double xh = herglotz::evaluate(XH.component(y), ypt);
          res = std::max(res, std::abs(push - xh) / (1.0 + std::abs(xh)));
        }
        ++used;
      } catch (const DomainError&) {
      } catch (const NotInvertible&) {
      }
    }
    out.push_back(make_report("pushforward", sample_label(used), res, opts.pushforward_tol,
                              "max |Leg_* X_L - X_H o Leg| / (1 + |X_H|)"));
  }

  // Integral curves correspond under Leg.
  {
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    std::vector<double> x0;
    Point p0 = params;
    for (const auto& c : lspace) {
      x0.push_back(dist(rng));
      p0[c] = x0.back();
    }
    const Point y0p = leg.apply(p0);
    std::vector<double> y0;
    for (const auto& c : hspace) y0.push_back(y0p.at(c));
    IntegrateOptions io;
    io.h = opts.step;
    double res = 0.0;
    std::string detail = "max |Leg(x_L(t)) - y_H(t)| on the grid";
    try {
      const Trajectory tl = integrate(NumericField(XL, params), x0, 0.0, opts.trajectory_t1, io);
      const Trajectory th = integrate(NumericField(XH, params), y0, 0.0, opts.trajectory_t1, io);
      for (std::size_t r = 0; r < tl.states.size(); ++r) {
        Point lp = tl.point(r);
        for (const auto& [c, x] : params) lp[c] = x;
        const Point img = leg.apply(lp);
        for (std::size_t j = 0; j < hspace.size(); ++j) {
          res = std::max(res, std::abs(img.at(hspace[j]) - th.states[r][j]));
        }
      }
    } catch (const Error& e) {
      res = std::numeric_limits<double>::infinity();
      detail = e.what();
    }
    out.push_back(make_report("trajectory_correspondence", "t in [0, " + std::to_string(opts.trajectory_t1) + "]",
                              res, opts.trajectory_tol, detail));
  }

  // Exponential bridge, only when dL/dz is a constant.
  const Expr c = m.Lz();
  if (only_params(c)) {
    const Coordinate t = Coordinate::param("t");
    const Expr weight = exp(-c * Expr::var(t));
    int failures = 0;
    for (int j = 0; j < opts.bridge_functions; ++j) {
      const Expr f = random_test_function(n, k, rng);
      const Expr lhs = tulczyjew_dT(weight * f, n, t);
      const Expr rhs = weight * apply_DL(m, f, 2 * k);
      if (check_equivalent(lhs, rhs) != Equivalence::Equivalent) ++failures;
    }
    out.push_back(make_report("bridge_total_derivative", std::to_string(opts.bridge_functions) + " test functions",
                              failures, 0.0, "d_T(e^{-ct} f) = e^{-ct} D_L f with c = dL/dz"));

    const Expr l = simplify(m.L() - c * Expr::z());
    if (!contains(l, Coordinate::z())) {
      const Expr lw = simplify(weight * l);
      const auto eqs = herglotz_equations(m);
      int bad = 0;
      for (int i = 0; i < n; ++i) {
        Expr sum(0);
        for (int a = 0; a <= k; ++a) {
          Expr term = differentiate(lw, Coordinate::jet(i, a));
          for (int s = 0; s < a; ++s) term = tulczyjew_dT(term, n, t);
          sum += (a % 2 == 0) ? term : -term;
        }
        if (check_equivalent(simplify(sum), simplify(weight * eqs[i])) != Equivalence::Equivalent) ++bad;
      }
      out.push_back(make_report("bridge_lagrange_differential", std::to_string(n) + " components", bad, 0.0,
                                "delta(e^{-ct} l) = e^{-ct} x Herglotz expression"));
    }
  }
  return out;
}

}  // namespace herglotz

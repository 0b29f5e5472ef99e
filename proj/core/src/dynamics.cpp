#include "herglotz/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "herglotz/compiled.hpp"
#include "herglotz/errors.hpp"

namespace herglotz {

const char* to_string(PhaseSpace s) {
  switch (s) {
    case PhaseSpace::Lagrangian: return "lagrangian";
    case PhaseSpace::Hamiltonian: return "hamiltonian";
    case PhaseSpace::Unified: return "unified";
    case PhaseSpace::Other: return "other";
  }
  return "?";
}

const char* to_string(Method m) { return m == Method::RK4 ? "rk4" : "rk45"; }

std::size_t Trajectory::column(const Coordinate& c) const {
  for (std::size_t j = 0; j < coords.size(); ++j) {
    if (coords[j] == c) return j;
  }
  throw UnknownVariable("trajectory has no column " + c.render());
}

std::vector<double> Trajectory::channel(const Coordinate& c) const {
  const std::size_t j = column(c);
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& row : states) out.push_back(row[j]);
  return out;
}

Point Trajectory::point(std::size_t row) const {
  Point p;
  for (std::size_t j = 0; j < coords.size(); ++j) p[coords[j]] = states[row][j];
  return p;
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "t";
  for (const auto& c : coords) os << ',' << c.render();
  os << '\n';
  char buf[64];
  for (std::size_t r = 0; r < times.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g", times[r]);
    os << buf;
    for (double v : states[r]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << ',' << buf;
    }
    os << '\n';
  }
}

namespace {

void call(const NumericField& f, const double* x, double* dx, double t) {
  try {
    f(x, dx);
  } catch (const DomainError& e) {
    throw EvalError("field evaluation failed at t = " + std::to_string(t) + ": " + e.what());
  } catch (const NotInvertible& e) {
    throw EvalError("field evaluation failed at t = " + std::to_string(t) + ": " + e.what());
  }
}

void rk4_step(const NumericField& f, double t, double h, std::vector<double>& x, std::vector<double> (&k)[4],
              std::vector<double>& tmp) {
  const std::size_t d = x.size();
  call(f, x.data(), k[0].data(), t);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k[0][i];
  call(f, tmp.data(), k[1].data(), t);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k[1][i];
  call(f, tmp.data(), k[2].data(), t);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + h * k[2][i];
  call(f, tmp.data(), k[3].data(), t);
  for (std::size_t i = 0; i < d; ++i) x[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
}

std::vector<double> rk4_endpoint(const NumericField& f, std::vector<double> x, double t0, double t1, long steps) {
  const std::size_t d = x.size();
  std::vector<double> k[4] = {std::vector<double>(d), std::vector<double>(d), std::vector<double>(d),
                              std::vector<double>(d)};
  std::vector<double> tmp(d);
  const double h = (t1 - t0) / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s) rk4_step(f, t0 + s * h, h, x, k, tmp);
  return x;
}

Trajectory run_rk4(const NumericField& f, const std::vector<double>& x0, double t0, double t1,
                   const IntegrateOptions& opts) {
  if (!(opts.h > 0.0)) throw StepFailure("step must be positive");
  const long steps = std::max(1L, std::lround((t1 - t0) / opts.h));
  const double h = (t1 - t0) / static_cast<double>(steps);
  const int every = std::max(1, opts.record_every);
  const std::size_t d = x0.size();
  Trajectory tr;
  tr.integrator = "rk4";
  tr.step_or_tol = h;
  std::vector<double> x = x0;
  std::vector<double> k[4] = {std::vector<double>(d), std::vector<double>(d), std::vector<double>(d),
                              std::vector<double>(d)};
  std::vector<double> tmp(d);
  tr.times.push_back(t0);
  tr.states.push_back(x);
  for (long s = 0; s < steps; ++s) {
    rk4_step(f, t0 + s * h, h, x, k, tmp);
    if ((s + 1) % every == 0 || s + 1 == steps) {
      tr.times.push_back(s + 1 == steps ? t1 : t0 + (s + 1) * h);
      tr.states.push_back(x);
    }
  }
  if (opts.estimate_error && steps >= 2) {
    const auto coarse = rk4_endpoint(f, x0, t0, t1, steps / 2);
    double e = 0.0;
    // Richardson: the fine-step error is about |fine - coarse| / 15 when steps is even.
    for (std::size_t i = 0; i < d; ++i) e = std::max(e, std::abs(x[i] - coarse[i]));
    tr.error_estimate = steps % 2 == 0 ? e / 15.0 : e;
  }
  return tr;
}

// Dormand-Prince 5(4) tableau with Hairer's dense output.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

Trajectory run_rk45(const NumericField& f, const std::vector<double>& x0, double t0, double t1,
                    const IntegrateOptions& opts) {
  const std::size_t d = x0.size();
  const double dt_out = opts.output_dt > 0.0 ? opts.output_dt : (t1 - t0) / 1000.0;
  const long n_out = std::max(1L, std::lround((t1 - t0) / dt_out));
  auto out_time = [&](long j) { return j == n_out ? t1 : t0 + (t1 - t0) * static_cast<double>(j) / n_out; };

  Trajectory tr;
  tr.integrator = "rk45";
  tr.step_or_tol = opts.rtol;
  tr.times.push_back(t0);
  tr.states.push_back(x0);
  long next_out = 1;

  std::vector<double> x = x0, xn(d), tmp(d), k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d);
  std::vector<double> r1(d), r2(d), r3(d), r4(d), r5(d);
  double t = t0;
  double h = std::min(opts.h > 0.0 ? opts.h : 1e-3, t1 - t0);
  double facold = 1e-4;
  constexpr double beta = 0.04, safe = 0.9, expo1 = 0.2 - beta * 0.75;
  double err_sum = 0.0;
  call(f, x.data(), k1.data(), t);
  for (long step = 0; t < t1; ++step) {
    if (step >= opts.max_steps) throw StepFailure("RK45 exceeded the step budget");
    if (h < opts.min_step) throw StepFailure("RK45 step size underflow at t = " + std::to_string(t));
    if (t + h > t1) h = t1 - t;
    for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + h * a21 * k1[i];
    call(f, tmp.data(), k2.data(), t);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
    call(f, tmp.data(), k3.data(), t);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    call(f, tmp.data(), k4.data(), t);
    for (std::size_t i = 0; i < d; ++i) {
      tmp[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    call(f, tmp.data(), k5.data(), t);
    for (std::size_t i = 0; i < d; ++i) {
      tmp[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    call(f, tmp.data(), k6.data(), t);
    for (std::size_t i = 0; i < d; ++i) {
      xn[i] = x[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    }
    call(f, xn.data(), k7.data(), t + h);

    double err = 0.0, err_max = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sk = opts.atol + opts.rtol * std::max(std::abs(x[i]), std::abs(xn[i]));
      err += (e / sk) * (e / sk);
      err_max = std::max(err_max, std::abs(e));
    }
    err = std::sqrt(err / static_cast<double>(d));
    if (!std::isfinite(err)) throw StepFailure("non-finite error estimate at t = " + std::to_string(t));

    const double fac11 = std::pow(std::max(err, 1e-300), expo1);
    if (err <= 1.0) {
      double fac = fac11 / std::pow(facold, beta);
      fac = std::clamp(fac / safe, 0.2, 10.0);
      facold = std::max(err, 1e-4);
      // Dense output for grid points inside (t, t + h].
      for (std::size_t i = 0; i < d; ++i) {
        const double ydiff = xn[i] - x[i];
        const double bspl = h * k1[i] - ydiff;
        r1[i] = x[i];
        r2[i] = ydiff;
        r3[i] = bspl;
        r4[i] = ydiff - h * k7[i] - bspl;
        r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      const double t_new = (t + h >= t1) ? t1 : t + h;
      while (next_out <= n_out && out_time(next_out) <= t_new) {
        const double th = (out_time(next_out) - t) / h;
        const double th1 = 1.0 - th;
        std::vector<double> row(d);
        for (std::size_t i = 0; i < d; ++i) {
          row[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        }
        if (next_out == n_out) row = xn;
        tr.times.push_back(out_time(next_out));
        tr.states.push_back(std::move(row));
        ++next_out;
      }
      err_sum += err_max;
      t = t_new;
      x.swap(xn);
      k1.swap(k7);
      h = h / fac;
    } else {
      h = h / std::min(10.0, fac11 / safe);
    }
  }
  tr.error_estimate = err_sum;
  return tr;
}

}  // namespace

Trajectory integrate(const NumericField& field, const std::vector<double>& x0, double t0, double t1,
                     const IntegrateOptions& opts) {
  if (x0.size() != field.dimension()) {
    throw EvalError("initial state has " + std::to_string(x0.size()) + " entries, expected " +
                    std::to_string(field.dimension()));
  }
  if (!(t1 > t0)) throw StepFailure("integration interval must have t1 > t0");
  Trajectory tr = opts.method == Method::RK4 ? run_rk4(field, x0, t0, t1, opts) : run_rk45(field, x0, t0, t1, opts);
  tr.coords = field.space();
  return tr;
}

// ---------------------------------------------------------------------------
// Curves

struct CurveSpec::Piece {
  virtual ~Piece() = default;
  virtual void jets(double t, int order, double* out) const = 0;
};

namespace {

const Coordinate kTime = Coordinate::param("t");

struct SymbolicPiece final : CurveSpec::Piece {
  int n = 0;
  int max_order = 0;
  CompiledProgram program;

  void jets(double t, int order, double* out) const override {
    if (order > max_order) {
      throw OrderOutOfRange("curve jets requested to order " + std::to_string(order) + " > " +
                            std::to_string(max_order));
    }
    std::vector<double> all(static_cast<std::size_t>((max_order + 1) * n));
    program.eval(&t, all.data());
    std::copy(all.begin(), all.begin() + (order + 1) * n, out);
  }
};

std::vector<double> cheb_derivative(const std::vector<double>& c) {
  const std::size_t m = c.size();
  if (m <= 1) return {0.0};
  std::vector<double> d(m - 1, 0.0);
  d[m - 2] = 2.0 * static_cast<double>(m - 1) * c[m - 1];
  for (std::size_t j = m - 2; j-- > 0;) {
    d[j] = (j + 2 < m - 1 ? d[j + 2] : 0.0) + 2.0 * static_cast<double>(j + 1) * c[j + 1];
  }
  d[0] *= 0.5;
  return d;
}

double clenshaw(const std::vector<double>& c, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) {
    const double b0 = 2.0 * x * b1 - b2 + c[j];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c[0];
}

struct ChebyshevPiece final : CurveSpec::Piece {
  double a = 0.0, b = 1.0;
  // series[i][order]
  std::vector<std::vector<std::vector<double>>> series;

  void jets(double t, int order, double* out) const override {
    const int n = static_cast<int>(series.size());
    const double x = (2.0 * t - a - b) / (b - a);
    const double scale = 2.0 / (b - a);
    for (int i = 0; i < n; ++i) {
      const auto& s = series[i];
      if (order >= static_cast<int>(s.size())) {
        throw OrderOutOfRange("Chebyshev curve jets requested to order " + std::to_string(order));
      }
      double f = 1.0;
      for (int o = 0; o <= order; ++o) {
        out[o * n + i] = clenshaw(s[o], x) * f;
        f *= scale;
      }
    }
  }
};

}  // namespace

CurveSpec CurveSpec::symbolic(const std::vector<Expr>& components, int max_order) {
  auto piece = std::make_shared<SymbolicPiece>();
  piece->n = static_cast<int>(components.size());
  piece->max_order = max_order;
  std::vector<Expr> outs;
  std::vector<Expr> cur = components;
  for (int o = 0; o <= max_order; ++o) {
    outs.insert(outs.end(), cur.begin(), cur.end());
    for (auto& e : cur) e = differentiate(e, kTime);
  }
  piece->program = CompiledProgram(outs, SlotMap{{kTime, 0}});
  CurveSpec c;
  c.n_ = piece->n;
  c.pieces_.emplace_back(1.0, std::move(piece));
  return c;
}

CurveSpec CurveSpec::chebyshev(const std::vector<std::vector<double>>& coeffs, double a, double b) {
  auto piece = std::make_shared<ChebyshevPiece>();
  piece->a = a;
  piece->b = b;
  for (const auto& c : coeffs) {
    std::vector<std::vector<double>> s{c};
    for (int o = 0; o < 8; ++o) s.push_back(cheb_derivative(s.back()));
    piece->series.push_back(std::move(s));
  }
  CurveSpec c;
  c.n_ = static_cast<int>(coeffs.size());
  c.pieces_.emplace_back(1.0, std::move(piece));
  return c;
}

void CurveSpec::jets(double t, int order, double* out) const {
  const std::size_t m = static_cast<std::size_t>((order + 1) * n_);
  std::fill(out, out + m, 0.0);
  std::vector<double> buf(m);
  for (const auto& [w, p] : pieces_) {
    p->jets(t, order, buf.data());
    for (std::size_t j = 0; j < m; ++j) out[j] += w * buf[j];
  }
}

std::vector<double> CurveSpec::jets(double t, int order) const {
  std::vector<double> out(static_cast<std::size_t>((order + 1) * n_));
  jets(t, order, out.data());
  return out;
}

CurveSpec CurveSpec::plus(const CurveSpec& other, double weight) const {
  if (other.n_ != n_) throw EvalError("curve dimensions differ");
  CurveSpec c = *this;
  for (const auto& [w, p] : other.pieces_) c.pieces_.emplace_back(weight * w, p);
  return c;
}

CurveSpec fit_chebyshev(const Trajectory& traj, int n, double t0, double t1, int degree) {
  if (traj.times.size() < 2) throw EvalError("trajectory too short to fit");
  std::vector<std::size_t> q0, q1;
  for (int i = 0; i < n; ++i) {
    q0.push_back(traj.column(Coordinate::jet(i, 0)));
    q1.push_back(traj.column(Coordinate::jet(i, 1)));
  }
  auto sample = [&](int i, double t) {
    const auto& ts = traj.times;
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t r = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
    r = std::min(r, ts.size() - 2);
    const double h = ts[r + 1] - ts[r];
    const double s = (t - ts[r]) / h;
    const double y0 = traj.states[r][q0[i]], y1 = traj.states[r + 1][q0[i]];
    const double m0 = traj.states[r][q1[i]] * h, m1 = traj.states[r + 1][q1[i]] * h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
  };
  const int m = degree + 1;
  std::vector<std::vector<double>> coeffs(n, std::vector<double>(m, 0.0));
  for (int i = 0; i < n; ++i) {
    std::vector<double> f(m);
    for (int j = 0; j < m; ++j) {
      const double x = std::cos(M_PI * (j + 0.5) / m);
      f[j] = sample(i, 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * x);
    }
    for (int kk = 0; kk < m; ++kk) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += f[j] * std::cos(M_PI * kk * (j + 0.5) / m);
      coeffs[i][kk] = 2.0 * s / m;
    }
    coeffs[i][0] *= 0.5;
  }
  return CurveSpec::chebyshev(coeffs, t0, t1);
}

std::vector<double> uniform_grid(double t0, double t1, int steps) {
  std::vector<double> g(static_cast<std::size_t>(steps) + 1);
  for (int j = 0; j <= steps; ++j) g[j] = j == steps ? t1 : t0 + (t1 - t0) * j / steps;
  return g;
}

namespace {

struct AlongCurve {
  std::vector<double> Z;
  std::vector<double> S;  // -int dL/dz
};

AlongCurve integrate_along(const ContactLagrangian& m, const CurveSpec& curve, double z0,
                           const std::vector<double>& grid) {
  if (curve.n() != m.n()) throw EvalError("curve has the wrong number of components");
  const int n = m.n(), k = m.k();
  SlotMap slots;
  int next = 0;
  for (const auto& c : jet_coordinates(n, k)) slots[c] = next++;
  slots[Coordinate::z()] = next++;
  const Point params = m.parameter_point();
  for (const auto& [c, v] : params) slots[c] = next++;
  const CompiledProgram prog({m.L(), simplify(-m.Lz())}, slots);
  std::vector<double> in(static_cast<std::size_t>(next));
  for (const auto& [c, v] : params) in[slots.at(c)] = v;
  const int zslot = slots.at(Coordinate::z());

  auto rhs = [&](double t, double z, double& dz, double& ds) {
    curve.jets(t, k, in.data());
    in[zslot] = z;
    double out[2];
    try {
      prog.eval(in.data(), out);
    } catch (const DomainError& e) {
      throw EvalError(std::string("Lagrangian evaluation failed along the curve: ") + e.what());
    }
    dz = out[0];
    ds = out[1];
  };

  AlongCurve r;
  r.Z.push_back(z0);
  r.S.push_back(0.0);
  double z = z0, s = 0.0;
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double t = grid[j], h = grid[j + 1] - grid[j];
    double kz[4], ks[4];
    rhs(t, z, kz[0], ks[0]);
    rhs(t + 0.5 * h, z + 0.5 * h * kz[0], kz[1], ks[1]);
    rhs(t + 0.5 * h, z + 0.5 * h * kz[1], kz[2], ks[2]);
    rhs(t + h, z + h * kz[2], kz[3], ks[3]);
    z += h / 6.0 * (kz[0] + 2 * kz[1] + 2 * kz[2] + kz[3]);
    s += h / 6.0 * (ks[0] + 2 * ks[1] + 2 * ks[2] + ks[3]);
    r.Z.push_back(z);
    r.S.push_back(s);
  }
  return r;
}

}  // namespace

std::vector<double> herglotz_Z(const ContactLagrangian& m, const CurveSpec& curve, double z0,
                               const std::vector<double>& grid) {
  return integrate_along(m, curve, z0, grid).Z;
}

double action(const ContactLagrangian& m, const CurveSpec& curve, double z0, int steps) {
  return herglotz_Z(m, curve, z0, uniform_grid(0.0, 1.0, steps)).back();
}

std::vector<double> sigma_factor(const ContactLagrangian& m, const CurveSpec& curve, double z0,
                                 const std::vector<double>& grid) {
  const auto r = integrate_along(m, curve, z0, grid);
  std::vector<double> out;
  out.reserve(r.S.size());
  for (double s : r.S) {
    const double v = std::exp(s);
    if (!(v > 0.0)) throw EvalError("sigma factor is not positive");
    out.push_back(v);
  }
  return out;
}

double VariationalReport::max_relative() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.derivative) / r.norm_inf);
  return m;
}

CurveSpec random_variation(int n, int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const Expr t = Expr::var(kTime);
  const Expr bump = pow(t, Number(k)) * pow(1 - t, Number(k));
  std::vector<Expr> comps;
  for (int i = 0; i < n; ++i) {
    Expr poly(0);
    for (int j = 0; j < 4; ++j) {
      // Two decimals keep the rendered variation readable.
      const double c = std::round(dist(rng) * 100.0) / 100.0;
      poly += Expr::constant(Number::rational(static_cast<std::int64_t>(std::lround(c * 100)), 100)) *
              pow(t, Number(j));
    }
    comps.push_back(simplify(bump * poly));
  }
  return CurveSpec::symbolic(comps, std::max(4, k));
}

VariationalReport variational_check(const ContactLagrangian& m, const CurveSpec& base, double z0,
                                    const VariationalOptions& opts) {
  VariationalReport rep;
  rep.eps = opts.eps;
  rep.base_action = action(m, base, z0, opts.steps);
  std::mt19937_64 rng(opts.seed);
  const int n = m.n(), k = m.k();
  for (int v = 0; v < opts.variations; ++v) {
    const CurveSpec dc = random_variation(n, k, rng);
    auto deriv = [&](double eps) {
      return (action(m, base.plus(dc, eps), z0, opts.steps) - action(m, base.plus(dc, -eps), z0, opts.steps)) /
             (2.0 * eps);
    };
    VariationRow row;
    row.index = v;
    row.derivative = deriv(opts.eps);
    row.derivative_half = deriv(0.5 * opts.eps);
    row.richardson = (4.0 * row.derivative_half - row.derivative) / 3.0;
    double norm = 0.0;
    for (int j = 0; j <= 1000; ++j) {
      const auto js = dc.jets(j / 1000.0, 0);
      for (double x : js) norm = std::max(norm, std::abs(x));
    }
    row.norm_inf = norm;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace herglotz

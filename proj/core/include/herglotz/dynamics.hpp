#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "herglotz/expr.hpp"
#include "herglotz/forms.hpp"
#include "herglotz/model.hpp"

namespace herglotz {

enum class PhaseSpace { Lagrangian, Hamiltonian, Unified, Other };
const char* to_string(PhaseSpace s);

struct Trajectory {
  std::vector<Coordinate> coords;
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // one row per time, in coords order
  PhaseSpace space = PhaseSpace::Other;
  std::string integrator;
  double step_or_tol = 0.0;
  std::uint64_t model_hash = 0;
  /// Estimated max-norm error at the final time (0 when not estimated).
  double error_estimate = 0.0;

  std::size_t column(const Coordinate& c) const;  // throws UnknownVariable
  std::vector<double> channel(const Coordinate& c) const;
  Point point(std::size_t row) const;
  /// Header `t,<coords>`, 17 significant digits.
  void write_csv(std::ostream& os) const;
};

enum class Method { RK4, RK45 };
const char* to_string(Method m);

struct IntegrateOptions {
  Method method = Method::RK4;
  double h = 1e-3;  // RK4 step; RK45 initial step guess
  double rtol = 1e-9;
  double atol = 1e-12;
  /// Output spacing for RK45 dense output; 0 means 1000 intervals.
  double output_dt = 0.0;
  /// RK4: keep every n-th step.
  int record_every = 1;
  double min_step = 1e-14;
  long max_steps = 50'000'000;
  /// RK4: rerun at 2h and store the Richardson endpoint error estimate.
  bool estimate_error = false;
};

/// Integrates x' = field(x) from t0 to t1. Throws StepFailure or EvalError.
Trajectory integrate(const NumericField& field, const std::vector<double>& x0, double t0, double t1,
                     const IntegrateOptions& opts = {});

/// A smooth curve t -> c(t) in R^n with derivatives of every order needed.
///
/// A curve is a weighted sum of pieces; each piece is either symbolic in the
/// time parameter `t` or a Chebyshev series on an interval.
class CurveSpec {
 public:
  CurveSpec() = default;
  /// Components are expressions in Param("t") only. `max_order` bounds the
  /// jet lift.
  static CurveSpec symbolic(const std::vector<Expr>& components, int max_order = 4);
  /// coeffs[i] holds the Chebyshev coefficients of component i on [a, b].
  static CurveSpec chebyshev(const std::vector<std::vector<double>>& coeffs, double a, double b);

  int n() const noexcept { return n_; }
  /// out[a * n + i] = d^a c_i / dt^a (t) for a = 0..order.
  void jets(double t, int order, double* out) const;
  std::vector<double> jets(double t, int order) const;

  /// this + weight * other.
  CurveSpec plus(const CurveSpec& other, double weight) const;

  struct Piece;  // implementation detail

 private:
  int n_ = 0;
  std::vector<std::pair<double, std::shared_ptr<const Piece>>> pieces_;
};

/// Chebyshev interpolant of degree `degree` through the q(i,0) channels of a
/// trajectory on [t0, t1], sampled with cubic Hermite interpolation on the
/// q(i,1) channels.
CurveSpec fit_chebyshev(const Trajectory& traj, int n, double t0, double t1, int degree = 24);

/// Uniform grid of `steps` intervals on [t0, t1].
std::vector<double> uniform_grid(double t0, double t1, int steps);

/// Z(t) solving Z' = L(jet lift of the curve, Z), Z(grid[0]) = z0, one RK4
/// step per grid interval. Throws EvalError.
std::vector<double> herglotz_Z(const ContactLagrangian& m, const CurveSpec& curve, double z0,
                               const std::vector<double>& grid);
/// Z(1) with Z(0) = z0 on a uniform grid.
double action(const ContactLagrangian& m, const CurveSpec& curve, double z0, int steps = 1000);

/// sigma(t) = exp(-int_0^t dL/dz along the curve), sigma(grid[0]) = 1.
std::vector<double> sigma_factor(const ContactLagrangian& m, const CurveSpec& curve, double z0,
                                 const std::vector<double>& grid);

struct VariationRow {
  int index = 0;
  double derivative = 0.0;       // central difference at eps
  double derivative_half = 0.0;  // central difference at eps / 2
  double richardson = 0.0;       // (4 D(eps/2) - D(eps)) / 3
  double norm_inf = 0.0;         // max |delta c| on [0, 1]
};

struct VariationalReport {
  double eps = 1e-4;
  double base_action = 0.0;
  std::vector<VariationRow> rows;

  /// max |derivative| / norm_inf over the rows.
  double max_relative() const;
};

struct VariationalOptions {
  int variations = 10;
  double eps = 1e-4;
  std::uint64_t seed = 0xC0FFEE;
  int steps = 1000;
};

/// Admissible variation t^k (1-t)^k (a + b t + c t^2 + d t^3) per dof with
/// coefficients from [-1, 1].
CurveSpec random_variation(int n, int k, std::mt19937_64& rng);

/// Central-difference Gateaux derivatives of the action on [0, 1].
VariationalReport variational_check(const ContactLagrangian& m, const CurveSpec& base, double z0,
                                    const VariationalOptions& opts = {});

}  // namespace herglotz

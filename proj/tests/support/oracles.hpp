#pragma once

// Reference formulas written out by hand, independent of the engine's
// recursive machinery.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "herglotz/expr.hpp"
#include "herglotz/model.hpp"

namespace oracle {

using herglotz::Coordinate;
using herglotz::ContactLagrangian;
using herglotz::Expr;

/// Fully expanded second-order contact Euler-Lagrange expression for dof i,
/// written out term by term without going through apply_DL. `flip_zz_sign`
/// gives the (dL/dz)^2 dL/dq2 term a minus sign, a tempting slip when
/// expanding by hand; the default is the sign D_L composition produces.
inline Expr k2_expanded(const ContactLagrangian& m, int i, bool flip_zz_sign = false) {
  const int n = m.n();
  const Expr& L = m.L();
  const Coordinate z = Coordinate::z();
  auto q = [](int dof, int a) { return Coordinate::jet(dof, a); };
  auto Q = [](int dof, int a) { return Expr::jet(dof, a); };
  auto d1 = [&](const Coordinate& a) { return herglotz::differentiate(L, a); };
  auto d2 = [&](const Coordinate& a, const Coordinate& b) { return herglotz::differentiate(d1(a), b); };
  auto d3 = [&](const Coordinate& a, const Coordinate& b, const Coordinate& c) {
    return herglotz::differentiate(d2(a, b), c);
  };
  const Expr two = Expr::constant(herglotz::Number(2));
  const Expr Lz = d1(z);
  const Expr Lqi2 = d1(q(i, 2));

  Expr e = Expr::constant(herglotz::Number(0));
  for (int j = 0; j < n; ++j) e += Q(j, 4) * d2(q(j, 2), q(i, 2));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) e += Q(j, 3) * Q(k, 3) * d3(q(k, 2), q(j, 2), q(i, 2));
  }
  for (int k = 0; k < n; ++k) {
    // q^k_3 ( ... )
    Expr c = -d2(q(k, 2), q(i, 1)) + d2(q(k, 1), q(i, 2));
    for (int j = 0; j < n; ++j) {
      c += two * Q(j, 2) * d3(q(k, 2), q(j, 1), q(i, 2));
      c += two * Q(j, 1) * d3(q(k, 2), q(j, 0), q(i, 2));
    }
    c += d1(q(k, 2)) * d2(z, q(i, 2)) + two * L * d3(q(k, 2), z, q(i, 2));
    c += -d2(q(k, 2), z) * Lqi2 - two * Lz * d2(q(k, 2), q(i, 2));
    e += Q(k, 3) * c;

    // q^k_2 ( ... )
    Expr b = -d2(q(k, 1), q(i, 1)) + d2(q(k, 0), q(i, 2));
    for (int j = 0; j < n; ++j) {
      b += Q(j, 2) * d3(q(k, 1), q(j, 1), q(i, 2));
      b += two * Q(j, 1) * d3(q(k, 1), q(j, 0), q(i, 2));
    }
    b += d1(q(k, 1)) * d2(z, q(i, 2)) + two * L * d3(q(k, 1), z, q(i, 2));
    b += -d2(q(k, 1), z) * Lqi2 - two * Lz * d2(q(k, 1), q(i, 2));
    e += Q(k, 2) * b;

    // q^k_1 ( ... )
    Expr a = -d2(q(k, 0), q(i, 1));
    for (int j = 0; j < n; ++j) a += Q(j, 1) * d3(q(k, 0), q(j, 0), q(i, 2));
    a += d1(q(k, 0)) * d2(z, q(i, 2)) + two * L * d3(q(k, 0), z, q(i, 2));
    a += -d2(q(k, 0), z) * Lqi2 - two * Lz * d2(q(k, 0), q(i, 2));
    e += Q(k, 1) * a;
  }
  const Expr zz_term = Lz * Lz * Lqi2;
  e += L * L * d3(z, z, q(i, 2)) - L * d2(z, z) * Lqi2 - L * Lz * d2(z, q(i, 2));
  e += flip_zz_sign ? -zz_term : zz_term;
  e += -L * d2(z, q(i, 1)) + Lz * d1(q(i, 1)) + d1(q(i, 0));
  return e;
}

/// Underdamped solution of q'' + gam q' + w^2 q = 0 with q(0) = q0, q'(0) = v0.
struct DampedOscillator {
  double w, gam, q0, v0;

  double omega() const { return std::sqrt(w * w - gam * gam / 4.0); }
  double q(double t) const {
    const double W = omega();
    const double B = (v0 + gam / 2.0 * q0) / W;
    return std::exp(-gam * t / 2.0) * (q0 * std::cos(W * t) + B * std::sin(W * t));
  }
  double v(double t) const {
    const double W = omega();
    const double B = (v0 + gam / 2.0 * q0) / W;
    const double e = std::exp(-gam * t / 2.0);
    return -gam / 2.0 * q(t) + e * (-q0 * W * std::sin(W * t) + B * W * std::cos(W * t));
  }
};

/// 10-point Gauss-Legendre rule on [a, b], composed over `panels` panels.
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels = 16) {
  static constexpr std::array<double, 5> x = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                              0.8650633666889845, 0.9739065285171717};
  static constexpr std::array<double, 5> w = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                              0.1494513491505806, 0.0666713443086881};
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    const double r = h / 2.0;
    for (int j = 0; j < 5; ++j) sum += w[j] * r * (f(c - r * x[j]) + f(c + r * x[j]));
  }
  return sum;
}

/// Central difference of f at x with step h (fourth order).
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

}  // namespace oracle

#include "herglotz/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "herglotz/errors.hpp"

namespace herglotz {

std::vector<Coordinate> jet_coordinates(int n, int order) {
  std::vector<Coordinate> out;
  for (int a = 0; a <= order; ++a) {
    for (int i = 0; i < n; ++i) out.push_back(Coordinate::jet(i, a));
  }
  return out;
}

ContactLagrangian::ContactLagrangian(int n, int k, Expr lagrangian, ParamValues params)
    : n_(n), k_(k), L_(simplify(lagrangian)), params_(std::move(params)) {
  if (n < 1) throw ModelError("dof count must be at least 1");
  if (k < 1) throw ModelError("order must be at least 1");
  for (const auto& c : free_coordinates(L_)) {
    if (c.is_momentum() || c.is_unknown()) {
      throw ModelError("Lagrangian may not contain " + c.render());
    }
    if (c.is_jet()) {
      if (c.dof() >= n) throw ModelError("Lagrangian uses " + c.render() + " but n = " + std::to_string(n));
      if (c.order() > k) throw OrderOutOfRange(c.render() + " exceeds the declared order " + std::to_string(k));
    }
  }
  for (const auto& c : state_coordinates(k)) partials_.emplace(c, differentiate(L_, c));
}

std::set<std::string> ContactLagrangian::referenced_params() const {
  std::set<std::string> out;
  for (const auto& c : free_coordinates(L_)) {
    if (c.is_param()) out.insert(c.name());
  }
  return out;
}

Point ContactLagrangian::parameter_point() const {
  Point p;
  for (const auto& name : referenced_params()) {
    auto it = params_.find(name);
    if (it == params_.end()) throw UnboundCoordinate("parameter '" + name + "' has no value");
    p[Coordinate::param(name)] = it->second;
  }
  for (const auto& [name, v] : params_) p[Coordinate::param(name)] = v;
  return p;
}

ContactLagrangian ContactLagrangian::with_lagrangian(Expr lagrangian) const {
  return ContactLagrangian(n_, k_, std::move(lagrangian), params_);
}

ContactLagrangian ContactLagrangian::with_params(const ParamValues& overrides) const {
  ParamValues p = params_;
  for (const auto& [k, v] : overrides) p[k] = v;
  return ContactLagrangian(n_, k_, L_, std::move(p));
}

Expr ContactLagrangian::partial(const Coordinate& c) const {
  if (auto it = partials_.find(c); it != partials_.end()) return it->second;
  return differentiate(L_, c);
}

std::vector<Coordinate> ContactLagrangian::state_coordinates(int order) const {
  auto out = jet_coordinates(n_, order);
  out.push_back(Coordinate::z());
  return out;
}

std::uint64_t ContactLagrangian::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  feed(std::to_string(n_));
  feed(std::to_string(k_));
  feed(render(L_));
  for (const auto& [name, v] : params_) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    feed(name);
    feed(buf);
  }
  return h;
}

Point random_state(const ContactLagrangian& m, int order, std::mt19937_64& rng, double box) {
  std::uniform_real_distribution<double> dist(-box, box);
  Point p = m.parameter_point();
  for (const auto& c : m.state_coordinates(order)) p[c] = dist(rng);
  return p;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Regular: return "Regular";
    case Verdict::Singular: return "Singular";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

ExprMatrix hessian(const ContactLagrangian& m) {
  const int n = m.n();
  ExprMatrix w(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i) {
    const Expr di = m.partial(Coordinate::jet(i, m.k()));
    for (int j = i; j < n; ++j) {
      w[i][j] = differentiate(di, Coordinate::jet(j, m.k()));
      w[j][i] = w[i][j];
    }
  }
  return w;
}

namespace {

Expr det_rec(const ExprMatrix& a, std::vector<int>& cols, int row) {
  const int n = static_cast<int>(a.size());
  if (row == n) return Expr(1);
  Expr sum(0);
  int sign = 1;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const int col = cols[c];
    const Expr& entry = a[row][col];
    if (!entry.is_zero()) {
      std::vector<int> rest = cols;
      rest.erase(rest.begin() + static_cast<long>(c));
      Expr minor = det_rec(a, rest, row + 1);
      sum += sign > 0 ? entry * minor : -(entry * minor);
    }
    sign = -sign;
  }
  return sum;
}

}  // namespace

Expr symbolic_determinant(const ExprMatrix& a) {
  std::vector<int> cols(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) cols[i] = static_cast<int>(i);
  return simplify(det_rec(a, cols, 0));
}

RegularityReport classify(const ContactLagrangian& m, const ClassifyOptions& opts) {
  RegularityReport rep;
  rep.hessian = hessian(m);
  const int n = m.n();

  if (n <= opts.max_symbolic_n) {
    rep.symbolic_det = symbolic_determinant(rep.hessian);
    rep.symbolic_det_zero = rep.symbolic_det->is_zero();
    if (!rep.symbolic_det_zero) {
      EquivalenceOptions eo;
      eo.seed = opts.seed;
      rep.symbolic_det_zero = check_equivalent(*rep.symbolic_det, Expr(0), eo) == Equivalence::Equivalent;
    }
  }

  const Point params = m.parameter_point();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const auto coords = m.state_coordinates(m.k());
  double min_det = std::numeric_limits<double>::infinity();
  double max_det = 0.0;
  int good = 0;
  int attempts = 0;
  const int want = std::max(1, opts.samples);
  while (good < want && attempts < 10 * want) {
    ++attempts;
    Point p = params;
    for (const auto& c : coords) p[c] = dist(rng);
    Eigen::MatrixXd w(n, n);
    try {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) w(i, j) = evaluate(rep.hessian[i][j], p);
      }
    } catch (const DomainError&) {
      continue;
    }
    const double scale = w.cwiseAbs().maxCoeff();
    const double d = scale > 0.0 ? std::abs((w / scale).determinant()) : 0.0;
    min_det = std::min(min_det, d);
    max_det = std::max(max_det, d);
    ++good;
  }
  rep.samples = good;
  rep.numeric_min_abs_det = good ? min_det : 0.0;
  rep.numeric_max_abs_det = max_det;

  if (rep.symbolic_det_zero) {
    rep.verdict = Verdict::Singular;
  } else if (good == 0) {
    rep.verdict = Verdict::Inconclusive;
  } else if (max_det <= opts.det_tol) {
    rep.verdict = Verdict::Singular;
  } else if (rep.symbolic_det && min_det > opts.det_tol) {
    rep.verdict = Verdict::Regular;
  } else {
    rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

}  // namespace herglotz

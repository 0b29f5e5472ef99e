#include "herglotz/forms.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "herglotz/errors.hpp"

namespace herglotz {

namespace {

Coordinate unknown_for(const Coordinate& c) {
  if (!c.is_jet()) throw Error("implicit targets must be jet directions, got " + c.render());
  return Coordinate::unknown(c.dof(), c.order());
}

}  // namespace

Expr OneForm::at(const Coordinate& c) const {
  auto it = coeff.find(c);
  return it == coeff.end() ? Expr(0) : it->second;
}

double OneForm::contract(const Point& v, const Point& point) const {
  double s = 0.0;
  for (const auto& [c, e] : coeff) {
    auto it = v.find(c);
    if (it == v.end() || it->second == 0.0) continue;
    s += herglotz::evaluate(e, point) * it->second;
  }
  return s;
}

Expr TwoForm::at(const Coordinate& a, const Coordinate& b) const {
  if (a == b) return Expr(0);
  if (a < b) {
    auto it = coeff.find({a, b});
    return it == coeff.end() ? Expr(0) : it->second;
  }
  auto it = coeff.find({b, a});
  return it == coeff.end() ? Expr(0) : -it->second;
}

std::vector<double> TwoForm::matrix(const std::vector<Coordinate>& space, const Point& point) const {
  const std::size_t n = space.size();
  std::vector<double> m(n * n, 0.0);
  std::map<Coordinate, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[space[i]] = i;
  for (const auto& [ab, e] : coeff) {
    auto ia = index.find(ab.first);
    auto ib = index.find(ab.second);
    if (ia == index.end() || ib == index.end()) continue;
    const double v = herglotz::evaluate(e, point);
    m[ia->second * n + ib->second] = v;
    m[ib->second * n + ia->second] = -v;
  }
  return m;
}

std::vector<double> TwoForm::contract(const Point& v, const std::vector<Coordinate>& space,
                                      const Point& point) const {
  const std::size_t n = space.size();
  const auto m = matrix(space, point);
  std::vector<double> out(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    auto it = v.find(space[a]);
    if (it == v.end() || it->second == 0.0) continue;
    for (std::size_t b = 0; b < n; ++b) out[b] += it->second * m[a * n + b];
  }
  return out;
}

TwoForm exterior_derivative(const OneForm& f, const std::vector<Coordinate>& space) {
  std::map<std::pair<Coordinate, Coordinate>, Expr> acc;
  for (const auto& [a, fa] : f.coeff) {
    const auto deps = free_coordinates(fa);
    for (const auto& b : space) {
      if (b == a || !deps.count(b)) continue;
      const Expr d = differentiate(fa, b);
      if (d.is_zero()) continue;
      // d(fa) ^ dxa picks up dfa/dxb dxb ^ dxa.
      if (b < a) {
        acc[{b, a}] += d;
      } else {
        acc[{a, b}] -= d;
      }
    }
  }
  TwoForm out;
  for (auto& [k, e] : acc) {
    Expr s = simplify(e);
    if (!s.is_zero()) out.coeff.emplace(k, s);
  }
  return out;
}

TwoForm negate(const TwoForm& w) {
  TwoForm out;
  for (const auto& [k, e] : w.coeff) out.coeff.emplace(k, simplify(-e));
  return out;
}

Expr VectorFieldSym::component(const Coordinate& c) const {
  auto it = comp.find(c);
  return it == comp.end() ? Expr(0) : it->second;
}

bool VectorFieldSym::is_explicit() const { return blocks.empty(); }

std::vector<double> solve_dense(int n, std::vector<double> a, std::vector<double> b) {
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(a.data(), n, n);
  Eigen::Map<Eigen::VectorXd> rhs(b.data(), n);
  if (n == 1) {
    if (m(0, 0) == 0.0) throw NotInvertible("singular coefficient in implicit block");
    return {rhs(0) / m(0, 0)};
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) throw NotInvertible("singular matrix in implicit block");
  Eigen::VectorXd x = lu.solve(rhs);
  return {x.data(), x.data() + n};
}

Point VectorFieldSym::evaluate(const Point& point) const {
  Point pt = point;
  for (const auto& blk : blocks) {
    const int n = static_cast<int>(blk.targets.size());
    std::vector<double> a(static_cast<std::size_t>(n * n)), b(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a[i * n + j] = herglotz::evaluate(blk.matrix[i][j], pt);
      b[i] = herglotz::evaluate(blk.rhs[i], pt);
    }
    const auto x = solve_dense(n, a, b);
    for (int i = 0; i < n; ++i) pt[unknown_for(blk.targets[i])] = x[i];
  }
  Point out;
  for (const auto& c : space) {
    auto it = comp.find(c);
    out[c] = it == comp.end() ? 0.0 : herglotz::evaluate(it->second, pt);
  }
  return out;
}

std::vector<double> VectorFieldSym::evaluate_dense(const Point& point) const {
  const Point v = evaluate(point);
  std::vector<double> out;
  out.reserve(space.size());
  for (const auto& c : space) out.push_back(v.at(c));
  return out;
}

NumericField::NumericField(const VectorFieldSym& field, const Point& params)
    : dim_(field.space.size()), space_(field.space) {
  SlotMap slots;
  int next = 0;
  for (const auto& c : space_) slots[c] = next++;
  for (const auto& [c, v] : params) {
    if (slots.count(c)) continue;
    slots[c] = next++;
    param_values_.push_back(v);
  }
  for (const auto& blk : field.blocks) {
    for (const auto& t : blk.targets) slots[unknown_for(t)] = next++;
  }
  slots_ = static_cast<std::size_t>(next);

  for (const auto& blk : field.blocks) {
    Block b;
    b.size = static_cast<int>(blk.targets.size());
    std::vector<Expr> outs;
    for (const auto& row : blk.matrix) outs.insert(outs.end(), row.begin(), row.end());
    outs.insert(outs.end(), blk.rhs.begin(), blk.rhs.end());
    b.program = CompiledProgram(outs, slots);
    for (const auto& t : blk.targets) b.target_slots.push_back(slots.at(unknown_for(t)));
    blocks_.push_back(std::move(b));
  }
  std::vector<Expr> comps;
  for (const auto& c : space_) comps.push_back(field.component(c));
  comps_ = CompiledProgram(comps, slots);
}

void NumericField::operator()(const double* x, double* dx) const {
  std::vector<double> in(slots_, 0.0);
  std::copy(x, x + dim_, in.begin());
  std::copy(param_values_.begin(), param_values_.end(), in.begin() + static_cast<long>(dim_));
  std::vector<double> scratch;
  for (const auto& b : blocks_) {
    const int n = b.size;
    std::vector<double> buf(static_cast<std::size_t>(n * n + n));
    b.program.eval(in.data(), buf.data(), scratch);
    std::vector<double> a(buf.begin(), buf.begin() + n * n);
    std::vector<double> r(buf.begin() + n * n, buf.end());
    const auto sol = solve_dense(n, std::move(a), std::move(r));
    for (int i = 0; i < n; ++i) in[b.target_slots[i]] = sol[i];
  }
  comps_.eval(in.data(), dx, scratch);
}

}  // namespace herglotz

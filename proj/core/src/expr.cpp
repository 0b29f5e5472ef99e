#include "herglotz/expr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <unordered_map>

#include "herglotz/errors.hpp"

namespace herglotz {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

std::shared_ptr<Node> new_node(NodeKind kind) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  return n;
}

void finish_hash(Node& n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 0x100000001b3ull;
  switch (n.kind) {
    case NodeKind::Const:
      h = mix(h, n.number.hash());
      break;
    case NodeKind::Var:
      h = mix(h, n.coordinate->hash());
      break;
    case NodeKind::Pow:
      h = mix(h, n.number.hash());
      break;
    case NodeKind::Func:
      h = mix(h, static_cast<std::size_t>(n.func));
      break;
    default:
      break;
  }
  for (const auto& a : n.args) h = mix(h, a.hash());
  n.hash = h;
}

}  // namespace

Expr::Expr() : Expr(Number(0)) {}

Expr::Expr(Number value) {
  auto n = new_node(NodeKind::Const);
  n->number = value;
  finish_hash(*n);
  node_ = std::move(n);
}

Expr Expr::var(const Coordinate& c) {
  auto n = new_node(NodeKind::Var);
  n->coordinate = c;
  finish_hash(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make_add(std::vector<Expr> terms) {
  if (terms.empty()) return Expr(0);
  if (terms.size() == 1) return terms.front();
  auto n = new_node(NodeKind::Add);
  n->args = std::move(terms);
  finish_hash(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make_mul(std::vector<Expr> factors) {
  if (factors.empty()) return Expr(1);
  if (factors.size() == 1) return factors.front();
  auto n = new_node(NodeKind::Mul);
  n->args = std::move(factors);
  finish_hash(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make_pow(Expr base, Number exponent) {
  auto n = new_node(NodeKind::Pow);
  n->number = exponent;
  n->args.push_back(std::move(base));
  finish_hash(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make_func(FuncKind f, Expr arg) {
  auto n = new_node(NodeKind::Func);
  n->func = f;
  n->args.push_back(std::move(arg));
  finish_hash(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

NodeKind Expr::kind() const noexcept { return node_->kind; }
const Number& Expr::value() const { return node_->number; }
const Coordinate& Expr::coordinate() const { return *node_->coordinate; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
const Expr& Expr::base() const { return node_->args.front(); }
const Number& Expr::exponent() const { return node_->number; }
FuncKind Expr::func() const { return node_->func; }
std::size_t Expr::hash() const noexcept { return node_->hash; }
bool Expr::is_zero() const noexcept { return is_const() && value().is_zero(); }
bool Expr::is_one() const noexcept { return is_const() && value().is_one(); }

// ---------------------------------------------------------------------------
// Light-weight arithmetic: flatten and fold constants only.

Expr Expr::operator-() const {
  if (is_const()) return Expr(-value());
  return Expr(-1) * *this;
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr(a.value() + b.value());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  std::vector<Expr> terms;
  auto push = [&](const Expr& e) {
    if (e.kind() == NodeKind::Add) {
      terms.insert(terms.end(), e.args().begin(), e.args().end());
    } else {
      terms.push_back(e);
    }
  };
  push(a);
  push(b);
  return Expr::make_add(std::move(terms));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr(a.value() * b.value());
  if (a.is_zero() || b.is_zero()) return Expr(0);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  std::vector<Expr> factors;
  Number coeff(1);
  auto push = [&](const Expr& e) {
    if (e.kind() == NodeKind::Mul) {
      for (const auto& f : e.args()) {
        if (f.is_const()) {
          coeff *= f.value();
        } else {
          factors.push_back(f);
        }
      }
    } else if (e.is_const()) {
      coeff *= e.value();
    } else {
      factors.push_back(e);
    }
  };
  push(a);
  push(b);
  if (coeff.is_zero()) return Expr(0);
  if (!coeff.is_one()) factors.insert(factors.begin(), Expr(coeff));
  return Expr::make_mul(std::move(factors));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_const()) {
    if (b.value().is_zero()) throw DomainError("division by the constant zero");
    return a * Expr(Number(1) / b.value());
  }
  return a * pow(b, Number(-1));
}

Expr pow(const Expr& base, Number exponent) {
  if (exponent.is_zero()) return Expr(1);
  if (exponent.is_one()) return base;
  if (base.is_const()) {
    const Number& b = base.value();
    if (exponent.exact() && exponent.is_integer() && b.exact()) {
      if (b.is_zero() && exponent.is_negative()) throw DomainError("zero to a negative power");
      return Expr(b.pow(exponent.num()));
    }
    if (!b.exact() || !exponent.exact()) {
      return Expr(Number::real(std::pow(b.to_double(), exponent.to_double())));
    }
  }
  if (base.kind() == NodeKind::Pow && exponent.is_integer() && exponent.exact()) {
    return pow(base.base(), base.exponent() * exponent);
  }
  return Expr::make_pow(base, exponent);
}

Expr sin(const Expr& a) { return Expr::make_func(FuncKind::Sin, a); }
Expr cos(const Expr& a) { return Expr::make_func(FuncKind::Cos, a); }
Expr exp(const Expr& a) { return Expr::make_func(FuncKind::Exp, a); }
Expr log(const Expr& a) { return Expr::make_func(FuncKind::Log, a); }

// ---------------------------------------------------------------------------
// Ordering.

bool identical(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

std::strong_ordering compare(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return std::strong_ordering::equal;
  if (a.kind() != b.kind()) return static_cast<int>(a.kind()) <=> static_cast<int>(b.kind());
  switch (a.kind()) {
    case NodeKind::Const:
      return compare(a.value(), b.value());
    case NodeKind::Var:
      return a.coordinate() <=> b.coordinate();
    case NodeKind::Pow: {
      auto c = compare(a.base(), b.base());
      if (c != 0) return c;
      return compare(a.exponent(), b.exponent());
    }
    case NodeKind::Func:
      if (a.func() != b.func()) return static_cast<int>(a.func()) <=> static_cast<int>(b.func());
      return compare(a.args().front(), b.args().front());
    case NodeKind::Add:
    case NodeKind::Mul: {
      const auto& x = a.args();
      const auto& y = b.args();
      const std::size_t m = std::min(x.size(), y.size());
      for (std::size_t i = 0; i < m; ++i) {
        auto c = compare(x[i], y[i]);
        if (c != 0) return c;
      }
      return x.size() <=> y.size();
    }
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Canonical form.

namespace {

struct Factor {
  Expr atom;
  Number exponent;
};
using Monomial = std::vector<Factor>;

std::strong_ordering compare_mono(const Monomial& a, const Monomial& b) {
  const std::size_t m = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < m; ++i) {
    auto c = compare(a[i].atom, b[i].atom);
    if (c != 0) return c;
    c = compare(a[i].exponent, b[i].exponent);
    if (c != 0) return c;
  }
  return a.size() <=> b.size();
}

struct MonoLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare_mono(a, b) < 0; }
};

using Poly = std::map<Monomial, Number, MonoLess>;

constexpr std::int64_t kMaxExpandPower = 8;
constexpr std::size_t kMaxExpandTerms = 20000;

bool is_positive_int(const Number& n) { return n.exact() && n.is_integer() && n.num() > 0; }

class Canonicalizer {
 public:
  Poly expand(const Expr& e);
  static Expr rebuild(const Poly& p);

 private:
  void add_into(Poly& acc, const Monomial& m, const Number& c);
  void add_into(Poly& acc, const Poly& p);
  Poly mul(const Poly& a, const Poly& b);
  Poly pow_int(const Poly& p, std::int64_t e);
  Poly atom_poly(const Expr& atom, const Number& exponent);

  std::unordered_map<const Node*, Poly> memo_;
  std::vector<Expr> keep_alive_;
};

void Canonicalizer::add_into(Poly& acc, const Monomial& m, const Number& c) {
  if (c.is_zero()) return;
  auto it = acc.find(m);
  if (it == acc.end()) {
    acc.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) acc.erase(it);
}

void Canonicalizer::add_into(Poly& acc, const Poly& p) {
  for (const auto& [m, c] : p) add_into(acc, m, c);
}

Poly Canonicalizer::atom_poly(const Expr& atom, const Number& exponent) {
  Poly p;
  if (exponent.is_zero()) {
    p.emplace(Monomial{}, Number(1));
    return p;
  }
  p.emplace(Monomial{Factor{atom, exponent}}, Number(1));
  return p;
}

Poly Canonicalizer::mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      Number coeff = ca * cb;
      Monomial m;
      m.reserve(ma.size() + mb.size());
      std::vector<Factor> reexpand;
      std::size_t i = 0, j = 0;
      auto emit = [&](Factor f) {
        if (f.exponent.is_zero()) return;
        if (f.atom.is_const() && f.exponent.exact() && f.exponent.is_integer()) {
          coeff *= f.atom.value().pow(f.exponent.num());
          return;
        }
        if (f.atom.kind() == NodeKind::Add && is_positive_int(f.exponent)) {
          reexpand.push_back(std::move(f));
          return;
        }
        m.push_back(std::move(f));
      };
      while (i < ma.size() || j < mb.size()) {
        if (j == mb.size() || (i < ma.size() && compare(ma[i].atom, mb[j].atom) < 0)) {
          emit(ma[i++]);
        } else if (i == ma.size() || compare(mb[j].atom, ma[i].atom) < 0) {
          emit(mb[j++]);
        } else {
          emit(Factor{ma[i].atom, ma[i].exponent + mb[j].exponent});
          ++i;
          ++j;
        }
      }
      if (reexpand.empty()) {
        add_into(out, m, coeff);
      } else {
        Poly term;
        term.emplace(m, coeff);
        for (const auto& f : reexpand) term = mul(term, pow_int(expand(f.atom), f.exponent.num()));
        add_into(out, term);
      }
    }
  }
  return out;
}

Poly Canonicalizer::pow_int(const Poly& p, std::int64_t e) {
  Poly result;
  result.emplace(Monomial{}, Number(1));
  for (std::int64_t i = 0; i < e; ++i) result = mul(result, p);
  return result;
}

Poly Canonicalizer::expand(const Expr& e) {
  if (auto it = memo_.find(e.node()); it != memo_.end()) return it->second;
  Poly out;
  switch (e.kind()) {
    case NodeKind::Const:
      if (!e.value().is_zero()) out.emplace(Monomial{}, e.value());
      break;
    case NodeKind::Var:
      out = atom_poly(e, Number(1));
      break;
    case NodeKind::Add:
      for (const auto& t : e.args()) add_into(out, expand(t));
      break;
    case NodeKind::Mul: {
      out.emplace(Monomial{}, Number(1));
      for (const auto& f : e.args()) {
        out = mul(out, expand(f));
        if (out.empty()) break;
      }
      break;
    }
    case NodeKind::Pow: {
      const Number& ex = e.exponent();
      Poly pb = expand(e.base());
      if (pb.empty()) {
        if (ex.is_negative() || ex.is_zero()) throw DomainError("zero to a non-positive power");
        break;
      }
      const bool int_exp = ex.exact() && ex.is_integer();
      if (pb.size() == 1) {
        const auto& [mono, c] = *pb.begin();
        if (int_exp) {
          Poly single;
          Number coeff = c.pow(ex.num());
          Monomial m;
          for (const auto& f : mono) m.push_back(Factor{f.atom, f.exponent * ex});
          single.emplace(Monomial{}, coeff);
          Poly rest;
          rest.emplace(Monomial{}, Number(1));
          // Route through mul so that integer powers of sums re-expand.
          for (const auto& f : m) rest = mul(rest, atom_poly(f.atom, f.exponent));
          out = mul(single, rest);
          break;
        }
        if (mono.empty()) {
          if (!c.exact() || !ex.exact()) {
            if (c.to_double() < 0.0) throw DomainError("fractional power of a negative constant");
            out.emplace(Monomial{}, Number::real(std::pow(c.to_double(), ex.to_double())));
          } else {
            out = atom_poly(Expr(c), ex);
          }
          break;
        }
        if (c.is_one() && mono.size() == 1 && mono.front().exponent.is_one()) {
          out = atom_poly(mono.front().atom, ex);
          break;
        }
        out = atom_poly(rebuild(pb), ex);
        break;
      }
      if (is_positive_int(ex) && ex.num() <= kMaxExpandPower) {
        std::size_t estimate = 1;
        for (std::int64_t i = 0; i < ex.num() && estimate <= kMaxExpandTerms; ++i) estimate *= pb.size();
        if (estimate <= kMaxExpandTerms) {
          out = pow_int(pb, ex.num());
          break;
        }
      }
      out = atom_poly(rebuild(pb), ex);
      break;
    }
    case NodeKind::Func: {
      Expr arg = rebuild(expand(e.args().front()));
      if (arg.is_const()) {
        const Number& v = arg.value();
        if (v.exact()) {
          if (v.is_zero() && e.func() != FuncKind::Log) {
            if (e.func() != FuncKind::Sin) out.emplace(Monomial{}, Number(1));
            break;
          }
          if (v.is_one() && e.func() == FuncKind::Log) break;
        } else {
          const double x = v.to_double();
          double r = 0.0;
          switch (e.func()) {
            case FuncKind::Sin: r = std::sin(x); break;
            case FuncKind::Cos: r = std::cos(x); break;
            case FuncKind::Exp: r = std::exp(x); break;
            case FuncKind::Log:
              if (x <= 0.0) throw DomainError("log of a non-positive constant");
              r = std::log(x);
              break;
          }
          if (r != 0.0) out.emplace(Monomial{}, Number::real(r));
          break;
        }
      }
      out = atom_poly(Expr::make_func(e.func(), arg), Number(1));
      break;
    }
  }
  keep_alive_.push_back(e);
  memo_.emplace(e.node(), out);
  return out;
}

Expr Canonicalizer::rebuild(const Poly& p) {
  std::vector<Expr> terms;
  terms.reserve(p.size());
  for (const auto& [mono, c] : p) {
    std::vector<Expr> factors;
    if (!c.is_one() || mono.empty()) factors.emplace_back(c);
    for (const auto& f : mono) {
      factors.push_back(f.exponent.is_one() ? f.atom : Expr::make_pow(f.atom, f.exponent));
    }
    terms.push_back(Expr::make_mul(std::move(factors)));
  }
  return Expr::make_add(std::move(terms));
}

}  // namespace

Expr simplify(const Expr& e) {
  Canonicalizer c;
  return Canonicalizer::rebuild(c.expand(e));
}

// ---------------------------------------------------------------------------
// Free coordinates.

namespace {

void collect(const Expr& e, std::set<Coordinate>& out, std::unordered_map<const Node*, bool>& seen) {
  if (!seen.emplace(e.node(), true).second) return;
  if (e.is_var()) {
    out.insert(e.coordinate());
    return;
  }
  for (const auto& a : e.args()) collect(a, out, seen);
}

}  // namespace

std::set<Coordinate> free_coordinates(const Expr& e) {
  std::set<Coordinate> out;
  std::unordered_map<const Node*, bool> seen;
  collect(e, out, seen);
  return out;
}

bool contains(const Expr& e, const Coordinate& c) { return free_coordinates(e).count(c) > 0; }

int max_jet_order(const Expr& e) {
  int best = -1;
  for (const auto& c : free_coordinates(e)) {
    if (c.is_jet()) best = std::max(best, c.order());
  }
  return best;
}

// ---------------------------------------------------------------------------
// Differentiation and substitution.

namespace {

class Differentiator {
 public:
  explicit Differentiator(const Coordinate& c) : c_(c) {}

  Expr d(const Expr& e) {
    if (auto it = memo_.find(e.node()); it != memo_.end()) return it->second;
    Expr r = compute(e);
    keep_alive_.push_back(e);
    memo_.emplace(e.node(), r);
    return r;
  }

 private:
  bool depends(const Expr& e) {
    if (auto it = dep_.find(e.node()); it != dep_.end()) return it->second;
    bool r = false;
    if (e.is_var()) {
      r = e.coordinate() == c_;
    } else {
      for (const auto& a : e.args()) {
        if (depends(a)) {
          r = true;
          break;
        }
      }
    }
    dep_.emplace(e.node(), r);
    return r;
  }

  Expr compute(const Expr& e) {
    if (!depends(e)) return Expr(0);
    switch (e.kind()) {
      case NodeKind::Const:
        return Expr(0);
      case NodeKind::Var:
        return Expr(1);
      case NodeKind::Add: {
        Expr sum(0);
        for (const auto& t : e.args()) sum += d(t);
        return sum;
      }
      case NodeKind::Mul: {
        Expr sum(0);
        const auto& f = e.args();
        for (std::size_t i = 0; i < f.size(); ++i) {
          if (!depends(f[i])) continue;
          Expr term = d(f[i]);
          for (std::size_t j = 0; j < f.size(); ++j) {
            if (j != i) term = term * f[j];
          }
          sum += term;
        }
        return sum;
      }
      case NodeKind::Pow: {
        const Number& ex = e.exponent();
        return Expr(ex) * pow(e.base(), ex - Number(1)) * d(e.base());
      }
      case NodeKind::Func: {
        const Expr& a = e.args().front();
        const Expr da = d(a);
        switch (e.func()) {
          case FuncKind::Sin: return cos(a) * da;
          case FuncKind::Cos: return -(sin(a) * da);
          case FuncKind::Exp: return e * da;
          case FuncKind::Log: return da / a;
        }
      }
    }
    return Expr(0);
  }

  Coordinate c_;
  std::unordered_map<const Node*, Expr> memo_;
  std::unordered_map<const Node*, bool> dep_;
  std::vector<Expr> keep_alive_;
};

class Substituter {
 public:
  explicit Substituter(const Bindings& b) : b_(b) {}

  Expr s(const Expr& e) {
    if (auto it = memo_.find(e.node()); it != memo_.end()) return it->second;
    Expr r = compute(e);
    keep_alive_.push_back(e);
    memo_.emplace(e.node(), r);
    return r;
  }

 private:
  Expr compute(const Expr& e) {
    switch (e.kind()) {
      case NodeKind::Const:
        return e;
      case NodeKind::Var: {
        auto it = b_.find(e.coordinate());
        return it == b_.end() ? e : it->second;
      }
      case NodeKind::Add: {
        std::vector<Expr> t;
        for (const auto& a : e.args()) t.push_back(s(a));
        return Expr::make_add(std::move(t));
      }
      case NodeKind::Mul: {
        std::vector<Expr> t;
        for (const auto& a : e.args()) t.push_back(s(a));
        return Expr::make_mul(std::move(t));
      }
      case NodeKind::Pow:
        return Expr::make_pow(s(e.base()), e.exponent());
      case NodeKind::Func:
        return Expr::make_func(e.func(), s(e.args().front()));
    }
    return e;
  }

  const Bindings& b_;
  std::unordered_map<const Node*, Expr> memo_;
  std::vector<Expr> keep_alive_;
};

}  // namespace

Expr differentiate(const Expr& e, const Coordinate& c) {
  Differentiator d(c);
  return simplify(d.d(e));
}

Expr substitute(const Expr& e, const Bindings& bindings) {
  if (bindings.empty()) return simplify(e);
  Substituter s(bindings);
  return simplify(s.s(e));
}

std::optional<std::pair<Expr, Expr>> affine_in(const Expr& e, const Coordinate& c) {
  Expr slope = differentiate(e, c);
  if (contains(slope, c)) {
    Expr second = differentiate(slope, c);
    if (!second.is_zero() && !is_zero_expr(second)) return std::nullopt;
  }
  Bindings at_zero{{c, Expr(0)}};
  return std::make_pair(substitute(slope, at_zero), substitute(e, at_zero));
}

// ---------------------------------------------------------------------------
// Evaluation.

namespace {

double eval_rec(const Expr& e, const Point& p) {
  switch (e.kind()) {
    case NodeKind::Const:
      return e.value().to_double();
    case NodeKind::Var: {
      auto it = p.find(e.coordinate());
      if (it == p.end()) throw UnboundCoordinate("unbound coordinate " + e.coordinate().render());
      return it->second;
    }
    case NodeKind::Add: {
      double s = 0.0;
      for (const auto& a : e.args()) s += eval_rec(a, p);
      return s;
    }
    case NodeKind::Mul: {
      double s = 1.0;
      for (const auto& a : e.args()) s *= eval_rec(a, p);
      return s;
    }
    case NodeKind::Pow: {
      const double b = eval_rec(e.base(), p);
      const Number& ex = e.exponent();
      if (ex.is_integer()) {
        if (b == 0.0 && ex.is_negative()) throw DomainError("division by zero");
        const double x = ex.to_double();
        if (x == -1.0) return 1.0 / b;
        if (x == 2.0) return b * b;
        return std::pow(b, x);
      }
      if (b < 0.0) throw DomainError("fractional power of a negative value");
      if (b == 0.0 && ex.is_negative()) throw DomainError("division by zero");
      return std::pow(b, ex.to_double());
    }
    case NodeKind::Func: {
      const double a = eval_rec(e.args().front(), p);
      switch (e.func()) {
        case FuncKind::Sin: return std::sin(a);
        case FuncKind::Cos: return std::cos(a);
        case FuncKind::Exp: return std::exp(a);
        case FuncKind::Log:
          if (a <= 0.0) throw DomainError("log of a non-positive value");
          return std::log(a);
      }
    }
  }
  return 0.0;
}

}  // namespace

double evaluate(const Expr& e, const Point& point) {
  const double v = eval_rec(e, point);
  if (!std::isfinite(v)) throw DomainError("non-finite value");
  return v;
}

// ---------------------------------------------------------------------------
// Rendering.

namespace {

// Precedence levels: 0 sum, 1 product, 2 unary minus, 3 power, 4 atom.
std::string render_rec(const Expr& e, int& prec);

std::string wrap(const Expr& e, int min_prec) {
  int p = 0;
  std::string s = render_rec(e, p);
  if (p < min_prec) return "(" + s + ")";
  return s;
}

std::string render_exponent(const Number& n) {
  std::string s = n.render();
  if (n.is_negative() || (n.exact() && !n.is_integer())) return "(" + s + ")";
  return s;
}

std::string render_product(const Expr& e, int& prec) {
  // Split into sign, numeric coefficient, numerator and denominator factors.
  Number coeff(1);
  std::vector<std::string> num, den;
  std::vector<Expr> factors = e.kind() == NodeKind::Mul ? e.args() : std::vector<Expr>{e};
  for (const auto& f : factors) {
    if (f.is_const()) {
      coeff *= f.value();
    } else if (f.kind() == NodeKind::Pow && f.exponent().is_negative()) {
      const Number pos = -f.exponent();
      if (pos.is_one()) {
        den.push_back(wrap(f.base(), 4));
      } else {
        den.push_back(wrap(f.base(), 4) + "^" + render_exponent(pos));
      }
    } else {
      num.push_back(wrap(f, 2));
    }
  }
  const bool negative = coeff.is_negative();
  if (negative) coeff = -coeff;
  std::string out = negative ? "-" : "";
  std::vector<std::string> top;
  Number den_coeff(1);
  if (coeff.exact() && !coeff.is_integer()) {
    if (coeff.num() != 1) top.push_back(std::to_string(coeff.num()));
    den_coeff = Number(coeff.den());
  } else if (!coeff.is_one()) {
    top.push_back(coeff.render());
  }
  top.insert(top.end(), num.begin(), num.end());
  if (top.empty()) top.push_back("1");
  for (std::size_t i = 0; i < top.size(); ++i) out += (i ? "*" : "") + top[i];
  if (!den_coeff.is_one()) den.insert(den.begin(), den_coeff.render());
  if (!den.empty()) {
    out += "/";
    if (den.size() == 1) {
      out += den.front();
    } else {
      out += "(";
      for (std::size_t i = 0; i < den.size(); ++i) out += (i ? "*" : "") + den[i];
      out += ")";
    }
  }
  prec = negative ? 0 : 1;
  if (!negative && den.empty() && top.size() == 1 && num.size() == 1) prec = 2;
  return out;
}

std::string render_rec(const Expr& e, int& prec) {
  switch (e.kind()) {
    case NodeKind::Const: {
      const Number& v = e.value();
      prec = v.is_negative() ? 0 : (v.exact() && !v.is_integer() ? 1 : 4);
      return v.render();
    }
    case NodeKind::Var:
      prec = 4;
      return e.coordinate().render();
    case NodeKind::Func: {
      prec = 4;
      const char* name = "sin";
      switch (e.func()) {
        case FuncKind::Sin: name = "sin"; break;
        case FuncKind::Cos: name = "cos"; break;
        case FuncKind::Exp: name = "exp"; break;
        case FuncKind::Log: name = "log"; break;
      }
      int p = 0;
      return std::string(name) + "(" + render_rec(e.args().front(), p) + ")";
    }
    case NodeKind::Pow: {
      if (e.exponent().is_negative()) return render_product(e, prec);
      prec = 3;
      return wrap(e.base(), 4) + "^" + render_exponent(e.exponent());
    }
    case NodeKind::Mul:
      return render_product(e, prec);
    case NodeKind::Add: {
      std::string out;
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        int p = 0;
        std::string t = render_rec(e.args()[i], p);
        if (p == 0 && e.args()[i].kind() == NodeKind::Add) t = "(" + t + ")";
        if (i == 0) {
          out = t;
        } else if (!t.empty() && t[0] == '-') {
          out += " - " + t.substr(1);
        } else {
          out += " + " + t;
        }
      }
      prec = 0;
      return out;
    }
  }
  prec = 4;
  return {};
}

}  // namespace

std::string render(const Expr& e) {
  int p = 0;
  return render_rec(e, p);
}

// ---------------------------------------------------------------------------
// Equivalence.

Equivalence check_equivalent(const Expr& a, const Expr& b, const EquivalenceOptions& opts) {
  const Expr diff = simplify(a - b);
  if (diff.is_zero()) return Equivalence::Equivalent;
  std::set<Coordinate> coords = free_coordinates(a);
  for (const auto& c : free_coordinates(b)) coords.insert(c);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> dist(-opts.box, opts.box);
  const int trials = std::max(1, opts.trials);
  int passed = 0;
  int draws = 0;
  while (passed < trials) {
    if (draws >= 10 * trials) return Equivalence::Inconclusive;
    ++draws;
    Point p = opts.fixed;
    for (const auto& c : coords) {
      if (!p.count(c)) p[c] = dist(rng);
    }
    double va = 0.0, vb = 0.0;
    try {
      va = evaluate(a, p);
      vb = evaluate(b, p);
    } catch (const DomainError&) {
      continue;
    }
    if (std::abs(va - vb) > opts.tol * (1.0 + std::abs(va))) return Equivalence::NotEquivalent;
    ++passed;
  }
  return Equivalence::Equivalent;
}

bool equivalent(const Expr& a, const Expr& b, int trials, double tol) {
  EquivalenceOptions o;
  o.trials = trials;
  o.tol = tol;
  return check_equivalent(a, b, o) == Equivalence::Equivalent;
}

bool equivalent(const Expr& a, const Expr& b, const EquivalenceOptions& opts) {
  return check_equivalent(a, b, opts) == Equivalence::Equivalent;
}

bool is_zero_expr(const Expr& e, const EquivalenceOptions& opts) {
  return check_equivalent(e, Expr(0), opts) == Equivalence::Equivalent;
}

}  // namespace herglotz

#include "herglotz/compiled.hpp"

#include <cmath>
#include <functional>
#include <unordered_map>

#include "herglotz/errors.hpp"

namespace herglotz {

CompiledProgram::CompiledProgram(const std::vector<Expr>& outputs, const SlotMap& slots) {
  std::unordered_map<const Node*, int> done;
  std::vector<Expr> keep;

  auto emit = [&](Ins ins) {
    tape_.push_back(ins);
    return static_cast<int>(tape_.size()) - 1;
  };

  std::function<int(const Expr&)> build = [&](const Expr& e) -> int {
    if (auto it = done.find(e.node()); it != done.end()) return it->second;
    int r = 0;
    switch (e.kind()) {
      case NodeKind::Const:
        r = emit({Op::Const, 0, 0, e.value().to_double()});
        break;
      case NodeKind::Var: {
        auto it = slots.find(e.coordinate());
        if (it == slots.end()) throw UnboundCoordinate("unbound coordinate " + e.coordinate().render());
        r = emit({Op::Load, it->second, 0, 0.0});
        break;
      }
      case NodeKind::Add:
      case NodeKind::Mul: {
        const Op op = e.kind() == NodeKind::Add ? Op::Add : Op::Mul;
        r = build(e.args().front());
        for (std::size_t i = 1; i < e.args().size(); ++i) {
          const int b = build(e.args()[i]);
          r = emit({op, r, b, 0.0});
        }
        break;
      }
      case NodeKind::Pow: {
        const int b = build(e.base());
        const Number& ex = e.exponent();
        if (ex.is_integer()) {
          const double x = ex.to_double();
          if (x == -1.0) {
            r = emit({Op::Inv, b, 0, 0.0});
          } else if (x == 2.0) {
            r = emit({Op::Sq, b, 0, 0.0});
          } else {
            r = emit({Op::PowI, b, 0, x});
          }
        } else {
          r = emit({Op::PowR, b, 0, ex.to_double()});
        }
        break;
      }
      case NodeKind::Func: {
        const int a = build(e.args().front());
        Op op = Op::Sin;
        switch (e.func()) {
          case FuncKind::Sin: op = Op::Sin; break;
          case FuncKind::Cos: op = Op::Cos; break;
          case FuncKind::Exp: op = Op::Exp; break;
          case FuncKind::Log: op = Op::Log; break;
        }
        r = emit({op, a, 0, 0.0});
        break;
      }
    }
    keep.push_back(e);
    done.emplace(e.node(), r);
    return r;
  };

  for (const auto& o : outputs) out_.push_back(build(o));
}

void CompiledProgram::eval(const double* in, double* out) const {
  std::vector<double> scratch;
  eval(in, out, scratch);
}

void CompiledProgram::eval(const double* in, double* out, std::vector<double>& r) const {
  r.resize(tape_.size());
  for (std::size_t i = 0; i < tape_.size(); ++i) {
    const Ins& s = tape_[i];
    double v = 0.0;
    switch (s.op) {
      case Op::Const: v = s.c; break;
      case Op::Load: v = in[s.a]; break;
      case Op::Add: v = r[s.a] + r[s.b]; break;
      case Op::Mul: v = r[s.a] * r[s.b]; break;
      case Op::Neg: v = -r[s.a]; break;
      case Op::Inv:
        if (r[s.a] == 0.0) throw DomainError("division by zero");
        v = 1.0 / r[s.a];
        break;
      case Op::Sq: v = r[s.a] * r[s.a]; break;
      case Op::PowI:
        if (r[s.a] == 0.0 && s.c < 0.0) throw DomainError("division by zero");
        v = std::pow(r[s.a], s.c);
        break;
      case Op::PowR:
        if (r[s.a] < 0.0) throw DomainError("fractional power of a negative value");
        if (r[s.a] == 0.0 && s.c < 0.0) throw DomainError("division by zero");
        v = std::pow(r[s.a], s.c);
        break;
      case Op::Sin: v = std::sin(r[s.a]); break;
      case Op::Cos: v = std::cos(r[s.a]); break;
      case Op::Exp: v = std::exp(r[s.a]); break;
      case Op::Log:
        if (r[s.a] <= 0.0) throw DomainError("log of a non-positive value");
        v = std::log(r[s.a]);
        break;
    }
    r[i] = v;
  }
  for (std::size_t j = 0; j < out_.size(); ++j) {
    const double v = r[out_[j]];
    if (!std::isfinite(v)) throw DomainError("non-finite value");
    out[j] = v;
  }
}

double CompiledProgram::eval1(const double* in) const {
  double v = 0.0;
  eval(in, &v);
  return v;
}

}  // namespace herglotz

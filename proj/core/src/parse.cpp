#include "herglotz/parse.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>

#include "herglotz/errors.hpp"

namespace herglotz {

ParseContext ParseContext::lagrangian(int n, int k, std::set<std::string> params) {
  ParseContext c;
  c.n = n;
  c.max_order = k;
  c.params = std::move(params);
  return c;
}

ParseContext ParseContext::unified(int n, int k, std::set<std::string> params) {
  ParseContext c;
  c.n = n;
  c.max_order = 2 * k;
  c.params = std::move(params);
  c.allow_momenta = true;
  c.momentum_levels = k;
  c.allow_unknowns = true;
  return c;
}

ParseContext ParseContext::permissive() {
  ParseContext c;
  c.n = 1 << 20;
  c.any_param = true;
  c.allow_momenta = true;
  c.momentum_levels = 1 << 20;
  c.allow_unknowns = true;
  c.allow_time = true;
  return c;
}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= s_.size()) return {Tok::End, start, {}};
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '.') {
        ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t p = pos_ + 1;
        if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
        if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
          pos_ = p;
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
      }
      if (s_.substr(start, pos_ - start) == ".") throw SyntaxError("malformed number", start);
      return {Tok::Number, start, s_.substr(start, pos_ - start)};
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      return {Tok::Ident, start, s_.substr(start, pos_ - start)};
    }
    ++pos_;
    switch (c) {
      case '+': return {Tok::Plus, start, s_.substr(start, 1)};
      case '-': return {Tok::Minus, start, s_.substr(start, 1)};
      case '*': return {Tok::Star, start, s_.substr(start, 1)};
      case '/': return {Tok::Slash, start, s_.substr(start, 1)};
      case '^': return {Tok::Caret, start, s_.substr(start, 1)};
      case '(': return {Tok::LParen, start, s_.substr(start, 1)};
      case ')': return {Tok::RParen, start, s_.substr(start, 1)};
      default: break;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", start);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::optional<std::pair<int, int>> split_indexed(std::string_view id, char prefix) {
  if (id.size() < 4 || id[0] != prefix) return std::nullopt;
  const auto us = id.find('_');
  if (us == std::string_view::npos || us == 1 || us + 1 >= id.size()) return std::nullopt;
  int a = 0, b = 0;
  auto r1 = std::from_chars(id.data() + 1, id.data() + us, a);
  if (r1.ec != std::errc() || r1.ptr != id.data() + us) return std::nullopt;
  auto r2 = std::from_chars(id.data() + us + 1, id.data() + id.size(), b);
  if (r2.ec != std::errc() || r2.ptr != id.data() + id.size()) return std::nullopt;
  return std::make_pair(a, b);
}

class Parser {
 public:
  Parser(std::string_view text, const ParseContext& ctx) : lex_(text), ctx_(ctx) { advance(); }

  Expr parse_all() {
    Expr e = sum();
    if (cur_.kind != Tok::End) throw SyntaxError("unexpected '" + std::string(cur_.text) + "'", cur_.offset);
    return e;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) throw SyntaxError(std::string("expected ") + what, cur_.offset);
    advance();
  }

  Expr sum() {
    Expr acc = product();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const bool minus = cur_.kind == Tok::Minus;
      advance();
      Expr rhs = product();
      acc = minus ? acc - rhs : acc + rhs;
    }
    return acc;
  }

  Expr product() {
    Expr acc = unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const bool div = cur_.kind == Tok::Slash;
      const std::size_t at = cur_.offset;
      advance();
      Expr rhs = unary();
      if (div) {
        if (rhs.is_zero()) throw SyntaxError("division by the constant zero", at);
        acc = acc / rhs;
      } else {
        acc = acc * rhs;
      }
    }
    return acc;
  }

  Expr unary() {
    if (cur_.kind == Tok::Minus) {
      advance();
      return -unary();
    }
    if (cur_.kind == Tok::Plus) {
      advance();
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (cur_.kind != Tok::Caret) return base;
    const std::size_t at = cur_.offset;
    advance();
    Expr ex = simplify(unary());
    if (!ex.is_const()) throw SyntaxError("exponent must be a constant", at);
    if (base.is_zero() && (ex.value().is_negative() || ex.value().is_zero())) {
      throw SyntaxError("zero to a non-positive power", at);
    }
    return pow(base, ex.value());
  }

  Expr primary() {
    const Token t = cur_;
    switch (t.kind) {
      case Tok::Number: {
        advance();
        return number(t);
      }
      case Tok::LParen: {
        advance();
        Expr e = sum();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        advance();
        static const std::pair<std::string_view, FuncKind> funcs[] = {
            {"sin", FuncKind::Sin}, {"cos", FuncKind::Cos}, {"exp", FuncKind::Exp}, {"log", FuncKind::Log}};
        for (const auto& [name, f] : funcs) {
          if (t.text == name) {
            expect(Tok::LParen, "'(' after function name");
            Expr arg = sum();
            expect(Tok::RParen, "')'");
            return Expr::make_func(f, arg);
          }
        }
        return identifier(t);
      }
      case Tok::End:
        throw SyntaxError("unexpected end of input", t.offset);
      default:
        throw SyntaxError("unexpected '" + std::string(t.text) + "'", t.offset);
    }
  }

  static Expr number(const Token& t) {
    const std::string s(t.text);
    const bool is_real = s.find_first_of(".eE") != std::string::npos;
    if (!is_real) {
      std::int64_t v = 0;
      auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec == std::errc()) return Expr(Number(v));
    }
    return Expr::real(std::strtod(s.c_str(), nullptr));
  }

  Expr identifier(const Token& t) {
    const std::string_view id = t.text;
    const std::string name(id);
    if (id == "z") {
      if (!ctx_.allow_z) throw UnknownVariable("z is not allowed here (offset " + std::to_string(t.offset) + ")");
      return Expr::z();
    }
    if (id == "t" && ctx_.allow_time) return Expr::param("t");
    if (auto q = split_indexed(id, 'q')) {
      const auto [dof, order] = *q;
      if (dof >= ctx_.n) throw UnknownVariable("no degree of freedom " + std::to_string(dof) + " in " + name);
      if (ctx_.max_order >= 0 && order > ctx_.max_order) {
        throw OrderOutOfRange(name + " exceeds order " + std::to_string(ctx_.max_order));
      }
      return Expr::jet(dof, order);
    }
    if (auto p = split_indexed(id, 'p')) {
      const auto [level, dof] = *p;
      if (!ctx_.allow_momenta) throw UnknownVariable("momentum " + name + " is not allowed here");
      if (dof >= ctx_.n) throw UnknownVariable("no degree of freedom " + std::to_string(dof) + " in " + name);
      if (level >= ctx_.momentum_levels) throw OrderOutOfRange(name + " exceeds the momentum levels");
      return Expr::momentum(level, dof);
    }
    if (auto f = split_indexed(id, 'F')) {
      const auto [dof, order] = *f;
      if (!ctx_.allow_unknowns) throw UnknownVariable("unknown coefficient " + name + " is not allowed here");
      if (dof >= ctx_.n) throw UnknownVariable("no degree of freedom " + std::to_string(dof) + " in " + name);
      return Expr::var(Coordinate::unknown(dof, order));
    }
    if (ctx_.any_param || ctx_.params.count(name)) return Expr::param(name);
    throw UnknownVariable("unknown identifier '" + name + "' at byte " + std::to_string(t.offset));
  }

  Lexer lex_;
  const ParseContext& ctx_;
  Token cur_{Tok::End, 0, {}};
};

}  // namespace

Expr parse(std::string_view text, const ParseContext& ctx) {
  Parser p(text, ctx);
  return p.parse_all();
}

}  // namespace herglotz

#include "herglotz/number.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace herglotz {

namespace {

bool checked_mul(std::int64_t a, std::int64_t b, std::int64_t* out) {
  return !__builtin_mul_overflow(a, b, out);
}

bool checked_add(std::int64_t a, std::int64_t b, std::int64_t* out) {
  return !__builtin_add_overflow(a, b, out);
}

}  // namespace

Number Number::rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den == std::numeric_limits<std::int64_t>::min() ||
      num == std::numeric_limits<std::int64_t>::min()) {
    return real(static_cast<double>(num) / static_cast<double>(den));
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  Number r;
  r.num_ = g == 0 ? 0 : num / g;
  r.den_ = g == 0 ? 1 : den / g;
  return r;
}

Number Number::real(double value) {
  Number r;
  r.exact_ = false;
  r.num_ = 0;
  r.den_ = 1;
  r.value_ = value;
  return r;
}

double Number::to_double() const noexcept {
  return exact_ ? static_cast<double>(num_) / static_cast<double>(den_) : value_;
}

bool Number::is_zero() const noexcept { return exact_ ? num_ == 0 : value_ == 0.0; }
bool Number::is_one() const noexcept { return exact_ ? (num_ == 1 && den_ == 1) : value_ == 1.0; }
bool Number::is_minus_one() const noexcept {
  return exact_ ? (num_ == -1 && den_ == 1) : value_ == -1.0;
}
bool Number::is_integer() const noexcept {
  return exact_ ? den_ == 1 : (std::isfinite(value_) && std::floor(value_) == value_);
}
bool Number::is_negative() const noexcept { return exact_ ? num_ < 0 : value_ < 0.0; }

Number Number::operator-() const {
  if (exact_ && num_ != std::numeric_limits<std::int64_t>::min()) return rational(-num_, den_);
  return real(-to_double());
}

Number operator+(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    std::int64_t l, r, n, d;
    if (checked_mul(a.num_, b.den_, &l) && checked_mul(b.num_, a.den_, &r) &&
        checked_add(l, r, &n) && checked_mul(a.den_, b.den_, &d)) {
      return Number::rational(n, d);
    }
  }
  return Number::real(a.to_double() + b.to_double());
}

Number operator-(const Number& a, const Number& b) { return a + (-b); }

Number operator*(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    const std::int64_t g1 = std::gcd(a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_, a.den_);
    std::int64_t n, d;
    const std::int64_t an = g1 ? a.num_ / g1 : a.num_, bd = g1 ? b.den_ / g1 : b.den_;
    const std::int64_t bn = g2 ? b.num_ / g2 : b.num_, ad = g2 ? a.den_ / g2 : a.den_;
    if (checked_mul(an, bn, &n) && checked_mul(ad, bd, &d)) return Number::rational(n, d);
  }
  return Number::real(a.to_double() * b.to_double());
}

Number operator/(const Number& a, const Number& b) {
  if (b.is_zero()) throw std::domain_error("division by zero constant");
  if (b.exact_) {
    if (b.num_ == std::numeric_limits<std::int64_t>::min()) {
      return Number::real(a.to_double() / b.to_double());
    }
    return a * Number::rational(b.den_, b.num_);
  }
  return Number::real(a.to_double() / b.to_double());
}

Number Number::pow(std::int64_t e) const {
  if (e < 0) {
    if (is_zero()) throw std::domain_error("zero to a negative power");
    return Number(1) / pow(-e);
  }
  Number result(1);
  Number base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

bool operator==(const Number& a, const Number& b) noexcept {
  if (a.exact_ != b.exact_) return false;
  if (a.exact_) return a.num_ == b.num_ && a.den_ == b.den_;
  return a.value_ == b.value_ || (std::isnan(a.value_) && std::isnan(b.value_));
}

std::strong_ordering compare(const Number& a, const Number& b) noexcept {
  if (a.exact_ != b.exact_) return a.exact_ ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.exact_) {
    if (a.num_ != b.num_) return a.num_ <=> b.num_;
    return a.den_ <=> b.den_;
  }
  if (a.value_ < b.value_) return std::strong_ordering::less;
  if (a.value_ > b.value_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::size_t Number::hash() const noexcept {
  if (exact_) {
    return std::hash<std::int64_t>{}(num_) * 1000003u ^ std::hash<std::int64_t>{}(den_);
  }
  return std::hash<double>{}(value_) ^ 0x9e3779b97f4a7c15ull;
}

std::string Number::render() const {
  if (exact_) {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace herglotz

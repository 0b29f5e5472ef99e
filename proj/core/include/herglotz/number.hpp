#pragma once

#include <cstdint>
#include <compare>
#include <string>

namespace herglotz {

/// Scalar constant of an expression: an exact rational with 64-bit numerator
/// and denominator, or an IEEE double. Exact arithmetic degrades to double on
/// overflow; mixing exact and inexact operands yields an inexact result.
class Number {
 public:
  constexpr Number() = default;
  constexpr Number(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(implicit)
  static Number rational(std::int64_t num, std::int64_t den);
  static Number real(double value);

  bool exact() const noexcept { return exact_; }
  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept;

  bool is_zero() const noexcept;
  bool is_one() const noexcept;
  bool is_minus_one() const noexcept;
  bool is_integer() const noexcept;
  bool is_negative() const noexcept;

  Number operator-() const;
  friend Number operator+(const Number& a, const Number& b);
  friend Number operator-(const Number& a, const Number& b);
  friend Number operator*(const Number& a, const Number& b);
  friend Number operator/(const Number& a, const Number& b);
  Number& operator+=(const Number& o) { return *this = *this + o; }
  Number& operator*=(const Number& o) { return *this = *this * o; }

  /// Integer power; exact when the base is exact and no overflow occurs.
  Number pow(std::int64_t e) const;

  /// Structural equality: exactness must agree.
  friend bool operator==(const Number& a, const Number& b) noexcept;
  /// Total order used for canonical sorting.
  friend std::strong_ordering compare(const Number& a, const Number& b) noexcept;

  std::size_t hash() const noexcept;

  /// Text that parses back to the same value and exactness.
  std::string render() const;

 private:
  bool exact_ = true;
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  double value_ = 0.0;
};

}  // namespace herglotz

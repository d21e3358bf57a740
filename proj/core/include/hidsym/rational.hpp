#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hidsym {

/// Exact rational number with 64-bit numerator/denominator.
///
/// All arithmetic is checked: an intermediate result that does not fit in
/// int64 after reduction throws std::overflow_error rather than wrapping.
/// The denominator is always positive and gcd(num, den) == 1.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(implicit)
  Rational(std::int64_t n, std::int64_t d);

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }

  [[nodiscard]] bool is_zero() const { return num_ == 0; }
  [[nodiscard]] bool is_one() const { return num_ == 1 && den_ == 1; }
  [[nodiscard]] bool is_integer() const { return den_ == 1; }
  [[nodiscard]] bool is_negative() const { return num_ < 0; }
  [[nodiscard]] double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  [[nodiscard]] Rational abs() const { return num_ < 0 ? -*this : *this; }
  [[nodiscard]] Rational inverse() const;
  /// Integer power; negative exponents invert.
  [[nodiscard]] Rational pow(std::int64_t k) const;

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  /// "p" or "p/q".
  [[nodiscard]] std::string str() const;
  [[nodiscard]] std::size_t hash() const {
    return std::hash<std::int64_t>{}(num_) * 31u + std::hash<std::int64_t>{}(den_);
  }

 private:
  static Rational from_wide(__int128 n, __int128 d);
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

/// Exact Gaussian rational a + b i.
struct GaussRational {
  Rational re;
  Rational im;

  constexpr GaussRational() = default;
  GaussRational(Rational r) : re(r) {}  // NOLINT(implicit)
  GaussRational(Rational r, Rational i) : re(r), im(i) {}

  static GaussRational i() { return {Rational(0), Rational(1)}; }

  [[nodiscard]] bool is_zero() const { return re.is_zero() && im.is_zero(); }
  [[nodiscard]] GaussRational conj() const { return {re, -im}; }

  GaussRational operator-() const { return {-re, -im}; }
  friend GaussRational operator+(const GaussRational& a, const GaussRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussRational operator-(const GaussRational& a, const GaussRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussRational operator*(const GaussRational& a, const GaussRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  GaussRational& operator+=(const GaussRational& o) { return *this = *this + o; }
  GaussRational& operator-=(const GaussRational& o) { return *this = *this - o; }
  GaussRational& operator*=(const GaussRational& o) { return *this = *this * o; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }

  [[nodiscard]] std::string str() const;
};

}  // namespace hidsym

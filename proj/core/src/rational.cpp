#include "hidsym/rational.hpp"

#include <limits>
#include <ostream>

namespace hidsym {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits(__int128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  *this = from_wide(n, d);
}

Rational Rational::from_wide(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (!fits(n) || !fits(d)) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(n);
  r.den_ = static_cast<std::int64_t>(d);
  return r;
}

Rational Rational::inverse() const {
  if (num_ == 0) throw std::domain_error("inverse of zero");
  return from_wide(den_, num_);
}

Rational Rational::pow(std::int64_t k) const {
  Rational base = k < 0 ? inverse() : *this;
  std::int64_t e = k < 0 ? -k : k;
  Rational out(1);
  while (e > 0) {
    if (e & 1) out *= base;
    e >>= 1;
    if (e > 0) base *= base;
  }
  return out;
}

Rational Rational::operator-() const { return from_wide(-static_cast<__int128>(num_), den_); }

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return Rational::from_wide(static_cast<__int128>(a.num_) + b.num_, a.den_);
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ +
                                 static_cast<__int128>(b.num_) * a.den_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.num_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("division by zero");
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_,
                             static_cast<__int128>(a.den_) * b.num_);
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

std::string GaussRational::str() const {
  if (im.is_zero()) return re.str();
  if (re.is_zero()) return im.str() + "i";
  return "(" + re.str() + (im.is_negative() ? "-" : "+") + im.abs().str() + "i)";
}

}  // namespace hidsym

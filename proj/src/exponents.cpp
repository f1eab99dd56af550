#include "pdlab/exponents.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace pdlab {
namespace {

using i128 = __int128;

std::int64_t checked(i128 v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error(std::string("rational overflow in ") + what);
  return static_cast<std::int64_t>(v);
}

Rational make(i128 num, i128 den, const char* what) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a == 0) a = 1;
  Rational r;
  r.num = checked(num / a, what);
  r.den = checked(den / a, what);
  return r;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  Rational r = make(n, d, "constructor");
  num = r.num;
  den = r.den;
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(const Rational& a, const Rational& b) {
  return make(i128(a.num) * b.den + i128(b.num) * a.den, i128(a.den) * b.den, "+");
}
Rational operator-(const Rational& a, const Rational& b) {
  return make(i128(a.num) * b.den - i128(b.num) * a.den, i128(a.den) * b.den, "-");
}
Rational operator*(const Rational& a, const Rational& b) {
  return make(i128(a.num) * b.num, i128(a.den) * b.den, "*");
}
Rational operator/(const Rational& a, const Rational& b) {
  if (b.num == 0) throw std::invalid_argument("rational division by zero");
  return make(i128(a.num) * b.den, i128(a.den) * b.num, "/");
}
bool operator==(const Rational& a, const Rational& b) {
  return a.num == b.num && a.den == b.den;
}
bool operator<(const Rational& a, const Rational& b) {
  return i128(a.num) * b.den < i128(b.num) * a.den;
}

Exponent::Exponent(const Rational& p) : p_(p) {
  if (!(Rational(0) < p)) throw std::invalid_argument("exponent must be positive");
}

Exponent Exponent::infinity() { return Exponent(); }

const Rational& Exponent::finite_value() const {
  if (inf_) throw std::logic_error("finite_value of an infinite exponent");
  return p_;
}

double Exponent::as_double() const {
  return inf_ ? std::numeric_limits<double>::infinity() : p_.value();
}

std::string Exponent::str() const { return inf_ ? "inf" : p_.str(); }

bool operator==(const Exponent& a, const Exponent& b) {
  if (a.is_infinity() || b.is_infinity()) return a.is_infinity() == b.is_infinity();
  return a.finite_value() == b.finite_value();
}

ExponentTuple::ExponentTuple(Exponent p, std::vector<Exponent> inputs)
    : p_(p), inputs_(std::move(inputs)) {
  if (inputs_.empty()) throw std::invalid_argument("exponent tuple needs at least one input");
  Rational sum(0);
  for (const auto& pj : inputs_) sum = sum + pj.reciprocal();
  if (p_.reciprocal() > sum)
    throw std::invalid_argument(
        "scaling constraint violated: 1/p exceeds sum of 1/p_j");
}

Exponent ExponentTuple::holder_exponent() const {
  Rational sum(0);
  for (const auto& pj : inputs_) sum = sum + pj.reciprocal();
  if (sum.num == 0) return Exponent::infinity();
  return Exponent(Rational(sum.den, sum.num));
}

std::vector<int> ExponentTuple::indices_at_least_two() const {
  std::vector<int> out;
  for (int j = 0; j < size(); ++j)
    if (inputs_[j].is_infinity() || inputs_[j].finite_value() >= Rational(2))
      out.push_back(j);
  return out;
}

std::vector<int> ExponentTuple::indices_below_two() const {
  std::vector<int> out;
  for (int j = 0; j < size(); ++j)
    if (!inputs_[j].is_infinity() && inputs_[j].finite_value() < Rational(2))
      out.push_back(j);
  return out;
}

}  // namespace pdlab

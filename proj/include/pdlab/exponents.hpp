#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pdlab {

// Exact rational arithmetic for exponent bookkeeping. Numerator/denominator
// are kept coprime with den > 0; operations go through 128-bit intermediates
// and throw on overflow instead of wrapping.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}  // NOLINT: implicit on purpose
  Rational(std::int64_t n, std::int64_t d);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
};

Rational operator+(const Rational&, const Rational&);
Rational operator-(const Rational&, const Rational&);
Rational operator*(const Rational&, const Rational&);
Rational operator/(const Rational&, const Rational&);
inline Rational operator-(const Rational& a) { return {-a.num, a.den}; }
bool operator==(const Rational&, const Rational&);
bool operator<(const Rational&, const Rational&);
inline bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
inline bool operator>(const Rational& a, const Rational& b) { return b < a; }
inline bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
inline bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }
inline const Rational& rmin(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

// Lebesgue exponent in (0, infinity]. Infinity is a flag (reciprocal 0), so
// the usual conventions 1/inf = 0 hold exactly in rational arithmetic.
class Exponent {
 public:
  Exponent(const Rational& p);     // NOLINT: implicit, requires p > 0
  Exponent(std::int64_t p) : Exponent(Rational(p)) {}
  static Exponent infinity();

  bool is_infinity() const { return inf_; }
  Rational reciprocal() const { return inf_ ? Rational(0) : Rational(p_.den, p_.num); }
  const Rational& finite_value() const;  // throws for infinity
  double as_double() const;
  std::string str() const;  // "inf" or the rational

 private:
  Exponent() : inf_(true) {}
  bool inf_ = false;
  Rational p_{1};
};

bool operator==(const Exponent&, const Exponent&);

// Target exponent p together with the input exponents p_1..p_N. Construction
// enforces the scaling constraint 1/p <= 1/p_1 + ... + 1/p_N.
class ExponentTuple {
 public:
  ExponentTuple(Exponent p, std::vector<Exponent> inputs);

  const Exponent& p() const { return p_; }
  const std::vector<Exponent>& inputs() const { return inputs_; }
  int size() const { return static_cast<int>(inputs_.size()); }

  // The Hoelder exponent p0 with 1/p0 = sum_j 1/p_j.
  Exponent holder_exponent() const;
  std::vector<int> indices_at_least_two() const;  // {j : p_j >= 2}
  std::vector<int> indices_below_two() const;

 private:
  Exponent p_;
  std::vector<Exponent> inputs_;
};

}  // namespace pdlab

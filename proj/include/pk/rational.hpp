#pragma once

#include <gmpxx.h>

#include <compare>
#include <string>
#include <string_view>

namespace pk {

using Integer = mpz_class;
using Rational = mpq_class;
using prime_t = unsigned long;

// p-adic valuation; +infinity is the valuation of zero.
class Valuation {
 public:
  constexpr Valuation() = default;
  constexpr Valuation(long v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  static constexpr Valuation infinity() {
    Valuation v;
    v.infinite_ = true;
    return v;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }
  long value() const;

  friend constexpr bool operator==(const Valuation& a, const Valuation& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend constexpr std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.value_ <=> b.value_;
  }
  friend Valuation operator+(const Valuation& a, const Valuation& b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return Valuation(a.value_ + b.value_);
  }

  std::string to_string() const;

 private:
  long value_ = 0;
  bool infinite_ = false;
};

Valuation vp(const Integer& n, prime_t p);
Valuation vp(const Rational& q, prime_t p);

Integer ipow(prime_t p, unsigned long e);
// p^e for any integer e (negative gives 1/p^|e|).
Rational rpow(prime_t p, long e);
Rational rpow(const Rational& base, unsigned long e);

// Remove every factor p: returns n / p^vp(n) for n != 0.
Integer strip_p(const Integer& n, prime_t p);

// The canonical representative of c modulo p^m: the finite digit sum
// sum_{j < m} d_j p^j of the p-adic expansion of c. Zero when vp(c) >= m.
Rational reduce_mod_pow(const Rational& c, long m, prime_t p);

// c mod p for a p-adic unit or integer c (denominator prime to p).
unsigned long residue_mod_p(const Rational& c, prime_t p);

// Value of a Z_p-integral rational modulo the integer modulus (coprime denominator required).
Integer rational_mod(const Rational& c, const Integer& modulus);

Rational make_rational(const Integer& num, const Integer& den);

// "num/den" or "num"; zero is "0".
std::string to_string(const Rational& q);
std::string to_string(const Integer& n);

// Parses "[-]digits[/digits]" and also "[-]digits e digits" style powers of ten
// when allow_exponent is set. Throws ParseError with the offending position.
Rational parse_rational(std::string_view text, std::size_t offset = 0);
Integer parse_integer(std::string_view text, bool allow_exponent = false, std::size_t offset = 0);

}  // namespace pk

#pragma once

#include <optional>
#include <string>

#include "pk/rational.hpp"

namespace pk {

inline constexpr long kDefaultPrecision = 32;
inline constexpr long kDefaultPrecisionCap = 256;

// Precision cap for adaptive escalation: KEPLER_MAX_PREC when set and valid, else 256.
long precision_cap_from_env();

// Throws UnsupportedPrime for p = 2 and InvalidArgument for non-primes.
void require_odd_prime(prime_t p);

struct PadicContext {
  prime_t p = 3;
  long precision = kDefaultPrecision;

  static PadicContext make(prime_t p, long precision = kDefaultPrecision);
  PadicContext with_precision(long n) const { return PadicContext{p, n}; }
};

// Truncated element of Q_p: p^valuation * unit, with `digits` guaranteed
// base-p digits of the unit. Zero carries the absolute precision to which it is known.
class PadicApprox {
 public:
  static constexpr long kExact = 1L << 40;

  static PadicApprox zero(const PadicContext& ctx, long absolute_precision = kExact);
  static PadicApprox from_rational(const Rational& q, const PadicContext& ctx);
  // unit is reduced mod p^digits; throws PrecisionExhausted when digits < 1.
  static PadicApprox from_parts(const PadicContext& ctx, long valuation, const Integer& unit, long digits);

  const PadicContext& context() const { return ctx_; }
  prime_t p() const { return ctx_.p; }
  bool is_zero() const { return zero_; }
  // Throws PrecisionExhausted for a zero that is only known to finite precision.
  long valuation() const;
  const Integer& unit() const { return unit_; }
  long digits() const { return zero_ ? 0 : digits_; }
  long absolute_precision() const { return zero_ ? abs_zero_ : valuation_ + digits_; }

  PadicApprox operator-() const;
  friend PadicApprox operator+(const PadicApprox& x, const PadicApprox& y);
  friend PadicApprox operator-(const PadicApprox& x, const PadicApprox& y);
  friend PadicApprox operator*(const PadicApprox& x, const PadicApprox& y);
  friend PadicApprox operator/(const PadicApprox& x, const PadicApprox& y);
  // Equal valuations and units agreeing to the common guaranteed digits.
  friend bool operator==(const PadicApprox& x, const PadicApprox& y);

  // p^valuation * unit as an exact rational (0 for zero).
  Rational to_rational() const;
  // Base-p little-endian unit digits followed by the valuation: "d0 d1 d2 ·p^v".
  std::string digit_string() const;

 private:
  PadicApprox(const PadicContext& ctx) : ctx_(ctx) {}

  PadicContext ctx_;
  bool zero_ = true;
  long abs_zero_ = kExact;
  long valuation_ = 0;
  long digits_ = 0;
  Integer unit_ = 0;
};

// Square root with unit digit in [1, (p-1)/2]; empty when q is not a square in Q_p.
std::optional<PadicApprox> hensel_sqrt(const Rational& q, const PadicContext& ctx);

// Square root of a quadratic residue mod p^n (unit u); first digit in [1, (p-1)/2].
Integer sqrt_mod_prime_power(const Integer& u, prime_t p, long n);

PadicApprox plog(const PadicApprox& x);
// plog of an exact rational, computed with enough digits that the result keeps ctx.precision digits.
PadicApprox plog(const Rational& q, const PadicContext& ctx);
PadicApprox pexp(const PadicApprox& x);

unsigned long unit_order_mod_p(const Rational& u, prime_t p);
unsigned long unit_order_mod_p(const PadicApprox& u);

}  // namespace pk

#include "pk/padic.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "pk/arith.hpp"
#include "pk/errors.hpp"

namespace pk {

long precision_cap_from_env() {
  const char* env = std::getenv("KEPLER_MAX_PREC");
  if (env == nullptr) return kDefaultPrecisionCap;
  char* end = nullptr;
  long value = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || value < 1) return kDefaultPrecisionCap;
  return value;
}

void require_odd_prime(prime_t p) {
  if (p == 2) throw UnsupportedPrime();
  if (!is_prime_u64(p)) throw InvalidArgument("p must be an odd prime (got " + std::to_string(p) + ")");
}

PadicContext PadicContext::make(prime_t p, long precision) {
  require_odd_prime(p);
  if (precision < 1) throw InvalidArgument("precision must be at least 1");
  return PadicContext{p, precision};
}

namespace {

Integer mod_pow_p(const Integer& v, prime_t p, long n) {
  Integer m = ipow(p, static_cast<unsigned long>(n));
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
  return r;
}

Integer inverse_mod(const Integer& v, const Integer& m) {
  Integer r;
  if (mpz_invert(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t()) == 0) throw DivisionByZero();
  return r;
}

long sat_add(long a, long b) {
  if (a >= PadicApprox::kExact || b >= PadicApprox::kExact) return PadicApprox::kExact;
  return std::min(a + b, PadicApprox::kExact);
}

}  // namespace

PadicApprox PadicApprox::zero(const PadicContext& ctx, long absolute_precision) {
  PadicApprox z(ctx);
  z.abs_zero_ = std::min(absolute_precision, kExact);
  return z;
}

PadicApprox PadicApprox::from_parts(const PadicContext& ctx, long valuation, const Integer& unit, long digits) {
  if (digits < 1) throw PrecisionExhausted("no guaranteed digits left");
  PadicApprox x(ctx);
  x.zero_ = false;
  x.valuation_ = valuation;
  x.digits_ = digits;
  x.unit_ = mod_pow_p(unit, ctx.p, digits);
  if (x.unit_ % ctx.p == 0) throw DomainError("unit part divisible by p");
  return x;
}

PadicApprox PadicApprox::from_rational(const Rational& q, const PadicContext& ctx) {
  if (q == 0) return zero(ctx);
  long v = vp(q, ctx.p).value();
  Rational u = q * rpow(ctx.p, -v);
  return from_parts(ctx, v, rational_mod(u, ipow(ctx.p, static_cast<unsigned long>(ctx.precision))), ctx.precision);
}

long PadicApprox::valuation() const {
  if (zero_) {
    if (abs_zero_ >= kExact) return kExact;
    throw PrecisionExhausted("valuation undetermined: value is zero to " + std::to_string(abs_zero_) + " digits");
  }
  return valuation_;
}

PadicApprox PadicApprox::operator-() const {
  if (zero_) return *this;
  return from_parts(ctx_, valuation_, -unit_, digits_);
}

PadicApprox operator+(const PadicApprox& x, const PadicApprox& y) {
  const PadicContext& ctx = x.ctx_;
  long a = std::min(x.absolute_precision(), y.absolute_precision());
  if (x.zero_ && y.zero_) return PadicApprox::zero(ctx, a);
  long v0 = PadicApprox::kExact;
  if (!x.zero_) v0 = std::min(v0, x.valuation_);
  if (!y.zero_) v0 = std::min(v0, y.valuation_);
  if (a <= v0) return PadicApprox::zero(ctx, a);
  Integer s = 0;
  if (!x.zero_) s += x.unit_ * ipow(ctx.p, static_cast<unsigned long>(x.valuation_ - v0));
  if (!y.zero_) s += y.unit_ * ipow(ctx.p, static_cast<unsigned long>(y.valuation_ - v0));
  s = mod_pow_p(s, ctx.p, a - v0);
  if (s == 0) return PadicApprox::zero(ctx, a);
  long shift = vp(s, ctx.p).value();
  Integer unit = strip_p(s, ctx.p);
  long w = v0 + shift;
  return PadicApprox::from_parts(ctx, w, unit, a - w);
}

PadicApprox operator-(const PadicApprox& x, const PadicApprox& y) { return x + (-y); }

PadicApprox operator*(const PadicApprox& x, const PadicApprox& y) {
  const PadicContext& ctx = x.ctx_;
  if (x.zero_ || y.zero_) {
    long ax = x.zero_ ? sat_add(x.abs_zero_, y.zero_ ? 0 : y.valuation_) : PadicApprox::kExact;
    long ay = y.zero_ ? sat_add(y.abs_zero_, x.zero_ ? 0 : x.valuation_) : PadicApprox::kExact;
    if (x.zero_ && y.zero_) ax = sat_add(x.abs_zero_, y.abs_zero_);
    return PadicApprox::zero(ctx, std::min(ax, ay));
  }
  long digits = std::min(x.digits_, y.digits_);
  return PadicApprox::from_parts(ctx, x.valuation_ + y.valuation_, x.unit_ * y.unit_, digits);
}

PadicApprox operator/(const PadicApprox& x, const PadicApprox& y) {
  if (y.zero_) throw DivisionByZero();
  const PadicContext& ctx = x.ctx_;
  if (x.zero_) {
    long a = x.abs_zero_ >= PadicApprox::kExact ? PadicApprox::kExact : x.abs_zero_ - y.valuation_;
    return PadicApprox::zero(ctx, a);
  }
  long digits = std::min(x.digits_, y.digits_);
  Integer m = ipow(ctx.p, static_cast<unsigned long>(digits));
  return PadicApprox::from_parts(ctx, x.valuation_ - y.valuation_, x.unit_ * inverse_mod(y.unit_, m), digits);
}

bool operator==(const PadicApprox& x, const PadicApprox& y) {
  if (x.zero_ || y.zero_) return x.zero_ && y.zero_;
  if (x.valuation_ != y.valuation_) return false;
  long digits = std::min(x.digits_, y.digits_);
  return mod_pow_p(x.unit_ - y.unit_, x.ctx_.p, digits) == 0;
}

Rational PadicApprox::to_rational() const {
  if (zero_) return 0;
  return Rational(unit_) * rpow(ctx_.p, valuation_);
}

std::string PadicApprox::digit_string() const {
  if (zero_) return "0";
  std::string out;
  Integer u = unit_;
  for (long i = 0; i < digits_; ++i) {
    Integer d;
    mpz_fdiv_qr_ui(u.get_mpz_t(), d.get_mpz_t(), u.get_mpz_t(), ctx_.p);
    if (i > 0) out += ' ';
    out += d.get_str();
  }
  out += "·p^" + std::to_string(valuation_);
  return out;
}

namespace {

// Square root of a residue mod p by Tonelli-Shanks.
u64 sqrt_mod_p(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
  u64 q = p - 1;
  int s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  u64 z = 2;
  while (jacobi(static_cast<i64>(z), p) != -1) ++z;
  u64 m = static_cast<u64>(s);
  u64 c = powmod(z, q, p);
  u64 t = powmod(a, q, p);
  u64 r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    u64 i = 0;
    u64 tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    u64 b = c;
    for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

}  // namespace

Integer sqrt_mod_prime_power(const Integer& u, prime_t p, long n) {
  Integer pz(p);
  Integer res;
  mpz_fdiv_r(res.get_mpz_t(), u.get_mpz_t(), pz.get_mpz_t());
  u64 r0 = sqrt_mod_p(res.get_ui(), p);
  if (r0 > (p - 1) / 2) r0 = p - r0;
  Integer r(r0);
  long have = 1;
  while (have < n) {
    have = std::min(2 * have, n);
    Integer m = ipow(p, static_cast<unsigned long>(have));
    Integer f = r * r - u;
    Integer step = f * inverse_mod(Integer(2 * r), m);
    r = r - step;
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
  }
  return r;
}

std::optional<PadicApprox> hensel_sqrt(const Rational& q, const PadicContext& ctx) {
  if (q == 0) throw DomainError("hensel_sqrt of zero");
  long v = vp(q, ctx.p).value();
  if (v % 2 != 0) return std::nullopt;
  Rational unit_part = q * rpow(ctx.p, -v);
  Integer u = rational_mod(unit_part, ipow(ctx.p, static_cast<unsigned long>(ctx.precision)));
  Integer res = u % Integer(ctx.p);
  if (jacobi(static_cast<i64>(res.get_ui()), ctx.p) != 1) return std::nullopt;
  Integer r = sqrt_mod_prime_power(u, ctx.p, ctx.precision);
  return PadicApprox::from_parts(ctx, v / 2, r, ctx.precision);
}

PadicApprox plog(const PadicApprox& x) {
  const PadicContext& ctx = x.context();
  const prime_t p = ctx.p;
  if (x.is_zero() || x.valuation() != 0) throw DomainError("plog needs a unit congruent to 1 mod p");
  if (x.unit() % p != 1) throw DomainError("plog needs a unit congruent to 1 mod p");
  const long a = x.digits();
  Integer z = x.unit() - 1;
  if (z == 0) return PadicApprox::zero(ctx, a);
  const long m = vp(z, p).value();
  if (m >= a) return PadicApprox::zero(ctx, a);

  auto floor_log = [p](long n) {
    long e = 0;
    for (long t = n; t >= static_cast<long>(p); t /= static_cast<long>(p)) ++e;
    return e;
  };
  long n_max = 1;
  while (n_max * m - floor_log(n_max) < a) ++n_max;
  const long extra = floor_log(n_max);
  const Integer work = ipow(p, static_cast<unsigned long>(a + extra));
  const Integer target = ipow(p, static_cast<unsigned long>(a));

  Integer sum = 0;
  Integer power = 1;
  for (long n = 1; n < n_max; ++n) {
    power = power * z;
    mpz_fdiv_r(power.get_mpz_t(), power.get_mpz_t(), work.get_mpz_t());
    long e = vp(Integer(n), p).value();
    Integer term = power / ipow(p, static_cast<unsigned long>(e));
    Integer n_unit = Integer(n) / ipow(p, static_cast<unsigned long>(e));
    term = term * inverse_mod(n_unit, target);
    if (n % 2 == 0) {
      sum -= term;
    } else {
      sum += term;
    }
    mpz_fdiv_r(sum.get_mpz_t(), sum.get_mpz_t(), target.get_mpz_t());
  }
  if (sum == 0) return PadicApprox::zero(ctx, a);
  long w = vp(sum, p).value();
  return PadicApprox::from_parts(ctx, w, strip_p(sum, p), a - w);
}

PadicApprox plog(const Rational& q, const PadicContext& ctx) {
  Valuation m = vp(q - 1, ctx.p);
  if (m.is_infinite()) return PadicApprox::zero(ctx);
  if (m.value() < 1) throw DomainError("plog needs a unit congruent to 1 mod p");
  PadicContext wide = ctx.with_precision(ctx.precision + m.value());
  PadicApprox wide_log = plog(PadicApprox::from_rational(q, wide));
  if (wide_log.is_zero()) return PadicApprox::zero(ctx, wide_log.absolute_precision());
  return PadicApprox::from_parts(ctx, wide_log.valuation(), wide_log.unit(),
                                 std::min(wide_log.digits(), ctx.precision));
}

PadicApprox pexp(const PadicApprox& x) {
  const PadicContext& ctx = x.context();
  const prime_t p = ctx.p;
  const long a_in = x.absolute_precision();
  const long a = std::min(a_in, ctx.precision);
  if (x.is_zero()) return PadicApprox::from_parts(ctx, 0, 1, a);
  const long v = x.valuation();
  if (v < 1) throw DomainError("pexp needs valuation at least 1");

  // Valuation of x^n/n! is at least n*v - (n-1)/(p-1).
  auto lower = [&](long n) { return n * v - (n - 1) / static_cast<long>(p - 1); };
  long n_max = 1;
  while (lower(n_max) < a) ++n_max;
  long extra = 0;
  for (long n = 2; n <= n_max; ++n) extra += vp(Integer(n), p).value();
  const Integer work = ipow(p, static_cast<unsigned long>(a + extra));
  const Integer target = ipow(p, static_cast<unsigned long>(a));

  Integer big_x = x.unit() * ipow(p, static_cast<unsigned long>(v));
  Integer sum = 1;
  Integer power = 1;
  Integer fact_unit = 1;
  long fact_e = 0;
  for (long n = 1; n < n_max; ++n) {
    power = power * big_x;
    mpz_fdiv_r(power.get_mpz_t(), power.get_mpz_t(), work.get_mpz_t());
    long e = vp(Integer(n), p).value();
    fact_e += e;
    fact_unit = fact_unit * (Integer(n) / ipow(p, static_cast<unsigned long>(e)));
    mpz_fdiv_r(fact_unit.get_mpz_t(), fact_unit.get_mpz_t(), target.get_mpz_t());
    Integer term = power / ipow(p, static_cast<unsigned long>(fact_e));
    term = term * inverse_mod(fact_unit, target);
    sum += term;
    mpz_fdiv_r(sum.get_mpz_t(), sum.get_mpz_t(), target.get_mpz_t());
  }
  return PadicApprox::from_parts(ctx, 0, sum, a);
}

unsigned long unit_order_mod_p(const Rational& u, prime_t p) {
  if (u == 0 || vp(u, p).value() != 0) throw DomainError("unit_order_mod_p needs a p-adic unit");
  return order_mod_prime(residue_mod_p(u, p), p);
}

unsigned long unit_order_mod_p(const PadicApprox& u) {
  if (u.is_zero() || u.valuation() != 0) throw DomainError("unit_order_mod_p needs a p-adic unit");
  Integer r = u.unit() % Integer(u.p());
  return order_mod_prime(r.get_ui(), u.p());
}

}  // namespace pk

#include "pk/rational.hpp"

#include <cctype>

#include "pk/errors.hpp"

namespace pk {

long Valuation::value() const {
  if (infinite_) throw DomainError("valuation of zero is infinite");
  return value_;
}

std::string Valuation::to_string() const {
  return infinite_ ? std::string("inf") : std::to_string(value_);
}

Valuation vp(const Integer& n, prime_t p) {
  if (n == 0) return Valuation::infinity();
  Integer rest;
  Integer pz(p);
  return Valuation(static_cast<long>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t())));
}

Valuation vp(const Rational& q, prime_t p) {
  if (q == 0) return Valuation::infinity();
  return Valuation(vp(q.get_num(), p).value() - vp(q.get_den(), p).value());
}

Integer ipow(prime_t p, unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), p, e);
  return r;
}

Rational rpow(prime_t p, long e) {
  if (e >= 0) return Rational(ipow(p, static_cast<unsigned long>(e)));
  return make_rational(1, ipow(p, static_cast<unsigned long>(-e)));
}

Rational rpow(const Rational& base, unsigned long e) {
  Integer n;
  Integer d;
  mpz_pow_ui(n.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), base.get_den_mpz_t(), e);
  Rational r(n, d);
  return r;  // already canonical: gcd(num, den) = 1 is preserved by powers
}

Integer strip_p(const Integer& n, prime_t p) {
  if (n == 0) return 0;
  Integer rest;
  Integer pz(p);
  mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t());
  return rest;
}

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw DivisionByZero();
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational reduce_mod_pow(const Rational& c, long m, prime_t p) {
  if (c == 0) return 0;
  long e = vp(c.get_den(), p).value();
  if (m + e <= 0) return 0;
  Integer unit_den = strip_p(c.get_den(), p);
  Integer modulus = ipow(p, static_cast<unsigned long>(m + e));
  Integer inv;
  mpz_invert(inv.get_mpz_t(), unit_den.get_mpz_t(), modulus.get_mpz_t());
  Integer digits = c.get_num() * inv;
  mpz_fdiv_r(digits.get_mpz_t(), digits.get_mpz_t(), modulus.get_mpz_t());
  return make_rational(digits, ipow(p, static_cast<unsigned long>(e)));
}

Integer rational_mod(const Rational& c, const Integer& modulus) {
  Integer inv;
  if (mpz_invert(inv.get_mpz_t(), c.get_den_mpz_t(), modulus.get_mpz_t()) == 0) {
    throw DomainError("denominator not invertible modulo " + modulus.get_str());
  }
  Integer r = c.get_num() * inv;
  mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), modulus.get_mpz_t());
  return r;
}

unsigned long residue_mod_p(const Rational& c, prime_t p) {
  return rational_mod(c, Integer(p)).get_ui();
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_string(const Integer& n) { return n.get_str(); }

namespace {

std::size_t skip_digits(std::string_view text, std::size_t i) {
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])) != 0) ++i;
  return i;
}

}  // namespace

Integer parse_integer(std::string_view text, bool allow_exponent, std::size_t offset) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  std::size_t start = i;
  i = skip_digits(text, i);
  if (i == start) throw ParseError("expected digits", offset + i);
  Integer value(std::string(text.substr(start, i - start)));
  if (allow_exponent && i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    std::size_t exp_start = ++i;
    i = skip_digits(text, i);
    if (i == exp_start) throw ParseError("expected exponent digits", offset + i);
    unsigned long exponent = std::stoul(std::string(text.substr(exp_start, i - exp_start)));
    value *= ipow(10, exponent);
  }
  if (i != text.size()) throw ParseError("unexpected character", offset + i);
  return negative ? Integer(-value) : value;
}

Rational parse_rational(std::string_view text, std::size_t offset) {
  std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, false, offset));
  Integer num = parse_integer(text.substr(0, slash), false, offset);
  std::string_view den_text = text.substr(slash + 1);
  if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+')) {
    throw ParseError("denominator must be unsigned", offset + slash + 1);
  }
  Integer den = parse_integer(den_text, false, offset + slash + 1);
  if (den == 0) throw ParseError("zero denominator", offset + slash + 1);
  return make_rational(num, den);
}

}  // namespace pk

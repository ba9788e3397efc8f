#include "doctest.h"
#include "oracles.hpp"
#include "pk/errors.hpp"
#include "pk/quad.hpp"

using namespace pk;

namespace {

QuadElement q(long x, long y, long d) { return QuadElement(Rational(x), Rational(y), Integer(d)); }

QuadElement random_element(const Integer& d) {
  Rational x(oracle::uniform(-60, 60), oracle::uniform(1, 12));
  Rational y(oracle::uniform(-60, 60), oracle::uniform(1, 12));
  x.canonicalize();
  y.canonicalize();
  return QuadElement(x, y, d);
}

}  // namespace

TEST_CASE("classify") {
  CHECK(classify(3, 5).cls == ExtClass::Unramified);
  CHECK(classify(5, 5).cls == ExtClass::Ramified);
  CHECK(classify(3, 7).cls == ExtClass::Split);
  CHECK(classify(5, 5).e == 2);
  CHECK(classify(3, 5).f == 2);
  CHECK(classify(3, Rational(45, 4)).d == 5);
  CHECK(classify(3, 27).d == 3);
  CHECK(classify(3, 27).cls == ExtClass::Ramified);
  CHECK(classify(3, 9).d == 1);
  CHECK(classify(3, 9).cls == ExtClass::Split);
  CHECK(classify(3, -2).cls == ExtClass::Split);  // -2 = 1 mod 3
  CHECK_THROWS_AS(classify(3, 0), InvalidArgument);
  CHECK_THROWS_AS(classify(2, 5), UnsupportedPrime);
}

TEST_CASE("canonical extension names") {
  CHECK(classify(3, 5).canonical_name() == "Q3(sqrt(2))");
  CHECK(classify(3, 3).canonical_name() == "Q3(sqrt(3))");
  CHECK(classify(3, 6).canonical_name() == "Q3(sqrt(6))");
  CHECK(classify(5, 5).canonical_name() == "Q5(sqrt(5))");
  CHECK(classify(5, 10).canonical_name() == "Q5(sqrt(10))");
  CHECK(classify(7, 2).canonical_name() == "Q7");
  CHECK(classify(7, 3).canonical_nonresidue == 3);
}

TEST_CASE("classification agrees with brute-force square detection") {
  for (prime_t p : {3UL, 5UL, 7UL, 11UL, 13UL}) {
    for (long d = -60; d <= 60; ++d) {
      if (d == 0) continue;
      ExtensionDescriptor ext = classify(p, d);
      // d is a square in Q_p iff even valuation and unit part is a residue mod p.
      long v = oracle::naive_vp(Integer(d), p);
      Integer unit = Integer(d) / oracle::pow_int(p, v);
      bool residue = false;
      Integer u = oracle::mod_of(Rational(unit), Integer(p));
      for (unsigned long t = 1; t < p; ++t) residue = residue || (Integer(t * t % p) == u);
      bool square = v % 2 == 0 && residue;
      CHECK((ext.cls == ExtClass::Split) == square);
      CHECK((ext.cls == ExtClass::Ramified) == (v % 2 == 1));
    }
  }
}

TEST_CASE("norm examples") {
  CHECK(norm(q(2, 1, 5)) == -1);
  CHECK(norm(QuadElement(1)) == 1);
  CHECK(norm(q(3, 1, 3) * q(3, -1, 3)) == 36);
  CHECK((q(3, 1, 3) * q(3, -1, 3)).is_rational());
}

TEST_CASE("norm is multiplicative and conj is an involution") {
  for (long d : {5L, 3L, 7L, -1L, 15L}) {
    for (int i = 0; i < 1000; ++i) {
      QuadElement z = random_element(d);
      QuadElement w = random_element(d);
      CHECK(norm(z * w) == norm(z) * norm(w));
      CHECK(z.conj().conj() == z);
      QuadElement zz = z * z.conj();
      CHECK(zz.is_rational());
      CHECK(zz.x() == norm(z));
      if (!w.is_zero()) CHECK((z / w) * w == z);
    }
  }
}

TEST_CASE("pi valuations") {
  LocalField ram5 = LocalField::of(classify(5, 5));
  LocalField ram3 = LocalField::of(classify(3, 3));
  LocalField unr3 = LocalField::of(classify(3, 5));
  CHECK(ram5.val(q(0, 1, 5)) == Valuation(1));
  CHECK(ram3.val(q(3, 1, 3)) == Valuation(1));
  CHECK(unr3.val(q(2, 1, 5)) == Valuation(0));
  CHECK(unr3.val(QuadElement(0)).is_infinite());
  CHECK(ram3.val(QuadElement(9)) == Valuation(4));
  CHECK(unr3.val(q(9, 3, 5)) == Valuation(1));
}

TEST_CASE("pi valuation is additive; parity depends on ramification") {
  for (auto [p, d] : {std::pair<prime_t, long>{3, 5}, {3, 3}, {5, 5}, {5, 2}, {7, 3}, {7, 14}}) {
    LocalField f = LocalField::of(classify(p, d));
    bool odd_seen = false;
    for (int i = 0; i < 1000; ++i) {
      QuadElement z = random_element(d);
      QuadElement w = random_element(d);
      if (z.is_zero() || w.is_zero()) continue;
      CHECK(f.val(z * w).value() == f.val(z).value() + f.val(w).value());
      long v = f.val(z).value();
      if (oracle::naive_vp(norm(z), p) % 2 != 0) odd_seen = true;
      // independent evaluation: e * vp(norm) / 2
      CHECK(2 * v == f.e() * oracle::naive_vp(norm(z), p));
    }
    CHECK(odd_seen == (f.kind() == LocalField::Kind::Ramified));
  }
}

TEST_CASE("split valuation through the embedding") {
  LocalField f = LocalField::of(classify(3, 7));
  REQUIRE(f.kind() == LocalField::Kind::Split);
  QuadElement z = q(0, 1, 7);
  CHECK(f.val(z) == Valuation(0));
  Integer t = f.sqrt_d_mod(10);
  CHECK(oracle::mod_of(Rational(t * t - 7), oracle::pow_int(3, 10)) == 0);
  // one of 1 +- sqrt(7) has positive valuation: (1 - 7) = -6
  long v1 = f.val(q(1, 1, 7)).value();
  long v2 = f.val(q(1, -1, 7)).value();
  CHECK(v1 + v2 == 1);
  // val(x + y sqrt 7) matches vp of the embedded value
  for (int i = 0; i < 200; ++i) {
    QuadElement w = random_element(7);
    if (w.is_zero()) continue;
    Rational emb = w.x() + w.y() * Rational(f.sqrt_d_mod(40));
    CHECK(f.val(w).value() == oracle::naive_vp(emb, 3));
  }
}

TEST_CASE("order modulo pi") {
  CHECK(LocalField::of(classify(3, 5)).order_mod_pi(q(2, 1, 5)) == 8);
  CHECK(LocalField::of(classify(5, 5)).order_mod_pi(q(2, 1, 5)) == 4);
  CHECK(LocalField::qp(3).order_mod_pi(QuadElement(1)) == 1);
  CHECK_THROWS_AS(LocalField::qp(3).order_mod_pi(QuadElement(3)), DomainError);
}

TEST_CASE("order modulo pi matches brute-force powers") {
  for (auto [p, d] : {std::pair<prime_t, long>{3, 5}, {5, 2}, {7, 3}, {5, 5}, {3, 6}}) {
    LocalField f = LocalField::of(classify(p, d));
    for (int i = 0; i < 100; ++i) {
      QuadElement z = q(oracle::uniform(-30, 30), oracle::uniform(-30, 30), d);
      if (f.val(z) != Valuation(0)) continue;
      unsigned long l = f.order_mod_pi(z);
      CHECK((p * p - 1) % l == 0);
      QuadElement pw(1);
      unsigned long brute = 0;
      for (unsigned long n = 1; n <= p * p; ++n) {
        pw = pw * z;
        if (f.val(pw - QuadElement(1)) >= Valuation(1)) {
          brute = n;
          break;
        }
      }
      CHECK(l == brute);
    }
  }
}

TEST_CASE("roots of unity of degree two") {
  CHECK(is_deg2_root_of_unity(QuadElement(-1)) == 2);
  CHECK(is_deg2_root_of_unity(QuadElement(1)) == 1);
  CHECK(is_deg2_root_of_unity(QuadElement(Rational(-1, 2), Rational(1, 2), -3)) == 3);
  CHECK(is_deg2_root_of_unity(QuadElement(Rational(1, 2), Rational(1, 2), -3)) == 6);
  CHECK(is_deg2_root_of_unity(q(0, 1, -1)) == 4);
  CHECK_FALSE(is_deg2_root_of_unity(QuadElement(Rational(7, 5))).has_value());
  CHECK_FALSE(is_deg2_root_of_unity(q(2, 1, 3)).has_value());  // norm 1, infinite order
  // any reported order really is an order
  for (long d : {-1L, -3L, 3L, 5L}) {
    for (long a = -2; a <= 2; ++a) {
      for (long b = -2; b <= 2; ++b) {
        for (long den = 1; den <= 2; ++den) {
          QuadElement z(Rational(a, den), Rational(b, den), d);
          if (z.is_zero()) continue;
          auto o = is_deg2_root_of_unity(z);
          if (o) {
            CHECK(z.pow(*o) == QuadElement(1));
            for (int j = 1; j < *o; ++j) CHECK_FALSE(z.pow(j) == QuadElement(1));
          } else {
            for (int j = 1; j <= 12; ++j) CHECK_FALSE(z.pow(j) == QuadElement(1));
          }
        }
      }
    }
  }
}

TEST_CASE("conjugate coefficient ratios are norm one units") {
  // c1, c2 conjugate: c = c1/c2 has norm 1 and valuation 0.
  for (auto [p, d] : {std::pair<prime_t, long>{3, 5}, {3, 3}, {5, 5}, {7, 3}}) {
    LocalField f = LocalField::of(classify(p, d));
    for (int i = 0; i < 200; ++i) {
      QuadElement c1 = random_element(d);
      if (c1.is_zero() || c1.is_rational()) continue;
      QuadElement c = c1 / c1.conj();
      CHECK(norm(c) == 1);
      if (f.kind() != LocalField::Kind::Split) CHECK(f.val(c) == Valuation(0));
    }
  }
}

TEST_CASE("text form round trip") {
  CHECK(q(2, 1, 5).to_string() == "2 + sqrt(5)");
  CHECK(q(1, -3, 2).to_string() == "1 + -3*sqrt(2)");
  CHECK(QuadElement(Rational(3, 4)).to_string() == "3/4");
  CHECK(parse_quad("1 - 3*sqrt(2)") == q(1, -3, 2));
  CHECK(parse_quad("3 + sqrt(5)") == q(3, 1, 5));
  CHECK(parse_quad("3 - sqrt(5)") == q(3, -1, 5));
  CHECK(parse_quad("sqrt(8)") == q(0, 2, 2));
  CHECK(parse_quad("1/2*sqrt(-3)") == QuadElement(0, Rational(1, 2), -3));
  CHECK(parse_quad("sqrt(9)") == QuadElement(3));
  CHECK_THROWS_AS(parse_quad("1 + 2*sqrt(5"), ParseError);
  CHECK_THROWS_AS(parse_quad("1 + 2x"), ParseError);
  for (long d : {5L, -3L, 2L}) {
    for (int i = 0; i < 300; ++i) {
      QuadElement z = random_element(d);
      CHECK(parse_quad(z.to_string()) == z);
    }
  }
}

TEST_CASE("squarefree split") {
  auto s = squarefree_split(Rational(45, 4));
  CHECK(s.d == 5);
  CHECK(s.q == Rational(3, 2));
  CHECK(squarefree_split(Rational(-4)).d == -1);
  CHECK(squarefree_split(Rational(16)).d == 1);
  for (int i = 0; i < 300; ++i) {
    Rational v(oracle::uniform(-5000, 5000), oracle::uniform(1, 300));
    v.canonicalize();
    if (v == 0) continue;
    auto sp = squarefree_split(v);
    CHECK(sp.q * sp.q * Rational(sp.d) == v);
    for (long t = 2; t * t <= 5000; ++t) CHECK(sp.d % (t * t) != 0);
  }
}

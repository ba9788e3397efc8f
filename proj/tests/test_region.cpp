#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "region_oracle.hpp"
#include "pk/errors.hpp"
#include "pk/region.hpp"

using namespace pk;

namespace doctest {
template <>
struct StringMaker<Region> {
  static String convert(const Region& r) { return r.to_string().c_str(); }
};
}  // namespace doctest

namespace {

QuadElement q(long x, long y, long d) { return QuadElement(Rational(x), Rational(y), Integer(d)); }

Region R(const std::vector<RegionTerm>& t, const LocalField& f) { return Region::normalize(t, f); }

}  // namespace

TEST_CASE("membership examples") {
  LocalField f = LocalField::qp(3);
  CHECK(R({Ball{7, 2}}, f).contains(16));
  CHECK_FALSE(R({Ball{7, 2}}, f).contains(10));
  CHECK(R({CoBall{Ball{1, 1}}}, f).contains(Point::infinity()));
  CHECK(R({CoBall{Ball{0, -1}}}, f).contains(Rational(1, 9)));
  CHECK_FALSE(R({CoBall{Ball{0, -1}}}, f).contains(Rational(1, 3)));
  CHECK_FALSE(R({Ball{0, 2}}, f).contains(Point::infinity()));
  CHECK(Region::all(f).contains(Point::infinity()));
  CHECK_FALSE(Region::empty(f).contains(0));
}

TEST_CASE("normalize examples") {
  LocalField f = LocalField::qp(3);
  CHECK(R({Ball{1, 1}, Ball{1, 2}}, f) == R({Ball{1, 1}}, f));
  CHECK(R({Ball{1, 1}, Ball{1, 2}}, f).balls().size() == 1);
  Region nine = R({Ball{9, 2}}, f);
  CHECK(nine.balls().at(0).center == QuadElement(0));
  CHECK(nine.to_string() == "(0 + 3^2*Zp)");
  Region mixed = R({Ball{Rational(2, 3), 0}, Ball{3, 2}}, f);
  CHECK(mixed.balls().size() == 2);
  CHECK(mixed.to_string() == "(2/3 + 3^0*Zp) U (3 + 3^2*Zp)");
  // siblings fill the parent
  CHECK(R({Ball{0, 1}, Ball{1, 1}, Ball{2, 1}}, f) == R({Ball{0, 0}}, f));
  // a co-ball and the missing child
  CHECK(R({CoBall{Ball{0, 0}}, Ball{0, 1}, Ball{1, 1}}, f) == R({CoBall{Ball{2, 1}}}, f));
  CHECK(R({CoBall{Ball{0, 0}}, Ball{Rational(1, 3), -1}}, f).kind() == Region::Kind::All);
  CHECK(R({CoBall{Ball{0, 0}}, CoBall{Ball{1, 1}}}, f).to_string() == "(1 + 3^1*Zp)^C");
  CHECK(R({CoBall{Ball{0, 1}}, CoBall{Ball{1, 1}}}, f).kind() == Region::Kind::All);
  CHECK(R({Point(5), Ball{2, 1}, Point::infinity()}, f).to_string() == "(2 + 3^1*Zp) U {inf}");
  CHECK(R({Point(4), Point(Rational(1, 2))}, f).kind() == Region::Kind::Finite);
  CHECK(R({}, f).kind() == Region::Kind::Empty);
}

TEST_CASE("normalize preserves membership (exhaustive mod 3^4 and 5^4)") {
  for (unsigned long p : {3UL, 5UL}) {
    LocalField f = LocalField::qp(p);
    auto reps = oracle::p1_representatives(p, 5);
    for (int trial = 0; trial < 60; ++trial) {
      auto terms = oracle::random_terms(p);
      Region r = R(terms, f);
      for (const auto& [inf, z] : reps) {
        Point pt = inf ? Point::infinity() : Point(z);
        CHECK(r.contains(pt) == oracle::naive_in(terms, inf, z, p));
      }
      for (const RegionTerm& t : terms) {
        if (const auto* pt = std::get_if<Point>(&t)) CHECK(r.contains(*pt));
      }
      // canonical balls are pairwise disjoint
      const auto& bs = r.balls();
      for (std::size_t i = 0; i < bs.size(); ++i) {
        for (std::size_t j = i + 1; j < bs.size(); ++j) CHECK_FALSE(balls_meet(f, bs[i], bs[j]));
      }
      CHECK(parse_region(r.to_string(), f) == r);
      if (r.kind() != Region::Kind::All) CHECK(R(r.terms(), f) == r);
    }
  }
}

TEST_CASE("moebius_apply") {
  LocalField f = LocalField::qp(3);
  MoebiusMap inv(0, 1, 1, 0);
  CHECK(moebius_apply(inv, 0).is_infinity());
  CHECK(moebius_apply(inv, Point::infinity()) == Point(0));
  MoebiusMap cayley(1, 1, 1, -1);
  CHECK(moebius_apply(cayley, 1).is_infinity());
  CHECK(moebius_apply(cayley, Point::infinity()) == Point(1));
  MoebiusMap id(1, 0, 0, 1);
  for (int i = 0; i < 50; ++i) {
    Rational z(oracle::uniform(-100, 100), oracle::uniform(1, 50));
    z.canonicalize();
    CHECK(moebius_apply(id, z) == Point(z));
  }
  CHECK_THROWS_AS(MoebiusMap(1, 2, 2, 4), DomainError);
}

TEST_CASE("moebius_image examples") {
  LocalField f = LocalField::qp(3);
  MoebiusMap inv(0, 1, 1, 0);
  CHECK(moebius_image(inv, R({Ball{0, 2}}, f)) == R({CoBall{Ball{0, -1}}}, f));
  CHECK(moebius_image(inv, R({Ball{1, 2}}, f)) == R({Ball{1, 2}}, f));
  MoebiusMap shift(1, 5, 0, 1);
  CHECK(moebius_image(shift, R({Ball{1, 2}}, f)) == R({Ball{6, 2}}, f));
  CHECK(moebius_image(inv, R({CoBall{Ball{0, -1}}}, f)) == R({Ball{0, 2}}, f));
  CHECK(moebius_image(inv, R({Point(0)}, f)) == R({Point::infinity()}, f));
}

TEST_CASE("moebius image matches cell enumeration (p = 3, 5; depth 4; 200 maps)") {
  int maps = 0;
  for (unsigned long p : {3UL, 5UL}) {
    for (int trial = 0; trial < 100; ++trial) {
      oracle::MoebiusTrial t = oracle::moebius_trial(p, 4);
      CHECK(t.image_matches);
      CHECK(t.round_trip);
      ++maps;
    }
  }
  CHECK(maps == 200);
}

TEST_CASE("moebius round trip over extensions") {
  for (auto [p, d] : {std::pair<prime_t, long>{3, 5}, {3, 3}, {5, 5}, {5, 2}}) {
    LocalField f = LocalField::of(classify(p, d));
    for (int trial = 0; trial < 60; ++trial) {
      QuadElement c1 = q(oracle::uniform(-9, 9), oracle::uniform(-3, 3), d);
      long m1 = oracle::uniform(-2, 3);
      std::vector<RegionTerm> terms{Ball{c1, m1}};
      if (oracle::uniform(0, 1) == 1) terms.emplace_back(CoBall{Ball{q(oracle::uniform(-9, 9), 1, d), m1 - 1}});
      Region r = R(terms, f);
      QuadElement a = q(oracle::uniform(-4, 4), oracle::uniform(-2, 2), d);
      QuadElement b = q(oracle::uniform(-4, 4), oracle::uniform(-2, 2), d);
      QuadElement c = q(oracle::uniform(-4, 4), oracle::uniform(-2, 2), d);
      QuadElement e = q(oracle::uniform(-4, 4), oracle::uniform(-2, 2), d);
      if ((a * e - b * c).is_zero()) continue;
      MoebiusMap t(a, b, c, e);
      CHECK(moebius_image(t, moebius_image(t.inverse(), r)) == r);
      // the image contains the images of sample points
      for (int s = 0; s < 10; ++s) {
        QuadElement z = q(oracle::uniform(-30, 30), oracle::uniform(-30, 30), d);
        if (!r.contains(z)) continue;
        CHECK(moebius_image(t, r).contains(moebius_apply(t, z)));
      }
    }
  }
}

TEST_CASE("intersect_with_qp matches direct valuation") {
  for (auto [p, d] : {std::pair<prime_t, long>{3, 5}, {3, 3}, {5, 5}, {3, 6}}) {
    LocalField f = LocalField::of(classify(p, d));
    const bool ramified = f.kind() == LocalField::Kind::Ramified;
    auto reps = oracle::p1_representatives(p, 5);
    for (int trial = 0; trial < 40; ++trial) {
      Ball b{q(oracle::uniform(-20, 20), oracle::uniform(-1, 1) * static_cast<long>(oracle::pow_int(p, oracle::uniform(0, 2)).get_si()), d),
             oracle::uniform(-2, ramified ? 6 : 3)};
      bool co = oracle::uniform(0, 2) == 0;
      Region r = co ? R({CoBall{b}}, f) : R({b}, f);
      Region tr = r.intersect_with_qp();
      CHECK(tr.field().is_qp());
      for (const auto& [inf, z] : reps) {
        bool member;
        if (inf) {
          member = co;
        } else {
          QuadElement diff = QuadElement(z) - b.center;
          long v = ramified ? oracle::naive_vp(norm(diff), p)
                            : std::min(oracle::naive_vp(diff.x(), p), oracle::naive_vp(diff.y(), p));
          member = (v >= b.m) != co;
        }
        CHECK(tr.contains(inf ? Point::infinity() : Point(z)) == member);
      }
    }
  }
}

TEST_CASE("region text grammar") {
  LocalField f = LocalField::qp(3);
  Region ex = R({Ball{0, 2}, CoBall{Ball{0, -1}}}, f);
  CHECK(ex.to_string() == "(0 + 3^2*Zp) U (0 + 3^-1*Zp)^C");
  CHECK(parse_region("(0 + 3^2*Zp) U (0 + 3^-1*Zp)^C", f) == ex);
  CHECK(parse_region("Qp", f).kind() == Region::Kind::All);
  CHECK(parse_region("{}", f).kind() == Region::Kind::Empty);
  CHECK(parse_region("{1/2,inf}", f).points().size() == 2);
  CHECK_THROWS_AS(parse_region("(1 + 5^2*Zp)", f), ParseError);
  CHECK_THROWS_AS(parse_region("(1 + 3^x*Zp)", f), ParseError);
  CHECK_THROWS_AS(parse_region("1 + 3^2*Zp", f), ParseError);
  LocalField ram = LocalField::of(classify(3, 3));
  Region rr = R({Ball{q(1, 1, 3), 3}}, ram);
  CHECK(rr.to_string() == "(1 + sqrt(3) + sqrt(3)^3*O)");
  CHECK(parse_region(rr.to_string(), ram) == rr);
  LocalField unr = LocalField::of(classify(3, 5));
  Region ur = R({Ball{q(1, 2, 5), 2}}, unr);
  CHECK(ur.to_string() == "(1 + 2*sqrt(5) + 3^2*O)");
  CHECK(parse_region(ur.to_string(), unr) == ur);
}

TEST_CASE("chordal distance") {
  LocalField f = LocalField::qp(3);
  ChordalDistance d0 = chordal_distance(0, Point::infinity(), f);
  CHECK_FALSE(d0.zero);
  CHECK(d0.exponent == 0);
  CHECK(chordal_distance(5, 5, f).zero);
  CHECK(chordal_distance(Rational(1, 3), Point::infinity(), f).exponent == -1);
  CHECK(chordal_distance(1, 10, f).exponent == -2);
  CHECK(chordal_distance(Rational(1, 3), Rational(1, 9), f).exponent == -1);
  LocalField ram = LocalField::of(classify(3, 3));
  CHECK(chordal_distance(0, q(0, 1, 3), ram).exponent == Rational(-1, 2));
}

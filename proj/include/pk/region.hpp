#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pk/quad.hpp"

namespace pk {

// A point of the projective line: a field element or infinity.
class Point {
 public:
  Point() = default;
  Point(const QuadElement& z) : value_(z) {}  // NOLINT(google-explicit-constructor)
  Point(const Rational& q) : value_(q) {}     // NOLINT(google-explicit-constructor)
  Point(long q) : value_(q) {}                // NOLINT(google-explicit-constructor)
  static Point infinity() {
    Point pt;
    pt.infinite_ = true;
    return pt;
  }

  bool is_infinity() const { return infinite_; }
  const QuadElement& value() const { return value_; }

  friend bool operator==(const Point& a, const Point& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  std::string to_string() const;

 private:
  QuadElement value_;
  bool infinite_ = false;
};

Point parse_point(std::string_view text);

// center + pi^m * O.
struct Ball {
  QuadElement center;
  long m = 0;
  friend bool operator==(const Ball& a, const Ball& b) { return a.m == b.m && a.center == b.center; }
};

// The projective line minus a ball; always contains infinity.
struct CoBall {
  Ball removed;
};

using RegionTerm = std::variant<Ball, CoBall, Point>;

bool in_ball(const LocalField& f, const QuadElement& z, const Ball& b);
bool ball_subset(const LocalField& f, const Ball& inner, const Ball& outer);
bool balls_meet(const LocalField& f, const Ball& a, const Ball& b);
bool term_contains(const LocalField& f, const RegionTerm& t, const Point& z);

// Canonical finite description of a subset of P^1 over a local field.
class Region {
 public:
  enum class Kind { Empty, All, Finite, Union };

  static Region empty(const LocalField& f);
  static Region all(const LocalField& f);
  static Region normalize(const std::vector<RegionTerm>& terms, const LocalField& f);

  Kind kind() const { return kind_; }
  const LocalField& field() const { return field_; }
  const std::vector<Ball>& balls() const { return balls_; }
  const std::optional<Ball>& removed() const { return removed_; }
  const std::vector<Point>& points() const { return points_; }
  std::vector<RegionTerm> terms() const;

  bool contains(const Point& z) const;
  // Whether the region meets the given ball or co-ball (points are tested by membership).
  bool intersects(const RegionTerm& cell) const;
  Region unite(const Region& other) const;
  // Trace on P^1(Q_p); identity for regions already over Q_p.
  Region intersect_with_qp() const;

  std::string to_string() const;
  friend bool operator==(const Region& a, const Region& b);

 private:
  explicit Region(const LocalField& f) : field_(f) {}

  LocalField field_;
  Kind kind_ = Kind::Empty;
  std::vector<Ball> balls_;
  std::optional<Ball> removed_;
  std::vector<Point> points_;
};

// Parses the text produced by Region::to_string over the given field.
Region parse_region(std::string_view text, const LocalField& f);

std::string ball_to_string(const Ball& b, const LocalField& f);

// z -> (a z + b) / (c z + d) with ad - bc != 0.
class MoebiusMap {
 public:
  MoebiusMap(const QuadElement& a, const QuadElement& b, const QuadElement& c, const QuadElement& d);

  const QuadElement& a() const { return a_; }
  const QuadElement& b() const { return b_; }
  const QuadElement& c() const { return c_; }
  const QuadElement& d() const { return d_; }
  QuadElement det() const { return a_ * d_ - b_ * c_; }
  MoebiusMap inverse() const { return MoebiusMap(d_, -b_, -c_, a_); }

 private:
  QuadElement a_;
  QuadElement b_;
  QuadElement c_;
  QuadElement d_;
};

Point moebius_apply(const MoebiusMap& t, const Point& z);
Region moebius_image(const MoebiusMap& t, const Region& r);

// Cell of P^1(Z/p^n) over Q_p. Chart 0 holds z mod p^n for |z| <= 1; chart 1 holds
// 1/z mod p^n otherwise, and its residue 0 collects every z with v(z) <= -n and infinity.
struct Cell {
  int chart = 0;
  Integer residue = 0;
  friend bool operator==(const Cell& a, const Cell& b) { return a.chart == b.chart && a.residue == b.residue; }
  friend bool operator<(const Cell& a, const Cell& b) {
    return a.chart != b.chart ? a.chart < b.chart : a.residue < b.residue;
  }
  // "j", "1/w" or "inf".
  std::string to_string() const;
};

// Rational points only; throws DomainError for irrational values.
Cell cell_of(const Point& z, prime_t p, long n);
RegionTerm cell_term(const Cell& c, prime_t p, long n);
std::vector<Cell> all_cells(prime_t p, long n);

// Chordal distance as p^exponent, or zero.
struct ChordalDistance {
  bool zero = false;
  Rational exponent = 0;
};
ChordalDistance chordal_distance(const Point& z1, const Point& z2, const LocalField& f);

}  // namespace pk

#include "pk/region.hpp"

#include <algorithm>
#include <stdexcept>

#include "pk/errors.hpp"

namespace pk {

namespace {

bool quad_less(const QuadElement& a, const QuadElement& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  return a.y() < b.y();
}

bool ball_less(const Ball& a, const Ball& b) {
  if (a.m != b.m) return a.m < b.m;
  return quad_less(a.center, b.center);
}

bool point_less(const Point& a, const Point& b) {
  if (a.is_infinity() || b.is_infinity()) return !a.is_infinity() && b.is_infinity();
  return quad_less(a.value(), b.value());
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && s[b] == ' ') ++b;
  while (e > b && s[e - 1] == ' ') --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string Point::to_string() const { return infinite_ ? std::string("inf") : value_.to_string(); }

Point parse_point(std::string_view text) {
  std::string t = trim(text);
  if (t == "inf") return Point::infinity();
  return Point(parse_quad(t));
}

bool in_ball(const LocalField& f, const QuadElement& z, const Ball& b) { return f.val_at_least(z - b.center, b.m); }

bool ball_subset(const LocalField& f, const Ball& inner, const Ball& outer) {
  return inner.m >= outer.m && in_ball(f, inner.center, outer);
}

bool balls_meet(const LocalField& f, const Ball& a, const Ball& b) {
  return f.val_at_least(a.center - b.center, std::min(a.m, b.m));
}

bool term_contains(const LocalField& f, const RegionTerm& t, const Point& z) {
  if (const auto* b = std::get_if<Ball>(&t)) return !z.is_infinity() && in_ball(f, z.value(), *b);
  if (const auto* cb = std::get_if<CoBall>(&t)) return z.is_infinity() || !in_ball(f, z.value(), cb->removed);
  return std::get<Point>(t) == z;
}

Region Region::empty(const LocalField& f) { return Region(f); }

Region Region::all(const LocalField& f) {
  Region r(f);
  r.kind_ = Kind::All;
  return r;
}

Region Region::normalize(const std::vector<RegionTerm>& terms, const LocalField& f) {
  auto canon = [&](const Ball& b) { return Ball{f.reduce(b.center, b.m), b.m}; };
  std::vector<Ball> balls;
  std::optional<Ball> removed;
  std::vector<Point> points;
  for (const RegionTerm& t : terms) {
    if (const auto* b = std::get_if<Ball>(&t)) {
      balls.push_back(canon(*b));
    } else if (const auto* cb = std::get_if<CoBall>(&t)) {
      Ball rb = canon(cb->removed);
      // Two complements unite to the complement of the intersection of their removed balls.
      if (!removed || ball_subset(f, rb, *removed)) {
        removed = rb;
      } else if (!ball_subset(f, *removed, rb)) {
        return all(f);
      }
    } else {
      points.push_back(std::get<Point>(t));
    }
  }

  const unsigned long q = f.residue_size();
  bool changed = true;
  while (changed) {
    changed = false;
    std::sort(balls.begin(), balls.end(), ball_less);
    std::vector<Ball> kept;
    for (const Ball& b : balls) {
      bool covered = std::any_of(kept.begin(), kept.end(), [&](const Ball& k) { return ball_subset(f, b, k); });
      if (!covered) kept.push_back(b);
    }
    balls = std::move(kept);

    if (removed) {
      for (const Ball& b : balls) {
        if (ball_subset(f, *removed, b)) return all(f);
      }
      std::erase_if(balls, [&](const Ball& b) { return !balls_meet(f, b, *removed); });
    }

    // q sibling balls fill their parent.
    for (std::size_t i = 0; i < balls.size() && !changed; ++i) {
      const long m = balls[i].m;
      QuadElement parent = f.reduce(balls[i].center, m - 1);
      std::vector<std::size_t> group;
      for (std::size_t j = 0; j < balls.size(); ++j) {
        if (balls[j].m == m && f.reduce(balls[j].center, m - 1) == parent) group.push_back(j);
      }
      if (group.size() == q) {
        std::vector<Ball> next;
        for (std::size_t j = 0; j < balls.size(); ++j) {
          if (std::find(group.begin(), group.end(), j) == group.end()) next.push_back(balls[j]);
        }
        next.push_back(Ball{parent, m - 1});
        balls = std::move(next);
        changed = true;
      }
    }
    if (changed || !removed) continue;

    // A complement whose removed ball is covered except for one child shrinks to that child.
    std::vector<QuadElement> kids = f.children(removed->center, removed->m);
    std::vector<std::size_t> present;
    std::optional<QuadElement> missing;
    for (const QuadElement& kid : kids) {
      auto it = std::find(balls.begin(), balls.end(), Ball{kid, removed->m + 1});
      if (it != balls.end()) {
        present.push_back(static_cast<std::size_t>(it - balls.begin()));
      } else {
        missing = kid;
      }
    }
    if (present.size() + 1 == q && missing) {
      std::vector<Ball> next;
      for (std::size_t j = 0; j < balls.size(); ++j) {
        if (std::find(present.begin(), present.end(), j) == present.end()) next.push_back(balls[j]);
      }
      balls = std::move(next);
      removed = Ball{*missing, removed->m + 1};
      changed = true;
    }
  }

  for (std::size_t i = 0; i < balls.size(); ++i) {
    for (std::size_t j = i + 1; j < balls.size(); ++j) {
      if (balls_meet(f, balls[i], balls[j])) throw std::logic_error("ultrametric violation in normalize");
    }
  }

  std::vector<Point> kept_points;
  for (const Point& z : points) {
    bool absorbed = false;
    if (z.is_infinity()) {
      absorbed = removed.has_value();
    } else {
      absorbed = (removed && !in_ball(f, z.value(), *removed)) ||
                 std::any_of(balls.begin(), balls.end(), [&](const Ball& b) { return in_ball(f, z.value(), b); });
    }
    if (!absorbed && std::find(kept_points.begin(), kept_points.end(), z) == kept_points.end()) {
      kept_points.push_back(z);
    }
  }
  std::sort(kept_points.begin(), kept_points.end(), point_less);
  std::sort(balls.begin(), balls.end(), ball_less);

  Region r(f);
  r.balls_ = std::move(balls);
  r.removed_ = removed;
  r.points_ = std::move(kept_points);
  if (!r.balls_.empty() || r.removed_) {
    r.kind_ = Kind::Union;
  } else if (!r.points_.empty()) {
    r.kind_ = Kind::Finite;
  }
  return r;
}

std::vector<RegionTerm> Region::terms() const {
  std::vector<RegionTerm> out;
  for (const Ball& b : balls_) out.emplace_back(b);
  if (removed_) out.emplace_back(CoBall{*removed_});
  for (const Point& z : points_) out.emplace_back(z);
  return out;
}

bool Region::contains(const Point& z) const {
  if (kind_ == Kind::All) return true;
  for (const RegionTerm& t : terms()) {
    if (term_contains(field_, t, z)) return true;
  }
  return false;
}

bool Region::intersects(const RegionTerm& cell) const {
  if (kind_ == Kind::All) return true;
  if (const auto* pt = std::get_if<Point>(&cell)) return contains(*pt);
  const LocalField& f = field_;
  for (const Point& z : points_) {
    if (term_contains(f, cell, z)) return true;
  }
  if (const auto* cb = std::get_if<Ball>(&cell)) {
    if (removed_ && !ball_subset(f, *cb, *removed_)) return true;
    return std::any_of(balls_.begin(), balls_.end(), [&](const Ball& b) { return balls_meet(f, b, *cb); });
  }
  const Ball& hole = std::get<CoBall>(cell).removed;
  if (removed_) return true;
  return std::any_of(balls_.begin(), balls_.end(), [&](const Ball& b) { return !ball_subset(f, b, hole); });
}

Region Region::unite(const Region& other) const {
  if (kind_ == Kind::All || other.kind_ == Kind::All) return all(field_);
  std::vector<RegionTerm> t = terms();
  std::vector<RegionTerm> u = other.terms();
  t.insert(t.end(), u.begin(), u.end());
  return normalize(t, field_);
}

Region Region::intersect_with_qp() const {
  if (field_.is_qp()) return *this;
  const LocalField base = LocalField::qp(field_.p(), field_.precision_cap());
  if (kind_ == Kind::All) return all(base);
  const prime_t p = field_.p();
  const bool ramified = field_.kind() == LocalField::Kind::Ramified;
  // Q_p-trace of a ball, if nonempty.
  auto trace_ball = [&](const Ball& b) -> std::optional<Ball> {
    const QuadElement& c = b.center;
    Valuation vy = vp(c.y(), p);
    if (ramified) {
      if (vy.is_finite() && 2 * vy.value() + 1 < b.m) return std::nullopt;
      long m = b.m >= 0 ? (b.m + 1) / 2 : -((-b.m) / 2);
      return Ball{QuadElement(c.x()), m};
    }
    if (vy < Valuation(b.m)) return std::nullopt;
    return Ball{QuadElement(c.x()), b.m};
  };
  std::vector<RegionTerm> out;
  for (const Ball& b : balls_) {
    if (auto t = trace_ball(b)) out.emplace_back(*t);
  }
  if (removed_) {
    auto t = trace_ball(*removed_);
    if (!t) return all(base);
    out.emplace_back(CoBall{*t});
  }
  for (const Point& z : points_) {
    if (z.is_infinity() || z.value().is_rational()) out.emplace_back(Point(z.is_infinity() ? z : Point(z.value().x())));
  }
  return normalize(out, base);
}

std::string ball_to_string(const Ball& b, const LocalField& f) {
  std::string radius;
  switch (f.kind()) {
    case LocalField::Kind::Base:
    case LocalField::Kind::Split:
      radius = std::to_string(f.p()) + "^" + std::to_string(b.m) + "*Zp";
      break;
    case LocalField::Kind::Unramified:
      radius = std::to_string(f.p()) + "^" + std::to_string(b.m) + "*O";
      break;
    case LocalField::Kind::Ramified:
      radius = "sqrt(" + f.d().get_str() + ")^" + std::to_string(b.m) + "*O";
      break;
  }
  return "(" + b.center.to_string() + " + " + radius + ")";
}

std::string Region::to_string() const {
  if (kind_ == Kind::All) return "Qp";
  if (kind_ == Kind::Empty) return "{}";
  std::vector<std::string> parts;
  for (const Ball& b : balls_) parts.push_back(ball_to_string(b, field_));
  if (removed_) parts.push_back(ball_to_string(*removed_, field_) + "^C");
  if (!points_.empty()) {
    std::string s = "{";
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (i > 0) s += ",";
      s += points_[i].to_string();
    }
    parts.push_back(s + "}");
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += " U ";
    out += parts[i];
  }
  return out;
}

bool operator==(const Region& a, const Region& b) {
  return a.kind_ == b.kind_ && a.balls_ == b.balls_ && a.removed_ == b.removed_ && a.points_ == b.points_;
}

namespace {

Ball parse_cell(std::string_view text, std::size_t offset, const LocalField& f) {
  if (text.size() < 2 || text.front() != '(' || text.back() != ')') throw ParseError("expected '(' cell ')'", offset);
  std::string_view inner = text.substr(1, text.size() - 2);
  std::size_t sep = inner.rfind(" + ");
  if (sep == std::string_view::npos) throw ParseError("expected ' + ' in cell", offset + 1);
  std::string_view center = inner.substr(0, sep);
  std::string_view radius = inner.substr(sep + 3);
  std::size_t caret = radius.rfind('^');
  std::size_t star = radius.rfind('*');
  if (caret == std::string_view::npos || star == std::string_view::npos || star < caret) {
    throw ParseError("expected base^m*Zp", offset + 1 + sep + 3);
  }
  std::string base = std::string(radius.substr(0, caret));
  std::string ring = std::string(radius.substr(star + 1));
  std::string expected_base =
      f.kind() == LocalField::Kind::Ramified ? "sqrt(" + f.d().get_str() + ")" : std::to_string(f.p());
  std::string expected_ring = f.is_qp() ? "Zp" : "O";
  if (base != expected_base) throw ParseError("radius base must be " + expected_base, offset + 1 + sep + 3);
  if (ring != expected_ring) throw ParseError("ring must be " + expected_ring, offset + 1 + sep + 3 + star + 1);
  Integer m = parse_integer(radius.substr(caret + 1, star - caret - 1), false, offset + 1 + sep + 3 + caret + 1);
  return Ball{parse_quad(center), m.get_si()};
}

}  // namespace

Region parse_region(std::string_view text, const LocalField& f) {
  std::string t = trim(text);
  if (t == "Qp") return Region::all(f);
  if (t == "{}") return Region::empty(f);
  std::vector<RegionTerm> terms;
  std::size_t pos = 0;
  while (pos <= t.size()) {
    std::size_t next = t.find(" U ", pos);
    std::size_t end = next == std::string::npos ? t.size() : next;
    std::string_view part = std::string_view(t).substr(pos, end - pos);
    if (part.empty()) throw ParseError("empty term", pos);
    if (part.front() == '{') {
      if (part.back() != '}') throw ParseError("expected '}'", end);
      std::string_view body = part.substr(1, part.size() - 2);
      std::size_t start = 0;
      while (start <= body.size()) {
        std::size_t comma = body.find(',', start);
        std::size_t stop = comma == std::string_view::npos ? body.size() : comma;
        terms.emplace_back(parse_point(body.substr(start, stop - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
    } else if (part.size() > 2 && part.substr(part.size() - 2) == "^C") {
      terms.emplace_back(CoBall{parse_cell(part.substr(0, part.size() - 2), pos, f)});
    } else {
      terms.emplace_back(parse_cell(part, pos, f));
    }
    if (next == std::string::npos) break;
    pos = next + 3;
  }
  return Region::normalize(terms, f);
}

MoebiusMap::MoebiusMap(const QuadElement& a, const QuadElement& b, const QuadElement& c, const QuadElement& d)
    : a_(a), b_(b), c_(c), d_(d) {
  if (det().is_zero()) throw DomainError("degenerate Moebius map (ad - bc = 0)");
}

Point moebius_apply(const MoebiusMap& t, const Point& z) {
  if (z.is_infinity()) {
    if (t.c().is_zero()) return Point::infinity();
    return Point(t.a() / t.c());
  }
  QuadElement den = t.c() * z.value() + t.d();
  if (den.is_zero()) return Point::infinity();
  return Point((t.a() * z.value() + t.b()) / den);
}

namespace {

RegionTerm shift_term(const RegionTerm& t, const QuadElement& beta) {
  if (const auto* b = std::get_if<Ball>(&t)) return Ball{b->center + beta, b->m};
  if (const auto* cb = std::get_if<CoBall>(&t)) return CoBall{Ball{cb->removed.center + beta, cb->removed.m}};
  const Point& z = std::get<Point>(t);
  return z.is_infinity() ? z : Point(z.value() + beta);
}

RegionTerm scale_term(const RegionTerm& t, const QuadElement& alpha, const LocalField& f) {
  const long va = f.val(alpha).value();
  if (const auto* b = std::get_if<Ball>(&t)) return Ball{alpha * b->center, b->m + va};
  if (const auto* cb = std::get_if<CoBall>(&t)) return CoBall{Ball{alpha * cb->removed.center, cb->removed.m + va}};
  const Point& z = std::get<Point>(t);
  return z.is_infinity() ? z : Point(alpha * z.value());
}

// 1/B: a co-ball when 0 is in B, otherwise the ball 1/c + pi^(m - 2 v(c)) O.
RegionTerm invert_ball(const Ball& b, const LocalField& f) {
  Valuation vc = f.val(b.center);
  if (vc >= Valuation(b.m)) return CoBall{Ball{QuadElement(0), 1 - b.m}};
  return Ball{QuadElement(1) / b.center, b.m - 2 * vc.value()};
}

RegionTerm invert_term(const RegionTerm& t, const LocalField& f) {
  if (const auto* b = std::get_if<Ball>(&t)) return invert_ball(*b, f);
  if (const auto* cb = std::get_if<CoBall>(&t)) {
    RegionTerm image = invert_ball(cb->removed, f);
    if (const auto* ib = std::get_if<Ball>(&image)) return CoBall{*ib};
    return std::get<CoBall>(image).removed;
  }
  const Point& z = std::get<Point>(t);
  if (z.is_infinity()) return Point(0);
  if (z.value().is_zero()) return Point::infinity();
  return Point(QuadElement(1) / z.value());
}

}  // namespace

Region moebius_image(const MoebiusMap& t, const Region& r) {
  const LocalField& f = r.field();
  if (r.kind() == Region::Kind::All || r.kind() == Region::Kind::Empty) return r;
  std::vector<RegionTerm> out;
  for (const RegionTerm& term : r.terms()) {
    if (const auto* z = std::get_if<Point>(&term)) {
      out.emplace_back(moebius_apply(t, *z));
      continue;
    }
    if (t.c().is_zero()) {
      RegionTerm s = scale_term(term, t.a() / t.d(), f);
      out.push_back(shift_term(s, t.b() / t.d()));
    } else {
      // a/c - det/(c (c z + d)) = shift(a/c) . scale(-det/c^2) . invert . shift(d/c)
      RegionTerm s = shift_term(term, t.d() / t.c());
      s = invert_term(s, f);
      s = scale_term(s, -t.det() / (t.c() * t.c()), f);
      out.push_back(shift_term(s, t.a() / t.c()));
    }
  }
  return Region::normalize(out, f);
}

std::string Cell::to_string() const {
  if (chart == 0) return residue.get_str();
  if (residue == 0) return "inf";
  return "1/" + residue.get_str();
}

Cell cell_of(const Point& z, prime_t p, long n) {
  if (z.is_infinity()) return Cell{1, 0};
  if (!z.value().is_rational()) throw DomainError("cells are defined for rational points");
  const Rational& x = z.value().x();
  const Integer modulus = ipow(p, static_cast<unsigned long>(n));
  if (x == 0 || vp(x, p).value() >= 0) return Cell{0, rational_mod(x, modulus)};
  return Cell{1, rational_mod(Rational(1) / x, modulus)};
}

RegionTerm cell_term(const Cell& c, prime_t p, long n) {
  if (c.chart == 0) return Ball{QuadElement(Rational(c.residue)), n};
  if (c.residue == 0) return CoBall{Ball{QuadElement(0), 1 - n}};
  const long k = vp(c.residue, p).value();
  return Ball{QuadElement(Rational(1) / Rational(c.residue)), n - 2 * k};
}

std::vector<Cell> all_cells(prime_t p, long n) {
  std::vector<Cell> out;
  const Integer modulus = ipow(p, static_cast<unsigned long>(n));
  for (Integer j = 0; j < modulus; ++j) out.push_back(Cell{0, j});
  out.push_back(Cell{1, 0});
  for (Integer w = p; w < modulus; w += p) out.push_back(Cell{1, w});
  return out;
}

ChordalDistance chordal_distance(const Point& z1, const Point& z2, const LocalField& f) {
  if (z1 == z2) return {true, 0};
  const long e = f.e();
  // |z|_p = p^(-val/e); max(|z|,1) contributes max(0, -val/e) to the exponent.
  auto big = [&](const QuadElement& z) {
    Valuation v = f.val(z);
    if (v.is_infinite() || v.value() >= 0) return Rational(0);
    return make_rational(Integer(-v.value()), Integer(e));
  };
  if (z1.is_infinity() || z2.is_infinity()) {
    const QuadElement& z = z1.is_infinity() ? z2.value() : z1.value();
    return {false, -big(z)};
  }
  Valuation vd = f.val(z1.value() - z2.value());
  Rational expo = make_rational(Integer(-vd.value()), Integer(e)) - big(z1.value()) - big(z2.value());
  return {false, expo};
}

}  // namespace pk

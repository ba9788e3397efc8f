#include "pk/kepler.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "pk/errors.hpp"

namespace pk {

namespace {

long ceil_long(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r.get_si();
}

// Valuation in p-units (a half-integer over a ramified field).
Rational pval(const LocalField& f, const QuadElement& z) {
  return make_rational(Integer(f.val(z).value()), Integer(f.e()));
}

bool is_theorem_case(CaseTag t) {
  switch (t) {
    case CaseTag::T2Case1:
    case CaseTag::T2Case2:
    case CaseTag::T2Case3:
    case CaseTag::T3Case1:
    case CaseTag::T3Case2:
    case CaseTag::T3Case3:
      return true;
    default:
      return false;
  }
}

std::string points_to_string(const std::vector<Point>& pts, prime_t p) {
  std::vector<RegionTerm> terms(pts.begin(), pts.end());
  return Region::normalize(terms, LocalField::qp(p)).to_string();
}

// The theorem's union must be disjoint: balls pairwise, and each ball inside the hole of the co-ball.
void check_disjoint(const std::vector<RegionTerm>& raw, const LocalField& qp) {
  std::vector<Ball> balls;
  std::optional<Ball> hole;
  for (const RegionTerm& t : raw) {
    if (const auto* b = std::get_if<Ball>(&t)) balls.push_back(*b);
    if (const auto* cb = std::get_if<CoBall>(&t)) hole = cb->removed;
  }
  for (std::size_t i = 0; i < balls.size(); ++i) {
    for (std::size_t j = i + 1; j < balls.size(); ++j) {
      if (balls_meet(qp, balls[i], balls[j])) throw std::logic_error("theorem balls overlap");
    }
    if (hole && !ball_subset(qp, balls[i], *hole)) throw std::logic_error("theorem ball meets the co-ball");
  }
}

}  // namespace

void RecurrenceSpec::validate() const {
  require_odd_prime(p);
  if (s == 0) throw InvalidArgument("s must be nonzero");
  if (a0 == 0 && a1 == 0) throw InvalidArgument("initial terms are both zero");
  if (max_precision < 1) throw InvalidArgument("precision cap must be positive");
}

SpectralData solve_characteristic(const RecurrenceSpec& spec) {
  spec.validate();
  SpectralData sd;
  sd.discriminant = spec.r * spec.r + 4 * spec.s;
  if (sd.discriminant == 0) {
    sd.repeated = true;
    sd.ext = classify(spec.p, 1);
    sd.field = LocalField::qp(spec.p, spec.max_precision);
    const Rational lambda = spec.r / 2;
    sd.lambda1 = sd.lambda2 = QuadElement(lambda);
    sd.c1 = QuadElement(spec.a0);
    sd.c2 = QuadElement(spec.a1 / lambda - spec.a0);
    return sd;
  }
  sd.ext = classify(spec.p, sd.discriminant);
  sd.field = LocalField::of(sd.ext, spec.max_precision);
  SquarefreeSplit split = squarefree_split(sd.discriminant);
  QuadElement root = split.d == 1 ? QuadElement(split.q) : QuadElement(0, split.q, split.d);
  sd.lambda1 = (QuadElement(spec.r) + root) / QuadElement(2);
  sd.lambda2 = (QuadElement(spec.r) - root) / QuadElement(2);
  sd.c2 = (QuadElement(spec.a1) - QuadElement(spec.a0) * sd.lambda1) / (sd.lambda2 - sd.lambda1);
  sd.c1 = QuadElement(spec.a0) - sd.c2;
  return sd;
}

std::string to_string(CaseTag t) {
  switch (t) {
    case CaseTag::DegenerateC2Zero:
      return "degenerate-c2-zero";
    case CaseTag::DegenerateC1Zero:
      return "degenerate-c1-zero";
    case CaseTag::RepeatedRoot:
      return "repeated-root";
    case CaseTag::Convergent:
      return "convergent";
    case CaseTag::Periodic:
      return "periodic";
    case CaseTag::T2Case1:
      return "T2-case1";
    case CaseTag::T2Case2:
      return "T2-case2";
    case CaseTag::T2Case3:
      return "T2-case3";
    case CaseTag::T3Case1:
      return "T3-case1";
    case CaseTag::T3Case2:
      return "T3-case2";
    case CaseTag::T3Case3:
      return "T3-case3";
  }
  return "?";
}

CaseTag classify_case(const SpectralData& sd) {
  const LocalField& f = sd.field;
  if (sd.c2.is_zero()) return CaseTag::DegenerateC2Zero;
  if (sd.repeated) return CaseTag::RepeatedRoot;
  if (sd.c1.is_zero()) return CaseTag::DegenerateC1Zero;
  if (f.val(sd.lambda1) != f.val(sd.lambda2)) return CaseTag::Convergent;
  const QuadElement rho = sd.lambda2 / sd.lambda1;
  if (is_deg2_root_of_unity(rho)) return CaseTag::Periodic;
  const bool ramified = f.kind() == LocalField::Kind::Ramified;
  ClosureDescriptor c = closure_of(rho, f);
  if (!locate_in_closure(-(sd.c1 / sd.c2), c)) return ramified ? CaseTag::T3Case1 : CaseTag::T2Case1;
  if (c.l == 1) return ramified ? CaseTag::T3Case2 : CaseTag::T2Case2;
  return ramified ? CaseTag::T3Case3 : CaseTag::T2Case3;
}

std::vector<Rational> sequence_terms(const RecurrenceSpec& spec, unsigned long n) {
  std::vector<Rational> a;
  a.reserve(n);
  if (n > 0) a.push_back(spec.a0);
  if (n > 1) a.push_back(spec.a1);
  for (unsigned long i = 2; i < n; ++i) a.push_back(spec.r * a[i - 1] + spec.s * a[i - 2]);
  return a;
}

std::vector<Point> ratio_sequence(const RecurrenceSpec& spec, unsigned long n_max) {
  std::vector<Rational> a = sequence_terms(spec, n_max + 1);
  SpectralData sd = solve_characteristic(spec);
  const unsigned long check = std::min<unsigned long>(n_max + 1, 201);
  QuadElement p1(1);
  QuadElement p2(1);
  for (unsigned long n = 0; n < check; ++n) {
    QuadElement closed = sd.repeated ? (sd.c1 + sd.c2 * QuadElement(Rational(n))) * p1 : sd.c1 * p1 + sd.c2 * p2;
    if (!(closed == QuadElement(a[n]))) throw std::logic_error("closed form disagrees with the recurrence");
    p1 = p1 * sd.lambda1;
    p2 = p2 * sd.lambda2;
  }
  std::vector<Point> out;
  out.reserve(n_max);
  for (unsigned long n = 0; n < n_max; ++n) {
    out.push_back(a[n] == 0 ? Point::infinity() : Point(Rational(a[n + 1] / a[n])));
  }
  return out;
}

KeplerDescription kepler_set(const RecurrenceSpec& spec, long tail_depth) {
  SpectralData sd = solve_characteristic(spec);
  const LocalField& f = sd.field;
  const LocalField qp = LocalField::qp(spec.p, spec.max_precision);
  KeplerDescription out;
  out.field = f;
  out.tag = classify_case(sd);

  switch (out.tag) {
    case CaseTag::DegenerateC2Zero:
    case CaseTag::DegenerateC1Zero:
      out.variant = KeplerDescription::Variant::Degenerate;
      out.points = {Point(Rational(spec.a1 / spec.a0))};
      return out;

    case CaseTag::RepeatedRoot: {
      const Rational lambda = sd.lambda1.x();
      const Rational c1 = sd.c1.x();
      const Rational c2 = sd.c2.x();
      const long vl = vp(lambda, spec.p).value();
      if (vp(c1, spec.p) < vp(c2, spec.p)) {
        const Rational t = c2 / c1;
        out.raw_terms.emplace_back(Ball{QuadElement(lambda * (1 + t)), vl + 2 * vp(t, spec.p).value()});
      } else {
        out.raw_terms.emplace_back(CoBall{Ball{QuadElement(lambda), vl + 1}});
      }
      out.region = Region::normalize(out.raw_terms, qp);
      return out;
    }

    case CaseTag::Periodic: {
      const int order = *is_deg2_root_of_unity(sd.lambda2 / sd.lambda1);
      out.variant = KeplerDescription::Variant::FinitePeriodic;
      out.period = static_cast<unsigned long>(order);
      out.points = ratio_sequence(spec, out.period);
      return out;
    }

    case CaseTag::Convergent: {
      const bool first = f.val(sd.lambda1) < f.val(sd.lambda2);
      const QuadElement& la = first ? sd.lambda1 : sd.lambda2;
      const QuadElement& lb = first ? sd.lambda2 : sd.lambda1;
      const QuadElement& ca = first ? sd.c1 : sd.c2;
      const QuadElement& cb = first ? sd.c2 : sd.c1;
      // ratio_n - la = cb rho^n (lb - la) / (ca + cb rho^n) with rho = lb/la, v(rho) > 0.
      const long delta = f.val(lb / la).value();
      const long vca = f.val(ca).value();
      const long vcb = f.val(cb).value();
      const long vdiff = f.val(lb - la).value();
      unsigned long n = 0;
      while (!(vcb + static_cast<long>(n) * delta > vca &&
               vcb - vca + static_cast<long>(n) * delta + vdiff >= tail_depth)) {
        ++n;
      }
      out.variant = KeplerDescription::Variant::ConvergentTail;
      out.limit = Point(la);
      out.tail_depth = tail_depth;
      out.tail_start = n;
      out.points = ratio_sequence(spec, n);
      return out;
    }

    default:
      break;
  }

  // Equal-modulus cases: |l1| = |l2| and l2/l1 of infinite order.
  const QuadElement rho = sd.lambda2 / sd.lambda1;
  const QuadElement c = sd.c1 / sd.c2;
  ClosureDescriptor cl = closure_of(rho, f);
  out.l = cl.l;
  out.k = cl.k;
  out.s = locate_in_closure(-c, cl);
  const long k = cl.k.value();
  if (f.kind() == LocalField::Kind::Ramified && (cl.l > 2 || k % 2 == 0)) {
    throw std::logic_error("ramified ratio closure with l > 2 or even k");
  }
  const Rational kp = make_rational(Integer(k), Integer(f.e()));
  const std::vector<Rational> a = sequence_terms(spec, cl.l + 1);
  const Rational v_gap = pval(f, sd.lambda2 - sd.lambda1);
  const Rational v_l2 = pval(f, sd.lambda2);

  switch (out.tag) {
    case CaseTag::T2Case1:
    case CaseTag::T3Case1: {
      const Rational v_c = pval(f, c);
      QuadElement pw(1);
      for (unsigned long i = 0; i < cl.l; ++i) {
        Rational expo = v_c + v_gap - 2 * pval(f, c + pw) + kp;
        out.raw_terms.emplace_back(Ball{QuadElement(a[i + 1] / a[i]), ceil_long(expo)});
        pw = pw * rho;
      }
      break;
    }
    case CaseTag::T2Case2:
    case CaseTag::T3Case2:
      out.raw_terms.emplace_back(CoBall{Ball{QuadElement(spec.r / 2), ceil_long(v_l2) + 1}});
      break;
    default:
      for (unsigned long i = 0; i < cl.l; ++i) {
        if (i == *out.s) continue;
        out.raw_terms.emplace_back(Ball{QuadElement(a[i + 1] / a[i]), ceil_long(v_gap + kp)});
      }
      out.raw_terms.emplace_back(CoBall{Ball{QuadElement(0), ceil_long(v_l2 + 1 - kp)}});
      break;
  }
  check_disjoint(out.raw_terms, qp);
  out.region = Region::normalize(out.raw_terms, qp);
  return out;
}

Region kepler_set_via_moebius(const RecurrenceSpec& spec) {
  SpectralData sd = solve_characteristic(spec);
  if (!is_theorem_case(classify_case(sd))) throw Inapplicable("the Moebius route covers the theorem cases only");
  const QuadElement rho = sd.lambda2 / sd.lambda1;
  ClosureDescriptor cl = closure_of(rho, sd.field);
  // ratio_n = (c1 l1 + c2 l2 z) / (c1 + c2 z) at z = rho^n.
  MoebiusMap t(sd.c2 * sd.lambda2, sd.c1 * sd.lambda1, sd.c2, sd.c1);
  std::vector<RegionTerm> balls;
  for (const QuadElement& rep : cl.coset_reps) balls.emplace_back(Ball{rep, cl.k.value()});
  Region closure = Region::normalize(balls, sd.field);
  Region traced = moebius_image(t, closure).intersect_with_qp();
  const LocalField qp = LocalField::qp(spec.p, spec.max_precision);
  if (traced.kind() == Region::Kind::All) return Region::all(qp);
  return Region::normalize(traced.terms(), qp);
}

bool KeplerDescription::contains(const Point& z) const {
  switch (variant) {
    case Variant::ExactRegion:
      return region->contains(z);
    case Variant::FinitePeriodic:
    case Variant::Degenerate:
      return std::find(points.begin(), points.end(), z) != points.end();
    case Variant::ConvergentTail:
      if (std::find(points.begin(), points.end(), z) != points.end()) return true;
      if (z.is_infinity()) return false;
      return in_ball(field, z.value(), Ball{limit->value(), tail_depth});
  }
  return false;
}

std::string KeplerDescription::to_string() const {
  switch (variant) {
    case Variant::ExactRegion:
      return region->to_string();
    case Variant::FinitePeriodic:
    case Variant::Degenerate:
      return points_to_string(points, field.p());
    case Variant::ConvergentTail:
      return "limit " + limit->to_string() + " from n=" + std::to_string(tail_start) + " at depth " +
             std::to_string(tail_depth) + "; prefix " + points_to_string(points, field.p());
  }
  return "";
}

VerifyReport verify(const RecurrenceSpec& spec, unsigned long n_max, long depth) {
  KeplerDescription kd = kepler_set(spec, depth);
  std::vector<Point> ratios = ratio_sequence(spec, n_max);
  const LocalField qp = LocalField::qp(spec.p, spec.max_precision);
  VerifyReport rep;
  rep.tag = kd.tag;
  rep.checked = ratios.size();

  std::set<std::pair<bool, Rational>> distinct;
  for (unsigned long n = 0; n < ratios.size(); ++n) {
    const Point& z = ratios[n];
    distinct.emplace(z.is_infinity(), z.is_infinity() ? Rational(0) : z.value().x());
    if (!kd.contains(z)) rep.violations.push_back(n);
  }
  rep.distinct_values = distinct.size();

  if (kd.region) {
    for (const RegionTerm& t : kd.region->terms()) {
      TermVisit tv;
      if (const auto* b = std::get_if<Ball>(&t)) {
        tv.term = ball_to_string(*b, qp);
        tv.is_ball = true;
        tv.m = b->m;
      } else if (const auto* cb = std::get_if<CoBall>(&t)) {
        tv.term = ball_to_string(cb->removed, qp) + "^C";
        tv.m = cb->removed.m;
      } else {
        tv.term = "{" + std::get<Point>(t).to_string() + "}";
      }
      for (const Point& z : ratios) {
        if (term_contains(qp, t, z)) ++tv.visits;
      }
      if (tv.is_ball && tv.m <= depth && tv.visits == 0) ++rep.unvisited_balls;
      rep.terms.push_back(tv);
    }
  }

  // Cell coverage at the requested depth, skipped when the cell count is large.
  if (depth >= 1 && ipow(spec.p, static_cast<unsigned long>(depth)) <= 2000000) {
    std::set<Cell> hit;
    for (const Point& z : ratios) hit.insert(cell_of(z, spec.p, depth));
    rep.cells_hit = hit.size();
    if (kd.region) {
      for (const Cell& cell : all_cells(spec.p, depth)) {
        if (kd.region->intersects(cell_term(cell, spec.p, depth))) ++rep.cells_met;
      }
    } else {
      std::set<Cell> met;
      for (const Point& z : kd.points) met.insert(cell_of(z, spec.p, depth));
      if (kd.limit) met.insert(cell_of(Point(kd.field.embed(kd.limit->value(), depth)), spec.p, depth));
      rep.cells_met = met.size();
    }
  }
  return rep;
}

}  // namespace pk

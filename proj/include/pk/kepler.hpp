#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pk/monothetic.hpp"
#include "pk/padic.hpp"
#include "pk/quad.hpp"
#include "pk/region.hpp"

namespace pk {

inline constexpr long kDefaultTailDepth = 8;

// a_n = r a_{n-1} + s a_{n-2} over Q_p with a_0, a_1 given.
struct RecurrenceSpec {
  prime_t p = 3;
  Rational r = 0;
  Rational s = 1;
  Rational a0 = 0;
  Rational a1 = 1;
  long max_precision = kDefaultPrecisionCap;

  // Throws on p = 2, s = 0 or a0 = a1 = 0.
  void validate() const;
};

// Roots and coefficients: a_n = c1 l1^n + c2 l2^n, or (c1 + c2 n) l^n when repeated.
struct SpectralData {
  QuadElement lambda1;
  QuadElement lambda2;
  QuadElement c1;
  QuadElement c2;
  Rational discriminant = 0;
  ExtensionDescriptor ext;
  LocalField field = LocalField::qp(3);
  bool repeated = false;
};

SpectralData solve_characteristic(const RecurrenceSpec& spec);

enum class CaseTag {
  DegenerateC2Zero,
  DegenerateC1Zero,
  RepeatedRoot,
  Convergent,
  Periodic,
  T2Case1,
  T2Case2,
  T2Case3,
  T3Case1,
  T3Case2,
  T3Case3,
};
std::string to_string(CaseTag t);

CaseTag classify_case(const SpectralData& sd);

struct KeplerDescription {
  enum class Variant { ExactRegion, FinitePeriodic, ConvergentTail, Degenerate };

  Variant variant = Variant::ExactRegion;
  CaseTag tag = CaseTag::DegenerateC2Zero;
  LocalField field = LocalField::qp(3);  // field of the roots; membership tests use it
  std::optional<Region> region;          // ExactRegion, over Q_p
  // FinitePeriodic: the l values; ConvergentTail: every ratio before tail_start; Degenerate: the value.
  std::vector<Point> points;
  unsigned long period = 0;
  std::optional<Point> limit;
  long tail_depth = 0;
  unsigned long tail_start = 0;  // ratios from here on lie in limit + p^tail_depth Z_p
  // Equal-modulus cases: closure data of l2/l1 and the index s of -c1/c2 when it lies in the closure.
  unsigned long l = 0;
  Valuation k;
  std::optional<unsigned long> s;
  std::vector<RegionTerm> raw_terms;  // the theorem's terms before normalization

  bool contains(const Point& z) const;
  std::string to_string() const;
};

KeplerDescription kepler_set(const RecurrenceSpec& spec, long tail_depth = kDefaultTailDepth);

// Equal-modulus cases only: the image of the closure of (l2/l1)^n under the ratio map,
// pushed through Moebius algebra over the root field and traced on Q_p.
Region kepler_set_via_moebius(const RecurrenceSpec& spec);

// a_0 .. a_{n-1} by the recurrence.
std::vector<Rational> sequence_terms(const RecurrenceSpec& spec, unsigned long n);
// a_{n+1}/a_n for n < n_max (infinity where a_n = 0). The first min(n_max, 200) terms
// are checked against the closed form; a mismatch throws std::logic_error.
std::vector<Point> ratio_sequence(const RecurrenceSpec& spec, unsigned long n_max);

struct TermVisit {
  std::string term;
  bool is_ball = false;
  long m = 0;
  unsigned long visits = 0;
};

struct VerifyReport {
  CaseTag tag = CaseTag::DegenerateC2Zero;
  unsigned long checked = 0;
  std::vector<unsigned long> violations;  // indices n whose ratio is outside the description
  std::vector<TermVisit> terms;
  unsigned long unvisited_balls = 0;  // ball terms with exponent <= depth and no ratio
  unsigned long cells_met = 0;        // cells of P^1(Z/p^depth) meeting the description
  unsigned long cells_hit = 0;        // ... of which some ratio lies in
  unsigned long distinct_values = 0;

  bool ok() const { return violations.empty() && unvisited_balls == 0; }
};

VerifyReport verify(const RecurrenceSpec& spec, unsigned long n_max, long depth);

}  // namespace pk

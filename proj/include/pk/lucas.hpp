#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pk/arith.hpp"
#include "pk/kepler.hpp"
#include "pk/region.hpp"

namespace pk {

// L_0 = 0, L_1 = 1, L_n = a L_{n-1} + b L_{n-2}.
struct LucasParams {
  i64 a = 1;
  i64 b = 1;

  i64 discriminant() const { return a * a + 4 * b; }
  // The root ratio is a root of unity (including the repeated-root case), or the pair
  // is one of (+-2, 1), (+-2, -1), (0, +-1), (+-1, 0).
  bool degenerate() const;
  // a*b != 0 and |a|, |b| small enough for 64-bit discriminants.
  void validate() const;
  // The recurrence with a0 = 0, a1 = 1 over Q_p.
  RecurrenceSpec recurrence(prime_t p) const;
};

// L_n mod m by companion-matrix powering.
u64 lucas_mod(u64 n, const LucasParams& lp, u64 m);

// Least n > 0 with p | L_n; empty when no such n exists.
std::optional<u64> rank_of_appearance(u64 p, const LucasParams& lp);
// Same by stepping the recurrence mod p up to bound terms.
std::optional<u64> rank_of_appearance_scan(u64 p, const LucasParams& lp, u64 bound);

bool is_wall_sun_sun(u64 p);

enum class FullFieldVerdict { Full, NotFull, Inapplicable };
std::string to_string(FullFieldVerdict v);

struct FullFieldReport {
  FullFieldVerdict verdict = FullFieldVerdict::Inapplicable;
  int criterion = 0;  // 1 roots in Q_p, 2 unramified, 3 ramified, 0 none fired
  std::string reason;
  std::optional<u64> alpha;
  bool kepler_full = false;  // kepler_set on the same data equals Q_p
};

// Decides whether the consecutive-ratio closure of L is all of Q_p by the three criteria,
// cross-checked against kepler_set (std::logic_error on disagreement). Throws
// InvalidArgument for degenerate parameters.
FullFieldReport theorem4_full_field(prime_t p, const LucasParams& lp);

// Closure of {L_{n+m}/L_n} as T_m applied to the closure of the root ratio, traced on Q_p.
Region shifted_ratio_closure(prime_t p, const LucasParams& lp, u64 m);

struct TwoRowReport {
  bool applicable = false;
  std::string reason;
  bool small_shifts = false;  // p^2 | D: rows m = 1, 2 instead of alpha, alpha - 2
  std::optional<u64> alpha;
  u64 m1 = 0;
  u64 m2 = 0;
  std::optional<Region> k1;
  std::optional<Region> k2;
  bool union_is_qp = false;
  // Centers of the removed balls of the two complement terms, when both rows have one.
  std::vector<QuadElement> flagged_centers;
  bool flagged_centers_distinct_mod_p = true;
  // Sampled ratios L_{n+m}/L_n for n < samples.
  u64 samples = 0;
  u64 sample_violations = 0;
  u64 cells_total = 0;  // cells of P^1(Z/p^2)
  u64 cells_hit = 0;    // ... hit by some sampled ratio from either row
};

// b must be 1. Hypothesis failures give applicable = false.
TwoRowReport two_row_union(prime_t p, i64 a, u64 samples = 2000);

struct CensusRow {
  u64 limit = 0;  // largest prime considered is <= limit
  u64 primes_total = 0;
  u64 primes_satisfying = 0;  // alpha_L(p) = p + 1
  // Truncated to four decimals, e.g. "0.2261".
  std::string proportion_text() const;
};

struct CensusOptions {
  i64 a = 1;
  i64 b = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  u64 window = 100000;   // consecutive primes per window
  u64 cap = 10000000;
};

struct CensusReport {
  CensusRow row;
  u64 window = 0;
  std::vector<u64> window_counts;  // satisfying primes per window; the last may be partial
  std::vector<u64> window_sizes;
};

// All primes <= limit.
CensusReport census(u64 limit, const CensusOptions& opt = {});
// The first count primes; the cap applies to the largest prime.
CensusReport census_first_primes(u64 count, const CensusOptions& opt = {});

}  // namespace pk

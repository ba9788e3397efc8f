#include <algorithm>

#include "doctest.h"
#include "oracles.hpp"
#include "pk/errors.hpp"
#include "pk/lucas.hpp"

using namespace pk;

namespace {

const LucasParams kFib{1, 1};

std::optional<u64> naive_rank(u64 p, const LucasParams& lp) {
  return rank_of_appearance_scan(p, lp, p * p + p);
}

}  // namespace

TEST_CASE("lucas_mod examples") {
  CHECK(lucas_mod(10, kFib, 1000) == 55);
  CHECK(lucas_mod(0, kFib, 7) == 0);
  CHECK(lucas_mod(0, LucasParams{3, -5}, 11) == 0);
  CHECK(lucas_mod(5, kFib, 5) == 0);
  CHECK(lucas_mod(90, kFib, 1ULL << 62) == 2880067194370816120ULL % (1ULL << 62));
  CHECK_THROWS_AS(lucas_mod(3, kFib, 0), InvalidArgument);
}

TEST_CASE("lucas_mod agrees with the iterated recurrence") {
  for (int t = 0; t < 100; ++t) {
    LucasParams lp{oracle::uniform(-30, 30), oracle::uniform(-30, 30)};
    if (lp.a == 0) lp.a = 7;
    if (lp.b == 0) lp.b = -3;
    const u64 m = t % 5 == 0 ? static_cast<u64>(oracle::uniform(1L << 33, 1L << 40)) : oracle::uniform(2, 100000);
    u64 prev = 0;
    u64 cur = 1 % m;
    for (u64 n = 0; n <= 10000; ++n) {
      if (lucas_mod(n, lp, m) != prev) {
        FAIL("mismatch at n=" << n << " a=" << lp.a << " b=" << lp.b << " m=" << m);
      }
      u64 next = (mulmod(mod_signed(lp.a, m), cur, m) + mulmod(mod_signed(lp.b, m), prev, m)) % m;
      prev = cur;
      cur = next;
    }
  }
}

TEST_CASE("rank of appearance examples") {
  CHECK(rank_of_appearance(5, kFib) == 5);
  CHECK(rank_of_appearance(3, kFib) == 4);
  CHECK(rank_of_appearance(7, kFib) == 8);
  CHECK(rank_of_appearance(11, kFib) == 10);
  CHECK_FALSE(rank_of_appearance(3, LucasParams{1, 3}).has_value());
  CHECK(rank_of_appearance(3, LucasParams{3, 3}) == 2);
  CHECK_THROWS_AS(rank_of_appearance(2, kFib), UnsupportedPrime);
  CHECK_THROWS_AS(rank_of_appearance(9, kFib), InvalidArgument);
  CHECK_THROWS_AS(rank_of_appearance(5, LucasParams{0, 1}), InvalidArgument);
}

TEST_CASE("divisor method agrees with the linear scan") {
  for (u64 p : primes_up_to(10000)) {
    if (p == 2) continue;
    auto fast = rank_of_appearance(p, kFib);
    REQUIRE(fast.has_value());
    CHECK(*fast <= p + 1);
    CHECK(fast == naive_rank(p, kFib));
  }
  for (int t = 0; t < 400; ++t) {
    LucasParams lp{oracle::uniform(-40, 40), oracle::uniform(-40, 40)};
    if (lp.a == 0 || lp.b == 0) continue;
    std::vector<u64> ps = primes_up_to(2000);
    u64 p = ps[oracle::uniform(1, static_cast<long>(ps.size()) - 1)];
    CAPTURE(p);
    CAPTURE(lp.a);
    CAPTURE(lp.b);
    CHECK(rank_of_appearance(p, lp) == naive_rank(p, lp));
  }
}

TEST_CASE("rank equals the order of the root ratio modulo p") {
  for (u64 p : primes_up_to(500)) {
    if (p == 2) continue;
    for (LucasParams lp : {kFib, LucasParams{3, 1}, LucasParams{2, 3}, LucasParams{5, -2}}) {
      if (lp.discriminant() % static_cast<i64>(p) == 0 || lp.b % static_cast<i64>(p) == 0) continue;
      SpectralData sd = solve_characteristic(lp.recurrence(p));
      QuadElement rho = sd.lambda2 / sd.lambda1;
      u64 alpha = *rank_of_appearance(p, lp);
      CAPTURE(p);
      CAPTURE(lp.a);
      CHECK(sd.field.val(rho.pow(alpha) - QuadElement(1)) >= Valuation(1));
      for (u64 j = 1; j < alpha; ++j) CHECK(sd.field.val(rho.pow(j) - QuadElement(1)) == Valuation(0));
    }
  }
}

TEST_CASE("Wall-Sun-Sun") {
  CHECK_FALSE(is_wall_sun_sun(5));
  CHECK_FALSE(is_wall_sun_sun(3));
  bool any = false;
  for (u64 p : primes_up_to(100000)) {
    if (p != 2 && is_wall_sun_sun(p)) any = true;
  }
  CHECK_FALSE(any);
}

TEST_CASE("full-field criteria") {
  FullFieldReport fib3 = theorem4_full_field(3, kFib);
  CHECK(fib3.verdict == FullFieldVerdict::Full);
  CHECK(fib3.criterion == 2);
  CHECK(fib3.alpha == 4);
  CHECK(fib3.kepler_full);

  FullFieldReport ram = theorem4_full_field(3, LucasParams{6, -6});
  CHECK(ram.verdict == FullFieldVerdict::Full);
  CHECK(ram.criterion == 3);

  FullFieldReport fib11 = theorem4_full_field(11, kFib);
  CHECK(fib11.verdict == FullFieldVerdict::NotFull);
  CHECK(fib11.criterion == 1);
  CHECK(fib11.alpha == 10);
  CHECK_FALSE(fib11.kepler_full);

  CHECK_THROWS_AS(theorem4_full_field(5, LucasParams{2, 1}), InvalidArgument);
  CHECK(to_string(FullFieldVerdict::NotFull) == "not-full");
}

TEST_CASE("full-field criteria never contradict kepler_set") {
  int full = 0;
  for (u64 p : {3UL, 5UL, 7UL, 11UL, 13UL, 17UL}) {
    for (i64 a = -12; a <= 12; ++a) {
      for (i64 b = -12; b <= 12; ++b) {
        LucasParams lp{a, b};
        if (a == 0 || b == 0 || lp.degenerate() || lp.discriminant() == 0) continue;
        CAPTURE(p);
        CAPTURE(a);
        CAPTURE(b);
        FullFieldReport rep;
        CHECK_NOTHROW(rep = theorem4_full_field(p, lp));
        if (rep.verdict == FullFieldVerdict::Full) ++full;
      }
    }
  }
  CHECK(full > 20);
}

TEST_CASE("Fibonacci primes with alpha = p + 1 have full Kepler sets") {
  for (u64 p : primes_up_to(200)) {
    if (p == 2 || p == 5) continue;
    FullFieldReport rep = theorem4_full_field(p, kFib);
    CAPTURE(p);
    CHECK((rep.verdict == FullFieldVerdict::Full) == (*rep.alpha == p + 1));
  }
}

TEST_CASE("two-row unions") {
  for (u64 p : {3UL, 5UL}) {
    TwoRowReport rep = two_row_union(p, 1, 1000);
    CAPTURE(p);
    REQUIRE(rep.applicable);
    CHECK(rep.union_is_qp);
    CHECK(rep.sample_violations == 0);
    CHECK(rep.cells_hit == rep.cells_total);
    CHECK(rep.flagged_centers_distinct_mod_p);
  }
  TwoRowReport three = two_row_union(3, 1, 100);
  CHECK(three.m1 == 4);
  CHECK(three.m2 == 2);
  CHECK_FALSE(three.small_shifts);

  // D = 11^2 + 4 = 125: 5^2 | D selects the rows m = 1, 2.
  TwoRowReport small = two_row_union(5, 11, 500);
  REQUIRE(small.applicable);
  CHECK(small.small_shifts);
  CHECK(small.union_is_qp);
  CHECK(small.sample_violations == 0);
  REQUIRE(small.flagged_centers.size() == 2);
  CHECK(small.flagged_centers_distinct_mod_p);
}

TEST_CASE("two-row unions on a parameter sweep") {
  int applicable = 0;
  bool gate_seen = false;
  for (u64 p : primes_up_to(31)) {
    if (p == 2) continue;
    for (i64 a = 1; a <= 40; ++a) {
      CAPTURE(p);
      CAPTURE(a);
      TwoRowReport rep = two_row_union(p, a, 200);
      if (!rep.applicable) {
        if (rep.reason.rfind("pi^2", 0) == 0) gate_seen = true;
        continue;
      }
      ++applicable;
      CHECK(rep.union_is_qp);
      CHECK(rep.sample_violations == 0);
      CHECK(rep.flagged_centers_distinct_mod_p);
    }
  }
  CHECK(applicable > 100);
  CHECK(gate_seen);
}

TEST_CASE("census rows") {
  const std::vector<std::tuple<u64, u64, u64, std::string>> rows = {
      {10, 4, 3, "0.7500"},         {100, 25, 7, "0.2800"},          {1000, 168, 38, "0.2261"},
      {10000, 1229, 249, "0.2026"}, {100000, 9592, 1894, "0.1974"},
  };
  for (const auto& [limit, total, sat, text] : rows) {
    CensusReport rep = census(limit);
    CAPTURE(limit);
    CHECK(rep.row.primes_total == total);
    CHECK(rep.row.primes_satisfying == sat);
    CHECK(rep.row.proportion_text() == text);
  }
  CensusOptions one;
  one.threads = 1;
  CensusOptions many;
  many.threads = 8;
  many.window = 1000;
  one.window = 1000;
  CensusReport a = census(100000, one);
  CensusReport b = census(100000, many);
  CHECK(a.window_counts == b.window_counts);
  CHECK(a.window_sizes.size() == 10);
  CHECK(a.window_sizes.back() == 592);
  CHECK_THROWS_AS(census(100000000), InvalidArgument);
}

TEST_CASE("census agrees with the rank function") {
  CensusOptions opt;
  opt.a = 3;
  opt.b = -2;
  CensusReport rep = census(5000, opt);
  u64 count = 0;
  for (u64 p : primes_up_to(5000)) {
    auto alpha = p == 2 ? rank_of_appearance_scan(2, LucasParams{3, -2}, 8) : rank_of_appearance(p, LucasParams{3, -2});
    if (alpha && *alpha == p + 1) ++count;
  }
  CHECK(rep.row.primes_satisfying == count);
}

TEST_CASE("degenerate parameters") {
  CHECK(LucasParams{2, 1}.degenerate());
  CHECK(LucasParams{-2, -1}.degenerate());
  CHECK(LucasParams{0, 1}.degenerate());
  CHECK(LucasParams{3, -3}.degenerate());   // rho of order 6
  CHECK(LucasParams{1, -1}.degenerate());   // rho of order 6
  CHECK(LucasParams{2, -2}.degenerate());   // rho = +-i
  CHECK(LucasParams{3, -9}.degenerate());   // rho of order 3
  CHECK_FALSE(LucasParams{1, 1}.degenerate());
  CHECK_FALSE(LucasParams{6, -6}.degenerate());
  for (i64 a = -9; a <= 9; ++a) {
    for (i64 b = -9; b <= 9; ++b) {
      if (a == 0 || b == 0) continue;
      LucasParams lp{a, b};
      if (lp.discriminant() == 0) {
        CHECK(lp.degenerate());
        continue;
      }
      SpectralData sd = solve_characteristic(lp.recurrence(7));
      bool root_of_unity = is_deg2_root_of_unity(sd.lambda2 / sd.lambda1).has_value();
      if (root_of_unity) CHECK(lp.degenerate());
    }
  }
}

TEST_CASE("census over the first million primes in windows of 10^5") {
  CensusOptions opt;
  opt.cap = 20000000;
  CensusReport rep = census_first_primes(1000000, opt);
  CHECK(rep.row.primes_total == 1000000);
  CHECK(rep.row.limit == 15485863);
  CHECK(rep.row.primes_satisfying == 196755);
  REQUIRE(rep.window_counts.size() == 10);
  u64 sum = 0;
  for (u64 c : rep.window_counts) sum += c;
  CHECK(sum == rep.row.primes_satisfying);
  auto [lo, hi] = std::minmax_element(rep.window_counts.begin(), rep.window_counts.end());
  CHECK(*lo == 19534);
  CHECK(lo - rep.window_counts.begin() == 7);
  CHECK(*hi == 19781);
  CHECK(hi - rep.window_counts.begin() == 4);
}

#include "pk/lucas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <thread>

#include "pk/errors.hpp"
#include "pk/monothetic.hpp"

namespace pk {

namespace {

constexpr u64 kSmallModulus = 1ULL << 32;

// (L_n, L_{n+1}) mod m by doubling: squaring the companion matrix is
// L_2k = L_k (2 L_{k+1} - a L_k), L_{2k+1} = L_{k+1}^2 + b L_k^2.
template <class Mul>
u64 lucas_doubling(u64 n, u64 a, u64 b, u64 m, Mul mul) {
  u64 x = 0;
  u64 y = 1 % m;
  for (int bit = 63; bit >= 0; --bit) {
    if (n >> bit == 0) continue;
    u64 t = (2 * y % m + m - mul(a, x)) % m;
    u64 x2 = mul(x, t);
    u64 y2 = (mul(y, y) + mul(b, mul(x, x))) % m;
    if ((n >> bit) & 1U) {
      x = y2;
      y = (mul(a, y2) + mul(b, x2)) % m;
    } else {
      x = x2;
      y = y2;
    }
  }
  return x;
}

u64 lucas_small(u64 n, u64 a, u64 b, u64 m) {
  return lucas_doubling(n, a, b, m, [m](u64 u, u64 v) { return u * v % m; });
}

// Smallest divisor of n (a multiple of the rank) still hit by p, descending one prime at a time.
template <class Zero>
u64 descend(u64 n, const std::vector<std::pair<u64, int>>& factors, Zero is_zero) {
  for (const auto& [q, e] : factors) {
    for (int i = 0; i < e && n % q == 0 && is_zero(n / q); ++i) n /= q;
  }
  return n;
}

}  // namespace

bool LucasParams::degenerate() const {
  if ((std::abs(a) == 2 && std::abs(b) == 1) || (a == 0 && std::abs(b) == 1) || (std::abs(a) == 1 && b == 0)) {
    return true;
  }
  // rho + 1/rho = -(a^2 + 2b)/b lies in {-2, ..., 2} exactly when rho is a root of unity.
  if (b == 0) return false;
  for (i64 t = 1; t <= 4; ++t) {
    if (a * a == -t * b) return true;
  }
  return false;
}

void LucasParams::validate() const {
  if (a == 0 || b == 0) throw InvalidArgument("Lucas parameters need a*b != 0");
  if (std::abs(a) > (1LL << 30) || std::abs(b) > (1LL << 30)) {
    throw InvalidArgument("Lucas parameters must satisfy |a|, |b| <= 2^30");
  }
}

RecurrenceSpec LucasParams::recurrence(prime_t p) const {
  RecurrenceSpec spec;
  spec.p = p;
  spec.r = Rational(static_cast<long>(a));
  spec.s = Rational(static_cast<long>(b));
  spec.a0 = 0;
  spec.a1 = 1;
  return spec;
}

u64 lucas_mod(u64 n, const LucasParams& lp, u64 m) {
  if (m == 0) throw InvalidArgument("modulus must be positive");
  if (m == 1) return 0;
  u64 a = mod_signed(lp.a, m);
  u64 b = mod_signed(lp.b, m);
  if (m <= kSmallModulus) return lucas_small(n, a, b, m);
  return lucas_doubling(n, a, b, m, [m](u64 u, u64 v) { return mulmod(u, v, m); });
}

std::optional<u64> rank_of_appearance_scan(u64 p, const LucasParams& lp, u64 bound) {
  u64 a = mod_signed(lp.a, p);
  u64 b = mod_signed(lp.b, p);
  u64 prev = 0;
  u64 cur = 1 % p;
  for (u64 n = 1; n <= bound; ++n) {
    if (cur == 0) return n;
    u64 next = (mulmod(a, cur, p) + mulmod(b, prev, p)) % p;
    prev = cur;
    cur = next;
  }
  return std::nullopt;
}

std::optional<u64> rank_of_appearance(u64 p, const LucasParams& lp) {
  require_odd_prime(p);
  lp.validate();
  const u64 bp = mod_signed(lp.b, p);
  const u64 ap = mod_signed(lp.a, p);
  // p | b: L_n = a^(n-1) mod p.
  if (bp == 0) return ap == 0 ? std::optional<u64>(2) : std::nullopt;
  const int chi = jacobi(lp.discriminant(), p);
  const u64 n = chi == 0 ? p : p - chi;
  auto is_zero = [&](u64 k) { return lucas_mod(k, lp, p) == 0; };
  if (!is_zero(n)) {
    // Not reached for p not dividing b; kept as a guard.
    return rank_of_appearance_scan(p, lp, p * p);
  }
  return descend(n, factor_u64(n), is_zero);
}

bool is_wall_sun_sun(u64 p) {
  require_odd_prime(p);
  if (p >= kSmallModulus) throw InvalidArgument("p must be below 2^32");
  const LucasParams fib{1, 1};
  return lucas_mod(*rank_of_appearance(p, fib), fib, p * p) == 0;
}

std::string to_string(FullFieldVerdict v) {
  switch (v) {
    case FullFieldVerdict::Full:
      return "full";
    case FullFieldVerdict::NotFull:
      return "not-full";
    case FullFieldVerdict::Inapplicable:
      return "inapplicable";
  }
  return "";
}

FullFieldReport theorem4_full_field(prime_t p, const LucasParams& lp) {
  require_odd_prime(p);
  lp.validate();
  if (lp.degenerate()) throw InvalidArgument("degenerate Lucas parameters");
  const RecurrenceSpec spec = lp.recurrence(p);
  const SpectralData sd = solve_characteristic(spec);
  const LocalField& f = sd.field;
  FullFieldReport rep;
  rep.alpha = rank_of_appearance(p, lp);

  const QuadElement rho = sd.lambda2 / sd.lambda1;
  if (f.is_qp()) {
    rep.verdict = FullFieldVerdict::NotFull;
    rep.criterion = 1;
    rep.reason = "roots lie in Q_p";
  } else if (f.kind() == LocalField::Kind::Unramified) {
    if (rep.alpha && *rep.alpha == p + 1 && f.val(rho.pow(p + 1) - QuadElement(1)) == Valuation(1)) {
      rep.verdict = FullFieldVerdict::Full;
      rep.criterion = 2;
      rep.reason = "unramified, alpha = p+1 and v_p(rho^alpha - 1) = 1";
    } else {
      rep.reason = "unramified but alpha != p+1 or v_p(rho^alpha - 1) > 1";
    }
  } else {
    const unsigned long l = f.order_mod_pi(rho);
    if (f.val(sd.lambda1) != Valuation(1)) {
      rep.reason = "ramified but v_p(lambda1) != 1/2";
    } else if (l < 2 || f.val(rho.pow(l) - QuadElement(1)) != Valuation(1)) {
      rep.reason = "ramified but rho^l - 1 is divisible by pi^2 or l < 2";
    } else {
      rep.verdict = FullFieldVerdict::Full;
      rep.criterion = 3;
      rep.reason = "ramified, v_p(lambda1) = 1/2 and rho^l = 1 + pi*mu with pi not dividing mu";
    }
  }

  const KeplerDescription kd = kepler_set(spec);
  rep.kepler_full = kd.region && kd.region->kind() == Region::Kind::All;
  if ((rep.verdict == FullFieldVerdict::Full && !rep.kepler_full) ||
      (rep.verdict == FullFieldVerdict::NotFull && rep.kepler_full)) {
    throw std::logic_error("full-field criterion disagrees with kepler_set");
  }
  return rep;
}

Region shifted_ratio_closure(prime_t p, const LucasParams& lp, u64 m) {
  const SpectralData sd = solve_characteristic(lp.recurrence(p));
  if (sd.repeated) throw Inapplicable("repeated root");
  const QuadElement rho = sd.lambda2 / sd.lambda1;
  const Region closure = closure_of(rho, sd.field).region();
  // T_m(z) = (lambda1^m - lambda2^m z) / (1 - z) sends rho^n to L_{n+m}/L_n.
  const MoebiusMap t(-sd.lambda2.pow(m), sd.lambda1.pow(m), QuadElement(-1), QuadElement(1));
  const Region traced = moebius_image(t, closure).intersect_with_qp();
  const LocalField qp = LocalField::qp(p);
  if (traced.kind() == Region::Kind::All) return Region::all(qp);
  return Region::normalize(traced.terms(), qp);
}

TwoRowReport two_row_union(prime_t p, i64 a, u64 samples) {
  require_odd_prime(p);
  const LucasParams lp{a, 1};
  lp.validate();
  TwoRowReport rep;
  if (lp.degenerate()) {
    rep.reason = "degenerate Lucas parameters";
    return rep;
  }
  rep.alpha = rank_of_appearance(p, lp);
  if (!rep.alpha || *rep.alpha <= 2) {
    rep.reason = "alpha_L(p) <= 2";
    return rep;
  }
  const SpectralData sd = solve_characteristic(lp.recurrence(p));
  const i64 d = lp.discriminant();
  const i64 p2 = static_cast<i64>(p * p);
  if (d % p2 == 0) {
    rep.small_shifts = true;
    rep.m1 = 1;
    rep.m2 = 2;
  } else {
    const QuadElement rho = sd.lambda2 / sd.lambda1;
    const unsigned long l = sd.field.order_mod_pi(rho);
    if (sd.field.val(rho.pow(l) - QuadElement(1)) != Valuation(1)) {
      rep.reason = "pi^2 divides rho^l - 1 and p^2 does not divide D";
      return rep;
    }
    rep.m1 = *rep.alpha;
    rep.m2 = *rep.alpha - 2;
  }
  rep.applicable = true;
  rep.k1 = shifted_ratio_closure(p, lp, rep.m1);
  rep.k2 = shifted_ratio_closure(p, lp, rep.m2);
  rep.union_is_qp = rep.k1->unite(*rep.k2).kind() == Region::Kind::All;

  const LocalField qp = LocalField::qp(p);
  if (rep.k1->removed() && rep.k2->removed()) {
    rep.flagged_centers = {rep.k1->removed()->center, rep.k2->removed()->center};
    rep.flagged_centers_distinct_mod_p = qp.val(rep.flagged_centers[0] - rep.flagged_centers[1]) < Valuation(1);
  }

  // Exact terms for the sampled ratios.
  std::vector<Integer> terms{0, 1};
  const u64 need = samples + std::max(rep.m1, rep.m2);
  while (terms.size() <= need) {
    const std::size_t n = terms.size();
    terms.push_back(Integer(static_cast<long>(a)) * terms[n - 1] + terms[n - 2]);
  }
  std::set<Cell> hit;
  for (u64 m : {rep.m1, rep.m2}) {
    const Region& k = m == rep.m1 ? *rep.k1 : *rep.k2;
    for (u64 n = 0; n < samples; ++n) {
      Point z = Point::infinity();
      if (terms[n] != 0) {
        Rational q(terms[n + m], terms[n]);
        q.canonicalize();
        z = Point(q);
      }
      if (!k.contains(z)) ++rep.sample_violations;
      hit.insert(cell_of(z, p, 2));
    }
  }
  rep.samples = samples;
  rep.cells_total = p * p + p;
  rep.cells_hit = hit.size();
  return rep;
}

std::string CensusRow::proportion_text() const {
  const u64 scaled = primes_total == 0 ? 0 : primes_satisfying * 10000 / primes_total;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu.%04llu", static_cast<unsigned long long>(scaled / 10000),
                static_cast<unsigned long long>(scaled % 10000));
  return buf;
}

namespace {

// Smallest prime factor for every n <= limit.
std::vector<std::uint32_t> spf_sieve(u64 limit) {
  std::vector<std::uint32_t> spf(limit + 1, 0);
  for (u64 i = 2; i <= limit; ++i) {
    if (spf[i] != 0) continue;
    for (u64 j = i; j <= limit; j += i) {
      if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
    }
  }
  return spf;
}

// Whether alpha_L(p) = p + 1, with p + 1 factored through the sieve.
bool full_rank(u64 p, const LucasParams& lp, const std::vector<std::uint32_t>& spf) {
  if (p == 2) {
    auto alpha = rank_of_appearance_scan(2, lp, 8);
    return alpha && *alpha == 3;
  }
  const u64 a = mod_signed(lp.a, p);
  const u64 b = mod_signed(lp.b, p);
  if (b == 0) return false;
  // alpha divides p - 1 when D is a nonzero square mod p and equals p when p | D.
  if (jacobi(lp.discriminant(), p) != -1) return false;
  u64 rest = p + 1;
  while (rest > 1) {
    const u64 q = spf[rest];
    if (lucas_small((p + 1) / q, a, b, p) == 0) return false;
    while (rest % q == 0) rest /= q;
  }
  return true;
}

CensusReport run_census(const std::vector<u64>& primes, u64 limit, const CensusOptions& opt) {
  const LucasParams lp{opt.a, opt.b};
  lp.validate();
  const std::vector<std::uint32_t> spf = spf_sieve(limit + 1);
  std::vector<std::uint8_t> flags(primes.size(), 0);

  unsigned threads = opt.threads != 0 ? opt.threads : std::max(1U, std::thread::hardware_concurrency());
  const std::size_t chunk = 1 << 14;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t lo = next.fetch_add(chunk);
      if (lo >= primes.size()) return;
      const std::size_t hi = std::min(primes.size(), lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) flags[i] = full_rank(primes[i], lp, spf) ? 1 : 0;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  CensusReport rep;
  rep.row.limit = limit;
  rep.row.primes_total = primes.size();
  rep.window = opt.window;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (opt.window != 0 && i % opt.window == 0) {
      rep.window_counts.push_back(0);
      rep.window_sizes.push_back(0);
    }
    if (opt.window != 0) ++rep.window_sizes.back();
    if (flags[i] == 0) continue;
    ++rep.row.primes_satisfying;
    if (opt.window != 0) ++rep.window_counts.back();
  }
  return rep;
}

}  // namespace

CensusReport census(u64 limit, const CensusOptions& opt) {
  if (limit < 2) throw InvalidArgument("census limit must be at least 2");
  if (limit > opt.cap) throw InvalidArgument("census limit exceeds the cap " + std::to_string(opt.cap));
  return run_census(primes_up_to(limit), limit, opt);
}

CensusReport census_first_primes(u64 count, const CensusOptions& opt) {
  if (count == 0) throw InvalidArgument("prime count must be positive");
  // p_n < n (ln n + ln ln n) for n >= 6.
  const double n = static_cast<double>(std::max<u64>(count, 6));
  const u64 bound = static_cast<u64>(n * (std::log(n) + std::log(std::log(n)))) + 16;
  std::vector<u64> primes = primes_up_to(std::min(bound, opt.cap));
  if (primes.size() < count) throw InvalidArgument("prime count exceeds the cap " + std::to_string(opt.cap));
  primes.resize(count);
  return run_census(primes, primes.back(), opt);
}

}  // namespace pk

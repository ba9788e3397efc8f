#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace pk {

using u64 = std::uint64_t;
using i64 = std::int64_t;

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 base, u64 exp, u64 m);

// Deterministic Miller-Rabin for the full 64-bit range.
bool is_prime_u64(u64 n);

// Prime factorisation as (prime, exponent) pairs in ascending order.
std::vector<std::pair<u64, int>> factor_u64(u64 n);

// Jacobi symbol (a/n) for odd n >= 1.
int jacobi(i64 a, u64 n);

// Reduce a signed value into [0, m).
u64 mod_signed(i64 a, u64 m);

// Multiplicative order of a modulo prime p (a not divisible by p).
u64 order_mod_prime(u64 a, u64 p);

// Primes up to and including limit.
std::vector<u64> primes_up_to(u64 limit);

}  // namespace pk

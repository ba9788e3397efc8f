#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pk/padic.hpp"
#include "pk/quad.hpp"
#include "pk/region.hpp"

namespace pk {

enum class Ambient { Units, NormOneUnramified, NormOneRamified };
std::string to_string(Ambient a);

// Closure of the cyclic group generated by a unit: the l cosets rep_i + pi^k O,
// intersected with the norm +-1 units when norm_constrained is set.
struct ClosureDescriptor {
  Ambient ambient = Ambient::Units;
  LocalField field = LocalField::qp(3);
  unsigned long l = 1;
  Valuation k;  // infinite for roots of unity
  std::vector<QuadElement> coset_reps;
  bool norm_constrained = false;
  bool full_group = false;

  // Balls rep_i + pi^k O, or the finite set of powers when k is infinite.
  Region region() const;
  // Index of the closure in its ambient group; empty when the closure is finite.
  std::optional<Integer> index() const;
  std::string to_string() const;
};

// |U/U_k| over Q_p.
Integer unit_quotient_order(prime_t p, long k);
// |U^0/U^0_k| for the norm +-1 units of an unramified or ramified extension.
Integer norm_one_quotient_order(const LocalField& f, long k);

ClosureDescriptor closure_in_U(const Rational& lambda, prime_t p);
// Closure of a unit of the given field: U when the field is Q_p (or split), U^0 otherwise.
ClosureDescriptor closure_of(const QuadElement& lambda, const LocalField& f);
// For a unit known only through approximations: the generator is asked for
// successively more digits until k is decided or the cap is hit.
ClosureDescriptor closure_in_U(const std::function<PadicApprox(const PadicContext&)>& generator, prime_t p,
                               long precision_cap = kDefaultPrecisionCap);
ClosureDescriptor closure_in_U0(const QuadElement& lambda, const ExtensionDescriptor& ext);

// The s in [0, l) with target = rep_s mod pi^k, if any.
std::optional<unsigned long> locate_in_closure(const QuadElement& target, const ClosureDescriptor& c);

}  // namespace pk

#include "pk/monothetic.hpp"

#include <stdexcept>

#include "pk/errors.hpp"

namespace pk {

namespace {

void check_reps(ClosureDescriptor& c) {
  const LocalField& f = c.field;
  for (std::size_t i = 0; i < c.coset_reps.size(); ++i) {
    for (std::size_t j = i + 1; j < c.coset_reps.size(); ++j) {
      if (f.val(c.coset_reps[i] - c.coset_reps[j]) >= c.k) throw std::logic_error("coset representatives collide");
    }
  }
}

std::vector<QuadElement> powers(const QuadElement& lambda, unsigned long l) {
  std::vector<QuadElement> reps;
  QuadElement pw = QuadElement(1);
  for (unsigned long i = 0; i < l; ++i) {
    reps.push_back(pw);
    pw = pw * lambda;
  }
  return reps;
}

}  // namespace

std::string to_string(Ambient a) {
  switch (a) {
    case Ambient::Units:
      return "U";
    case Ambient::NormOneUnramified:
      return "U0-unramified";
    case Ambient::NormOneRamified:
      return "U0-ramified";
  }
  return "?";
}

Region ClosureDescriptor::region() const {
  std::vector<RegionTerm> terms;
  for (const QuadElement& r : coset_reps) {
    if (k.is_infinite()) {
      terms.emplace_back(Point(r));
    } else {
      terms.emplace_back(Ball{r, k.value()});
    }
  }
  return Region::normalize(terms, field);
}

std::optional<Integer> ClosureDescriptor::index() const {
  if (k.is_infinite()) return std::nullopt;
  Integer whole = ambient == Ambient::Units ? unit_quotient_order(field.p(), k.value())
                                            : norm_one_quotient_order(field, k.value());
  return Integer(whole / l);
}

std::string ClosureDescriptor::to_string() const {
  std::string s = region().to_string();
  if (norm_constrained) s += " [norm-one constrained]";
  return s;
}

Integer unit_quotient_order(prime_t p, long k) {
  if (k < 1) throw InvalidArgument("level must be positive");
  return Integer(p - 1) * ipow(p, static_cast<unsigned long>(k - 1));
}

Integer norm_one_quotient_order(const LocalField& f, long k) {
  if (k < 1) throw InvalidArgument("level must be positive");
  const prime_t p = f.p();
  switch (f.kind()) {
    case LocalField::Kind::Unramified:
      return Integer(2 * (p + 1)) * ipow(p, static_cast<unsigned long>(k - 1));
    case LocalField::Kind::Ramified: {
      // x^2 = +-1 mod p is solvable for -1 only when p = 1 mod 4.
      const unsigned long t = p % 4 == 1 ? 4 : 2;
      return Integer(t) * ipow(p, static_cast<unsigned long>(k / 2));
    }
    default:
      throw DomainError("norm-one units need a quadratic extension");
  }
}

ClosureDescriptor closure_in_U(const Rational& lambda, prime_t p) {
  require_odd_prime(p);
  if (lambda == 0 || vp(lambda, p) != Valuation(0)) throw DomainError("closure_in_U needs a p-adic unit");
  return closure_of(QuadElement(lambda), LocalField::qp(p));
}

ClosureDescriptor closure_of(const QuadElement& lambda, const LocalField& f) {
  if (!f.is_qp()) {
    ExtensionDescriptor ext = classify(f.p(), Rational(f.d()));
    return closure_in_U0(lambda, ext);
  }
  if (lambda.is_zero() || f.val(lambda) != Valuation(0)) throw DomainError("closure needs a unit");
  ClosureDescriptor c;
  c.field = f;
  c.l = f.order_mod_pi(lambda);
  c.k = f.val(lambda.pow(c.l) - QuadElement(1));
  c.coset_reps = powers(lambda, c.l);
  c.full_group = c.l == f.p() - 1 && c.k == Valuation(1);
  check_reps(c);
  return c;
}

ClosureDescriptor closure_in_U(const std::function<PadicApprox(const PadicContext&)>& generator, prime_t p,
                               long precision_cap) {
  require_odd_prime(p);
  for (long n = kDefaultPrecision;; n *= 2) {
    const long prec = std::min(n, precision_cap);
    PadicApprox lambda = generator(PadicContext::make(p, prec));
    if (lambda.is_zero() || lambda.valuation() != 0) throw DomainError("closure_in_U needs a p-adic unit");
    const unsigned long l = unit_order_mod_p(lambda);
    PadicApprox pw = PadicApprox::from_rational(1, lambda.context());
    std::vector<PadicApprox> reps;
    for (unsigned long i = 0; i < l; ++i) {
      reps.push_back(pw);
      pw = pw * lambda;
    }
    PadicApprox diff = pw - PadicApprox::from_rational(1, lambda.context());
    if (!diff.is_zero()) {
      ClosureDescriptor c;
      c.field = LocalField::qp(p);
      c.l = l;
      c.k = Valuation(diff.valuation());
      for (const PadicApprox& r : reps) c.coset_reps.emplace_back(reduce_mod_pow(r.to_rational(), c.k.value(), p));
      c.full_group = c.l == p - 1 && c.k == Valuation(1);
      check_reps(c);
      return c;
    }
    if (prec >= precision_cap) {
      throw PrecisionExhausted("k undecided at precision cap " + std::to_string(precision_cap));
    }
  }
}

ClosureDescriptor closure_in_U0(const QuadElement& lambda, const ExtensionDescriptor& ext) {
  LocalField f = LocalField::of(ext);
  if (f.is_qp()) throw DomainError("norm-one closures need a non-split extension");
  Rational n = norm(lambda.is_rational() ? lambda : QuadElement(lambda.x(), lambda.y(), ext.d));
  if (n != 1 && n != -1) throw DomainError("closure_in_U0 needs norm +-1");
  if (!lambda.is_rational() && lambda.d() != ext.d) throw InvalidArgument("element lies in a different extension");
  if (f.val(lambda) != Valuation(0)) throw DomainError("closure_in_U0 needs a unit");
  ClosureDescriptor c;
  c.ambient = f.kind() == LocalField::Kind::Unramified ? Ambient::NormOneUnramified : Ambient::NormOneRamified;
  c.field = f;
  c.norm_constrained = true;
  c.l = f.order_mod_pi(lambda);
  c.k = f.val(lambda.pow(c.l) - QuadElement(1));
  c.coset_reps = powers(lambda, c.l);
  if (c.k == Valuation(1)) {
    const unsigned long top = norm_one_quotient_order(f, 1).get_ui();
    c.full_group = c.l == top;
  }
  check_reps(c);
  return c;
}

std::optional<unsigned long> locate_in_closure(const QuadElement& target, const ClosureDescriptor& c) {
  for (unsigned long s = 0; s < c.coset_reps.size(); ++s) {
    QuadElement diff = target - c.coset_reps[s];
    if (c.k.is_infinite() ? diff.is_zero() : c.field.val(diff) >= c.k) return s;
  }
  return std::nullopt;
}

}  // namespace pk

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pk/padic.hpp"
#include "pk/rational.hpp"

namespace pk {

// x + y*sqrt(d) with rational coordinates. d is a squarefree integer other than 1;
// d == 0 marks an element known to be rational (then y == 0).
class QuadElement {
 public:
  QuadElement() = default;
  QuadElement(const Rational& x) : x_(x) {}  // NOLINT(google-explicit-constructor)
  QuadElement(long x) : x_(x) {}             // NOLINT(google-explicit-constructor)
  QuadElement(const Rational& x, const Rational& y, const Integer& d);

  const Rational& x() const { return x_; }
  const Rational& y() const { return y_; }
  const Integer& d() const { return d_; }
  bool is_rational() const { return y_ == 0; }
  bool is_zero() const { return x_ == 0 && y_ == 0; }

  QuadElement conj() const;
  QuadElement pow(unsigned long n) const;

  friend QuadElement operator+(const QuadElement& a, const QuadElement& b);
  friend QuadElement operator-(const QuadElement& a, const QuadElement& b);
  friend QuadElement operator*(const QuadElement& a, const QuadElement& b);
  friend QuadElement operator/(const QuadElement& a, const QuadElement& b);
  QuadElement operator-() const;
  friend bool operator==(const QuadElement& a, const QuadElement& b) {
    return a.x_ == b.x_ && a.y_ == b.y_;
  }

  std::string to_string() const;

 private:
  Rational x_ = 0;
  Rational y_ = 0;
  Integer d_ = 0;
};

Rational norm(const QuadElement& z);
Rational trace(const QuadElement& z);

// Parses "x", "x + y*sqrt(d)", "x - y*sqrt(d)", "y*sqrt(d)" or "sqrt(d)".
QuadElement parse_quad(std::string_view text);

// D = q^2 * d with d squarefree (d = 1 when D is a rational square). D != 0.
struct SquarefreeSplit {
  Rational q;
  Integer d;
};
SquarefreeSplit squarefree_split(const Rational& value);

enum class ExtClass { Split, Unramified, Ramified };
std::string to_string(ExtClass c);

struct ExtensionDescriptor {
  prime_t p = 3;
  Integer d = 1;  // normalized radicand; 1 when d0 is a rational square
  ExtClass cls = ExtClass::Split;
  int e = 1;
  int f = 1;
  unsigned long canonical_nonresidue = 2;  // smallest non-residue mod p
  // One of "Qp", "Qp(sqrt(N))", "Qp(sqrt(p))", "Qp(sqrt(pN))" with numbers substituted.
  std::string canonical_name() const;
};

ExtensionDescriptor classify(prime_t p, const Rational& d0);

// Valuation-aware view of Q_p or of a quadratic extension, used by the region algebra.
// All valuations and ball exponents are in pi-units (pi = p unless ramified).
class LocalField {
 public:
  enum class Kind { Base, Split, Unramified, Ramified };

  static LocalField qp(prime_t p, long precision_cap = kDefaultPrecisionCap);
  static LocalField of(const ExtensionDescriptor& ext, long precision_cap = kDefaultPrecisionCap);

  prime_t p() const { return p_; }
  Kind kind() const { return kind_; }
  const Integer& d() const { return d_; }
  int e() const { return kind_ == Kind::Ramified ? 2 : 1; }
  // Elements of this field are points of Q_p (base or split).
  bool is_qp() const { return kind_ == Kind::Base || kind_ == Kind::Split; }
  unsigned long residue_size() const;
  long precision_cap() const { return cap_; }

  Valuation val(const QuadElement& z) const;
  // val(z) >= m, decided at precision m in the split case.
  bool val_at_least(const QuadElement& z, long m) const;
  // Canonical center of the ball z + pi^m O.
  QuadElement reduce(const QuadElement& z, long m) const;
  // Centers of the residue_size() sub-balls of exponent m + 1.
  std::vector<QuadElement> children(const QuadElement& center, long m) const;
  // Split or base: a rational r with val(z - r) >= m.
  Rational embed(const QuadElement& z, long m) const;
  unsigned long order_mod_pi(const QuadElement& z) const;
  // Embedded sqrt(d) modulo p^k (split only).
  Integer sqrt_d_mod(long k) const;

 private:
  prime_t p_ = 3;
  Kind kind_ = Kind::Base;
  Integer d_ = 0;
  long cap_ = kDefaultPrecisionCap;
  Integer root_;  // sqrt(d) mod p^kDefaultPrecision in the split case
};

// Order of rho when rho is a root of unity (orders 1, 2, 3, 4, 6 are the only
// possibilities in degree <= 2).
std::optional<int> is_deg2_root_of_unity(const QuadElement& rho);

}  // namespace pk

#include "pk/quad.hpp"

#include <algorithm>
#include <cctype>

#include "pk/arith.hpp"
#include "pk/errors.hpp"

namespace pk {

namespace {

Integer merge_d(const QuadElement& a, const QuadElement& b) {
  if (a.d() == 0) return b.d();
  if (b.d() == 0 || a.d() == b.d()) return a.d();
  if (a.is_rational()) return b.d();
  if (b.is_rational()) return a.d();
  throw InvalidArgument("elements of different quadratic fields");
}

// floor(a / b) for b > 0.
long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
long ceil_div(long a, long b) { return -floor_div(-a, b); }

}  // namespace

QuadElement::QuadElement(const Rational& x, const Rational& y, const Integer& d) : x_(x), y_(y), d_(d) {
  if (y_ != 0 && (d_ == 0 || d_ == 1)) throw InvalidArgument("irrational part needs a non-square radicand");
}

QuadElement QuadElement::conj() const { return QuadElement(x_, -y_, d_); }

QuadElement QuadElement::operator-() const { return QuadElement(-x_, -y_, d_); }

QuadElement operator+(const QuadElement& a, const QuadElement& b) {
  return QuadElement(a.x_ + b.x_, a.y_ + b.y_, merge_d(a, b));
}

QuadElement operator-(const QuadElement& a, const QuadElement& b) {
  return QuadElement(a.x_ - b.x_, a.y_ - b.y_, merge_d(a, b));
}

QuadElement operator*(const QuadElement& a, const QuadElement& b) {
  Integer d = merge_d(a, b);
  if (a.y_ == 0) return QuadElement(a.x_ * b.x_, a.x_ * b.y_, d);
  if (b.y_ == 0) return QuadElement(a.x_ * b.x_, a.y_ * b.x_, d);
  return QuadElement(a.x_ * b.x_ + a.y_ * b.y_ * Rational(d), a.x_ * b.y_ + a.y_ * b.x_, d);
}

QuadElement operator/(const QuadElement& a, const QuadElement& b) {
  if (b.is_zero()) throw DivisionByZero();
  if (b.y_ == 0) return QuadElement(a.x_ / b.x_, a.y_ / b.x_, merge_d(a, b));
  Rational n = norm(b);
  QuadElement num = a * b.conj();
  return QuadElement(num.x_ / n, num.y_ / n, num.d_);
}

QuadElement QuadElement::pow(unsigned long n) const {
  QuadElement result(Rational(1), Rational(0), d_);
  QuadElement base = *this;
  while (n > 0) {
    if (n & 1UL) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

std::string QuadElement::to_string() const {
  if (y_ == 0) return pk::to_string(x_);
  std::string radical = "sqrt(" + d_.get_str() + ")";
  std::string coeff = y_ == 1 ? radical : pk::to_string(y_) + "*" + radical;
  if (x_ == 0) return coeff;
  return pk::to_string(x_) + " + " + coeff;
}

Rational norm(const QuadElement& z) { return z.x() * z.x() - z.y() * z.y() * Rational(z.d()); }

Rational trace(const QuadElement& z) { return 2 * z.x(); }

QuadElement parse_quad(std::string_view text) {
  std::size_t root = text.find("sqrt(");
  if (root == std::string_view::npos) return QuadElement(parse_rational(text));
  std::size_t close = text.find(')', root);
  if (close == std::string_view::npos) throw ParseError("missing ')'", text.size());
  if (close + 1 != text.size()) throw ParseError("unexpected character", close + 1);
  Integer d = parse_integer(text.substr(root + 5, close - root - 5), false, root + 5);
  std::string_view prefix = text.substr(0, root);
  Rational coeff = 1;
  if (!prefix.empty()) {
    if (prefix.back() == '*') {
      prefix.remove_suffix(1);
    } else if (!prefix.ends_with(" + ") && !prefix.ends_with(" - ")) {
      throw ParseError("expected '*' before sqrt", root);
    }
  }
  Rational x = 0;
  int sign = 1;
  std::size_t coeff_offset = 0;
  std::size_t plus = prefix.rfind(" + ");
  std::size_t minus = prefix.rfind(" - ");
  std::size_t sep = std::string_view::npos;
  if (plus != std::string_view::npos) sep = plus;
  if (minus != std::string_view::npos && (sep == std::string_view::npos || minus > sep)) {
    sep = minus;
    sign = -1;
  }
  std::string_view coeff_text = prefix;
  if (sep != std::string_view::npos) {
    x = parse_rational(prefix.substr(0, sep));
    coeff_offset = sep + 3;
    coeff_text = prefix.substr(sep + 3);
  } else if (!text.empty() && text[0] == '-' && prefix.empty()) {
    throw ParseError("unexpected '-'", 0);
  }
  if (!coeff_text.empty()) {
    coeff = parse_rational(coeff_text, coeff_offset);
  } else if (sep == std::string_view::npos && root != 0) {
    throw ParseError("empty coefficient", 0);
  }
  SquarefreeSplit split = squarefree_split(Rational(d));
  if (split.d == 1) return QuadElement(x + Rational(sign) * coeff * split.q);
  return QuadElement(x, Rational(sign) * coeff * split.q, split.d);
}

SquarefreeSplit squarefree_split(const Rational& value) {
  if (value == 0) throw InvalidArgument("zero has no square class");
  // num/den = (num*den) / den^2, so the square class is that of num*den.
  Integer n = abs(Integer(value.get_num() * value.get_den()));
  const int sign = value < 0 ? -1 : 1;
  Integer square = 1;
  Integer radical = 1;
  for (unsigned long q = 2; q < 100000; ++q) {
    if (Integer(q) * Integer(q) > n) break;
    unsigned long e = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), q) != 0) {
      mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), q);
      ++e;
    }
    if (e == 0) continue;
    square *= ipow(q, e / 2);
    if (e % 2 == 1) radical *= q;
  }
  if (mpz_perfect_square_p(n.get_mpz_t()) != 0) {
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    square *= r;
  } else {
    radical *= n;
  }
  return {make_rational(square, value.get_den()), Integer(sign * radical)};
}

std::string to_string(ExtClass c) {
  switch (c) {
    case ExtClass::Split:
      return "split";
    case ExtClass::Unramified:
      return "unramified";
    case ExtClass::Ramified:
      return "ramified";
  }
  return "?";
}

std::string ExtensionDescriptor::canonical_name() const {
  const std::string pn = std::to_string(p);
  const std::string nn = std::to_string(canonical_nonresidue);
  switch (cls) {
    case ExtClass::Split:
      return "Q" + pn;
    case ExtClass::Unramified:
      return "Q" + pn + "(sqrt(" + nn + "))";
    case ExtClass::Ramified: {
      // d = p*u; the class of u decides between sqrt(p) and sqrt(p*N).
      Integer u = d / Integer(p);
      int chi = jacobi(static_cast<i64>(rational_mod(Rational(u), Integer(p)).get_ui()), p);
      if (chi == 1) return "Q" + pn + "(sqrt(" + pn + "))";
      return "Q" + pn + "(sqrt(" + std::to_string(p * canonical_nonresidue) + "))";
    }
  }
  return "?";
}

ExtensionDescriptor classify(prime_t p, const Rational& d0) {
  require_odd_prime(p);
  if (d0 == 0) throw InvalidArgument("classify: radicand must be nonzero");
  SquarefreeSplit split = squarefree_split(d0);
  ExtensionDescriptor ext;
  ext.p = p;
  ext.d = split.d;
  unsigned long n = 2;
  while (jacobi(static_cast<i64>(n), p) != -1) ++n;
  ext.canonical_nonresidue = n;
  if (mpz_divisible_ui_p(split.d.get_mpz_t(), p) != 0) {
    ext.cls = ExtClass::Ramified;
    ext.e = 2;
    ext.f = 1;
    return ext;
  }
  int chi = jacobi(static_cast<i64>(rational_mod(Rational(split.d), Integer(p)).get_ui()), p);
  if (chi == 1) {
    ext.cls = ExtClass::Split;
    ext.e = 1;
    ext.f = 1;
  } else {
    ext.cls = ExtClass::Unramified;
    ext.e = 1;
    ext.f = 2;
  }
  return ext;
}

LocalField LocalField::qp(prime_t p, long precision_cap) {
  require_odd_prime(p);
  LocalField f;
  f.p_ = p;
  f.kind_ = Kind::Base;
  f.cap_ = precision_cap;
  return f;
}

LocalField LocalField::of(const ExtensionDescriptor& ext, long precision_cap) {
  LocalField f = qp(ext.p, precision_cap);
  if (ext.d == 1) return f;
  f.d_ = ext.d;
  switch (ext.cls) {
    case ExtClass::Split:
      f.kind_ = Kind::Split;
      f.root_ = sqrt_mod_prime_power(rational_mod(Rational(ext.d), ipow(ext.p, kDefaultPrecision)), ext.p,
                                     kDefaultPrecision);
      break;
    case ExtClass::Unramified:
      f.kind_ = Kind::Unramified;
      break;
    case ExtClass::Ramified:
      f.kind_ = Kind::Ramified;
      break;
  }
  return f;
}

unsigned long LocalField::residue_size() const { return kind_ == Kind::Unramified ? p_ * p_ : p_; }

Integer LocalField::sqrt_d_mod(long k) const {
  if (kind_ != Kind::Split) throw DomainError("sqrt(d) embeds in Q_p only in the split case");
  if (k > cap_) throw PrecisionExhausted("precision cap " + std::to_string(cap_) + " reached");
  k = std::max(k, 1L);
  if (k <= kDefaultPrecision) {
    Integer r;
    Integer m = ipow(p_, static_cast<unsigned long>(k));
    mpz_fdiv_r(r.get_mpz_t(), root_.get_mpz_t(), m.get_mpz_t());
    return r;
  }
  return sqrt_mod_prime_power(rational_mod(Rational(d_), ipow(p_, static_cast<unsigned long>(k))), p_, k);
}

Valuation LocalField::val(const QuadElement& z) const {
  if (z.is_zero()) return Valuation::infinity();
  if (z.is_rational()) {
    long v = vp(z.x(), p_).value();
    return Valuation(kind_ == Kind::Ramified ? 2 * v : v);
  }
  switch (kind_) {
    case Kind::Base:
      throw InvalidArgument("irrational element over Q_p");
    case Kind::Unramified:
      return std::min(vp(z.x(), p_), vp(z.y(), p_));
    case Kind::Ramified:
      return vp(norm(z), p_);
    case Kind::Split:
      break;
  }
  // Split: evaluate x + y*t with t = sqrt(d) in Z_p, doubling precision until decided.
  const long vy = vp(z.y(), p_).value();
  for (long k = 8;; k *= 2) {
    long kk = std::min(k, cap_);
    Rational w = z.x() + z.y() * Rational(sqrt_d_mod(kk));
    Valuation vw = vp(w, p_);
    if (vw.is_finite() && vw.value() < vy + kk) return vw;
    if (kk == cap_) {
      throw PrecisionExhausted("valuation undecided at precision cap " + std::to_string(cap_));
    }
  }
}

bool LocalField::val_at_least(const QuadElement& z, long m) const {
  if (kind_ != Kind::Split || z.is_rational()) return val(z) >= Valuation(m);
  return vp(embed(z, m), p_) >= Valuation(m);
}

Rational LocalField::embed(const QuadElement& z, long m) const {
  if (z.is_rational()) return z.x();
  if (kind_ != Kind::Split) throw DomainError("element does not lie in Q_p");
  long k = std::max(1L, m - vp(z.y(), p_).value());
  return z.x() + z.y() * Rational(sqrt_d_mod(k));
}

QuadElement LocalField::reduce(const QuadElement& z, long m) const {
  switch (kind_) {
    case Kind::Base:
    case Kind::Split:
      return QuadElement(reduce_mod_pow(embed(z, m), m, p_));
    case Kind::Unramified:
      return QuadElement(reduce_mod_pow(z.x(), m, p_), reduce_mod_pow(z.y(), m, p_), d_);
    case Kind::Ramified:
      return QuadElement(reduce_mod_pow(z.x(), ceil_div(m, 2), p_), reduce_mod_pow(z.y(), ceil_div(m - 1, 2), p_),
                         d_);
  }
  return z;
}

std::vector<QuadElement> LocalField::children(const QuadElement& center, long m) const {
  std::vector<QuadElement> out;
  switch (kind_) {
    case Kind::Base:
    case Kind::Split: {
      Rational step = rpow(p_, m);
      for (unsigned long j = 0; j < p_; ++j) out.push_back(reduce(center + QuadElement(step * j), m + 1));
      break;
    }
    case Kind::Unramified: {
      Rational step = rpow(p_, m);
      for (unsigned long i = 0; i < p_; ++i) {
        for (unsigned long j = 0; j < p_; ++j) {
          out.push_back(reduce(center + QuadElement(step * i, step * j, d_), m + 1));
        }
      }
      break;
    }
    case Kind::Ramified: {
      // pi^m = d^(m/2) or d^((m-1)/2) * sqrt(d).
      long half = floor_div(m, 2);
      Rational dpow = half >= 0 ? rpow(Rational(d_), static_cast<unsigned long>(half))
                                : Rational(1) / rpow(Rational(d_), static_cast<unsigned long>(-half));
      QuadElement pim = (m - 2 * half == 0) ? QuadElement(dpow) : QuadElement(0, dpow, d_);
      for (unsigned long j = 0; j < p_; ++j) out.push_back(reduce(center + QuadElement(Rational(j)) * pim, m + 1));
      break;
    }
  }
  return out;
}

namespace {

struct Fp2 {
  u64 a;
  u64 b;
};

Fp2 fp2_mul(Fp2 u, Fp2 v, u64 d, u64 p) {
  return {(mulmod(u.a, v.a, p) + mulmod(mulmod(u.b, v.b, p), d, p)) % p,
          (mulmod(u.a, v.b, p) + mulmod(u.b, v.a, p)) % p};
}

Fp2 fp2_pow(Fp2 u, u64 e, u64 d, u64 p) {
  Fp2 r{1, 0};
  while (e > 0) {
    if (e & 1U) r = fp2_mul(r, u, d, p);
    u = fp2_mul(u, u, d, p);
    e >>= 1U;
  }
  return r;
}

}  // namespace

unsigned long LocalField::order_mod_pi(const QuadElement& z) const {
  if (val(z) != Valuation(0)) throw DomainError("order_mod_pi needs a unit");
  if (kind_ != Kind::Unramified || z.is_rational()) {
    Rational r = (kind_ == Kind::Split) ? embed(z, 1) : z.x();
    return order_mod_prime(residue_mod_p(r, p_), p_);
  }
  const u64 p = p_;
  const u64 d = rational_mod(Rational(d_), Integer(p_)).get_ui();
  Fp2 u{residue_mod_p(z.x(), p_), residue_mod_p(z.y(), p_)};
  u64 order = p * p - 1;
  for (auto [q, e] : factor_u64(order)) {
    for (int i = 0; i < e; ++i) {
      Fp2 t = fp2_pow(u, order / q, d, p);
      if (t.a == 1 && t.b == 0) {
        order /= q;
      } else {
        break;
      }
    }
  }
  return order;
}

std::optional<int> is_deg2_root_of_unity(const QuadElement& rho) {
  if (rho.is_zero()) throw DomainError("zero is not a root of unity candidate");
  if (rho.is_rational()) {
    if (rho.x() == 1) return 1;
    if (rho.x() == -1) return 2;
    return std::nullopt;
  }
  if (norm(rho) != 1) return std::nullopt;
  Rational t = trace(rho);
  if (t == 0) return 4;
  if (t == -1) return 3;
  if (t == 1) return 6;
  return std::nullopt;
}

}  // namespace pk

// Exact scalar types: arbitrary-precision integers and rationals (GMP),
// plus complex numbers with exact rational real/imaginary parts for the
// leading coefficients c_m. Everything downstream of lattice_core assumes
// these types; doubles appear only in gamma_period.
#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace tropic {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat rat(long p, long q = 1) { Rat r(p, q); r.canonicalize(); return r; }

inline bool is_zero(const Rat& r) { return sgn(r) == 0; }
inline bool is_zero(const Int& z) { return sgn(z) == 0; }

// "p/q" or "p"; used by cli_io and fixtures. Throws on q = 0.
inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  Rat r;
  if (slash == std::string::npos) {
    r = Rat(Int(s));
  } else {
    Int p(s.substr(0, slash)), q(s.substr(slash + 1));
    if (sgn(q) == 0) throw std::invalid_argument("rational with zero denominator: " + s);
    r = Rat(p) / Rat(q);
  }
  r.canonicalize();
  return r;
}

inline std::string format_rat(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

// Complex number with exact rational parts. Only the handful of operations
// the period pipeline needs before dropping to doubles.
struct CRat {
  Rat re, im;

  CRat() = default;
  CRat(Rat r) : re(std::move(r)) {}
  CRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  bool zero() const { return is_zero(re) && is_zero(im); }

  CRat operator-() const { return {-re, -im}; }
  CRat operator+(const CRat& o) const { return {re + o.re, im + o.im}; }
  CRat operator-(const CRat& o) const { return {re - o.re, im - o.im}; }
  CRat operator*(const CRat& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  CRat operator/(const CRat& o) const {
    Rat n = o.re * o.re + o.im * o.im;
    if (is_zero(n)) throw std::domain_error("division by complex zero");
    return {(re * o.re + im * o.im) / n, (im * o.re - re * o.im) / n};
  }
  bool operator==(const CRat& o) const { return re == o.re && im == o.im; }

  std::complex<double> approx() const { return {re.get_d(), im.get_d()}; }
};

using Cplx = std::complex<double>;

// FNV-1a, for instance hashes in result envelopes.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace tropic

#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>

namespace dirichlet2d {

using Cpx = std::complex<double>;
using Rat = mpq_class;

/// Parses "num", "num/den" or a decimal like "-0.25". Throws std::domain_error
/// on malformed input or a zero denominator.
Rat rat_from_string(const std::string& text);

/// Canonical "num" / "num/den" form; round-trips through rat_from_string.
std::string rat_to_string(const Rat& q);

/// Complex scalar with exact rational real and imaginary parts.
struct RatC {
  Rat re;
  Rat im;

  RatC() : re(0), im(0) {}
  RatC(long r) : re(r), im(0) {}
  RatC(Rat r) : re(std::move(r)), im(0) {}
  RatC(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }

  /// Multiplicative inverse; throws std::domain_error on zero.
  RatC reciprocal() const;

  RatC& operator+=(const RatC& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  RatC& operator-=(const RatC& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }

  friend RatC operator+(const RatC& a, const RatC& b) { return {a.re + b.re, a.im + b.im}; }
  friend RatC operator-(const RatC& a, const RatC& b) { return {a.re - b.re, a.im - b.im}; }
  friend RatC operator-(const RatC& a) { return {-a.re, -a.im}; }
  friend RatC operator*(const RatC& a, const RatC& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const RatC& a, const RatC& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const RatC& a, const RatC& b) { return !(a == b); }
};

inline Cpx to_cpx(const RatC& q) { return {q.re.get_d(), q.im.get_d()}; }

/// |q| as a double (exact for real q up to rounding of the quotient itself).
double abs_to_double(const RatC& q);

/// |q| for real q, exact. Throws std::domain_error when q has an imaginary part.
Rat abs_exact_real(const RatC& q);

std::string ratc_to_string(const RatC& q);

}  // namespace dirichlet2d

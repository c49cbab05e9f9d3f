#include "dirichlet2d/scalar.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace dirichlet2d {

namespace {

// Decimal literals with a fractional part are converted exactly:
// "-0.25" -> -25/100 canonicalized.
Rat rat_from_decimal(const std::string& text, std::size_t dot) {
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  std::size_t frac_len = text.size() - dot - 1;
  if (frac_len == 0 || digits.empty()) throw std::domain_error("malformed rational: " + text);
  mpz_class num;
  if (mpz_set_str(num.get_mpz_t(), digits.c_str(), 10) != 0)
    throw std::domain_error("malformed rational: " + text);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
  Rat q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace

Rat rat_from_string(const std::string& text) {
  if (text.empty()) throw std::domain_error("empty rational literal");
  if (std::size_t dot = text.find('.'); dot != std::string::npos) {
    if (text.find('/') != std::string::npos || text.find('.', dot + 1) != std::string::npos)
      throw std::domain_error("malformed rational: " + text);
    return rat_from_decimal(text, dot);
  }
  Rat q;
  if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0)
    throw std::domain_error("malformed rational: " + text);
  if (sgn(Rat(q.get_den())) == 0) throw std::domain_error("zero denominator in rational: " + text);
  q.canonicalize();
  return q;
}

std::string rat_to_string(const Rat& q) { return q.get_str(); }

RatC RatC::reciprocal() const {
  if (is_zero()) throw std::domain_error("reciprocal of zero");
  Rat d = re * re + im * im;
  return {re / d, -im / d};
}

double abs_to_double(const RatC& q) {
  if (sgn(q.im) == 0) return std::abs(q.re.get_d());
  if (sgn(q.re) == 0) return std::abs(q.im.get_d());
  return std::hypot(q.re.get_d(), q.im.get_d());
}

Rat abs_exact_real(const RatC& q) {
  if (sgn(q.im) != 0) throw std::domain_error("abs_exact_real: value has an imaginary part");
  return sgn(q.re) < 0 ? Rat(-q.re) : q.re;
}

std::string ratc_to_string(const RatC& q) {
  if (sgn(q.im) == 0) return rat_to_string(q.re);
  return rat_to_string(q.re) + (sgn(q.im) < 0 ? "-" : "+") + rat_to_string(Rat(abs(q.im))) + "i";
}

}  // namespace dirichlet2d

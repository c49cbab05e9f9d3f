#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirichlet2d/lattice.hpp"
#include "dirichlet2d/scalar.hpp"
#include "dirichlet2d/weights.hpp"

namespace dirichlet2d {

struct NotAUnitError : std::domain_error {
  explicit NotAUnitError(const std::string& msg) : std::domain_error(msg) {}
};

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<RatC> {
  static constexpr bool exact = true;
  static RatC zero() { return {}; }
  static RatC one() { return RatC(1); }
  static bool is_zero(const RatC& v) { return v.is_zero(); }
  static RatC reciprocal(const RatC& v) { return v.reciprocal(); }
  static double abs(const RatC& v) { return abs_to_double(v); }
  static Cpx to_complex(const RatC& v) { return to_cpx(v); }
  static std::string to_string(const RatC& v) { return ratc_to_string(v); }
};

template <>
struct ScalarOps<Cpx> {
  static constexpr bool exact = false;
  // Magnitudes below this are treated as stored zeros and pruned.
  static constexpr double kZeroThreshold = 1e-300;
  static Cpx zero() { return {0.0, 0.0}; }
  static Cpx one() { return {1.0, 0.0}; }
  static bool is_zero(const Cpx& v) {
    return std::abs(v.real()) < kZeroThreshold && std::abs(v.imag()) < kZeroThreshold;
  }
  static Cpx reciprocal(const Cpx& v) {
    if (is_zero(v)) throw std::domain_error("reciprocal of zero");
    return 1.0 / v;
  }
  static double abs(const Cpx& v) { return std::abs(v); }
  static Cpx to_complex(const Cpx& v) { return v; }
  static std::string to_string(const Cpx& v);
};

/// Finitely supported coefficient table of a two-variable Dirichlet series.
/// Entries are kept in lexicographic index order; stored zeros are pruned.
template <class S>
class Series {
 public:
  using Ops = ScalarOps<S>;
  using Map = std::map<Index2, S>;

  Series() = default;
  explicit Series(Map entries) : entries_(std::move(entries)) {
    std::erase_if(entries_, [](const auto& kv) { return Ops::is_zero(kv.second); });
  }

  static Series basis(std::uint64_t m, std::uint64_t n) {
    if (m == 0 || n == 0) throw std::domain_error("basis indices must be >= 1");
    Series s;
    s.entries_[{m, n}] = Ops::one();
    return s;
  }
  static Series identity() { return basis(1, 1); }

  const Map& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  S at(std::uint64_t m, std::uint64_t n) const {
    auto it = entries_.find({m, n});
    return it == entries_.end() ? Ops::zero() : it->second;
  }
  const S* find(Index2 idx) const {
    auto it = entries_.find(idx);
    return it == entries_.end() ? nullptr : &it->second;
  }

  void set(std::uint64_t m, std::uint64_t n, S value) {
    if (m == 0 || n == 0) throw std::domain_error("indices must be >= 1");
    if (Ops::is_zero(value))
      entries_.erase({m, n});
    else
      entries_[{m, n}] = std::move(value);
  }

  void accumulate(Index2 idx, const S& value) {
    auto [it, inserted] = entries_.try_emplace(idx, value);
    if (!inserted) {
      it->second += value;
      if (Ops::is_zero(it->second)) entries_.erase(it);
    }
  }

  friend bool operator==(const Series& a, const Series& b) { return a.entries_ == b.entries_; }

  friend Series operator+(const Series& a, const Series& b) {
    Series out = a;
    for (const auto& [idx, v] : b.entries_) out.accumulate(idx, v);
    return out;
  }
  friend Series operator-(const Series& a, const Series& b) {
    Series out = a;
    for (const auto& [idx, v] : b.entries_) out.accumulate(idx, -v);
    return out;
  }

  Series scaled(const S& factor) const {
    Series out;
    if (Ops::is_zero(factor)) return out;
    for (const auto& [idx, v] : entries_) {
      S w = v * factor;
      if (!Ops::is_zero(w)) out.entries_[idx] = std::move(w);
    }
    return out;
  }

 private:
  Map entries_;
};

using SeriesQ = Series<RatC>;
using SeriesD = Series<Cpx>;

SeriesD to_float(const SeriesQ& a);

template <class S>
Series<S> convolve(const Series<S>& a, const Series<S>& b) {
  Series<S> out;
  for (const auto& [ia, va] : a.entries()) {
    for (const auto& [ib, vb] : b.entries()) {
      Index2 idx{checked_mul(ia.m, ib.m), checked_mul(ia.n, ib.n)};
      out.accumulate(idx, va * vb);
    }
  }
  return out;
}

template <class S>
Series<S> convolve_truncated(const Series<S>& a, const Series<S>& b, const BoxSpec& box) {
  Series<S> out;
  for (const auto& [ia, va] : a.entries()) {
    for (const auto& [ib, vb] : b.entries()) {
      auto idx = try_mul(ia, ib);
      if (!idx || !box.contains(*idx)) continue;
      out.accumulate(*idx, va * vb);
    }
  }
  return out;
}

template <class S>
Series<S> truncated(const Series<S>& a, const BoxSpec& box) {
  typename Series<S>::Map kept;
  for (const auto& [idx, v] : a.entries())
    if (box.contains(idx)) kept.emplace(idx, v);
  return Series<S>(std::move(kept));
}

/// Support of the formal inverse restricted to `box`: the multiplicative
/// closure of the support of `a` within the box, in order of increasing
/// number of prime factors (then lexicographic). Oversized closures throw.
std::vector<Index2> inverse_support_order(const std::vector<Index2>& generators, const BoxSpec& box,
                                          std::size_t support_limit);

/// Formal convolution inverse on a divisor-closed box. The recursion walks
/// the divisor lattice bottom-up, so convolve(a, result) equals the identity
/// table exactly on the box (bit-exact in rational mode).
template <class S>
Series<S> invert_formal(const Series<S>& a, const BoxSpec& box,
                        std::size_t support_limit = 4000000) {
  using Ops = ScalarOps<S>;
  const S a11 = a.at(1, 1);
  if (Ops::is_zero(a11))
    throw NotAUnitError("invert_formal: not a unit, the coefficient at (1,1) is zero");
  const S inv11 = Ops::reciprocal(a11);

  std::vector<Index2> generators;
  for (const auto& [idx, v] : a.entries())
    if (!(idx == Index2{1, 1}) && box.contains(idx)) generators.push_back(idx);

  Series<S> out;
  out.set(1, 1, inv11);
  for (Index2 target : inverse_support_order(generators, box, support_limit)) {
    if (target == Index2{1, 1}) continue;
    S acc = Ops::zero();
    for (Index2 d : divisors2(target.m, target.n)) {
      if (d == Index2{1, 1}) continue;
      const S* av = a.find(d);
      if (!av) continue;
      const S* bv = out.find({target.m / d.m, target.n / d.n});
      if (!bv) continue;
      acc += (*av) * (*bv);
    }
    S value = -(inv11 * acc);
    if (!Ops::is_zero(value)) out.set(target.m, target.n, std::move(value));
  }
  return out;
}

/// Point of the closed right half-plane squared.
struct EvalPoint {
  Cpx s1;
  Cpx s2;
  EvalPoint(Cpx first, Cpx second) : s1(first), s2(second) {
    if (s1.real() < 0.0 || s2.real() < 0.0)
      throw std::domain_error("evaluation point lies outside the closed right half-plane");
  }
};

Cpx evaluate(const SeriesD& a, const EvalPoint& pt);
Cpx evaluate(const SeriesQ& a, const EvalPoint& pt);

struct PNormParams {
  double p = 1.0;
  Weight weight = Weight::constant(1.0);
  PNormParams() = default;
  PNormParams(double p_, Weight w) : p(p_), weight(std::move(w)) {
    if (!(p > 0.0) || p > 1.0) throw std::domain_error("p-norm exponent must lie in (0, 1]");
  }
};

template <class S>
double weighted_p_norm(const Series<S>& a, const PNormParams& params) {
  double sum = 0.0;
  for (const auto& [idx, v] : a.entries()) {
    double mod = ScalarOps<S>::abs(v);
    double powed = params.p == 1.0 ? mod : std::pow(mod, params.p);
    sum += powed * params.weight(idx.m, idx.n);
  }
  return sum;
}

/// Exact l^1(omega) norm for tables with real rational entries and a weight
/// that evaluates exactly. Throws std::domain_error otherwise.
Rat weighted_l1_norm_exact(const SeriesQ& a, const Weight& w);

template <class S>
double l1_norm(const Series<S>& a) {
  double sum = 0.0;
  for (const auto& [idx, v] : a.entries()) sum += ScalarOps<S>::abs(v);
  return sum;
}

template <class S>
double max_abs_diff(const Series<S>& a, const Series<S>& b) {
  double worst = 0.0;
  for (const auto& [idx, v] : a.entries())
    worst = std::max(worst, ScalarOps<S>::abs(v - b.at(idx.m, idx.n)));
  for (const auto& [idx, v] : b.entries())
    if (!a.find(idx)) worst = std::max(worst, ScalarOps<S>::abs(v));
  return worst;
}

template <class S>
struct NeumannResult {
  Series<S> inverse;
  std::size_t terms_used = 0;
  double final_increment = 0.0;
};

/// Geometric-series inverse (1/a11) * sum_k (delta - a/a11)^k truncated to the
/// box. Requires the l^1 mass of delta - a/a11 on the box to be below 1.
template <class S>
NeumannResult<S> neumann_inverse(const Series<S>& a, const BoxSpec& box, double tol = 1e-12,
                                 std::size_t max_terms = 4096) {
  using Ops = ScalarOps<S>;
  const S a11 = a.at(1, 1);
  if (Ops::is_zero(a11))
    throw NotAUnitError("neumann_inverse: not a unit, the coefficient at (1,1) is zero");
  const S inv11 = Ops::reciprocal(a11);
  Series<S> defect = Series<S>::identity() - truncated(a, box).scaled(inv11);
  double contraction = l1_norm(defect);
  if (contraction >= 1.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", contraction);
    throw std::domain_error(
        std::string("neumann_inverse: not contractive, ||delta - a/a(1,1)||_1 = ") + buf);
  }
  NeumannResult<S> result;
  Series<S> term = Series<S>::identity();
  Series<S> sum = term;
  result.terms_used = 1;
  result.final_increment = contraction;
  while (result.terms_used < max_terms) {
    term = convolve_truncated(term, defect, box);
    double inc = l1_norm(term);
    if (term.empty()) {
      result.final_increment = 0.0;
      break;
    }
    sum = sum + term;
    ++result.terms_used;
    result.final_increment = inc;
    if (inc <= tol) break;
  }
  result.inverse = sum.scaled(inv11);
  return result;
}

}  // namespace dirichlet2d

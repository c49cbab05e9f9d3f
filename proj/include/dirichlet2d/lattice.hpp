#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dirichlet2d {

/// One prime-power factor. prime_index is 1-based into the increasing prime
/// sequence (index 1 is 2, index 2 is 3, ...).
struct PrimeFactor {
  std::uint64_t prime_index = 0;
  std::uint64_t exponent = 0;
  friend bool operator==(const PrimeFactor&, const PrimeFactor&) = default;
};

/// Prime indices strictly increasing, exponents >= 1; empty represents 1.
using Factorization = std::vector<PrimeFactor>;

/// Point of N^2 under componentwise multiplication.
struct Index2 {
  std::uint64_t m = 1;
  std::uint64_t n = 1;
  friend auto operator<=>(const Index2&, const Index2&) = default;
};

/// 1-based prime lookup; the sieve grows on demand up to an internal cap.
std::uint64_t nth_prime(std::uint64_t index);

/// Inverse of nth_prime. Throws std::domain_error if p is not prime or lies
/// beyond the sieve cap.
std::uint64_t prime_index_of(std::uint64_t p);

/// Unique factorization. Throws std::domain_error for n == 0 and for inputs
/// whose prime factors cannot be indexed at desk scale.
Factorization factorize(std::uint64_t n);

/// Product of the factorization; throws std::overflow_error past 2^64.
std::uint64_t unfactorize(const Factorization& f);

std::uint64_t big_omega(std::uint64_t n);
std::uint64_t big_omega(const Factorization& f);

/// Divisors of n in ascending order.
std::vector<std::uint64_t> divisors(std::uint64_t n);

/// All (u, v) with u|m and v|n, in lexicographic order.
std::vector<Index2> divisors2(std::uint64_t m, std::uint64_t n);

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);
std::optional<Index2> try_mul(Index2 a, Index2 b);

std::string index2_to_string(Index2 i);

/// Divisor-closed truncation set: either the square {1..M} x {1..M}, kept
/// implicit, or an explicit set closed under componentwise divisors.
/// Explicit inputs are closed automatically and the added pairs are recorded.
class BoxSpec {
 public:
  static BoxSpec square(std::uint64_t bound);
  static BoxSpec explicit_set(std::vector<Index2> members);

  bool is_square() const { return bound_ != 0; }
  std::uint64_t bound() const { return bound_; }
  bool contains(std::uint64_t m, std::uint64_t n) const;
  bool contains(Index2 i) const { return contains(i.m, i.n); }

  /// Number of members; saturates at UINT64_MAX for oversized squares.
  std::uint64_t member_count() const;

  /// Members in lexicographic order. Throws std::length_error when a square
  /// box would materialize more than `limit` pairs.
  std::vector<Index2> enumerate(std::uint64_t limit = (1u << 22)) const;

  /// Pairs added by divisor closure (explicit sets only).
  const std::vector<Index2>& closure_added() const { return added_; }

  std::string describe() const;

 private:
  BoxSpec() = default;
  std::uint64_t bound_ = 0;       // nonzero for square boxes
  std::vector<Index2> members_;   // sorted, explicit boxes only
  std::vector<Index2> added_;
};

}  // namespace dirichlet2d

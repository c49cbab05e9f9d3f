#include "dirichlet2d/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>

namespace dirichlet2d {

namespace {

// The sieve is grown under a mutex and published via an atomic shared_ptr;
// readers never block once a snapshot covers their request.
constexpr std::uint64_t kInitialSieve = 1u << 17;
constexpr std::uint64_t kMaxSieve = 1u << 24;

struct PrimeCache {
  std::uint64_t limit = 0;
  std::vector<std::uint32_t> primes;
};

std::shared_ptr<const PrimeCache> sieve_up_to(std::uint64_t limit) {
  auto cache = std::make_shared<PrimeCache>();
  cache->limit = limit;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    cache->primes.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return cache;
}

std::shared_ptr<const PrimeCache>& cache_slot() {
  static std::shared_ptr<const PrimeCache> slot = sieve_up_to(kInitialSieve);
  return slot;
}

std::shared_ptr<const PrimeCache> load_cache() { return std::atomic_load(&cache_slot()); }

std::shared_ptr<const PrimeCache> cache_with(std::uint64_t needed_limit, std::uint64_t needed_count) {
  auto current = load_cache();
  if (current->limit >= needed_limit && current->primes.size() >= needed_count) return current;
  static std::mutex grow_mutex;
  std::lock_guard<std::mutex> lock(grow_mutex);
  current = load_cache();
  while (current->limit < needed_limit || current->primes.size() < needed_count) {
    if (current->limit >= kMaxSieve)
      throw std::domain_error("prime sieve cap exceeded (primes beyond 2^24 are not indexable here)");
    std::uint64_t next = std::min<std::uint64_t>(kMaxSieve, current->limit * 8);
    if (needed_limit > next && needed_limit <= kMaxSieve) next = needed_limit;
    auto grown = sieve_up_to(next);
    std::atomic_store(&cache_slot(), std::shared_ptr<const PrimeCache>(grown));
    current = grown;
  }
  return current;
}

}  // namespace

std::uint64_t nth_prime(std::uint64_t index) {
  if (index == 0) throw std::domain_error("prime indices are 1-based");
  auto cache = load_cache();
  if (cache->primes.size() < index) cache = cache_with(0, index);
  return cache->primes[index - 1];
}

std::uint64_t prime_index_of(std::uint64_t p) {
  if (p < 2) throw std::domain_error("not a prime: " + std::to_string(p));
  if (p > kMaxSieve)
    throw std::domain_error("prime factor " + std::to_string(p) +
                            " exceeds the indexable range (max 2^24)");
  auto cache = cache_with(p, 0);
  auto it = std::lower_bound(cache->primes.begin(), cache->primes.end(), p);
  if (it == cache->primes.end() || *it != p)
    throw std::domain_error("not a prime: " + std::to_string(p));
  return static_cast<std::uint64_t>(it - cache->primes.begin()) + 1;
}

Factorization factorize(std::uint64_t n) {
  if (n == 0) throw std::domain_error("factorize: argument must be a positive integer");
  Factorization out;
  std::uint64_t rem = n;
  for (std::uint64_t i = 1; rem > 1; ++i) {
    std::uint64_t p = nth_prime(i);
    if (p * p > rem) break;
    if (rem % p == 0) {
      std::uint64_t e = 0;
      while (rem % p == 0) {
        rem /= p;
        ++e;
      }
      out.push_back({i, e});
    }
  }
  if (rem > 1) {
    // No factor up to sqrt(rem), so rem is prime; indexing may still fail
    // for primes beyond the sieve cap.
    std::uint64_t idx = prime_index_of(rem);
    out.push_back({idx, 1});
  }
  return out;
}

std::uint64_t unfactorize(const Factorization& f) {
  std::uint64_t value = 1;
  for (const auto& pf : f) {
    std::uint64_t p = nth_prime(pf.prime_index);
    for (std::uint64_t e = 0; e < pf.exponent; ++e) value = checked_mul(value, p);
  }
  return value;
}

std::uint64_t big_omega(const Factorization& f) {
  std::uint64_t total = 0;
  for (const auto& pf : f) total += pf.exponent;
  return total;
}

std::uint64_t big_omega(std::uint64_t n) { return big_omega(factorize(n)); }

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  Factorization f = factorize(n);
  std::vector<std::uint64_t> out{1};
  for (const auto& pf : f) {
    std::uint64_t p = nth_prime(pf.prime_index);
    std::size_t base = out.size();
    std::uint64_t power = 1;
    for (std::uint64_t e = 1; e <= pf.exponent; ++e) {
      power *= p;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * power);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Index2> divisors2(std::uint64_t m, std::uint64_t n) {
  if (m == 0 || n == 0) throw std::domain_error("divisors2: indices must be positive");
  std::vector<std::uint64_t> dm = divisors(m);
  std::vector<std::uint64_t> dn = divisors(n);
  std::vector<Index2> out;
  out.reserve(dm.size() * dn.size());
  for (std::uint64_t u : dm)
    for (std::uint64_t v : dn) out.push_back({u, v});
  return out;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("index product exceeds 2^64");
  return r;
}

std::optional<Index2> try_mul(Index2 a, Index2 b) {
  std::uint64_t m, n;
  if (__builtin_mul_overflow(a.m, b.m, &m)) return std::nullopt;
  if (__builtin_mul_overflow(a.n, b.n, &n)) return std::nullopt;
  return Index2{m, n};
}

std::string index2_to_string(Index2 i) {
  return "(" + std::to_string(i.m) + "," + std::to_string(i.n) + ")";
}

BoxSpec BoxSpec::square(std::uint64_t bound) {
  if (bound == 0) throw std::domain_error("box bound must be >= 1");
  BoxSpec box;
  box.bound_ = bound;
  return box;
}

BoxSpec BoxSpec::explicit_set(std::vector<Index2> members) {
  if (members.empty()) throw std::domain_error("explicit box must be nonempty");
  std::set<Index2> closed;
  for (Index2 i : members) {
    if (i.m == 0 || i.n == 0) throw std::domain_error("box members must have positive coordinates");
    closed.insert(i);
  }
  std::vector<Index2> work(closed.begin(), closed.end());
  for (std::size_t k = 0; k < work.size(); ++k) {
    for (Index2 d : divisors2(work[k].m, work[k].n)) {
      if (closed.insert(d).second) work.push_back(d);
    }
  }
  BoxSpec box;
  std::set<Index2> original(members.begin(), members.end());
  for (Index2 i : closed) {
    box.members_.push_back(i);
    if (!original.count(i)) box.added_.push_back(i);
  }
  return box;
}

bool BoxSpec::contains(std::uint64_t m, std::uint64_t n) const {
  if (m == 0 || n == 0) return false;
  if (is_square()) return m <= bound_ && n <= bound_;
  return std::binary_search(members_.begin(), members_.end(), Index2{m, n});
}

std::uint64_t BoxSpec::member_count() const {
  if (!is_square()) return members_.size();
  std::uint64_t r;
  if (__builtin_mul_overflow(bound_, bound_, &r)) return UINT64_MAX;
  return r;
}

std::vector<Index2> BoxSpec::enumerate(std::uint64_t limit) const {
  if (!is_square()) return members_;
  if (member_count() > limit)
    throw std::length_error("square box " + std::to_string(bound_) + " is too large to enumerate");
  std::vector<Index2> out;
  out.reserve(bound_ * bound_);
  for (std::uint64_t m = 1; m <= bound_; ++m)
    for (std::uint64_t n = 1; n <= bound_; ++n) out.push_back({m, n});
  return out;
}

std::string BoxSpec::describe() const {
  if (is_square()) return "square:" + std::to_string(bound_);
  return "explicit:" + std::to_string(members_.size()) + "-members";
}

}  // namespace dirichlet2d

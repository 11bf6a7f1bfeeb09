#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace tricorr::arith {

// Smallest-prime-factor table for 0..limit (spf[0] = spf[1] = 0).
class FactorSieve {
 public:
  explicit FactorSieve(std::uint64_t limit);

  std::uint64_t limit() const noexcept { return spf_.size() - 1; }
  std::uint32_t smallest_prime_factor(std::uint64_t n) const { return spf_.at(n); }
  bool is_prime(std::uint64_t n) const { return n >= 2 && spf_.at(n) == n; }

  // (prime, exponent) pairs in increasing prime order.
  std::vector<std::pair<std::uint64_t, unsigned>> factor(std::uint64_t n) const;
  std::uint64_t divisor_count(std::uint64_t n) const;

 private:
  std::vector<std::uint32_t> spf_;
};

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);
std::uint64_t divisor_count(std::uint64_t n);
bool is_square(std::uint64_t n);
std::uint64_t isqrt(std::uint64_t n);
// t squarefree with n = t * s^2.
std::uint64_t squarefree_part(std::uint64_t n);
bool is_squarefree(std::uint64_t n);

// sup_{n>=1} d(n) / n^eps, attained on a highly composite number. Computed as
// the Euler product of max_e (e+1) p^{-e eps}, which is exact because the
// maximisation separates over primes.
double divisor_bound_constant(double eps);

// Sum_{n<=limit} sigma_power(n) for every n: sigma_k(n) = sum_{d|n} d^k as
// 128-bit integers. Valid while n^k * zeta(k) < 2^127.
std::vector<unsigned __int128> divisor_power_sums(std::uint64_t limit, unsigned power);

}  // namespace tricorr::arith

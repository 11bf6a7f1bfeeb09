#include "tricorr/arith.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tricorr::arith {

FactorSieve::FactorSieve(std::uint64_t limit) : spf_(limit + 1, 0) {
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf_[i] != 0) continue;
    for (std::uint64_t j = i; j <= limit; j += i) {
      if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
    }
  }
}

std::vector<std::pair<std::uint64_t, unsigned>> FactorSieve::factor(std::uint64_t n) const {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  while (n > 1) {
    const std::uint64_t p = spf_.at(n);
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  return out;
}

std::uint64_t FactorSieve::divisor_count(std::uint64_t n) const {
  std::uint64_t d = 1;
  for (auto [p, e] : factor(n)) d *= e + 1;
  return d;
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

std::uint64_t divisor_count(std::uint64_t n) {
  std::uint64_t d = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    d *= e + 1;
  }
  if (n > 1) d *= 2;
  return d;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_square(std::uint64_t n) {
  const auto r = isqrt(n);
  return r * r == n;
}

std::uint64_t squarefree_part(std::uint64_t n) {
  if (n == 0) return 0;
  std::uint64_t t = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e % 2 == 1) t *= p;
  }
  return t * n;
}

bool is_squarefree(std::uint64_t n) { return n != 0 && squarefree_part(n) == n; }

double divisor_bound_constant(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("divisor_bound_constant: eps must be positive");
  // Primes with p^eps >= 2 contribute a factor 1 (e = 0 is optimal), so the
  // product runs over p < 2^{1/eps}.
  const double p_limit = std::pow(2.0, 1.0 / eps);
  double c = 1.0;
  for (std::uint64_t p = 2; static_cast<double>(p) < p_limit; ++p) {
    bool prime = true;
    for (std::uint64_t q = 2; q * q <= p; ++q) {
      if (p % q == 0) {
        prime = false;
        break;
      }
    }
    if (!prime) continue;
    double best = 1.0;
    const double step = std::pow(static_cast<double>(p), -eps);
    double pw = 1.0;
    for (unsigned e = 1; e < 4096; ++e) {
      pw *= step;
      const double v = (e + 1) * pw;
      if (v > best) best = v;
      if (v < best * 0.5) break;
    }
    c *= best;
  }
  // Round up by a few ulps of slack; this is used as a rigorous majorant.
  return c * (1.0 + 1e-12);
}

std::vector<unsigned __int128> divisor_power_sums(std::uint64_t limit, unsigned power) {
  std::vector<unsigned __int128> sigma(limit + 1, 0);
  for (std::uint64_t d = 1; d <= limit; ++d) {
    unsigned __int128 dk = 1;
    for (unsigned i = 0; i < power; ++i) dk *= d;
    for (std::uint64_t m = d; m <= limit; m += d) sigma[m] += dk;
  }
  return sigma;
}

}  // namespace tricorr::arith

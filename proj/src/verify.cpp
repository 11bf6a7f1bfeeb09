#include "tricorr/verify.hpp"

#include <algorithm>
#include <sstream>

#include "tricorr/arith.hpp"
#include "tricorr/error.hpp"

namespace tricorr {

const char* to_string(HeckeCheck c) {
  switch (c) {
    case HeckeCheck::normalization: return "normalization";
    case HeckeCheck::multiplicativity: return "multiplicativity";
    case HeckeCheck::prime_power: return "prime_power_recursion";
    case HeckeCheck::deligne: return "deligne_bound";
  }
  return "unknown";
}

std::uint64_t ValidationReport::count(HeckeCheck c) const {
  std::uint64_t k = 0;
  for (const auto& f : failures)
    if (f.check == c) ++k;
  return k;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << (pass() ? "pass" : "FAIL") << ": n_limit=" << n_limit << " multiplicativity=" << multiplicativity_checked
     << " prime_power=" << prime_power_checked << " deligne=" << deligne_checked << " failures=" << failure_count;
  if (!failures.empty()) {
    const auto& f = failures.front();
    os << " (first: n=" << f.n << " " << to_string(f.check) << ": " << f.detail << ")";
  }
  return os.str();
}

ValidationReport verify_form(const HeckeEigenform& f, std::uint64_t n_limit, std::size_t max_recorded) {
  if (n_limit > f.n_max()) {
    throw CoverageError("verify_form: n_limit " + std::to_string(n_limit) + " exceeds form n_max " +
                            std::to_string(f.n_max()),
                        n_limit);
  }
  ValidationReport rep;
  rep.n_limit = n_limit;
  const auto q = f.q_expansion();
  const std::uint64_t level = f.level();
  const unsigned km1 = static_cast<unsigned>(f.weight() - 1);

  auto fail = [&](std::uint64_t n, HeckeCheck c, std::string detail) {
    ++rep.failure_count;
    if (rep.failures.size() < max_recorded) rep.failures.push_back({n, c, std::move(detail)});
  };

  if (n_limit == 0) return rep;
  if (q[1] != 1) fail(1, HeckeCheck::normalization, "a(1) = " + q[1].get_str() + ", expected 1");

  const arith::FactorSieve sieve(n_limit);
  mpz_class lhs, rhs, pk;
  for (std::uint64_t n = 2; n <= n_limit; ++n) {
    if (arith::gcd(n, level) != 1) continue;
    const std::uint64_t p = sieve.smallest_prime_factor(n);
    std::uint64_t pe = 1;
    unsigned e = 0;
    for (std::uint64_t r = n; r % p == 0; r /= p) {
      pe *= p;
      ++e;
    }
    if (pe != n) {
      ++rep.multiplicativity_checked;
      mpz_mul(rhs.get_mpz_t(), q[pe].get_mpz_t(), q[n / pe].get_mpz_t());
      if (q[n] != rhs) {
        fail(n, HeckeCheck::multiplicativity,
             "a(" + std::to_string(n) + ") = " + q[n].get_str() + " but a(" + std::to_string(pe) + ")a(" +
                 std::to_string(n / pe) + ") = " + rhs.get_str());
      }
    } else if (e >= 2) {
      ++rep.prime_power_checked;
      // a(p^e) = a(p) a(p^{e-1}) - p^{k-1} a(p^{e-2})
      const std::uint64_t prev = n / p;
      const std::uint64_t prev2 = prev / p;
      mpz_ui_pow_ui(pk.get_mpz_t(), p, km1);
      mpz_mul(rhs.get_mpz_t(), q[p].get_mpz_t(), q[prev].get_mpz_t());
      mpz_submul(rhs.get_mpz_t(), pk.get_mpz_t(), q[prev2].get_mpz_t());
      if (q[n] != rhs) {
        fail(n, HeckeCheck::prime_power,
             "a(" + std::to_string(n) + ") = " + q[n].get_str() + ", recursion gives " + rhs.get_str());
      }
    }
  }

  for (std::uint64_t n = 1; n <= n_limit; ++n) {
    if (arith::gcd(n, level) != 1) continue;
    ++rep.deligne_checked;
    const std::uint64_t d = n == 1 ? 1 : sieve.divisor_count(n);
    // a(n)^2 <= d(n)^2 n^{k-1}
    mpz_mul(lhs.get_mpz_t(), q[n].get_mpz_t(), q[n].get_mpz_t());
    mpz_ui_pow_ui(rhs.get_mpz_t(), n, km1);
    mpz_mul_ui(rhs.get_mpz_t(), rhs.get_mpz_t(), d * d);
    if (lhs > rhs) {
      fail(n, HeckeCheck::deligne, "|a(" + std::to_string(n) + ")| = " + mpz_class(abs(q[n])).get_str() + " exceeds d(n) n^((k-1)/2)");
    }
  }
  std::sort(rep.failures.begin(), rep.failures.end(), [](const auto& x, const auto& y) { return x.n < y.n; });
  return rep;
}

}  // namespace tricorr

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tricorr/forms.hpp"

namespace tricorr {

enum class HeckeCheck { normalization, multiplicativity, prime_power, deligne };
const char* to_string(HeckeCheck c);

struct ValidationReport {
  struct Failure {
    std::uint64_t n;
    HeckeCheck check;
    std::string detail;
  };

  std::uint64_t n_limit = 0;
  std::uint64_t multiplicativity_checked = 0;
  std::uint64_t prime_power_checked = 0;
  std::uint64_t deligne_checked = 0;
  std::uint64_t failure_count = 0;
  // At most max_recorded failures are stored, in increasing n.
  std::vector<Failure> failures;

  bool pass() const { return failure_count == 0; }
  std::uint64_t count(HeckeCheck c) const;
  std::string summary() const;
};

// Exact-integer checks on every n <= n_limit coprime to the level:
//  - a(1) = 1
//  - a(n) = a(p^e) a(n / p^e) for the smallest prime p | n when n is not a
//    prime power (this covers every coprime factorisation by induction)
//  - a(p^{r+1}) = a(p) a(p^r) - p^{k-1} a(p^{r-1})
//  - a(n)^2 <= d(n)^2 n^{k-1}
ValidationReport verify_form(const HeckeEigenform& f, std::uint64_t n_limit, std::size_t max_recorded = 100);

}  // namespace tricorr

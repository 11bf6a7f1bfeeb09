#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tricorr {

// Truncated q-series with exact integer coefficients c(0)..c(n_max).
// Products are truncated at the smaller of the two orders, so (f*g) mod
// q^{n+1} depends only on f and g mod q^{n+1}.
class PowerSeries {
 public:
  PowerSeries() = default;
  explicit PowerSeries(std::vector<mpz_class> coeffs);
  static PowerSeries zero(std::size_t n_max);
  static PowerSeries one(std::size_t n_max);

  std::size_t n_max() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  const mpz_class& operator[](std::size_t i) const { return coeffs_.at(i); }
  const std::vector<mpz_class>& coeffs() const { return coeffs_; }
  std::vector<mpz_class> release() && { return std::move(coeffs_); }

  PowerSeries truncated(std::size_t n_max) const;
  // Multiplies by q^s, keeping the truncation order.
  PowerSeries shifted(std::size_t s) const;

  std::size_t nonzero_count() const;

  PowerSeries& operator+=(const PowerSeries& o);
  friend PowerSeries operator+(PowerSeries a, const PowerSeries& b) { return a += b; }
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);
  friend bool operator==(const PowerSeries& a, const PowerSeries& b) = default;

  PowerSeries pow(unsigned exponent) const;

 private:
  std::vector<mpz_class> coeffs_;
};

namespace series_detail {
// Exposed for tests: the individual product strategies. All return the
// product truncated at n_max.
std::vector<mpz_class> mul_schoolbook(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                                      std::size_t n_max);
std::vector<mpz_class> mul_sparse(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                                  std::size_t n_max);
// Kronecker substitution: pack both series into one big integer each,
// multiply with GMP, unpack balanced digits.
std::vector<mpz_class> mul_kronecker(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                                     std::size_t n_max);
}  // namespace series_detail

// prod_{n>=1} (1 - q^n) from Euler's pentagonal number theorem.
PowerSeries euler_product(std::size_t n_max);
// prod_{n>=1} (1 - q^n)^3 from Jacobi's identity sum (-1)^k (2k+1) q^{k(k+1)/2}.
PowerSeries euler_product_cubed(std::size_t n_max);

}  // namespace tricorr

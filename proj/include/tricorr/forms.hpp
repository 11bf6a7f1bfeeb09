#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tricorr/power_series.hpp"

namespace tricorr {

enum class FormSource { generated, file, remote };
const char* to_string(FormSource s);

// Normalised holomorphic Hecke eigenform given by its exact q-expansion
// coefficients a(1)..a(n_max). Immutable after construction.
class HeckeEigenform {
 public:
  HeckeEigenform(int weight, std::uint64_t level, std::string label, std::vector<mpz_class> coeffs,
                 FormSource source);

  int weight() const { return weight_; }
  std::uint64_t level() const { return level_; }
  const std::string& label() const { return label_; }
  FormSource source() const { return source_; }
  std::uint64_t n_max() const { return q_.size() - 1; }

  // a(n) for 1 <= n <= n_max.
  const mpz_class& a(std::uint64_t n) const;
  // Coefficients of q^0..q^{n_max}; entry 0 is the (zero) constant term.
  std::span<const mpz_class> q_expansion() const { return q_; }

  HeckeEigenform truncated(std::uint64_t n_max) const;
  friend bool operator==(const HeckeEigenform& x, const HeckeEigenform& y) {
    return x.weight_ == y.weight_ && x.level_ == y.level_ && x.q_ == y.q_;
  }

 private:
  int weight_;
  std::uint64_t level_;
  std::string label_;
  std::vector<mpz_class> q_;
  FormSource source_;
};

// theta(z) = sum_{n in Z} q^{n^2}: r1(0) = 1, r1(n) = 2 on positive squares.
class ThetaSeries {
 public:
  explicit ThetaSeries(std::uint64_t n_max);
  std::uint64_t n_max() const { return q_.size() - 1; }
  int r1(std::uint64_t n) const { return static_cast<int>(q_.at(n).get_si()); }
  std::span<const mpz_class> q_expansion() const { return q_; }

 private:
  std::vector<mpz_class> q_;
};

// Upper bound |c(n)| <= constant * n^exponent valid for all n >= 1.
struct Majorant {
  double constant = 1.0;
  double exponent = 0.0;
};

// Read-only view consumed by the correlation and Dirichlet-series code.
struct CoefficientView {
  std::span<const mpz_class> q;  // q[n] = coefficient of q^n
  double weight = 0.0;
  Majorant bound;
  std::string label;
  bool cusp = true;  // c(0) = 0
  // Nonzero only at 0 and perfect squares (theta).
  bool square_support = false;

  std::uint64_t n_max() const { return q.empty() ? 0 : q.size() - 1; }
};

// Deligne majorant with d(n) <= C_eps n^eps.
CoefficientView view(const HeckeEigenform& f, double divisor_eps = 0.25);
CoefficientView view(const ThetaSeries& t);

// Generator memory budget in bytes (default 3 GiB); gen_* throw ResourceError
// when an estimate exceeds it.
void set_memory_budget(std::uint64_t bytes);
std::uint64_t memory_budget();

PowerSeries gen_eta24(std::uint64_t n_max);
PowerSeries gen_eisenstein(int weight, std::uint64_t n_max);
// Weights with one-dimensional S_k(SL2(Z)): 12, 16, 18, 20, 22, 26.
HeckeEigenform gen_level1_eigenform(int k, std::uint64_t n_max);
ThetaSeries gen_theta(std::uint64_t n_max);

bool is_supported_level1_weight(int k);
std::string level1_label(int k);

}  // namespace tricorr

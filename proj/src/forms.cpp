#include "tricorr/forms.hpp"

#include <atomic>
#include <cmath>

#include "tricorr/arith.hpp"
#include "tricorr/error.hpp"

namespace tricorr {

namespace {

std::atomic<std::uint64_t> g_memory_budget{3ull << 30};

mpz_class from_u128(unsigned __int128 v) {
  mpz_class hi(static_cast<unsigned long>(v >> 64));
  mpz_class r;
  mpz_mul_2exp(r.get_mpz_t(), hi.get_mpz_t(), 64);
  mpz_add_ui(r.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(v & ~0ull));
  return r;
}

// Rough peak footprint of a weight-k q-expansion computation to n_max:
// coefficient table plus three Kronecker operands of matching width.
void check_budget(int k, std::uint64_t n_max) {
  const double n = static_cast<double>(n_max) + 1.0;
  const double coeff_bits = (k - 1) / 2.0 * std::log2(n) + 16.0;
  const double slot_bytes = std::ceil((2.0 * coeff_bits + std::log2(n) + 2.0) / 64.0) * 8.0;
  const double table = n * (32.0 + coeff_bits / 8.0 + 16.0);
  const double estimate = table * 2.0 + n * slot_bytes * 6.0;
  if (estimate > static_cast<double>(memory_budget())) {
    throw ResourceError("generating weight-" + std::to_string(k) + " coefficients to n_max=" +
                        std::to_string(n_max) + " needs about " +
                        std::to_string(static_cast<std::uint64_t>(estimate / 1048576.0)) +
                        " MiB, above the configured budget of " + std::to_string(memory_budget() >> 20) + " MiB");
  }
}

}  // namespace

const char* to_string(FormSource s) {
  switch (s) {
    case FormSource::generated: return "generated";
    case FormSource::file: return "file";
    case FormSource::remote: return "remote";
  }
  return "unknown";
}

HeckeEigenform::HeckeEigenform(int weight, std::uint64_t level, std::string label, std::vector<mpz_class> coeffs,
                               FormSource source)
    : weight_(weight), level_(level), label_(std::move(label)), source_(source) {
  if (weight <= 0 || weight % 2 != 0) throw DomainError("eigenform weight must be a positive even integer");
  if (level == 0) throw DomainError("eigenform level must be positive");
  q_.reserve(coeffs.size() + 1);
  q_.emplace_back(0);
  for (auto& c : coeffs) q_.push_back(std::move(c));
}

const mpz_class& HeckeEigenform::a(std::uint64_t n) const {
  if (n == 0 || n > n_max()) throw CoverageError("coefficient index " + std::to_string(n) + " outside 1.." +
                                                     std::to_string(n_max()) + " for form " + label_,
                                                 n);
  return q_[n];
}

HeckeEigenform HeckeEigenform::truncated(std::uint64_t n) const {
  if (n > n_max()) throw CoverageError("cannot truncate form " + label_ + " beyond its n_max", n);
  std::vector<mpz_class> c(q_.begin() + 1, q_.begin() + 1 + static_cast<std::ptrdiff_t>(n));
  return HeckeEigenform(weight_, level_, label_, std::move(c), source_);
}

ThetaSeries::ThetaSeries(std::uint64_t n_max) : q_(n_max + 1) {
  q_[0] = 1;
  for (std::uint64_t r = 1; r * r <= n_max; ++r) q_[r * r] = 2;
}

CoefficientView view(const HeckeEigenform& f, double divisor_eps) {
  CoefficientView v;
  v.q = f.q_expansion();
  v.weight = f.weight();
  v.bound = {arith::divisor_bound_constant(divisor_eps), (f.weight() - 1) / 2.0 + divisor_eps};
  v.label = f.label();
  v.cusp = true;
  return v;
}

CoefficientView view(const ThetaSeries& t) {
  CoefficientView v;
  v.q = t.q_expansion();
  v.weight = 0.5;
  v.bound = {2.0, 0.0};
  v.label = "theta";
  v.cusp = false;
  v.square_support = true;
  return v;
}

void set_memory_budget(std::uint64_t bytes) { g_memory_budget.store(bytes); }
std::uint64_t memory_budget() { return g_memory_budget.load(); }

PowerSeries gen_eta24(std::uint64_t n_max) {
  if (n_max < 1) throw DomainError("gen_eta24: n_max must be at least 1");
  check_budget(12, n_max);
  // Delta = q * ((prod (1-q^n))^3)^8; the cube is sparse (Jacobi), so the
  // first squaring is a sparse product and the last two are dense.
  const PowerSeries cube = euler_product_cubed(n_max - 1);
  PowerSeries p = cube * cube;
  p = p * p;
  p = p * p;
  std::vector<mpz_class> c(n_max + 1);
  for (std::uint64_t i = 0; i + 1 <= n_max; ++i) c[i + 1] = p[i];
  return PowerSeries(std::move(c));
}

PowerSeries gen_eisenstein(int weight, std::uint64_t n_max) {
  long scale = 0;
  unsigned power = 0;
  if (weight == 4) {
    scale = 240;
    power = 3;
  } else if (weight == 6) {
    scale = -504;
    power = 5;
  } else {
    throw DomainError("gen_eisenstein: unsupported weight " + std::to_string(weight) + " (expected 4 or 6)");
  }
  if (n_max > 40'000'000) throw ResourceError("gen_eisenstein: n_max too large for 128-bit divisor sums");
  const auto sigma = arith::divisor_power_sums(n_max, power);
  std::vector<mpz_class> c(n_max + 1);
  c[0] = 1;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    c[n] = from_u128(sigma[n]);
    c[n] *= scale;
  }
  return PowerSeries(std::move(c));
}

bool is_supported_level1_weight(int k) {
  return k == 12 || k == 16 || k == 18 || k == 20 || k == 22 || k == 26;
}

std::string level1_label(int k) { return k == 12 ? std::string("delta") : "k" + std::to_string(k); }

HeckeEigenform gen_level1_eigenform(int k, std::uint64_t n_max) {
  if (!is_supported_level1_weight(k)) {
    throw DomainError("no unique level-1 cusp eigenform of weight " + std::to_string(k) +
                      " (dim S_k(SL2(Z)) != 1); supported weights: 12, 16, 18, 20, 22, 26");
  }
  if (n_max < 1) throw DomainError("gen_level1_eigenform: n_max must be at least 1");
  check_budget(k, n_max);
  PowerSeries f = gen_eta24(n_max);
  // Delta * E4^e4 * E6^e6 with 12 + 4 e4 + 6 e6 = k.
  const int e6 = (k == 18 || k == 22 || k == 26) ? 1 : 0;
  const int e4 = (k - 12 - 6 * e6) / 4;
  if (e4 > 0) {
    const PowerSeries e = gen_eisenstein(4, n_max);
    for (int i = 0; i < e4; ++i) f = f * e;
  }
  if (e6 > 0) f = f * gen_eisenstein(6, n_max);
  std::vector<mpz_class> c(f.coeffs().begin() + 1, f.coeffs().end());
  return HeckeEigenform(k, 1, level1_label(k), std::move(c), FormSource::generated);
}

ThetaSeries gen_theta(std::uint64_t n_max) { return ThetaSeries(n_max); }

}  // namespace tricorr

#include "tricorr/power_series.hpp"

#include <algorithm>
#include <stdexcept>

namespace tricorr {

PowerSeries::PowerSeries(std::vector<mpz_class> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.resize(1);
}

PowerSeries PowerSeries::zero(std::size_t n_max) { return PowerSeries(std::vector<mpz_class>(n_max + 1)); }

PowerSeries PowerSeries::one(std::size_t n_max) {
  std::vector<mpz_class> c(n_max + 1);
  c[0] = 1;
  return PowerSeries(std::move(c));
}

PowerSeries PowerSeries::truncated(std::size_t n) const {
  if (n > n_max()) throw std::invalid_argument("PowerSeries::truncated: order exceeds available terms");
  return PowerSeries(std::vector<mpz_class>(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(n) + 1));
}

PowerSeries PowerSeries::shifted(std::size_t s) const {
  std::vector<mpz_class> c(coeffs_.size());
  for (std::size_t i = 0; i + s < c.size(); ++i) c[i + s] = coeffs_[i];
  return PowerSeries(std::move(c));
}

std::size_t PowerSeries::nonzero_count() const {
  return static_cast<std::size_t>(
      std::count_if(coeffs_.begin(), coeffs_.end(), [](const mpz_class& x) { return sgn(x) != 0; }));
}

PowerSeries& PowerSeries::operator+=(const PowerSeries& o) {
  const std::size_t n = std::min(n_max(), o.n_max());
  coeffs_.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

namespace series_detail {

std::vector<mpz_class> mul_schoolbook(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                                      std::size_t n_max) {
  std::vector<mpz_class> out(n_max + 1);
  for (std::size_t i = 0; i < a.size() && i <= n_max; ++i) {
    if (sgn(a[i]) == 0) continue;
    const std::size_t jmax = std::min(b.size() - 1, n_max - i);
    for (std::size_t j = 0; j <= jmax; ++j) {
      mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return out;
}

std::vector<mpz_class> mul_sparse(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                                  std::size_t n_max) {
  std::vector<std::size_t> nz_a, nz_b;
  for (std::size_t i = 0; i < a.size() && i <= n_max; ++i)
    if (sgn(a[i]) != 0) nz_a.push_back(i);
  for (std::size_t j = 0; j < b.size() && j <= n_max; ++j)
    if (sgn(b[j]) != 0) nz_b.push_back(j);
  std::vector<mpz_class> out(n_max + 1);
  for (std::size_t i : nz_a) {
    for (std::size_t j : nz_b) {
      if (i + j > n_max) break;
      mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return out;
}

namespace {

std::size_t max_bits(const std::vector<mpz_class>& v, std::size_t len) {
  std::size_t m = 0;
  for (std::size_t i = 0; i < len; ++i) {
    if (sgn(v[i]) != 0) m = std::max(m, mpz_sizeinbase(v[i].get_mpz_t(), 2));
  }
  return m;
}

// Packs sum_i c_i 2^{64 * slot_limbs * i} into a signed big integer.
mpz_class pack(const std::vector<mpz_class>& c, std::size_t len, std::size_t slot_limbs) {
  std::vector<mp_limb_t> pos(len * slot_limbs, 0), neg(len * slot_limbs, 0);
  for (std::size_t i = 0; i < len; ++i) {
    const int s = sgn(c[i]);
    if (s == 0) continue;
    auto& dst = s > 0 ? pos : neg;
    std::size_t written = 0;
    mpz_export(dst.data() + i * slot_limbs, &written, -1, sizeof(mp_limb_t), 0, 0, c[i].get_mpz_t());
  }
  mpz_class p, n;
  mpz_import(p.get_mpz_t(), pos.size(), -1, sizeof(mp_limb_t), 0, 0, pos.data());
  mpz_import(n.get_mpz_t(), neg.size(), -1, sizeof(mp_limb_t), 0, 0, neg.data());
  return p - n;
}

}  // namespace

std::vector<mpz_class> mul_kronecker(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                                     std::size_t n_max) {
  const std::size_t la = std::min(a.size(), n_max + 1);
  const std::size_t lb = std::min(b.size(), n_max + 1);
  std::vector<mpz_class> out(n_max + 1);
  const std::size_t ba = max_bits(a, la), bb = max_bits(b, lb);
  if (ba == 0 || bb == 0) return out;
  std::size_t len_bits = 0;
  for (std::size_t m = std::min(la, lb); m > 0; m >>= 1) ++len_bits;
  // |c_k| < 2^{ba+bb+len_bits}; balanced digits need one more bit of headroom.
  const std::size_t slot_bits = ba + bb + len_bits + 2;
  const std::size_t slot_limbs = (slot_bits + 63) / 64;

  mpz_class pa = pack(a, la, slot_limbs);
  mpz_class pb = pack(b, lb, slot_limbs);
  mpz_class prod;
  mpz_mul(prod.get_mpz_t(), pa.get_mpz_t(), pb.get_mpz_t());
  pa = 0;
  pb = 0;

  const int sign = sgn(prod);
  if (sign == 0) return out;
  const std::size_t total_limbs = mpz_size(prod.get_mpz_t());
  std::vector<mp_limb_t> limbs(std::max(total_limbs, (n_max + 1) * slot_limbs), 0);
  std::size_t written = 0;
  mpz_export(limbs.data(), &written, -1, sizeof(mp_limb_t), 0, 0, prod.get_mpz_t());
  prod = 0;

  mpz_class half, full, u;
  mpz_ui_pow_ui(full.get_mpz_t(), 2, 64 * slot_limbs);
  mpz_fdiv_q_2exp(half.get_mpz_t(), full.get_mpz_t(), 1);
  unsigned carry = 0;
  for (std::size_t i = 0; i <= n_max; ++i) {
    mpz_import(u.get_mpz_t(), slot_limbs, -1, sizeof(mp_limb_t), 0, 0, limbs.data() + i * slot_limbs);
    if (carry) mpz_add_ui(u.get_mpz_t(), u.get_mpz_t(), 1);
    if (cmp(u, half) >= 0) {
      mpz_sub(out[i].get_mpz_t(), u.get_mpz_t(), full.get_mpz_t());
      carry = 1;
    } else {
      out[i] = u;
      carry = 0;
    }
    if (sign < 0) mpz_neg(out[i].get_mpz_t(), out[i].get_mpz_t());
  }
  return out;
}

}  // namespace series_detail

PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
  const std::size_t n = std::min(a.n_max(), b.n_max());
  const std::size_t nz_a = a.nonzero_count(), nz_b = b.nonzero_count();
  // Work estimates in coefficient multiplications; Kronecker is ~n log n limb
  // operations with a large constant, so it only wins for big dense inputs.
  const double sparse_work = static_cast<double>(std::min(nz_a, nz_b)) * static_cast<double>(n + 1);
  const double dense_threshold = 64.0 * static_cast<double>(n + 1);
  if (n < 200 || sparse_work <= dense_threshold) {
    return PowerSeries(series_detail::mul_sparse(a.coeffs(), b.coeffs(), n));
  }
  return PowerSeries(series_detail::mul_kronecker(a.coeffs(), b.coeffs(), n));
}

PowerSeries PowerSeries::pow(unsigned exponent) const {
  PowerSeries result = PowerSeries::one(n_max());
  PowerSeries base = *this;
  bool first = true;
  while (exponent > 0) {
    if (exponent & 1u) {
      result = first ? base : result * base;
      first = false;
    }
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

PowerSeries euler_product(std::size_t n_max) {
  std::vector<mpz_class> c(n_max + 1);
  // Generalised pentagonal numbers k(3k-1)/2 and k(3k+1)/2, sign (-1)^k.
  for (std::size_t k = 0;; ++k) {
    const std::size_t e1 = k * (3 * k - (k > 0 ? 1 : 0)) / 2;
    if (e1 > n_max) break;
    const long sign = (k % 2 == 0) ? 1 : -1;
    c[e1] = sign;
    const std::size_t e2 = k * (3 * k + 1) / 2;
    if (k > 0 && e2 <= n_max) c[e2] = sign;
  }
  return PowerSeries(std::move(c));
}

PowerSeries euler_product_cubed(std::size_t n_max) {
  std::vector<mpz_class> c(n_max + 1);
  for (std::size_t k = 0;; ++k) {
    const std::size_t e = k * (k + 1) / 2;
    if (e > n_max) break;
    const long v = static_cast<long>(2 * k + 1);
    c[e] = (k % 2 == 0) ? v : -v;
  }
  return PowerSeries(std::move(c));
}

}  // namespace tricorr

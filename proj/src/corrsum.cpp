#include "tricorr/corrsum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <mutex>
#include <span>

#include "tricorr/error.hpp"
#include "tricorr/parallel.hpp"
#include "tricorr/power_series.hpp"

namespace tricorr {

namespace {

constexpr double kLog2e = 1.4426950408889634;
constexpr long kGuardBits = 64;
constexpr std::size_t kBlock = 256;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

bool zero_index_used(const CoefficientView& c, const SumOptions& opt) {
  return opt.include_zero_index && !c.q.empty() && sgn(c.q[0]) != 0;
}

// Number of h in [1, h_cut] with 2m - h >= 0 (zero index kept) or >= 1.
std::uint64_t h_limit(std::uint64_t m, std::uint64_t h_cut, bool zero) {
  return std::min<std::uint64_t>(h_cut, 2 * m - (zero ? 0 : 1));
}

Cuts resolve_cuts(const SmoothingKernel& kernel, const SumOptions& opt) {
  if (opt.cuts) {
    if (kernel.kind != KernelKind::exponential) throw DomainError("explicit cuts apply to the exponential kernel only");
    return *opt.cuts;
  }
  return kernel.cuts();
}

void check_inputs(const SmoothingKernel& kernel, const SumOptions& opt) {
  if (opt.precision_bits < 53) throw DomainError("precision_bits must be at least 53");
  if (!(kernel.X >= 0.0) || !(kernel.Y >= 0.0) || !std::isfinite(kernel.X) || !std::isfinite(kernel.Y)) {
    throw DomainError("kernel scales X, Y must be finite and non-negative");
  }
  if (kernel.kind == KernelKind::exponential && (kernel.X <= 0.0 || kernel.Y <= 0.0)) {
    throw DomainError("exponential kernel needs X, Y > 0");
  }
  if (kernel.kind == KernelKind::exponential && !(kernel.tail_factor > 0.0)) {
    throw DomainError("tail factor must be positive");
  }
}

void check_coverage(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3, Cuts cuts,
                    bool zero) {
  if (cuts.m_cut == 0 || cuts.h_cut == 0) return;
  const std::uint64_t need_a = std::min<std::uint64_t>(cuts.h_cut, 2 * cuts.m_cut - (zero ? 0 : 1));
  const std::uint64_t need_b = cuts.m_cut;
  const std::uint64_t need_c = 2 * cuts.m_cut - 1;
  const std::uint64_t required = std::max({need_a, need_b, need_c});
  auto check = [&](const CoefficientView& f, std::uint64_t need, const char* role) {
    if (f.n_max() < need) {
      throw CoverageError(std::string("coefficient table of ") + role + " form '" + f.label + "' covers n <= " +
                              std::to_string(f.n_max()) + "; this sum needs n_max >= " + std::to_string(required),
                          required);
    }
  };
  check(f1, need_a, "first");
  check(f2, need_b, "second");
  check(f3, need_c, "third");
}

std::uint64_t count_terms(Cuts cuts, bool zero) {
  std::uint64_t n = 0;
  for (std::uint64_t m = 1; m <= cuts.m_cut; ++m) n += h_limit(m, cuts.h_cut, zero);
  return n;
}

double to_double(const mpz_class& z) { return mpz_get_d(z.get_mpz_t()); }

double log_add(double x, double y) {
  if (x == -std::numeric_limits<double>::infinity()) return y;
  if (y == -std::numeric_limits<double>::infinity()) return x;
  const double m = std::max(x, y);
  return m + std::log1p(std::exp(std::min(x, y) - m));
}

// log of an upper bound for the upper incomplete gamma function.
double log_upper_gamma(double a, double x) {
  if (x <= 0.0) return std::lgamma(a);
  if (a >= 1.0 && x > a) return (a - 1.0) * std::log(x) - x - std::log1p(-(a - 1.0) / x);
  if (a <= 1.0 && x >= 1.0) return (a - 1.0) * std::log(x) - x;
  // Moderate arguments: numerical value with relative slack.
  return std::log(boost::math::tgamma(a, x)) + 1e-10;
}

// log of an upper bound for sum_{n > N} n^alpha e^{-n/X}, alpha >= 0. The
// summand is unimodal in n, so the sum is at most its integral from N + 1
// plus its largest value on [N + 1, inf).
double log_power_exp_tail(double alpha, double X, double N) {
  const double start = N + 1.0;
  const double integral = (alpha + 1.0) * std::log(X) + log_upper_gamma(alpha + 1.0, start / X);
  const double peak_at = std::max(start, alpha * X);
  const double peak = alpha * std::log(peak_at) - peak_at / X;
  return log_add(integral, peak);
}

// Integers as fixed-width limb magnitudes plus signs, so the hot inner loop
// of the exponential kernel runs on raw mpn calls without mpz bookkeeping.
struct LimbTable {
  std::size_t width = 1;
  std::vector<mp_limb_t> limbs;
  std::vector<std::int8_t> sign;
  std::vector<std::uint16_t> used;

  explicit LimbTable(std::span<const mpz_class> values) {
    for (const auto& v : values) width = std::max<std::size_t>(width, mpz_size(v.get_mpz_t()));
    limbs.assign(values.size() * width, 0);
    sign.resize(values.size());
    used.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const mpz_srcptr z = values[i].get_mpz_t();
      const std::size_t n = mpz_size(z);
      std::copy_n(mpz_limbs_read(z), n, limbs.begin() + static_cast<std::ptrdiff_t>(i * width));
      sign[i] = static_cast<std::int8_t>(mpz_sgn(z));
      used[i] = static_cast<std::uint16_t>(n);
    }
  }
  const mp_limb_t* at(std::size_t i) const { return limbs.data() + i * width; }
};

// Sum of signed products a * c kept as two non-negative limb vectors.
class SignedAccumulator {
 public:
  SignedAccumulator(std::size_t a_width, std::size_t c_width)
      : len_(a_width + c_width + 2), pos_(len_), neg_(len_) {}

  void clear() {
    std::fill(pos_.begin(), pos_.end(), 0);
    std::fill(neg_.begin(), neg_.end(), 0);
  }

  void addmul(const mp_limb_t* a, std::size_t an, const mp_limb_t* c, std::size_t cn, bool negative) {
    mp_limb_t* acc = negative ? neg_.data() : pos_.data();
    for (std::size_t i = 0; i < cn; ++i) {
      const mp_limb_t carry = mpn_addmul_1(acc + i, a, static_cast<mp_size_t>(an), c[i]);
      if (carry) mpn_add_1(acc + i + an, acc + i + an, static_cast<mp_size_t>(len_ - i - an), carry);
    }
  }

  void get(mpz_class& out) const {
    mpz_t p, n;
    mpz_roinit_n(p, pos_.data(), static_cast<mp_size_t>(len_));
    mpz_roinit_n(n, neg_.data(), static_cast<mp_size_t>(len_));
    mpz_sub(out.get_mpz_t(), p, n);
  }

 private:
  std::size_t len_;
  std::vector<mp_limb_t> pos_, neg_;
};

struct BlockResult {
  BigFloat sum{64};
  mpz_class exact;
  double abs_sum = 0.0;
};

TripleSumResult make_result(SumMethod method, Cuts cuts, long prec) {
  TripleSumResult r;
  r.method = method;
  r.m_cut = cuts.m_cut;
  r.h_cut = cuts.h_cut;
  r.precision_bits = prec;
  r.value = BigFloat(prec);
  return r;
}

void finish_error(TripleSumResult& r) {
  const double err = r.tail_bound + r.rounding_bound;
  const double mag = std::fabs(r.value.to_double());
  if (err == 0.0) {
    r.est_rel_err = 0.0;
  } else if (mag == 0.0 || !std::isfinite(mag)) {
    r.est_rel_err = std::numeric_limits<double>::infinity();
  } else {
    r.est_rel_err = err / mag;
  }
}

// Exact integer sum: sharp kernel.
TripleSumResult direct_sharp(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3, Cuts cuts,
                             bool zero, const SumOptions& opt) {
  TripleSumResult r = make_result(SumMethod::direct, cuts, opt.precision_bits);
  const auto blocks = make_blocks(1, cuts.m_cut + 1, kBlock);
  std::vector<BlockResult> parts(blocks.size());
  parallel_for(blocks.size(), [&](std::size_t bi) {
    mpz_class inner;
    auto& part = parts[bi];
    for (std::size_t m = blocks[bi].begin; m < blocks[bi].end; ++m) {
      if (sgn(f2.q[m]) == 0) continue;
      inner = 0;
      const std::uint64_t hl = h_limit(m, cuts.h_cut, zero);
      double abs_inner = 0.0;
      for (std::uint64_t h = 1; h <= hl; ++h) {
        mpz_addmul(inner.get_mpz_t(), f1.q[h].get_mpz_t(), f3.q[2 * m - h].get_mpz_t());
        abs_inner += std::fabs(to_double(f1.q[h]) * to_double(f3.q[2 * m - h]));
      }
      mpz_addmul(part.exact.get_mpz_t(), f2.q[m].get_mpz_t(), inner.get_mpz_t());
      part.abs_sum += std::fabs(to_double(f2.q[m])) * abs_inner;
    }
  });
  mpz_class total;
  for (auto& p : parts) {
    total += p.exact;
    r.abs_sum += p.abs_sum;
  }
  r.value = BigFloat(total, opt.precision_bits);
  r.terms_used = count_terms(cuts, zero);
  return r;
}

// Below this many (m, h) terms the inner sums run term by term; above it
// they come out of one exact integer convolution.
constexpr std::uint64_t kLoopTermLimit = 1'000'000;

void inner_sums_by_loop(const std::vector<mpz_class>& aw, const std::vector<double>& abs_aw,
                        const CoefficientView& f3, const std::vector<double>& abs_c, Cuts cuts, bool zero,
                        std::vector<mpz_class>& inner, std::vector<double>& abs_inner) {
  const LimbTable aw_limbs(aw);
  const LimbTable c_limbs(f3.q.first(abs_c.size()));
  const auto blocks = make_blocks(1, cuts.m_cut + 1, kBlock);
  parallel_for(blocks.size(), [&](std::size_t bi) {
    SignedAccumulator acc(aw_limbs.width, c_limbs.width);
    for (std::size_t m = blocks[bi].begin; m < blocks[bi].end; ++m) {
      acc.clear();
      double abs_sum = 0.0;
      const std::uint64_t hl = h_limit(m, cuts.h_cut, zero);
      for (std::uint64_t h = 1; h <= hl; ++h) {
        const std::uint64_t j = 2 * m - h;
        const int sc = c_limbs.sign[j] * aw_limbs.sign[h];
        if (sc == 0 || (j == 0 && !zero)) continue;
        // mpn_addmul_1 needs the longer operand first.
        if (aw_limbs.used[h] >= c_limbs.used[j]) {
          acc.addmul(aw_limbs.at(h), aw_limbs.used[h], c_limbs.at(j), c_limbs.used[j], sc < 0);
        } else {
          acc.addmul(c_limbs.at(j), c_limbs.used[j], aw_limbs.at(h), aw_limbs.used[h], sc < 0);
        }
        abs_sum += abs_aw[h] * abs_c[j];
      }
      acc.get(inner[m]);
      abs_inner[m] = abs_sum;
    }
  });
}

// I(m) is entry 2m of the product of the polynomials sum_h AW(h) x^h and
// sum_j c(j) x^j, computed exactly by Kronecker substitution. The absolute
// sums only feed the rounding bound, so a double FFT is accurate enough.
void inner_sums_by_convolution(const std::vector<mpz_class>& aw, const std::vector<double>& abs_aw,
                               const CoefficientView& f3, const std::vector<double>& abs_c, Cuts cuts, bool zero,
                               std::vector<mpz_class>& inner, std::vector<double>& abs_inner);

// Exponential kernel: the h-weights are fixed-point integers round(2^P e^{-h/Y})
// so every inner sum is exact; the m-sum runs in MPFR with guard bits.
TripleSumResult direct_exponential(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                                   const SmoothingKernel& kernel, Cuts cuts, bool zero, const SumOptions& opt) {
  TripleSumResult r = make_result(SumMethod::direct, cuts, opt.precision_bits);
  const long outer_prec = opt.precision_bits + kGuardBits;
  const std::uint64_t h_top = cuts.m_cut == 0 ? 0 : std::min<std::uint64_t>(cuts.h_cut, 2 * cuts.m_cut);
  // Smallest weight e^{-h_cut/Y} still keeps outer_prec significant bits.
  const long P = outer_prec + static_cast<long>(std::ceil(kLog2e * static_cast<double>(h_top) / kernel.Y));

  std::vector<mpz_class> aw(h_top + 1);
  std::vector<double> abs_aw(h_top + 1, 0.0);
  {
    BigFloat t(P + 64);
    mpz_class w;
    for (std::uint64_t h = 1; h <= h_top; ++h) {
      if (sgn(f1.q[h]) == 0) continue;
      mpfr_set_ui(t.get(), h, MPFR_RNDN);
      mpfr_div_d(t.get(), t.get(), -kernel.Y, MPFR_RNDN);
      mpfr_exp(t.get(), t.get(), MPFR_RNDN);
      mpfr_mul_2si(t.get(), t.get(), P, MPFR_RNDN);
      mpfr_get_z(w.get_mpz_t(), t.get(), MPFR_RNDN);
      mpz_mul(aw[h].get_mpz_t(), w.get_mpz_t(), f1.q[h].get_mpz_t());
      abs_aw[h] = std::fabs(to_double(f1.q[h])) * std::exp(-static_cast<double>(h) / kernel.Y);
    }
  }
  const std::uint64_t c_top = cuts.m_cut == 0 ? 0 : 2 * cuts.m_cut - 1;
  std::vector<double> abs_c(c_top + 1, 0.0);
  for (std::uint64_t j = zero ? 0 : 1; j <= c_top; ++j) abs_c[j] = std::fabs(to_double(f3.q[j]));

  // Exact inner sums I(m) = sum_h AW(h) c(2m - h).
  std::vector<mpz_class> inner(cuts.m_cut + 1);
  std::vector<double> abs_inner(cuts.m_cut + 1, 0.0);
  if (count_terms(cuts, zero) <= kLoopTermLimit) {
    inner_sums_by_loop(aw, abs_aw, f3, abs_c, cuts, zero, inner, abs_inner);
  } else {
    inner_sums_by_convolution(aw, abs_aw, f3, abs_c, cuts, zero, inner, abs_inner);
  }

  const auto blocks = make_blocks(1, cuts.m_cut + 1, kBlock);
  std::vector<BlockResult> parts(blocks.size());
  parallel_for(blocks.size(), [&](std::size_t bi) {
    auto& part = parts[bi];
    part.sum = BigFloat(outer_prec);
    BigFloat term(outer_prec), weight(outer_prec);
    for (std::size_t m = blocks[bi].begin; m < blocks[bi].end; ++m) {
      if (sgn(f2.q[m]) == 0) continue;
      const double wm = std::exp(-static_cast<double>(m) / kernel.X);
      mpfr_set_ui(weight.get(), m, MPFR_RNDN);
      mpfr_div_d(weight.get(), weight.get(), -kernel.X, MPFR_RNDN);
      mpfr_exp(weight.get(), weight.get(), MPFR_RNDN);
      mpfr_set_z(term.get(), inner[m].get_mpz_t(), MPFR_RNDN);
      mpfr_mul_z(term.get(), term.get(), f2.q[m].get_mpz_t(), MPFR_RNDN);
      mpfr_mul(term.get(), term.get(), weight.get(), MPFR_RNDN);
      mpfr_add(part.sum.get(), part.sum.get(), term.get(), MPFR_RNDN);
      part.abs_sum += std::fabs(to_double(f2.q[m])) * wm * abs_inner[m];
    }
  });
  BigFloat total(outer_prec);
  for (auto& p : parts) {
    total += p.sum;
    r.abs_sum += p.abs_sum;
  }
  mpfr_mul_2si(total.get(), total.get(), -P, MPFR_RNDN);
  r.value = total.rounded(opt.precision_bits);
  r.terms_used = count_terms(cuts, zero);
  // Weight rounding (<= 2^{-P} <= 2^{-outer_prec} w_h) and the m-sum's
  // recursive summation error, both relative to the absolute sum.
  r.rounding_bound = std::ldexp(1.02 * r.abs_sum * (static_cast<double>(cuts.m_cut) + 6.0), -static_cast<int>(outer_prec));
  r.tail_bound = exponential_tail_bound(f1.bound, f2.bound, f3.bound, kernel.X, kernel.Y, cuts.m_cut, cuts.h_cut);
  finish_error(r);
  return r;
}

// Omega weight h^{-q}: grouping by h makes the inner m-sums exact integers.
TripleSumResult direct_omega(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                             const SmoothingKernel& kernel, Cuts cuts, bool zero, const SumOptions& opt) {
  TripleSumResult r = make_result(SumMethod::direct, cuts, opt.precision_bits);
  const long outer_prec = opt.precision_bits + kGuardBits;
  const std::uint64_t h_top = cuts.m_cut == 0 ? 0 : std::min<std::uint64_t>(cuts.h_cut, 2 * cuts.m_cut);
  const auto blocks = make_blocks(1, h_top + 1, kBlock);
  std::vector<BlockResult> parts(blocks.size());
  parallel_for(blocks.size(), [&](std::size_t bi) {
    auto& part = parts[bi];
    part.sum = BigFloat(outer_prec);
    mpz_class inner;
    BigFloat term(outer_prec), weight(outer_prec), q(outer_prec);
    mpfr_set_d(q.get(), -kernel.omega_exponent, MPFR_RNDN);
    for (std::size_t h = blocks[bi].begin; h < blocks[bi].end; ++h) {
      if (sgn(f1.q[h]) == 0) continue;
      inner = 0;
      double abs_inner = 0.0;
      const std::uint64_t m_lo = zero ? (h + 1) / 2 : h / 2 + 1;
      for (std::uint64_t m = std::max<std::uint64_t>(1, m_lo); m <= cuts.m_cut; ++m) {
        mpz_addmul(inner.get_mpz_t(), f2.q[m].get_mpz_t(), f3.q[2 * m - h].get_mpz_t());
        abs_inner += std::fabs(to_double(f2.q[m]) * to_double(f3.q[2 * m - h]));
      }
      mpfr_set_ui(weight.get(), h, MPFR_RNDN);
      mpfr_pow(weight.get(), weight.get(), q.get(), MPFR_RNDN);
      mpfr_set_z(term.get(), inner.get_mpz_t(), MPFR_RNDN);
      mpfr_mul_z(term.get(), term.get(), f1.q[h].get_mpz_t(), MPFR_RNDN);
      mpfr_mul(term.get(), term.get(), weight.get(), MPFR_RNDN);
      mpfr_add(part.sum.get(), part.sum.get(), term.get(), MPFR_RNDN);
      part.abs_sum += std::fabs(to_double(f1.q[h])) * std::pow(static_cast<double>(h), -kernel.omega_exponent) * abs_inner;
    }
  });
  BigFloat total(outer_prec);
  for (auto& p : parts) {
    total += p.sum;
    r.abs_sum += p.abs_sum;
  }
  r.value = total.rounded(opt.precision_bits);
  r.terms_used = count_terms(cuts, zero);
  // Finite sum evaluated with 64 guard bits: exact up to the final rounding.
  r.est_rel_err = 0.0;
  return r;
}

// FFTW wrappers for double and long double.
template <class Real>
struct Fftw;

template <>
struct Fftw<double> {
  using complex = fftw_complex;
  using plan = fftw_plan;
  static void* alloc(std::size_t bytes) { return fftw_malloc(bytes); }
  static void free(void* p) { fftw_free(p); }
  static plan r2c(int n, double* in, complex* out) { return fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE); }
  static plan c2r(int n, complex* in, double* out) { return fftw_plan_dft_c2r_1d(n, in, out, FFTW_ESTIMATE); }
  static void execute(plan p) { fftw_execute(p); }
  static void destroy(plan p) { fftw_destroy_plan(p); }
};

template <>
struct Fftw<long double> {
  using complex = fftwl_complex;
  using plan = fftwl_plan;
  static void* alloc(std::size_t bytes) { return fftwl_malloc(bytes); }
  static void free(void* p) { fftwl_free(p); }
  static plan r2c(int n, long double* in, complex* out) { return fftwl_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE); }
  static plan c2r(int n, complex* in, long double* out) { return fftwl_plan_dft_c2r_1d(n, in, out, FFTW_ESTIMATE); }
  static void execute(plan p) { fftwl_execute(p); }
  static void destroy(plan p) { fftwl_destroy_plan(p); }
};

template <class T>
struct FftwBuffer {
  T* ptr;
  explicit FftwBuffer(std::size_t n) : ptr(static_cast<T*>(Fftw<double>::alloc(n * sizeof(T)))) {
    if (!ptr) throw ResourceError("FFT buffer allocation failed");
  }
  ~FftwBuffer() { Fftw<double>::free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

// Linear convolution of x and y via real FFTs of length L; returns the
// first out_len entries.
template <class Real>
std::vector<Real> fft_convolve(const std::vector<Real>& x, const std::vector<Real>& y, std::size_t L,
                               std::size_t out_len) {
  using F = Fftw<Real>;
  using Complex = typename F::complex;
  const std::size_t nc = L / 2 + 1;
  FftwBuffer<Real> bx(L), by(L);
  FftwBuffer<Complex> cx(nc), cy(nc);
  typename F::plan px, py, pinv;
  {
    std::lock_guard lock(fftw_planner_mutex());
    px = F::r2c(static_cast<int>(L), bx.ptr, cx.ptr);
    py = F::r2c(static_cast<int>(L), by.ptr, cy.ptr);
    pinv = F::c2r(static_cast<int>(L), cx.ptr, bx.ptr);
  }
  std::fill(bx.ptr, bx.ptr + L, Real(0));
  std::fill(by.ptr, by.ptr + L, Real(0));
  std::copy(x.begin(), x.end(), bx.ptr);
  std::copy(y.begin(), y.end(), by.ptr);
  F::execute(px);
  F::execute(py);
  for (std::size_t k = 0; k < nc; ++k) {
    const Real re = cx.ptr[k][0] * cy.ptr[k][0] - cx.ptr[k][1] * cy.ptr[k][1];
    const Real im = cx.ptr[k][0] * cy.ptr[k][1] + cx.ptr[k][1] * cy.ptr[k][0];
    cx.ptr[k][0] = re;
    cx.ptr[k][1] = im;
  }
  F::execute(pinv);
  std::vector<Real> out(out_len);
  const Real scale = Real(1) / static_cast<Real>(L);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = bx.ptr[i] * scale;
  {
    std::lock_guard lock(fftw_planner_mutex());
    F::destroy(px);
    F::destroy(py);
    F::destroy(pinv);
  }
  return out;
}

// log(|z| * w) without overflowing for large integers.
template <class Real>
Real scaled_value(const mpz_class& z, Real log_weight) {
  if (sgn(z) == 0) return Real(0);
  long e = 0;
  const double mant = mpz_get_d_2exp(&e, z.get_mpz_t());
  return static_cast<Real>(mant) * std::exp(log_weight + static_cast<Real>(e) * static_cast<Real>(M_LN2));
}

template <class Real>
TripleSumResult fft_impl(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                         const SmoothingKernel& kernel, Cuts cuts, bool zero, int mantissa_bits) {
  TripleSumResult r = make_result(SumMethod::fft, cuts, mantissa_bits);
  r.terms_used = count_terms(cuts, zero);
  if (cuts.m_cut == 0 || cuts.h_cut == 0) return r;

  const std::uint64_t h_top = std::min<std::uint64_t>(cuts.h_cut, 2 * cuts.m_cut);
  const std::uint64_t c_top = 2 * cuts.m_cut;
  // Exponential tilt: c(j) e^{-tilt j} and a(h) e^{-tilt h} turn the inner
  // sums into e^{-2 tilt m} I(m), which keeps the large-index tail of c from
  // dominating the FFT's absolute error.
  const double tilt = kernel.kind == KernelKind::exponential ? 0.25 / kernel.X : 0.0;

  auto log_wh = [&](std::uint64_t h) -> double {
    switch (kernel.kind) {
      case KernelKind::exponential: return -static_cast<double>(h) / kernel.Y;
      case KernelKind::sharp: return 0.0;
      case KernelKind::omega: return -kernel.omega_exponent * std::log(static_cast<double>(h));
    }
    return 0.0;
  };

  std::vector<Real> A(h_top + 1, Real(0)), C(c_top + 1, Real(0));
  for (std::uint64_t h = 1; h <= h_top; ++h) A[h] = scaled_value<Real>(f1.q[h], log_wh(h) - tilt * static_cast<double>(h));
  for (std::uint64_t j = zero ? 0 : 1; j < c_top; ++j) C[j] = scaled_value<Real>(f3.q[j], -tilt * static_cast<double>(j));

  Real max_a = 0, max_c = 0;
  for (Real v : A) max_a = std::max(max_a, std::fabs(v));
  for (Real v : C) max_c = std::max(max_c, std::fabs(v));
  if (max_a == 0 || max_c == 0) {
    r.value = BigFloat(0.0, mantissa_bits);
    return r;
  }
  Real norm_a = 0, norm_c = 0;
  for (Real& v : A) {
    v /= max_a;
    norm_a += v * v;
  }
  for (Real& v : C) {
    v /= max_c;
    norm_c += v * v;
  }
  norm_a = std::sqrt(norm_a);
  norm_c = std::sqrt(norm_c);

  std::size_t L = 1;
  while (L < A.size() + C.size() - 1) L <<= 1;
  const std::vector<Real> conv = fft_convolve<Real>(A, C, L, c_top + 1);

  // value = max_a max_c sum_m b(m) w_m(m) e^{2 tilt m} conv(2m), compensated.
  Real sum = 0, comp = 0, abs_b = 0, abs_terms = 0;
  for (std::uint64_t m = 1; m <= cuts.m_cut; ++m) {
    if (sgn(f2.q[m]) == 0) continue;
    const double log_wm = kernel.kind == KernelKind::exponential
                              ? -static_cast<double>(m) / kernel.X + 2.0 * tilt * static_cast<double>(m)
                              : 0.0;
    const Real B = scaled_value<Real>(f2.q[m], log_wm);
    const Real t = B * conv[2 * m];
    abs_b += std::fabs(B);
    abs_terms += std::fabs(t);
    const Real y = sum + t;
    comp += std::fabs(sum) >= std::fabs(t) ? (sum - y) + t : (t - y) + sum;
    sum = y;
  }
  sum += comp;

  BigFloat value(static_cast<double>(0), 128);
  {
    // Exact rescale in MPFR to avoid overflow of max_a * max_c * sum.
    BigFloat s(static_cast<double>(sum), 128), ma(static_cast<double>(max_a), 128), mc(static_cast<double>(max_c), 128);
    if constexpr (sizeof(Real) > sizeof(double)) {
      mpfr_set_ld(s.get(), sum, MPFR_RNDN);
      mpfr_set_ld(ma.get(), max_a, MPFR_RNDN);
      mpfr_set_ld(mc.get(), max_c, MPFR_RNDN);
    }
    value = s * ma * mc;
  }
  r.value = value.rounded(mantissa_bits);

  const double eps = std::ldexp(1.0, -mantissa_bits);
  const double log2L = std::log2(static_cast<double>(L));
  const double scale = static_cast<double>(max_a) * static_cast<double>(max_c);
  // Convolution roundoff |delta conv_k| <= (5 log2 L + 8) eps ||A|| ||C||
  // (inputs rounded once each, FFT error growing with the transform depth),
  // then propagated through sum_m |B(m)|; plus the compensated m-sum.
  const double fft_err = (5.0 * log2L + 8.0) * eps * static_cast<double>(norm_a * norm_c) * static_cast<double>(abs_b);
  const double sum_err = 4.0 * eps * static_cast<double>(abs_terms);
  r.rounding_bound = scale * (fft_err + sum_err);
  r.abs_sum = scale * static_cast<double>(abs_terms);
  if (kernel.kind == KernelKind::exponential) {
    r.tail_bound = exponential_tail_bound(f1.bound, f2.bound, f3.bound, kernel.X, kernel.Y, cuts.m_cut, cuts.h_cut);
  }
  finish_error(r);
  if (r.rounding_bound > 1e-3 * std::fabs(r.value.to_double())) {
    r.warnings.push_back("catastrophic cancellation: FFT roundoff bound exceeds 1e-3 of |value|");
  }
  return r;
}

void inner_sums_by_convolution(const std::vector<mpz_class>& aw, const std::vector<double>& abs_aw,
                               const CoefficientView& f3, const std::vector<double>& abs_c, Cuts cuts, bool zero,
                               std::vector<mpz_class>& inner, std::vector<double>& abs_inner) {
  const std::size_t n = 2 * cuts.m_cut;
  std::vector<mpz_class> c(f3.q.begin(), f3.q.begin() + static_cast<std::ptrdiff_t>(abs_c.size()));
  if (!zero) c[0] = 0;
  const std::vector<mpz_class> prod = series_detail::mul_kronecker(aw, c, n);
  for (std::uint64_t m = 1; m <= cuts.m_cut; ++m) inner[m] = prod[2 * m];

  std::size_t L = 1;
  while (L < abs_aw.size() + abs_c.size() - 1) L <<= 1;
  const std::vector<double> conv = fft_convolve<double>(abs_aw, abs_c, L, n + 1);
  double peak = 0.0;
  for (double v : conv) peak = std::max(peak, v);
  for (std::uint64_t m = 1; m <= cuts.m_cut; ++m) abs_inner[m] = std::max(conv[2 * m], 0.0) + 1e-12 * peak;
}

}  // namespace

const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::exponential: return "exponential";
    case KernelKind::sharp: return "sharp";
    case KernelKind::omega: return "omega";
  }
  return "unknown";
}

const char* to_string(SumMethod m) { return m == SumMethod::direct ? "direct" : "fft"; }

SmoothingKernel SmoothingKernel::exponential(double X, double Y, double tail_factor) {
  SmoothingKernel k;
  k.kind = KernelKind::exponential;
  k.X = X;
  k.Y = Y;
  k.tail_factor = tail_factor;
  return k;
}

SmoothingKernel SmoothingKernel::sharp(double X, double Y) {
  SmoothingKernel k;
  k.kind = KernelKind::sharp;
  k.X = X;
  k.Y = Y;
  return k;
}

SmoothingKernel SmoothingKernel::omega(double X, double weight) {
  SmoothingKernel k;
  k.kind = KernelKind::omega;
  k.X = X;
  k.Y = 2.0 * X;
  k.omega_exponent = weight / 2.0 + 1.5;
  return k;
}

double SmoothingKernel::weight(std::uint64_t m, std::uint64_t h) const {
  const double md = static_cast<double>(m), hd = static_cast<double>(h);
  switch (kind) {
    case KernelKind::exponential: return std::exp(-md / X) * std::exp(-hd / Y);
    case KernelKind::sharp: return (md <= X && hd <= Y) ? 1.0 : 0.0;
    case KernelKind::omega: return (md <= X && hd <= 2.0 * X) ? std::pow(hd, -omega_exponent) : 0.0;
  }
  return 0.0;
}

Cuts SmoothingKernel::cuts() const {
  switch (kind) {
    case KernelKind::exponential:
      return {static_cast<std::uint64_t>(std::ceil(tail_factor * X)), static_cast<std::uint64_t>(std::ceil(tail_factor * Y))};
    case KernelKind::sharp:
      return {static_cast<std::uint64_t>(std::floor(X)), static_cast<std::uint64_t>(std::floor(Y))};
    case KernelKind::omega:
      return {static_cast<std::uint64_t>(std::floor(X)), static_cast<std::uint64_t>(std::floor(2.0 * X))};
  }
  return {};
}

std::uint64_t required_n_max(const SmoothingKernel& kernel, const SumOptions& opt) {
  const Cuts cuts = resolve_cuts(kernel, opt);
  if (cuts.m_cut == 0 || cuts.h_cut == 0) return 0;
  return std::max({std::min<std::uint64_t>(cuts.h_cut, 2 * cuts.m_cut), cuts.m_cut, 2 * cuts.m_cut - 1});
}

double exponential_tail_bound(const Majorant& a, const Majorant& b, const Majorant& c, double X, double Y,
                              std::uint64_t m_cut, std::uint64_t h_cut) {
  // |a(h) b(m) c(2m-h)| <= Ca Cb Cc 2^{beta_c} h^{beta_a} m^{beta_b + beta_c}
  const double log_k = std::log(a.constant) + std::log(b.constant) + std::log(c.constant) + c.exponent * std::log(2.0);
  const double alpha_m = b.exponent + c.exponent;
  const double alpha_h = a.exponent;
  const double m_tail = log_power_exp_tail(alpha_m, X, static_cast<double>(m_cut));
  const double m_all = log_power_exp_tail(alpha_m, X, 0.0);
  const double h_tail = log_power_exp_tail(alpha_h, Y, static_cast<double>(h_cut));
  const double h_all = log_power_exp_tail(alpha_h, Y, 0.0);
  const double log_bound = log_k + log_add(m_tail + h_all, m_all + h_tail);
  return std::exp(log_bound) * (1.0 + 1e-9);
}

TripleSumResult triple_sum_direct(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                                  const SmoothingKernel& kernel, const SumOptions& opt) {
  check_inputs(kernel, opt);
  const Cuts cuts = resolve_cuts(kernel, opt);
  const bool zero = zero_index_used(f3, opt);
  check_coverage(f1, f2, f3, cuts, zero);
  switch (kernel.kind) {
    case KernelKind::sharp: return direct_sharp(f1, f2, f3, cuts, zero, opt);
    case KernelKind::exponential: return direct_exponential(f1, f2, f3, kernel, cuts, zero, opt);
    case KernelKind::omega: return direct_omega(f1, f2, f3, kernel, cuts, zero, opt);
  }
  throw DomainError("unknown kernel");
}

TripleSumResult triple_sum_fft(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                               const SmoothingKernel& kernel, const SumOptions& opt) {
  check_inputs(kernel, opt);
  const Cuts cuts = resolve_cuts(kernel, opt);
  const bool zero = zero_index_used(f3, opt);
  check_coverage(f1, f2, f3, cuts, zero);
  if (opt.fft_precision == FftPrecision::extended) {
    return fft_impl<long double>(f1, f2, f3, kernel, cuts, zero, std::numeric_limits<long double>::digits);
  }
  return fft_impl<double>(f1, f2, f3, kernel, cuts, zero, std::numeric_limits<double>::digits);
}

TripleSumResult omega_sum(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3, double X,
                          const SumOptions& opt) {
  return triple_sum_direct(f1, f2, f3, SmoothingKernel::omega(X, f1.weight), opt);
}

}  // namespace tricorr

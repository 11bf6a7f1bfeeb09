#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tricorr/arith.hpp"
#include "tricorr/corrsum.hpp"
#include "tricorr/error.hpp"
#include "tricorr/forms.hpp"
#include "tricorr/parallel.hpp"

using namespace tricorr;

namespace {

const HeckeEigenform& delta() {
  static const HeckeEigenform f = gen_level1_eigenform(12, 20000);
  return f;
}

const HeckeEigenform& k16() {
  static const HeckeEigenform f = gen_level1_eigenform(16, 20000);
  return f;
}

std::vector<mpz_class> table(const HeckeEigenform& f) { return {f.q_expansion().begin(), f.q_expansion().end()}; }

CoefficientView view_of(const std::vector<mpz_class>& q, const Majorant& bound, double weight = 12) {
  CoefficientView v;
  v.q = q;
  v.weight = weight;
  v.bound = bound;
  v.label = "synthetic";
  v.cusp = q.empty() || q[0] == 0;
  return v;
}

void exp_weight(mpfr_t w, std::uint64_t m, std::uint64_t h, double X, double Y) {
  mpfr_t t;
  mpfr_init2(t, mpfr_get_prec(w));
  mpfr_set_ui(w, m, MPFR_RNDN);
  mpfr_div_d(w, w, -X, MPFR_RNDN);
  mpfr_set_ui(t, h, MPFR_RNDN);
  mpfr_div_d(t, t, -Y, MPFR_RNDN);
  mpfr_add(w, w, t, MPFR_RNDN);
  mpfr_exp(w, w, MPFR_RNDN);
  mpfr_clear(t);
}

}  // namespace

TEST_CASE("sharp kernel small cases") {
  const auto d = view(delta());
  const auto r1 = triple_sum_direct(d, d, d, SmoothingKernel::sharp(1, 1));
  CHECK(r1.value_string() == "1");
  CHECK(r1.terms_used == 1);

  // (m, h) = (1, 1): 1; (2, 1): tau(1) tau(2) tau(3) = -24 * 252.
  const auto r2 = triple_sum_direct(d, d, d, SmoothingKernel::sharp(2, 1));
  const auto t = table(delta());
  CHECK(oracle::triple_sum(t, t, t, 2, 1, [](mpfr_t w, auto, auto) { mpfr_set_ui(w, 1, MPFR_RNDN); }) == -6047.0);
  CHECK(r2.value_string() == "-6047");
  CHECK(r2.est_rel_err == 0.0);

  const auto f2 = triple_sum_fft(d, d, d, SmoothingKernel::sharp(2, 1));
  CHECK(std::fabs(f2.value.to_double() + 6047.0) <= 6047.0 * std::max(f2.est_rel_err, 1e-15));
}

TEST_CASE("exponential kernel isolates the first term at tiny scales") {
  const auto d = view(delta());
  const auto r = triple_sum_direct(d, d, d, SmoothingKernel::exponential(0.01, 0.01));
  const BigFloat ratio = r.value / exp(BigFloat(-200.0, 256));
  CHECK(ratio.to_double() > 0.9);
  CHECK(ratio.to_double() < 1.1);
  CHECK(r.est_rel_err < 1e-30);
}

TEST_CASE("direct sums match the brute-force oracle") {
  const auto t1 = table(delta());
  const auto t3 = table(k16());
  const auto a = view(delta()), c = view(k16());
  for (auto [X, Y] : {std::pair{8.0, 8.0}, {3.5, 9.25}, {12.0, 2.0}}) {
    CAPTURE(X);
    CAPTURE(Y);
    const auto kernel = SmoothingKernel::exponential(X, Y);
    const auto r = triple_sum_direct(a, a, c, kernel);
    const auto cuts = kernel.cuts();
    const double ref = oracle::triple_sum(t1, t1, t3, cuts.m_cut, cuts.h_cut,
                                          [&](mpfr_t w, auto m, auto h) { exp_weight(w, m, h, X, Y); });
    CHECK(oracle::rel_diff(r.value.to_double(), ref) < 1e-14);
    CHECK(r.terms_used <= r.m_cut * r.h_cut);
  }
  for (double X : {5.0, 17.0}) {
    const auto r = triple_sum_direct(a, a, c, SmoothingKernel::sharp(X, 2 * X + 3));
    const double ref =
        oracle::triple_sum(t1, t1, t3, X, 2 * X + 3, [](mpfr_t w, auto, auto) { mpfr_set_ui(w, 1, MPFR_RNDN); });
    CHECK(oracle::rel_diff(r.value.to_double(), ref) < 1e-15);
  }
}

TEST_CASE("omega-weighted sums") {
  const auto d = view(delta());
  CHECK(omega_sum(d, d, d, 1).value_string() == "1");
  CHECK(omega_sum(d, d, d, 0).value.is_zero());
  CHECK(omega_sum(d, d, d, 0).terms_used == 0);

  const auto t = table(delta());
  for (double X : {2.0, 7.0, 30.0}) {
    const auto r = omega_sum(d, d, d, X);
    // h^{-(12/2 + 3/2)} = (sqrt h)^{-15}
    const double ref = oracle::triple_sum(t, t, t, X, 2 * X, [&](mpfr_t w, auto, auto h) {
      mpfr_set_ui(w, h, MPFR_RNDN);
      mpfr_sqrt(w, w, MPFR_RNDN);
      mpfr_pow_si(w, w, -15, MPFR_RNDN);
    });
    CHECK(oracle::rel_diff(r.value.to_double(), ref) < 1e-14);
    CHECK(r.est_rel_err == 0.0);
  }
}

TEST_CASE("FFT path agrees with the direct path") {
  const auto d = view(delta());
  const auto e = view(k16());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> scale(8, 200);
  for (int i = 0; i < 6; ++i) {
    const double X = scale(rng), Y = scale(rng);
    CAPTURE(X);
    CAPTURE(Y);
    for (const auto& kernel : {SmoothingKernel::exponential(X, Y), SmoothingKernel::sharp(X, Y),
                               SmoothingKernel::omega(X, 12)}) {
      const auto dir = triple_sum_direct(d, e, d, kernel);
      const auto fft = triple_sum_fft(d, e, d, kernel);
      const double v = dir.value.to_double();
      const double diff = std::fabs(fft.value.to_double() - v);
      CHECK(diff <= (dir.est_rel_err + fft.est_rel_err) * std::fabs(v));
      CHECK(dir.terms_used == fft.terms_used);
      if (kernel.kind == KernelKind::exponential) CHECK(diff <= 1e-6 * std::fabs(v));
    }
  }
}

TEST_CASE("extended-precision FFT has a smaller error estimate") {
  const auto d = view(delta());
  SumOptions ext;
  ext.fft_precision = FftPrecision::extended;
  const auto kernel = SmoothingKernel::sharp(300, 300);
  const auto dir = triple_sum_direct(d, d, d, kernel);
  const auto r53 = triple_sum_fft(d, d, d, kernel);
  const auto r64 = triple_sum_fft(d, d, d, kernel, ext);
  CHECK(r64.precision_bits == 64);
  CHECK(r64.rounding_bound < r53.rounding_bound);
  const double v = dir.value.to_double();
  CHECK(std::fabs(r64.value.to_double() - v) <= r64.est_rel_err * std::fabs(v));
}

TEST_CASE("zero sequence gives an exact zero") {
  const auto d = view(delta());
  std::vector<mpz_class> zeros(1000);
  const auto z = view_of(zeros, {0.0, 0.0});
  for (const auto& kernel : {SmoothingKernel::exponential(10, 10), SmoothingKernel::sharp(50, 50)}) {
    CHECK(triple_sum_fft(d, z, d, kernel).value.is_zero());
    CHECK(triple_sum_direct(d, z, d, kernel).value.is_zero());
  }
}

TEST_CASE("positive-coefficient sums are monotone in X and Y") {
  std::vector<mpz_class> t = table(delta());
  for (auto& x : t) x = abs(x);
  const auto p = view_of(t, view(delta()).bound);
  for (KernelKind kind : {KernelKind::exponential, KernelKind::sharp, KernelKind::omega}) {
    auto make = [&](double X, double Y) {
      switch (kind) {
        case KernelKind::exponential: return SmoothingKernel::exponential(X, Y, 20);
        case KernelKind::sharp: return SmoothingKernel::sharp(X, Y);
        default: return SmoothingKernel::omega(X, 12);
      }
    };
    BigFloat prev(0.0, 256);
    for (double X = 1.0; X <= 40.0; X *= 1.7) {
      const auto r = triple_sum_direct(p, p, p, make(X, 6.0));
      CHECK(r.value >= prev);
      prev = r.value;
    }
    if (kind == KernelKind::omega) continue;
    prev = BigFloat(0.0, 256);
    for (double Y = 1.0; Y <= 40.0; Y *= 1.7) {
      const auto r = triple_sum_direct(p, p, p, make(6.0, Y));
      CHECK(r.value >= prev);
      prev = r.value;
    }
  }
}

TEST_CASE("sums are linear in each table") {
  std::mt19937_64 rng(5);
  const auto base = table(delta());
  std::vector<mpz_class> noise(base.size());
  for (std::size_t n = 1; n < noise.size(); ++n) noise[n] = static_cast<long>(rng() % 2001) - 1000;
  std::vector<mpz_class> sum(base.size());
  for (std::size_t n = 0; n < sum.size(); ++n) sum[n] = base[n] + noise[n];
  const Majorant loose{1e6, 6.0};
  const auto d = view_of(base, loose), e = view_of(noise, loose), s = view_of(sum, loose);
  const auto kernel = SmoothingKernel::sharp(60, 90);
  for (int slot = 0; slot < 3; ++slot) {
    auto pick = [&](int i, const CoefficientView& v) { return i == slot ? v : d; };
    const auto lhs = triple_sum_direct(pick(0, s), pick(1, s), pick(2, s), kernel);
    const auto x = triple_sum_direct(pick(0, d), pick(1, d), pick(2, d), kernel);
    const auto y = triple_sum_direct(pick(0, e), pick(1, e), pick(2, e), kernel);
    CHECK(lhs.value == x.value + y.value);
  }
}

TEST_CASE("doubling the tail factor stays within the reported error") {
  const auto d = view(delta());
  for (auto [X, Y] : {std::pair{4.0, 4.0}, {2.0, 6.0}, {10.0, 3.0}}) {
    CAPTURE(X);
    const auto r40 = triple_sum_direct(d, d, d, SmoothingKernel::exponential(X, Y, 40));
    const auto r80 = triple_sum_direct(d, d, d, SmoothingKernel::exponential(X, Y, 80));
    const double v = r40.value.to_double();
    CHECK(std::fabs(r80.value.to_double() - v) <= r40.est_rel_err * std::fabs(v));
    CHECK(r40.tail_bound > 0.0);
  }
}

TEST_CASE("sharp sum symmetric under h -> 2m - h when Y = 2X") {
  const auto a = view(delta()), b = view(k16());
  const auto k18 = gen_level1_eigenform(18, 200);
  const auto c = view(k18);
  for (double X : {3.0, 25.0, 70.0}) {
    const auto kernel = SmoothingKernel::sharp(X, 2 * X);
    CHECK(triple_sum_direct(a, b, c, kernel).value == triple_sum_direct(c, b, a, kernel).value);
  }
}

TEST_CASE("theta boundary term flag") {
  const auto th = gen_theta(5000);
  const auto t = view(th);
  const auto d = view(delta());
  const auto kernel = SmoothingKernel::sharp(400, 800);
  SumOptions without;
  without.include_zero_index = false;
  const auto with_r = triple_sum_direct(d, t, t, kernel);
  const auto without_r = triple_sum_direct(d, t, t, kernel, without);
  // h = 2m contributes a(2m) r1(m) r1(0) = 2 tau(2m) for square m.
  mpz_class expected = 0;
  for (std::uint64_t m = 1; m <= 400; ++m)
    if (arith::is_square(m)) expected += 2 * delta().a(2 * m);
  CHECK((with_r.value - without_r.value) == BigFloat(expected, 256));
  CHECK(with_r.terms_used == without_r.terms_used + 400);
  // For theta in every slot the boundary never contributes: m and 2m are not both squares.
  CHECK(triple_sum_direct(t, t, t, kernel).value == triple_sum_direct(t, t, t, kernel, without).value);
  const auto fft = triple_sum_fft(d, t, t, kernel);
  CHECK(std::fabs(fft.value.to_double() - with_r.value.to_double()) <=
        (fft.est_rel_err + 1e-15) * std::fabs(with_r.value.to_double()));
}

TEST_CASE("results are identical for any thread count") {
  const auto d = view(delta());
  const auto kernel = SmoothingKernel::exponential(60, 40);
  set_max_threads(1);
  const auto one = triple_sum_direct(d, d, d, kernel);
  const auto fone = triple_sum_fft(d, d, d, kernel);
  set_max_threads(4);
  const auto four = triple_sum_direct(d, d, d, kernel);
  const auto ffour = triple_sum_fft(d, d, d, kernel);
  set_max_threads(0);
  CHECK(one.value_string(80) == four.value_string(80));
  CHECK(fone.value_string(20) == ffour.value_string(20));
}

TEST_CASE("preconditions") {
  const auto small = gen_level1_eigenform(12, 100);
  const auto d = view(small);
  try {
    triple_sum_direct(d, d, d, SmoothingKernel::exponential(10, 10));
    FAIL("expected a coverage error");
  } catch (const CoverageError& e) {
    CHECK(e.required_n_max() == 799);
    CHECK(std::string(e.what()).find("799") != std::string::npos);
  }
  CHECK(required_n_max(SmoothingKernel::exponential(10, 10)) == 799);
  SumOptions low;
  low.precision_bits = 52;
  CHECK_THROWS_AS(triple_sum_direct(d, d, d, SmoothingKernel::sharp(2, 2), low), DomainError);
}

TEST_CASE("tail bound majorises the omitted terms") {
  // Sum the omitted region explicitly for a small window and compare.
  const auto t = table(delta());
  const auto b = view(delta()).bound;
  const double X = 3, Y = 3;
  const std::uint64_t mc = 12, hc = 9;
  double omitted = 0;
  for (std::uint64_t m = 1; m <= 400; ++m)
    for (std::uint64_t h = 1; h <= std::min<std::uint64_t>(400, 2 * m - 1); ++h) {
      if (m <= mc && h <= hc) continue;
      omitted += std::fabs(t[h].get_d() * t[m].get_d() * t[2 * m - h].get_d()) * std::exp(-(m / X) - h / Y);
    }
  const double bound = exponential_tail_bound(b, b, b, X, Y, mc, hc);
  CHECK(omitted <= bound);
  CHECK(bound < 1e8 * omitted);
}

TEST_CASE("large exponential sums via exact convolution match the oracle") {
  // 1300 x 1300 cuts exceed the term-by-term threshold.
  const auto t = table(delta());
  const auto d = view(delta());
  SumOptions opt;
  opt.cuts = Cuts{1300, 1300};
  const double X = 60, Y = 45;
  const auto r = triple_sum_direct(d, d, d, SmoothingKernel::exponential(X, Y), opt);
  CHECK(r.terms_used > 1'000'000);
  const double ref =
      oracle::triple_sum(t, t, t, 1300, 1300, [&](mpfr_t w, auto m, auto h) { exp_weight(w, m, h, X, Y); }, 256);
  CHECK(oracle::rel_diff(r.value.to_double(), ref) < 1e-14);
}

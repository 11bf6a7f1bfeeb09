#include <complex>
#include <quadmath.h>

#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tricorr/arith.hpp"
#include "tricorr/dseries.hpp"
#include "tricorr/error.hpp"
#include "tricorr/forms.hpp"

using namespace tricorr;
using cld = std::complex<long double>;

namespace {

const HeckeEigenform& delta() {
  static const HeckeEigenform f = gen_level1_eigenform(12, 4000);
  return f;
}

// Independent truncated sum in long double complex arithmetic.
cld brute_D(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, const std::vector<mpz_class>& c,
            double shift, std::complex<double> s, std::complex<double> w, std::uint64_t M, std::uint64_t H,
            bool zero = true) {
  cld total = 0;
  for (std::uint64_t m = 1; m <= M; ++m)
    for (std::uint64_t h = 1; h <= H; ++h) {
      if (h > 2 * m || (h == 2 * m && !zero)) continue;
      const mpz_class coef = a[h] * b[m] * c[2 * m - h];
      if (coef == 0) continue;
      const long double v = std::stold(coef.get_str());
      total += v * std::pow(cld(m), -(cld(s) + cld(shift))) * std::pow(cld(h), -cld(w));
    }
  return total;
}

std::vector<mpz_class> table(const HeckeEigenform& f) { return {f.q_expansion().begin(), f.q_expansion().end()}; }

std::complex<double> to_c(const BigComplex& z) { return {z.re.to_double(), z.im.to_double()}; }

}  // namespace

TEST_CASE("Dirichlet series small cases") {
  const auto& d = delta();
  const DirichletPoint p{{6, 0}, {10, 0}};
  CHECK(eval_D(d, d, d, p, 1, 1).value.re.to_string() == "1");

  const auto t = table(d);
  const auto r = eval_D(d, d, d, p, 2, 4);
  const cld ref = brute_D(t, t, t, 11, p.s, p.w, 2, 4);
  CHECK(std::fabs(r.value.re.to_double() - static_cast<double>(ref.real())) <= 1e-15 * std::fabs((double)ref.real()));
  CHECK(r.value.im.is_zero());

  const DirichletPoint q{{5.5, 3.25}, {9, -7.5}};
  const auto rq = eval_D(d, d, d, q, 30, 45);
  const cld refq = brute_D(t, t, t, 11, q.s, q.w, 30, 45);
  CHECK(std::abs(std::complex<long double>(rq.value.re.to_long_double(), rq.value.im.to_long_double()) - refq) <=
        1e-15L * std::abs(refq));
}

TEST_CASE("Dirichlet series region guard") {
  const auto& d = delta();
  CHECK_THROWS_AS(eval_D(d, d, d, {{1.0, 0}, {20, 0}}, 5, 5), DomainError);
  CHECK_THROWS_AS(eval_D(d, d, d, {{3.0, 0}, {4.4, 0}}, 5, 5), DomainError);
  try {
    eval_D(d, d, d, {{2.0, 0}, {5.0, 0}}, 5, 5);
    FAIL("expected region error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("7.5") != std::string::npos);
  }
  const auto v = view(d);
  CHECK(nominal_region(v, v, v).min_sigma_s == doctest::Approx(1.0));
  CHECK(nominal_region(v, v, v).min_sigma_sum == doctest::Approx(7.5));
  CHECK_THROWS_AS(eval_D(d, d, d, {{6, 0}, {10, 0}}, 3000, 10), CoverageError);
}

TEST_CASE("theta Dirichlet series") {
  const DirichletPoint p{{3, 0}, {3, 0}};
  CHECK(eval_D_theta(p, 1, 2).value.re.to_string() == "8");
  CHECK(eval_D_theta(p, 0, 5).value.re.is_zero());

  // Brute force over square triples: (h, m, 2m - h) with every entry counted by r1.
  const auto r = eval_D_theta(p, 25, 50);
  long double ref = 0;
  for (std::uint64_t m = 1; m <= 25; ++m)
    for (std::uint64_t h = 1; h <= std::min<std::uint64_t>(50, 2 * m); ++h) {
      const int r1h = arith::is_square(h) ? 2 : 0, r1m = arith::is_square(m) ? 2 : 0;
      const std::uint64_t j = 2 * m - h;
      const int r1j = j == 0 ? 1 : (arith::is_square(j) ? 2 : 0);
      ref += static_cast<long double>(r1h * r1m * r1j) * std::pow((long double)m, -2.5L) * std::pow((long double)h, -3.0L);
    }
  CHECK(std::fabs(r.value.re.to_double() - static_cast<double>(ref)) < 1e-15);
  // The square progression (1, 25, 49) is present: its term is 8 * 25^{-5/2}.
  const auto r24 = eval_D_theta(p, 24, 50);
  CHECK(r.value.re.to_double() - r24.value.re.to_double() > 8 * std::pow(25.0, -2.5) - 1e-15);
  CHECK_THROWS_AS(eval_D_theta({{1.0, 0}, {3, 0}}, 5, 5), DomainError);
  CHECK_THROWS_AS(eval_D_theta({{2.0, 0}, {0.5, 0}}, 5, 5), DomainError);
}

TEST_CASE("truncation consistency, conjugation and reality") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ss(2.5, 5), ww(8.5, 12), tt(-20, 20);
  const auto& d = delta();
  for (int i = 0; i < 6; ++i) {
    const DirichletPoint p{{ss(rng), tt(rng)}, {ww(rng), tt(rng)}};
    CAPTURE(p.s);
    CAPTURE(p.w);
    const auto r1 = eval_D(d, d, d, p, 60, 90);
    const auto r2 = eval_D(d, d, d, p, 120, 180);
    CHECK(std::abs(to_c(r1.value) - to_c(r2.value)) <= r1.tail_bound);
    CHECK(r2.tail_bound < r1.tail_bound);
    const auto rc = eval_D(d, d, d, {std::conj(p.s), std::conj(p.w)}, 60, 90);
    CHECK(rc.value.re == r1.value.re);
    CHECK(rc.value.im == -r1.value.im);
  }
  const auto real = eval_D(d, d, d, {{3.5, 0}, {9.0, 0}}, 50, 50);
  CHECK(real.value.im.is_zero());

  for (int i = 0; i < 4; ++i) {
    const DirichletPoint p{{1.2 + i * 0.5, tt(rng)}, {0.8 + i * 0.3, tt(rng)}};
    const auto t1 = eval_D_theta(p, 400, 400);
    const auto t2 = eval_D_theta(p, 800, 800);
    CHECK(std::abs(to_c(t1.value) - to_c(t2.value)) <= t1.tail_bound);
  }
}

TEST_CASE("quad-precision log Gamma") {
  __float128 re, im;
  dseries_detail::lgamma_q(13, 0, re, im);
  CHECK(fabsq(re - logq(479001600.0Q)) < 1e-30Q);
  for (double t : {0.5, 3.0, 17.0, 60.0}) {
    // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
    dseries_detail::lgamma_q(0.5Q, t, re, im);
    const __float128 expected = logq(M_PIq / coshq(M_PIq * t)) / 2;
    CHECK(fabsq(re - expected) < 1e-28Q);
  }
  // Gamma(z + 1) = z Gamma(z)
  __float128 r1, i1, r2, i2;
  dseries_detail::lgamma_q(2.25Q, 7.5Q, r1, i1);
  dseries_detail::lgamma_q(3.25Q, 7.5Q, r2, i2);
  const __float128 log_abs_z = logq(hypotq(2.25Q, 7.5Q));
  CHECK(fabsq(r2 - r1 - log_abs_z) < 1e-28Q);
}

TEST_CASE("Cahen-Mellin quadrature") {
  const double v = cahen_mellin_quadrature(8.0, 1.0, 40.0, 0.05);
  CHECK(std::fabs(v - std::exp(-1.0)) <= 1e-6 * std::exp(-1.0));
  for (double ratio : {0.2, 1.0, 5.0, 50.0}) {
    const double q = cahen_mellin_quadrature(3.0, ratio, 60.0, 0.05);
    CHECK(std::fabs(q - std::exp(-1.0 / ratio)) <= 1e-9 * std::exp(-1.0 / ratio));
  }
}

TEST_CASE("Mellin inversion at small cuts") {
  const auto v = view(delta());
  MellinOptions opt;
  opt.cuts = Cuts{30, 30};
  opt.contour.quad_step = 0.1;
  const auto rep = mellin_inversion_check(v, v, v, 2.0, 2.0, opt);
  CHECK(rep.has_direct_2d);
  CHECK(rep.rel_residual <= 1e-3);
  CHECK(rep.factored_rel_residual <= 1e-6);
  CHECK(rep.max_per_term_rel_err <= 1e-6);
  CHECK_FALSE(rep.nonconvergence);
  CHECK(rep.per_term.size() <= 2 * opt.samples);

  MellinOptions tiny;
  tiny.cuts = Cuts{20, 20};
  tiny.direct_2d = false;
  const auto z = mellin_inversion_check(v, v, v, 0.02, 0.02, tiny);
  CHECK(std::fabs(z.lhs_factored) <= 1e-8);
  CHECK(std::fabs(z.rhs) <= 1e-8);

  MellinOptions bad;
  bad.contour.sigma_w = 4.0;
  CHECK_THROWS_AS(mellin_inversion_check(v, v, v, 2.0, 2.0, bad), DomainError);
}

TEST_CASE("Mellin residual shrinks as t_max grows") {
  const auto v = view(delta());
  double prev = 1e300;
  for (double t_max : {8.0, 16.0, 32.0, 64.0}) {
    MellinOptions opt;
    opt.cuts = Cuts{40, 40};
    opt.direct_2d = false;
    opt.contour.t_max = t_max;
    const auto rep = mellin_inversion_check(v, v, v, 3.0, 3.0, opt);
    CHECK(rep.factored_rel_residual <= std::max(prev, 1e-12));
    prev = rep.factored_rel_residual;
  }
  CHECK(prev < 1e-9);
}

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "tricorr/bigfloat.hpp"
#include "tricorr/corrsum.hpp"
#include "tricorr/forms.hpp"

namespace tricorr {

// D(s, w) = sum_{m, h >= 1} a(h) b(m) c(2m - h) / (m^{s + k - 1} h^w).
// With forms of different weights the m-exponent shift is (k_b + k_c)/2 - 1,
// which is k - 1 for equal weights and -1/2 for theta.
struct DirichletPoint {
  std::complex<double> s;
  std::complex<double> w;
};

// Open region Re s > min_sigma_s, Re w > min_sigma_w, Re s + Re w > min_sigma_sum.
struct ConvergenceRegion {
  double min_sigma_s = 0.0;
  double min_sigma_w = -1e300;
  double min_sigma_sum = -1e300;

  bool contains(const DirichletPoint& p) const;
  std::string describe() const;
};

struct DirichletOptions {
  long precision_bits = 128;
  bool include_zero_index = true;
};

struct DirichletEval {
  DirichletPoint point;
  BigComplex value{128};
  std::uint64_t m_cut = 0;
  std::uint64_t h_cut = 0;
  // Rigorous majorant of every omitted term (m > m_cut, or h > h_cut).
  double tail_bound = 0.0;
  ConvergenceRegion region;
  long precision_bits = 0;
  std::uint64_t terms_used = 0;
};

double dirichlet_shift(const CoefficientView& b, const CoefficientView& c);

// Region in which the majorants of the given views make the series absolutely
// convergent (and the tail bound finite).
ConvergenceRegion convergence_region(const CoefficientView& a, const CoefficientView& b, const CoefficientView& c);
// The same region as the divisor-bound epsilon tends to 0: for equal weight k
// this is Re s > 1, Re s + Re w > (k + 3)/2.
ConvergenceRegion nominal_region(const CoefficientView& a, const CoefficientView& b, const CoefficientView& c);

// Throws DomainError (naming the thresholds) outside convergence_region and
// CoverageError when the tables are too short.
DirichletEval eval_D(const CoefficientView& a, const CoefficientView& b, const CoefficientView& c,
                     const DirichletPoint& p, std::uint64_t m_cut, std::uint64_t h_cut,
                     const DirichletOptions& opt = {});
// Eigenform version: picks the divisor-bound epsilon from the point's margin
// inside nominal_region.
DirichletEval eval_D(const HeckeEigenform& a, const HeckeEigenform& b, const HeckeEigenform& c,
                     const DirichletPoint& p, std::uint64_t m_cut, std::uint64_t h_cut,
                     const DirichletOptions& opt = {});
// Theta analogue with r1 in all three slots and m^{-(s - 1/2)}.
DirichletEval eval_D_theta(const DirichletPoint& p, std::uint64_t m_cut, std::uint64_t h_cut,
                           const DirichletOptions& opt = {});

struct Contour {
  double sigma_s = 2.0;
  double sigma_w = 8.0;
  double t_max = 60.0;
  double quad_step = 0.05;
};

// (1/2 pi i) int_{(sigma)} Gamma(z) ratio^z dz by the trapezoid rule on
// [-t_max, t_max]; equals e^{-1/ratio} in the limit.
double cahen_mellin_quadrature(double sigma, double ratio, double t_max, double step);

struct MellinOptions {
  Contour contour;
  Cuts cuts{400, 400};
  // Relative disagreement between t_max and 2 t_max that flags non-convergence.
  double tolerance = 1e-6;
  // The full 2-D tensor-product quadrature; the factored route always runs.
  bool direct_2d = true;
  std::size_t samples = 10;
};

struct PerTermCheck {
  char axis = 'w';  // 's': m-axis with X, 'w': h-axis with Y
  std::uint64_t n = 0;
  double quadrature = 0.0;
  double exact = 0.0;
  double rel_err = 0.0;
};

struct CheckReport {
  double X = 0.0, Y = 0.0;
  Contour contour;
  Cuts cuts;
  double rhs = 0.0;
  // Direct 2-D quadrature of D(s, w) X^{s+k-1} Y^w Gamma(s+k-1) Gamma(w).
  bool has_direct_2d = false;
  double lhs = 0.0;
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  // Per-term route: sum of a(h) b(m) c(2m-h) times 1-D quadratures.
  double lhs_factored = 0.0;
  double factored_abs_residual = 0.0;
  double factored_rel_residual = 0.0;
  double lhs_factored_doubled = 0.0;  // same with 2 t_max
  bool nonconvergence = false;
  std::vector<PerTermCheck> per_term;
  double max_per_term_rel_err = 0.0;
};

CheckReport mellin_inversion_check(const CoefficientView& a, const CoefficientView& b, const CoefficientView& c,
                                   double X, double Y, const MellinOptions& opt = {});

namespace dseries_detail {
// log Gamma(z) in quad precision for Re z > 0 (imaginary part up to 2 pi).
void lgamma_q(__float128 re, __float128 im, __float128& out_re, __float128& out_im);
}  // namespace dseries_detail

}  // namespace tricorr

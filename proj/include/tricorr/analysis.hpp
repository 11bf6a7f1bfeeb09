#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tricorr/corrsum.hpp"
#include "tricorr/forms.hpp"

namespace tricorr {

// ---------------------------------------------------------------------------
// Bound exponents X^x Y^y.

struct TheoremBoundParams {
  int k = 12;
  double theta = 7.0 / 64.0;
  bool rh = false;
  double epsilon = 0.0;
};

struct BoundExponents {
  double x = 0.0;
  double y = 0.0;
  // Growth exponent along Y = rho X.
  double slope() const { return x + y; }
};

// Throws DomainError unless 0 <= theta <= 7/64 and epsilon >= 0.
BoundExponents theorem_exponents(const TheoremBoundParams& p);
// Termwise Deligne bound: X^k Y^{(k+1)/2}.
BoundExponents naive_exponents(int k);
// Square-root cancellation in both sums: X^{k-1/2} Y^{k/2}.
BoundExponents sqrt2_exponents(int k);
// Square-root cancellation in m, 3/4-type cancellation in h:
// X^{k-1/2} Y^{(k-1)/2+1/4}.
BoundExponents three_quarter_exponents(int k);

double theorem_bound(const TheoremBoundParams& p, double X, double Y);
double naive_bound(int k, double X, double Y);
double sqrt2_bound(int k, double X, double Y);

// ---------------------------------------------------------------------------
// Grid scans.

// 2^{first + phase}, 2^{first + phase + step}, ... up to 2^{last}.
std::vector<double> geometric_grid(double first_log2, double last_log2, double step_log2 = 1.0, double phase = 0.0);

enum class ScanMethod { direct, fft, automatic };
const char* to_string(ScanMethod m);

struct ScanOptions {
  KernelKind kernel = KernelKind::exponential;
  double ratio = 1.0;  // Y / X
  double tail_factor = 40.0;
  // Raise T per point until the tail bound is below target_rel_err * |value|.
  bool adaptive_tail = false;
  double target_rel_err = 1e-9;
  double max_tail_factor = 200.0;
  ScanMethod method = ScanMethod::direct;
  // automatic: direct while the term count stays below this, FFT above.
  double auto_direct_max_terms = 2e9;
  // Also run the FFT path wherever the direct path runs and compare.
  bool cross_check = false;
  SumOptions sum;
};

struct ScanPoint {
  double X = 0.0;
  double Y = 0.0;
  double tail_factor = 0.0;
  TripleSumResult result;
  bool cross_checked = false;
  bool cross_ok = true;
  double cross_rel_diff = 0.0;
};

struct PlannedPoint {
  double X = 0.0;
  double Y = 0.0;
  double tail_factor = 0.0;
  std::uint64_t required_n_max = 0;
};

// Chooses the tail factor of each grid point (adaptive_tail) from an FFT
// estimate of the value; tables must cover the starting tail factor.
std::vector<PlannedPoint> plan_scan(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                                    const std::vector<double>& scales, const ScanOptions& opt);
std::uint64_t max_required_n_max(const std::vector<PlannedPoint>& plan);

// Throws DomainError for a non-increasing grid and CoverageError naming the
// first scale the tables cannot cover.
std::vector<ScanPoint> scan_grid(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                                 const std::vector<double>& scales, const ScanOptions& opt = {});
std::vector<ScanPoint> scan_grid(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                                 const std::vector<PlannedPoint>& plan, const ScanOptions& opt);

// One CSV row per grid point: X,Y,value,bound_thm1,bound_thm2,naive,sqrt2.
std::string scan_csv(const std::vector<ScanPoint>& points, const TheoremBoundParams& bounds);

// ---------------------------------------------------------------------------
// Exponent fits.

struct FitWindow {
  std::size_t begin = 0;
  std::size_t end = std::numeric_limits<std::size_t>::max();
};

struct SlopeBenchmark {
  std::string name;
  double slope = 0.0;
  double distance = 0.0;  // fitted slope minus benchmark
};

struct ExponentFit {
  std::vector<std::pair<double, double>> grid;  // (scale, |value|) used in the fit
  double slope = 0.0;
  double intercept = 0.0;  // natural-log intercept
  double r_squared = 0.0;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;
  std::vector<std::string> warnings;
  std::vector<SlopeBenchmark> benchmarks;
};

std::vector<SlopeBenchmark> slope_benchmarks(const TheoremBoundParams& p);

// Least squares of log|value| on log(scale) over points[window]. Zero values
// are dropped with a warning; throws DomainError with fewer than 3 usable
// points or when all scales are equal.
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points, FitWindow window = {},
                         std::vector<SlopeBenchmark> benchmarks = {});
ExponentFit fit_exponent(const std::vector<ScanPoint>& results, FitWindow window, const TheoremBoundParams& p);

// ---------------------------------------------------------------------------
// Omega-growth report.

struct OmegaRow {
  double X = 0.0;
  TripleSumResult result;
  double ratio = 0.0;  // |S(X)| / X^{k - 1/2}
};

struct OmegaReport {
  double exponent = 0.0;
  std::vector<OmegaRow> rows;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  bool degenerate = false;  // every ratio is zero
  bool monotonicity_evaluated = false;
  // R decreases monotonically by more than 1000x across the top decade.
  bool decays_in_top_decade = false;
  std::vector<std::string> notes;
};

OmegaReport omega_growth_report(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                                const std::vector<double>& scales, const SumOptions& opt = {});

// ---------------------------------------------------------------------------
// Nonvanishing of a(n - h) a(n) a(n + h).

struct APTriple {
  std::uint64_t h = 0;      // n - d
  std::uint64_t m = 0;      // n
  std::uint64_t third = 0;  // n + d = 2m - h
  mpz_class product;
};

struct NonvanishingStats {
  std::uint64_t n_limit = 0;
  std::uint64_t total = 0;
  std::uint64_t nonvanishing = 0;
  double density = 0.0;
  std::vector<APTriple> witnesses;  // first 100 in (n, d) order
};

// Counts pairs 1 <= d < n <= n_limit with a(n-d) a(n) a(n+d) != 0; needs
// coefficients up to 2 n_limit - 1.
NonvanishingStats nonvanishing_scan(const HeckeEigenform& f, std::uint64_t n_limit, std::size_t max_witnesses = 100);

// ---------------------------------------------------------------------------
// Three squares in arithmetic progression.

struct CongruentHit {
  std::uint64_t x = 0, y = 0, z = 0;  // roots
  std::uint64_t x2 = 0, y2 = 0, z2 = 0;
  std::uint64_t area = 0;  // common difference y^2 - x^2
  std::uint64_t squarefree_part = 0;
};

bool verify_hit(const CongruentHit& hit);

// All x^2 < y^2 <= square_limit with 2y^2 - x^2 a square, one primitive hit
// per squarefree part of the difference, sorted by squarefree part.
std::vector<CongruentHit> congruent_search(std::uint64_t square_limit);

}  // namespace tricorr

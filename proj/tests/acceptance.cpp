// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion ...]   (default: all of 1..9)

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "tricorr/analysis.hpp"
#include "tricorr/cli.hpp"
#include "tricorr/corrsum.hpp"
#include "tricorr/dseries.hpp"
#include "tricorr/forms.hpp"
#include "tricorr/verify.hpp"

using namespace tricorr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome exact_arithmetic() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  for (auto [k, n] : {std::pair{12, 100000ull}, {16, 10000ull}, {22, 10000ull}}) {
    const auto f = gen_level1_eigenform(k, n);
    const auto rep = verify_form(f, n);
    ok = ok && rep.pass() && rep.deligne_checked == n;
    detail += fmt("k=%d n<=%llu failures=%llu; ", k, n, static_cast<unsigned long long>(rep.failure_count));
  }
  const double t = seconds_since(t0);
  ok = ok && t <= 300;
  return {ok, detail + fmt("%.1fs (limit 300s)", t)};
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = gen_level1_eigenform(12, 50000);
  const auto v = view(f);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> scale(8.0, 512.0);
  bool ok = true;
  double worst_exp = 0, worst_ratio = 0;
  int failures = 0;
  for (int i = 0; i < 50; ++i) {
    const double X = scale(rng), Y = scale(rng);
    for (const SmoothingKernel& k :
         {SmoothingKernel::exponential(X, Y), SmoothingKernel::sharp(X, Y), SmoothingKernel::omega(X, 12)}) {
      const auto d = triple_sum_direct(v, v, v, k);
      const auto ff = triple_sum_fft(v, v, v, k);
      const double diff = std::fabs((d.value - ff.value).to_double());
      const double mag = std::fabs(d.value.to_double());
      // Both paths sum the same truncated range, so only their arithmetic
      // error bounds are in play; the shared tail bound is not.
      const double allowed = d.rounding_bound + ff.rounding_bound;
      const double combined = d.est_rel_err * mag + ff.est_rel_err * std::fabs(ff.value.to_double());
      const bool this_ok = diff <= allowed && diff <= combined;
      if (allowed > 0) worst_ratio = std::max(worst_ratio, diff / allowed);
      bool exp_ok = true;
      if (k.kind == KernelKind::exponential) {
        const double rel = mag > 0 ? diff / mag : diff;
        worst_exp = std::max(worst_exp, rel);
        exp_ok = rel <= 1e-6;
      }
      if (!this_ok || !exp_ok) {
        ++failures;
        ok = false;
      }
    }
  }
  const double t = seconds_since(t0);
  ok = ok && t <= 120;
  return {ok, fmt("150 comparisons, %d outside bounds; worst |diff|/bound %.2e; worst exp rel diff %.2e; %.1fs "
                  "(limit 120s)",
                  failures, worst_ratio, worst_exp, t)};
}

Outcome mellin_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = gen_level1_eigenform(12, 1000);
  const auto v = view(f);
  MellinOptions opt;
  opt.contour = {2.0, 8.0, 60.0, 0.05};
  opt.cuts = {400, 400};
  const auto rep = mellin_inversion_check(v, v, v, 5.0, 5.0, opt);
  const double t = seconds_since(t0);
  const bool ok = rep.has_direct_2d && rep.rel_residual <= 1e-3 && rep.max_per_term_rel_err <= 1e-6 && t <= 600;
  return {ok, fmt("rhs %.12e lhs %.12e rel residual %.2e (factored %.2e); max per-term %.2e; %.1fs (limit 600s)",
                  rep.rhs, rep.lhs, rep.rel_residual, rep.factored_rel_residual, rep.max_per_term_rel_err, t)};
}

Outcome truncation_honesty() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = gen_level1_eigenform(12, 1000);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> sig_s(1.3, 5.0), sum(8.0, 13.0), tt(-15.0, 15.0);
  int bad = 0;
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const double ss = sig_s(rng);
    const DirichletPoint p{{ss, tt(rng)}, {sum(rng) - ss, tt(rng)}};
    const auto a = eval_D(f, f, f, p, 150, 150);
    const auto b = eval_D(f, f, f, p, 300, 300);
    const double dre = (a.value.re - b.value.re).to_double(), dim = (a.value.im - b.value.im).to_double();
    const double diff = std::hypot(dre, dim);
    worst = std::max(worst, diff / a.tail_bound);
    if (!(diff <= a.tail_bound)) ++bad;
  }
  return {bad == 0, fmt("20 points, %d violations; worst |D(c)-D(2c)|/tail_bound %.2e; %.1fs", bad, worst,
                        seconds_since(t0))};
}

Outcome cancellation_exponent() {
  const auto t0 = std::chrono::steady_clock::now();
  ScanOptions opt;
  opt.adaptive_tail = true;
  std::string detail;
  bool ok = true;
  auto f = gen_level1_eigenform(12, 2 * 40 * 8192);
  for (double phase : {0.0, 1.0 / 3.0, 2.0 / 3.0}) {
    const auto grid = geometric_grid(6, 13, 1.0, phase);
    auto v = view(f);
    const auto plan = plan_scan(v, v, v, grid, opt);
    if (max_required_n_max(plan) > f.n_max()) {
      f = gen_level1_eigenform(12, max_required_n_max(plan));
      v = view(f);
    }
    const auto pts = scan_grid(v, v, v, plan, opt);
    double worst = 0;
    for (const auto& p : pts) worst = std::max(worst, p.result.est_rel_err);
    const auto fit = fit_exponent(pts, {}, TheoremBoundParams{});
    const bool this_ok = fit.slope >= 16.5 && fit.slope <= 17.8 && fit.slope <= 18.0;
    ok = ok && this_ok;
    detail += fmt("phase %.3f: slope %.3f r2 %.4f (%zu pts, max est_rel_err %.1e); ", phase, fit.slope, fit.r_squared,
                  fit.grid.size(), worst);
  }
  return {ok, detail + fmt("window [16.5, 17.8]; %.1fs", seconds_since(t0))};
}

Outcome omega_growth() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = gen_level1_eigenform(12, 8192);
  const auto v = view(f);
  const auto rep = omega_growth_report(v, v, v, geometric_grid(4, 12));
  std::printf("    X        |S_omega(X)|/X^11.5\n");
  for (const auto& r : rep.rows) std::printf("    %-8g %.6e\n", r.X, r.ratio);
  const bool ok = rep.rows.size() == 9 && rep.max_ratio > 0;
  return {ok, fmt("max ratio %.3e, min ratio %.3e, decays >1e3 over top decade: %s; %.1fs", rep.max_ratio,
                  rep.min_ratio, rep.decays_in_top_decade ? "yes" : "no", seconds_since(t0))};
}

std::uint64_t brute_nonvanishing(const HeckeEigenform& f, std::uint64_t N) {
  std::uint64_t count = 0;
  for (std::uint64_t n = 2; n <= N; ++n)
    for (std::uint64_t h = 1; h < n; ++h)
      if (f.a(n - h) * f.a(n) * f.a(n + h) != 0) ++count;
  return count;
}

Outcome nonvanishing() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = gen_level1_eigenform(12, 19999);
  const auto st = nonvanishing_scan(f, 10000);
  std::vector<mpz_class> c;
  for (std::uint64_t n = 1; n <= 599; ++n) c.push_back(f.a(n));
  for (std::uint64_t z : {3, 10, 64, 101, 257, 400}) c[z - 1] = 0;
  const HeckeEigenform zeroed(12, 1, "zeroed", c, FormSource::file);
  const auto zs = nonvanishing_scan(zeroed, 300);
  const std::uint64_t expect = brute_nonvanishing(zeroed, 300);
  const bool ok = st.density == 1.0 && st.total == 10000ull * 9999 / 2 && zs.nonvanishing == expect;
  return {ok, fmt("delta n<=1e4: %llu/%llu density %.17g; zeroed form: %llu vs oracle %llu; %.1fs",
                  static_cast<unsigned long long>(st.nonvanishing), static_cast<unsigned long long>(st.total),
                  st.density, static_cast<unsigned long long>(zs.nonvanishing),
                  static_cast<unsigned long long>(expect), seconds_since(t0))};
}

Outcome congruent() {
  const auto hits = congruent_search(2500);
  bool five = false, six = false, verified = true;
  std::string parts;
  for (const auto& h : hits) {
    verified = verified && verify_hit(h);
    five = five || (h.squarefree_part == 5 && h.x2 == 961 && h.y2 == 1681 && h.z2 == 2401);
    six = six || (h.squarefree_part == 6 && h.x2 == 1 && h.y2 == 25 && h.z2 == 49);
    parts += std::to_string(h.squarefree_part) + " ";
  }
  return {five && six && verified, "squarefree parts: " + parts + (verified ? "(all re-verified)" : "(VERIFY FAILED)")};
}

Outcome reproducibility() {
  const auto t0 = std::chrono::steady_clock::now();
  auto run = [](const char* threads) {
    std::ostringstream out, err;
    const int rc = cli::run({"--threads", threads, "scan", "--grid", "4:11", "--cross-check"}, out, err);
    return std::pair{rc, out.str()};
  };
  const auto a = run("1");
  const auto b = run("4");
  const bool ok = a.first == 0 && b.first == 0 && !a.second.empty() && a.second == b.second;
  return {ok, fmt("scan CSV with --threads 1 and 4: %zu bytes, %s; %.1fs", a.second.size(),
                  a.second == b.second ? "identical" : "DIFFERENT", seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exact arithmetic (Hecke relations, Deligne bound)", exact_arithmetic},
      {"direct/FFT oracle equivalence", oracle_equivalence},
      {"Mellin inversion identity", mellin_identity},
      {"Dirichlet series truncation honesty", truncation_honesty},
      {"cancellation exponent of the smoothed sum", cancellation_exponent},
      {"omega-growth report", omega_growth},
      {"nonvanishing of a(n-h)a(n)a(n+h)", nonvanishing},
      {"congruent numbers from square progressions", congruent},
      {"scan reproducibility across thread counts", reproducibility},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d: %s - %s: %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

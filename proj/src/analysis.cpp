#include "tricorr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "tricorr/arith.hpp"
#include "tricorr/error.hpp"

namespace tricorr {

namespace {

constexpr double kMaxTheta = 7.0 / 64.0;

void check_params(const TheoremBoundParams& p) {
  if (p.k < 1) throw DomainError("weight k must be positive");
  if (!(p.theta >= 0.0 && p.theta <= kMaxTheta)) throw DomainError("theta must lie in [0, 7/64]");
  if (!(p.epsilon >= 0.0) || !std::isfinite(p.epsilon)) throw DomainError("epsilon must be finite and >= 0");
}

void check_scales(double X, double Y) {
  if (!(X >= 1.0) || !(Y >= 1.0)) throw DomainError("bounds need X, Y >= 1");
}

double evaluate(BoundExponents e, double X, double Y) { return std::pow(X, e.x) * std::pow(Y, e.y); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// log |v| without overflowing double.
double log_abs(const BigFloat& v) {
  long e = 0;
  const double m = mpfr_get_d_2exp(&e, v.get(), MPFR_RNDN);
  return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
}

SmoothingKernel kernel_at(const ScanOptions& opt, double X, double tail_factor, double weight) {
  switch (opt.kernel) {
    case KernelKind::exponential: return SmoothingKernel::exponential(X, opt.ratio * X, tail_factor);
    case KernelKind::sharp: return SmoothingKernel::sharp(X, opt.ratio * X);
    case KernelKind::omega: return SmoothingKernel::omega(X, weight);
  }
  throw DomainError("unknown kernel");
}

void check_grid(const std::vector<double>& scales) {
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !std::isfinite(scales[i])) throw DomainError("grid scales must be positive and finite");
    if (i > 0 && !(scales[i] > scales[i - 1])) throw DomainError("grid scales must be strictly increasing");
  }
}

std::uint64_t shortest(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3) {
  return std::min({f1.n_max(), f2.n_max(), f3.n_max()});
}

void check_point_coverage(std::uint64_t have, std::uint64_t need, double X) {
  if (have < need) {
    throw CoverageError("grid point X = " + fmt(X) + " needs coefficient tables with n_max >= " +
                            std::to_string(need) + " (have " + std::to_string(have) + ")",
                        need);
  }
}

double rel_diff(const BigFloat& a, const BigFloat& b) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  const BigFloat d = abs(a - b);
  const double scale = std::max(std::fabs(a.to_double()), std::fabs(b.to_double()));
  return d.to_double() / scale;
}

bool use_direct(const ScanOptions& opt, const SmoothingKernel& kernel) {
  switch (opt.method) {
    case ScanMethod::direct: return true;
    case ScanMethod::fft: return false;
    case ScanMethod::automatic: {
      const Cuts c = kernel.cuts();
      return static_cast<double>(c.m_cut) * static_cast<double>(c.h_cut) <= opt.auto_direct_max_terms;
    }
  }
  return true;
}

ExponentFit fit_logs(std::vector<std::pair<double, double>> grid, const std::vector<double>& lx,
                     const std::vector<double>& ly, std::vector<char> usable, FitWindow window,
                     std::vector<SlopeBenchmark> benchmarks) {
  ExponentFit fit;
  const std::size_t n = lx.size();
  fit.window_begin = std::min(window.begin, n);
  fit.window_end = std::min(window.end, n);
  if (fit.window_begin >= fit.window_end) throw DomainError("fit window is empty");

  std::vector<double> xs, ys;
  for (std::size_t i = fit.window_begin; i < fit.window_end; ++i) {
    if (!usable[i]) {
      fit.warnings.push_back("dropped zero value at scale " + fmt(grid[i].first));
      continue;
    }
    xs.push_back(lx[i]);
    ys.push_back(ly[i]);
    fit.grid.push_back(grid[i]);
  }
  if (xs.size() < 3) throw DomainError("fit needs at least 3 nonzero points in the window");

  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  long double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const long double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0) throw DomainError("degenerate fit: all scales are equal");
  const long double slope = sxy / sxx;
  fit.slope = static_cast<double>(slope);
  fit.intercept = static_cast<double>(my - slope * mx);
  long double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const long double r = ys[i] - (my + slope * (xs[i] - mx));
    ss_res += r * r;
  }
  fit.r_squared = syy > 0 ? static_cast<double>(std::clamp<long double>(1 - ss_res / syy, 0, 1)) : 1.0;
  for (auto& b : benchmarks) b.distance = fit.slope - b.slope;
  fit.benchmarks = std::move(benchmarks);
  return fit;
}

}  // namespace

BoundExponents theorem_exponents(const TheoremBoundParams& p) {
  check_params(p);
  const double k = p.k;
  BoundExponents e;
  e.x = k - 1.0 + p.theta + 0.5 + p.epsilon;
  e.y = (k - 1.0) / 2.0 - p.theta + (p.rh ? 0.25 : 0.5) + p.epsilon;
  return e;
}

BoundExponents naive_exponents(int k) { return {static_cast<double>(k), (k + 1.0) / 2.0}; }
BoundExponents sqrt2_exponents(int k) { return {k - 0.5, k / 2.0}; }
BoundExponents three_quarter_exponents(int k) { return {k - 0.5, (k - 1.0) / 2.0 + 0.25}; }

double theorem_bound(const TheoremBoundParams& p, double X, double Y) {
  check_scales(X, Y);
  return evaluate(theorem_exponents(p), X, Y);
}

double naive_bound(int k, double X, double Y) {
  check_scales(X, Y);
  return evaluate(naive_exponents(k), X, Y);
}

double sqrt2_bound(int k, double X, double Y) {
  check_scales(X, Y);
  return evaluate(sqrt2_exponents(k), X, Y);
}

std::vector<double> geometric_grid(double first_log2, double last_log2, double step_log2, double phase) {
  if (!(step_log2 > 0.0)) throw DomainError("grid step must be positive");
  if (!std::isfinite(first_log2) || !std::isfinite(last_log2) || !std::isfinite(phase)) {
    throw DomainError("grid exponents must be finite");
  }
  std::vector<double> out;
  for (long i = 0;; ++i) {
    const double e = first_log2 + phase + static_cast<double>(i) * step_log2;
    if (e > last_log2 + 1e-9) break;
    out.push_back(std::exp2(e));
  }
  return out;
}

const char* to_string(ScanMethod m) {
  switch (m) {
    case ScanMethod::direct: return "direct";
    case ScanMethod::fft: return "fft";
    case ScanMethod::automatic: return "auto";
  }
  return "?";
}

std::vector<PlannedPoint> plan_scan(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                                    const std::vector<double>& scales, const ScanOptions& opt) {
  check_grid(scales);
  std::vector<PlannedPoint> plan;
  const std::uint64_t have = shortest(f1, f2, f3);
  for (double X : scales) {
    double T = opt.tail_factor;
    SmoothingKernel kernel = kernel_at(opt, X, T, f1.weight);
    const std::uint64_t base_need = required_n_max(kernel, opt.sum);
    if (opt.adaptive_tail && opt.kernel == KernelKind::exponential) {
      check_point_coverage(have, base_need, X);
      SumOptions est_opt = opt.sum;
      est_opt.fft_precision = FftPrecision::extended;
      const TripleSumResult est = triple_sum_fft(f1, f2, f3, kernel, est_opt);
      double target = std::fabs(est.value.to_double());
      // A value lost in rounding noise is measured against the absolute sum.
      if (!(target > 10.0 * est.rounding_bound)) target = est.abs_sum;
      target *= opt.target_rel_err;
      for (;;) {
        const Cuts c = kernel.cuts();
        const double tail = exponential_tail_bound(f1.bound, f2.bound, f3.bound, X, kernel.Y, c.m_cut, c.h_cut);
        if (tail <= target || T >= opt.max_tail_factor) break;
        T = std::min(T + 10.0, opt.max_tail_factor);
        kernel = kernel_at(opt, X, T, f1.weight);
      }
    }
    plan.push_back({X, kernel.Y, T, required_n_max(kernel, opt.sum)});
  }
  return plan;
}

std::uint64_t max_required_n_max(const std::vector<PlannedPoint>& plan) {
  std::uint64_t n = 0;
  for (const auto& p : plan) n = std::max(n, p.required_n_max);
  return n;
}

std::vector<ScanPoint> scan_grid(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                                 const std::vector<double>& scales, const ScanOptions& opt) {
  if (opt.adaptive_tail && opt.kernel == KernelKind::exponential) {
    return scan_grid(f1, f2, f3, plan_scan(f1, f2, f3, scales, opt), opt);
  }
  check_grid(scales);
  std::vector<PlannedPoint> plan;
  for (double X : scales) {
    const SmoothingKernel kernel = kernel_at(opt, X, opt.tail_factor, f1.weight);
    plan.push_back({X, kernel.Y, opt.tail_factor, required_n_max(kernel, opt.sum)});
  }
  return scan_grid(f1, f2, f3, plan, opt);
}

std::vector<ScanPoint> scan_grid(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                                 const std::vector<PlannedPoint>& plan, const ScanOptions& opt) {
  const std::uint64_t have = shortest(f1, f2, f3);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (i > 0 && !(plan[i].X > plan[i - 1].X)) throw DomainError("grid scales must be strictly increasing");
    check_point_coverage(have, plan[i].required_n_max, plan[i].X);
  }

  std::vector<ScanPoint> out;
  out.reserve(plan.size());
  for (const auto& p : plan) {
    const SmoothingKernel kernel = kernel_at(opt, p.X, p.tail_factor, f1.weight);
    ScanPoint pt;
    pt.X = p.X;
    pt.Y = kernel.Y;
    pt.tail_factor = opt.kernel == KernelKind::exponential ? p.tail_factor : 0.0;
    if (use_direct(opt, kernel)) {
      pt.result = triple_sum_direct(f1, f2, f3, kernel, opt.sum);
      if (opt.cross_check) {
        const TripleSumResult fft = triple_sum_fft(f1, f2, f3, kernel, opt.sum);
        pt.cross_checked = true;
        const BigFloat diff = abs(pt.result.value - fft.value);
        const double allowed = pt.result.est_rel_err * std::fabs(pt.result.value.to_double()) +
                               fft.est_rel_err * std::fabs(fft.value.to_double());
        pt.cross_ok = diff.to_double() <= allowed;
        pt.cross_rel_diff = rel_diff(pt.result.value, fft.value);
        if (!pt.cross_ok) pt.result.warnings.push_back("direct and FFT values disagree beyond their error bounds");
      }
    } else {
      pt.result = triple_sum_fft(f1, f2, f3, kernel, opt.sum);
    }
    out.push_back(std::move(pt));
  }
  return out;
}

std::string scan_csv(const std::vector<ScanPoint>& points, const TheoremBoundParams& bounds) {
  TheoremBoundParams rh = bounds;
  rh.rh = true;
  std::ostringstream os;
  os << "X,Y,value,bound_thm1,bound_thm2,naive,sqrt2,est_rel_err,method,tail_factor\n";
  for (const auto& p : points) {
    const bool in_range = p.X >= 1.0 && p.Y >= 1.0;
    auto bound = [&](auto f) { return in_range ? fmt(f()) : std::string("nan"); };
    os << fmt(p.X) << ',' << fmt(p.Y) << ',' << p.result.value.to_string(20) << ','
       << bound([&] { return theorem_bound(bounds, p.X, p.Y); }) << ','
       << bound([&] { return theorem_bound(rh, p.X, p.Y); }) << ','
       << bound([&] { return naive_bound(bounds.k, p.X, p.Y); }) << ','
       << bound([&] { return sqrt2_bound(bounds.k, p.X, p.Y); }) << ',' << fmt(p.result.est_rel_err) << ','
       << to_string(p.result.method) << ',' << fmt(p.tail_factor) << '\n';
  }
  return os.str();
}

std::vector<SlopeBenchmark> slope_benchmarks(const TheoremBoundParams& p) {
  TheoremBoundParams rh = p;
  rh.rh = true;
  return {
      {"naive", naive_exponents(p.k).slope(), 0.0},
      {"double_square_root", sqrt2_exponents(p.k).slope(), 0.0},
      {"unconditional", theorem_exponents(p).slope(), 0.0},
      {"under_rh", theorem_exponents(rh).slope(), 0.0},
      {"three_quarter", three_quarter_exponents(p.k).slope(), 0.0},
  };
}

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points, FitWindow window,
                         std::vector<SlopeBenchmark> benchmarks) {
  std::vector<double> lx, ly;
  std::vector<char> usable;
  for (const auto& [s, v] : points) {
    if (!(s > 0.0)) throw DomainError("fit scales must be positive");
    lx.push_back(std::log(s));
    const bool ok = v != 0.0 && std::isfinite(v);
    usable.push_back(ok);
    ly.push_back(ok ? std::log(std::fabs(v)) : 0.0);
  }
  std::vector<std::pair<double, double>> grid;
  for (const auto& [s, v] : points) grid.emplace_back(s, std::fabs(v));
  return fit_logs(std::move(grid), lx, ly, std::move(usable), window, std::move(benchmarks));
}

ExponentFit fit_exponent(const std::vector<ScanPoint>& results, FitWindow window, const TheoremBoundParams& p) {
  std::vector<double> lx, ly;
  std::vector<char> usable;
  std::vector<std::pair<double, double>> grid;
  for (const auto& r : results) {
    lx.push_back(std::log(r.X));
    const bool ok = !r.result.value.is_zero();
    usable.push_back(ok);
    ly.push_back(ok ? log_abs(r.result.value) : 0.0);
    grid.emplace_back(r.X, std::fabs(r.result.value.to_double()));
  }
  return fit_logs(std::move(grid), lx, ly, std::move(usable), window, slope_benchmarks(p));
}

OmegaReport omega_growth_report(const CoefficientView& f1, const CoefficientView& f2, const CoefficientView& f3,
                                const std::vector<double>& scales, const SumOptions& opt) {
  check_grid(scales);
  OmegaReport rep;
  rep.exponent = f1.weight - 0.5;
  const std::uint64_t have = shortest(f1, f2, f3);
  for (double X : scales) check_point_coverage(have, required_n_max(SmoothingKernel::omega(X, f1.weight), opt), X);

  for (double X : scales) {
    OmegaRow row;
    row.X = X;
    row.result = omega_sum(f1, f2, f3, X, opt);
    row.ratio = row.result.value.is_zero() ? 0.0 : std::exp(log_abs(row.result.value) - rep.exponent * std::log(X));
    rep.rows.push_back(std::move(row));
  }
  if (rep.rows.empty()) return rep;

  rep.max_ratio = rep.rows.front().ratio;
  rep.min_ratio = rep.rows.front().ratio;
  for (const auto& r : rep.rows) {
    rep.max_ratio = std::max(rep.max_ratio, r.ratio);
    rep.min_ratio = std::min(rep.min_ratio, r.ratio);
  }
  rep.degenerate = rep.max_ratio == 0.0;
  if (rep.degenerate) rep.notes.push_back("all sums vanish; the coefficient data is degenerate");

  const double top = rep.rows.back().X;
  std::vector<double> decade;
  for (const auto& r : rep.rows) {
    if (r.X >= top / 10.0) decade.push_back(r.ratio);
  }
  if (decade.size() >= 2 && !rep.degenerate) {
    rep.monotonicity_evaluated = true;
    const bool monotone = std::is_sorted(decade.rbegin(), decade.rend());
    rep.decays_in_top_decade = monotone && decade.back() * 1e3 < decade.front();
    if (rep.decays_in_top_decade) {
      rep.notes.push_back("ratio decays monotonically by more than 1000x across the top decade");
    }
  } else if (!rep.degenerate) {
    rep.notes.push_back("fewer than two points in the top decade; monotonicity not evaluated");
  }
  rep.notes.push_back("sums are not corrected for spectral main terms");
  return rep;
}

NonvanishingStats nonvanishing_scan(const HeckeEigenform& f, std::uint64_t n_limit, std::size_t max_witnesses) {
  NonvanishingStats st;
  st.n_limit = n_limit;
  if (n_limit < 2) return st;
  const std::uint64_t need = 2 * n_limit - 1;
  if (f.n_max() < need) {
    throw CoverageError("nonvanishing scan to n = " + std::to_string(n_limit) + " needs n_max >= " +
                            std::to_string(need) + " (have " + std::to_string(f.n_max()) + ")",
                        need);
  }
  const auto q = f.q_expansion();
  std::vector<char> nz(need + 1);
  for (std::uint64_t i = 1; i <= need; ++i) nz[i] = sgn(q[i]) != 0;

  for (std::uint64_t n = 2; n <= n_limit; ++n) {
    if (!nz[n]) {
      st.total += n - 1;
      continue;
    }
    for (std::uint64_t d = 1; d < n; ++d) {
      ++st.total;
      if (!nz[n - d] || !nz[n + d]) continue;
      ++st.nonvanishing;
      if (st.witnesses.size() < max_witnesses) {
        APTriple t;
        t.h = n - d;
        t.m = n;
        t.third = n + d;
        t.product = q[n - d] * q[n] * q[n + d];
        st.witnesses.push_back(std::move(t));
      }
    }
  }
  st.density = static_cast<double>(st.nonvanishing) / static_cast<double>(st.total);
  return st;
}

bool verify_hit(const CongruentHit& hit) {
  using u128 = unsigned __int128;
  if (hit.x == 0 || !(hit.x < hit.y) || !(hit.y < hit.z)) return false;
  if (u128(hit.x) * hit.x != hit.x2 || u128(hit.y) * hit.y != hit.y2 || u128(hit.z) * hit.z != hit.z2) return false;
  if (!arith::is_square(hit.x2) || !arith::is_square(hit.y2) || !arith::is_square(hit.z2)) return false;
  if (hit.y2 - hit.x2 != hit.area || hit.z2 - hit.y2 != hit.area) return false;
  if (!arith::is_squarefree(hit.squarefree_part) || hit.area % hit.squarefree_part != 0) return false;
  return arith::is_square(hit.area / hit.squarefree_part);
}

std::vector<CongruentHit> congruent_search(std::uint64_t square_limit) {
  if (square_limit > (std::uint64_t{1} << 62)) throw DomainError("square_limit must not exceed 2^62");
  std::map<std::uint64_t, CongruentHit> best;
  const std::uint64_t y_max = arith::isqrt(square_limit);
  for (std::uint64_t y = 2; y <= y_max; ++y) {
    const std::uint64_t y2 = y * y;
    for (std::uint64_t x = 1; x < y; ++x) {
      const std::uint64_t x2 = x * x;
      const std::uint64_t z2 = 2 * y2 - x2;
      if (!arith::is_square(z2)) continue;
      const std::uint64_t z = arith::isqrt(z2);
      if (arith::gcd(arith::gcd(x, y), z) != 1) continue;
      CongruentHit h{x, y, z, x2, y2, z2, y2 - x2, arith::squarefree_part(y2 - x2)};
      best.try_emplace(h.squarefree_part, h);
    }
  }
  std::vector<CongruentHit> out;
  for (auto& [t, h] : best) {
    if (!verify_hit(h)) throw Error("internal error: congruent hit failed re-verification");
    out.push_back(h);
  }
  return out;
}

}  // namespace tricorr

#define MPFR_WANT_FLOAT128 1
#include "tricorr/dseries.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tricorr/arith.hpp"
#include "tricorr/error.hpp"
#include "tricorr/parallel.hpp"

namespace tricorr {

namespace {

using quad = __float128;

constexpr std::size_t kBlock = 64;
constexpr long kGuardBits = 32;

// sum_{n >= start} n^{-nu} for nu > 1, start >= 1.
double power_tail(double nu, double start) {
  start = std::max(start, 1.0);
  return std::pow(start, -nu) + std::pow(start, 1.0 - nu) / (nu - 1.0);
}

bool all_square_supported(const CoefficientView& a, const CoefficientView& b, const CoefficientView& c) {
  return a.square_support && b.square_support && c.square_support;
}

ConvergenceRegion region_from_exponents(double beta_a, double beta_b, double beta_c, double shift) {
  ConvergenceRegion r;
  r.min_sigma_s = 1.0 + beta_b + beta_c - shift;
  r.min_sigma_sum = 2.0 + beta_a + beta_b + beta_c - shift;
  return r;
}

ConvergenceRegion theta_region(double shift) {
  ConvergenceRegion r;
  // m = u^2 and h = v^2: sum u^{-2(sigma_s + shift)} v^{-2 sigma_w}.
  r.min_sigma_s = 0.5 - shift;
  r.min_sigma_w = 0.5;
  return r;
}

double tail_general(const CoefficientView& a, const CoefficientView& b, const CoefficientView& c, double sigma_s,
                    double sigma_w, double shift, std::uint64_t M, std::uint64_t H) {
  // |a(h) b(m) c(2m-h)| m^{-sigma_s-shift} h^{-sigma_w} <= K h^{-gamma} m^{-mu}, h <= 2m.
  const double K = a.bound.constant * b.bound.constant * c.bound.constant * std::pow(2.0, c.bound.exponent);
  const double mu = sigma_s + shift - b.bound.exponent - c.bound.exponent;
  double gamma = sigma_w - a.bound.exponent;
  // Lowering gamma only enlarges the majorant (h >= 1); avoid the log case.
  if (std::fabs(gamma - 1.0) < 1e-9) gamma -= 1e-6;
  const double Md = static_cast<double>(M), Hd = static_cast<double>(H);
  const double m0 = std::floor(Hd / 2.0) + 1.0;  // smallest m with 2m > H
  const bool has_t2 = 2 * M > H;
  double t1, t2 = 0.0;
  if (gamma > 1.0) {
    const double zeta_gamma = 1.0 + 1.0 / (gamma - 1.0);
    t1 = zeta_gamma * power_tail(mu, Md + 1.0);
    if (has_t2) t2 = power_tail(gamma, Hd + 1.0) * power_tail(mu, m0);
  } else {
    // sum_{h <= 2m} h^{-gamma} <= (2m + 1)^{1-gamma}/(1-gamma) <= (3m)^{1-gamma}/(1-gamma)
    const double A = std::pow(3.0, 1.0 - gamma) / (1.0 - gamma);
    const double nu = mu + gamma - 1.0;
    t1 = A * power_tail(nu, Md + 1.0);
    if (has_t2) t2 = A * power_tail(nu, m0);
  }
  return K * (t1 + t2) * (1.0 + 1e-12);
}

double tail_theta(double sigma_s, double sigma_w, double shift, std::uint64_t M, std::uint64_t H) {
  const double alpha = 2.0 * (sigma_s + shift);
  const double beta = 2.0 * sigma_w;
  const double u0 = static_cast<double>(arith::isqrt(M)) + 1.0;
  const double v0 = static_cast<double>(arith::isqrt(H)) + 1.0;
  const double zeta_alpha = 1.0 + 1.0 / (alpha - 1.0);
  const double zeta_beta = 1.0 + 1.0 / (beta - 1.0);
  // |r1 r1 r1| <= 8; omitted terms have u >= u0 or v >= v0.
  return 8.0 * (power_tail(alpha, u0) * zeta_beta + zeta_alpha * power_tail(beta, v0)) * (1.0 + 1e-12);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

std::string point_string(const DirichletPoint& p) {
  return "s = " + fmt(p.s.real()) + (p.s.imag() < 0 ? " - " : " + ") + fmt(std::fabs(p.s.imag())) + "i, w = " +
         fmt(p.w.real()) + (p.w.imag() < 0 ? " - " : " + ") + fmt(std::fabs(p.w.imag())) + "i";
}

void check_coverage(const CoefficientView& a, const CoefficientView& b, const CoefficientView& c, std::uint64_t M,
                    std::uint64_t H) {
  if (M == 0 || H == 0) return;
  const std::uint64_t need_a = std::min<std::uint64_t>(H, 2 * M);
  const std::uint64_t required = std::max({need_a, M, 2 * M - 1});
  if (a.n_max() < need_a || b.n_max() < M || c.n_max() < 2 * M - 1) {
    throw CoverageError("coefficient tables too short for cuts (" + std::to_string(M) + ", " + std::to_string(H) +
                            "); need n_max >= " + std::to_string(required),
                        required);
  }
}

// ---------------------------------------------------------------------------
// Quad-precision complex helpers for the quadrature.

struct QC {
  quad re = 0, im = 0;
};

inline QC operator+(QC a, QC b) { return {a.re + b.re, a.im + b.im}; }
inline QC operator-(QC a, QC b) { return {a.re - b.re, a.im - b.im}; }
inline QC operator*(QC a, QC b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline QC operator*(quad s, QC a) { return {s * a.re, s * a.im}; }
inline QC conj(QC a) { return {a.re, -a.im}; }

QC qdiv(QC a, QC b) {
  const quad d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
QC qlog(QC z) { return {logq(hypotq(z.re, z.im)), atan2q(z.im, z.re)}; }
QC qexp(QC z) {
  const quad m = expq(z.re);
  quad s, c;
  sincosq(z.im, &s, &c);
  return {m * c, m * s};
}

// B_{2k} for k = 1..15.
const quad kBernoulli[15] = {
    1.0Q / 6,         -1.0Q / 30,         1.0Q / 42,          -1.0Q / 30,           5.0Q / 66,
    -691.0Q / 2730,   7.0Q / 6,           -3617.0Q / 510,     43867.0Q / 798,       -174611.0Q / 330,
    854513.0Q / 138,  -236364091.0Q / 2730, 8553103.0Q / 6,   -23749461029.0Q / 870, 8615841276005.0Q / 14322,
};

// log Gamma(z), Re z > 0, up to a multiple of 2 pi i (irrelevant after exp).
QC lgamma_quad(QC z) {
  // Shift to |z| >= 24 where 15 Stirling terms reach quad precision.
  QC shift_log{0, 0};
  while (hypotq(z.re, z.im) < 24) {
    shift_log = shift_log + qlog(z);
    z.re += 1;
  }
  const QC logz = qlog(z);
  QC r = (z - QC{0.5Q, 0}) * logz - z;
  r.re += 0.5Q * logq(2 * M_PIq);
  const QC inv = qdiv(QC{1, 0}, z);
  const QC inv2 = inv * inv;
  QC p = inv;
  for (int k = 1; k <= 15; ++k) {
    const quad coef = kBernoulli[k - 1] / static_cast<quad>((2 * k) * (2 * k - 1));
    r = r + coef * p;
    p = p * inv2;
  }
  return r - shift_log;
}

quad to_quad(const mpz_class& z) {
  mpfr_t t;
  mpfr_init2(t, 113);
  mpfr_set_z(t, z.get_mpz_t(), MPFR_RNDN);
  const quad q = mpfr_get_float128(t, MPFR_RNDN);
  mpfr_clear(t);
  return q;
}

// Trapezoid nodes t_k = k step, k = 0..K, with weights (halved at K).
struct Nodes {
  std::size_t K = 0;
  quad step = 0;
  std::vector<quad> t, weight;
};

Nodes make_nodes(double t_max, double step) {
  Nodes n;
  n.K = static_cast<std::size_t>(std::llround(t_max / step));
  n.step = step;
  for (std::size_t k = 0; k <= n.K; ++k) {
    n.t.push_back(static_cast<quad>(k) * n.step);
    n.weight.push_back(k == n.K ? n.step / 2 : n.step);
  }
  return n;
}

// Gamma(sigma + i t_k) A^{sigma + i t_k} at every node.
std::vector<QC> gamma_power_line(quad sigma, quad A, const Nodes& nodes) {
  std::vector<QC> out(nodes.K + 1);
  const quad logA = logq(A);
  for (std::size_t k = 0; k <= nodes.K; ++k) {
    const QC z{sigma, nodes.t[k]};
    out[k] = qexp(lgamma_quad(z) + z * QC{logA, 0});
  }
  return out;
}

// (1/2 pi) int Gamma(z) A^z n^{-z} dt over the symmetric node set, using
// f(-t) = conj f(t).
quad line_integral(const std::vector<QC>& line, quad sigma, quad n, const Nodes& nodes) {
  const quad L = logq(n);
  const quad mag = expq(-sigma * L);
  quad acc = 0;
  for (std::size_t k = 0; k <= nodes.K; ++k) {
    quad s, c;
    sincosq(nodes.t[k] * L, &s, &c);
    // Re(line_k * (c - i s))
    const quad re = line[k].re * c + line[k].im * s;
    acc += (k == 0 ? 1 : 2) * nodes.weight[k] * re;
  }
  return acc * mag / (2 * M_PIq);
}

std::vector<std::uint64_t> sample_indices(std::uint64_t limit, std::size_t count) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n : {1ull, 2ull, 3ull, 5ull, 10ull, 20ull, 50ull, 100ull, 200ull}) {
    if (n <= limit && out.size() + 1 < count) out.push_back(n);
  }
  if (limit >= 1 && out.size() < count && (out.empty() || out.back() != limit)) out.push_back(limit);
  return out;
}

}  // namespace

bool ConvergenceRegion::contains(const DirichletPoint& p) const {
  return p.s.real() > min_sigma_s && p.w.real() > min_sigma_w && p.s.real() + p.w.real() > min_sigma_sum;
}

std::string ConvergenceRegion::describe() const {
  std::string out = "Re s > " + fmt(min_sigma_s);
  if (min_sigma_w > -1e299) out += ", Re w > " + fmt(min_sigma_w);
  if (min_sigma_sum > -1e299) out += ", Re s + Re w > " + fmt(min_sigma_sum);
  return out;
}

double dirichlet_shift(const CoefficientView& b, const CoefficientView& c) { return (b.weight + c.weight) / 2.0 - 1.0; }

ConvergenceRegion convergence_region(const CoefficientView& a, const CoefficientView& b, const CoefficientView& c) {
  const double shift = dirichlet_shift(b, c);
  if (all_square_supported(a, b, c)) return theta_region(shift);
  return region_from_exponents(a.bound.exponent, b.bound.exponent, c.bound.exponent, shift);
}

ConvergenceRegion nominal_region(const CoefficientView& a, const CoefficientView& b, const CoefficientView& c) {
  const double shift = dirichlet_shift(b, c);
  if (all_square_supported(a, b, c)) return theta_region(shift);
  auto beta = [](const CoefficientView& v) { return v.cusp ? (v.weight - 1.0) / 2.0 : v.bound.exponent; };
  return region_from_exponents(beta(a), beta(b), beta(c), shift);
}

DirichletEval eval_D(const CoefficientView& a, const CoefficientView& b, const CoefficientView& c,
                     const DirichletPoint& p, std::uint64_t M, std::uint64_t H, const DirichletOptions& opt) {
  if (opt.precision_bits < 53) throw DomainError("precision_bits must be at least 53");
  const ConvergenceRegion region = convergence_region(a, b, c);
  if (!region.contains(p)) {
    throw DomainError("point " + point_string(p) + " lies outside the absolute-convergence region " +
                      region.describe());
  }
  check_coverage(a, b, c, M, H);
  const bool zero = opt.include_zero_index && !c.q.empty() && sgn(c.q[0]) != 0;
  const double shift = dirichlet_shift(b, c);
  const long wp = opt.precision_bits + kGuardBits;

  DirichletEval r;
  r.point = p;
  r.m_cut = M;
  r.h_cut = H;
  r.region = region;
  r.precision_bits = opt.precision_bits;
  r.tail_bound = all_square_supported(a, b, c)
                     ? tail_theta(p.s.real(), p.w.real(), shift, M, H)
                     : tail_general(a, b, c, p.s.real(), p.w.real(), shift, M, H);

  const std::uint64_t h_top = M == 0 ? 0 : std::min<std::uint64_t>(H, 2 * M);
  const BigComplex w(BigFloat(p.w.real(), wp), BigFloat(p.w.imag(), wp));
  BigComplex s_shifted(BigFloat(p.s.real(), wp), BigFloat(p.s.imag(), wp));
  s_shifted.re += BigFloat(shift, wp);
  std::vector<BigComplex> hw(h_top + 1, BigComplex(wp));
  parallel_for(h_top, [&](std::size_t i) { hw[i + 1] = pow_neg(i + 1, w); });

  const auto blocks = make_blocks(1, M + 1, kBlock);
  std::vector<BigComplex> parts(blocks.size(), BigComplex(wp));
  std::vector<std::uint64_t> counts(blocks.size(), 0);
  parallel_for(blocks.size(), [&](std::size_t bi) {
    mpz_class prod;
    BigComplex G(wp);
    BigFloat t(wp);
    for (std::size_t m = blocks[bi].begin; m < blocks[bi].end; ++m) {
      const std::uint64_t hl = std::min<std::uint64_t>(H, 2 * m - (zero ? 0 : 1));
      counts[bi] += hl;
      if (sgn(b.q[m]) == 0) continue;
      mpfr_set_zero(G.re.get(), 1);
      mpfr_set_zero(G.im.get(), 1);
      for (std::uint64_t h = 1; h <= hl; ++h) {
        if (sgn(a.q[h]) == 0) continue;
        mpz_mul(prod.get_mpz_t(), a.q[h].get_mpz_t(), c.q[2 * m - h].get_mpz_t());
        if (sgn(prod) == 0) continue;
        mpfr_mul_z(t.get(), hw[h].re.get(), prod.get_mpz_t(), MPFR_RNDN);
        mpfr_add(G.re.get(), G.re.get(), t.get(), MPFR_RNDN);
        mpfr_mul_z(t.get(), hw[h].im.get(), prod.get_mpz_t(), MPFR_RNDN);
        mpfr_add(G.im.get(), G.im.get(), t.get(), MPFR_RNDN);
      }
      BigComplex term = G * pow_neg(m, s_shifted);
      mpfr_mul_z(term.re.get(), term.re.get(), b.q[m].get_mpz_t(), MPFR_RNDN);
      mpfr_mul_z(term.im.get(), term.im.get(), b.q[m].get_mpz_t(), MPFR_RNDN);
      parts[bi] += term;
    }
  });
  BigComplex total(wp);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    total += parts[i];
    r.terms_used += counts[i];
  }
  r.value = BigComplex(total.re.rounded(opt.precision_bits), total.im.rounded(opt.precision_bits));
  return r;
}

DirichletEval eval_D(const HeckeEigenform& a, const HeckeEigenform& b, const HeckeEigenform& c,
                     const DirichletPoint& p, std::uint64_t M, std::uint64_t H, const DirichletOptions& opt) {
  const ConvergenceRegion nominal = nominal_region(view(a), view(b), view(c));
  const double d1 = p.s.real() - nominal.min_sigma_s;
  const double d2 = p.s.real() + p.w.real() - nominal.min_sigma_sum;
  if (!(d1 > 0.0 && d2 > 0.0)) {
    throw DomainError("point " + point_string(p) + " lies outside the absolute-convergence region " +
                      nominal.describe());
  }
  // The thresholds move by 2 eps (Re s) and 3 eps (Re s + Re w); keep half
  // of each margin.
  const double eps = std::min({0.25, d1 / 4.0, d2 / 6.0});
  return eval_D(view(a, eps), view(b, eps), view(c, eps), p, M, H, opt);
}

DirichletEval eval_D_theta(const DirichletPoint& p, std::uint64_t M, std::uint64_t H, const DirichletOptions& opt) {
  const ThetaSeries theta(std::max<std::uint64_t>({M, H, 2 * M}));
  const auto v = view(theta);
  return eval_D(v, v, v, p, M, H, opt);
}

double cahen_mellin_quadrature(double sigma, double ratio, double t_max, double step) {
  if (!(sigma > 0.0) || !(ratio > 0.0) || !(t_max > 0.0) || !(step > 0.0)) {
    throw DomainError("Cahen-Mellin quadrature needs sigma, ratio, t_max, step > 0");
  }
  const Nodes nodes = make_nodes(t_max, step);
  const auto line = gamma_power_line(sigma, ratio, nodes);
  return static_cast<double>(line_integral(line, sigma, 1, nodes));
}

CheckReport mellin_inversion_check(const CoefficientView& a, const CoefficientView& b, const CoefficientView& c,
                                   double X, double Y, const MellinOptions& opt) {
  const Contour& ct = opt.contour;
  if (!(X > 0.0) || !(Y > 0.0)) throw DomainError("Mellin check needs X, Y > 0");
  if (!(ct.t_max > 0.0) || !(ct.quad_step > 0.0) || ct.quad_step > ct.t_max) {
    throw DomainError("contour needs 0 < quad_step <= t_max");
  }
  const double shift = dirichlet_shift(b, c);
  const ConvergenceRegion region = nominal_region(a, b, c);
  const DirichletPoint p{{ct.sigma_s, 0.0}, {ct.sigma_w, 0.0}};
  if (!region.contains(p) || !(ct.sigma_w > 0.0) || !(ct.sigma_s + shift > 0.0)) {
    throw DomainError("contour sigma_s = " + fmt(ct.sigma_s) + ", sigma_w = " + fmt(ct.sigma_w) +
                      " lies outside the convergence region " + region.describe());
  }
  const std::uint64_t M = opt.cuts.m_cut, H = opt.cuts.h_cut;
  check_coverage(a, b, c, M, H);
  const bool zero = !c.q.empty() && sgn(c.q[0]) != 0;

  CheckReport rep;
  rep.X = X;
  rep.Y = Y;
  rep.contour = ct;
  rep.cuts = opt.cuts;

  SumOptions sopt;
  sopt.cuts = opt.cuts;
  rep.rhs = triple_sum_direct(a, b, c, SmoothingKernel::exponential(X, Y), sopt).value.to_double();

  // coef(m, h) = a(h) b(m) c(2m - h) and, for the 2-D route, a(h) c(2m - h).
  struct Row {
    std::uint64_t m;
    quad b;
    std::vector<std::pair<std::uint64_t, quad>> ac;
  };
  std::vector<Row> rows;
  for (std::uint64_t m = 1; m <= M; ++m) {
    if (sgn(b.q[m]) == 0) continue;
    Row row{m, to_quad(b.q[m]), {}};
    const std::uint64_t hl = std::min<std::uint64_t>(H, 2 * m - (zero ? 0 : 1));
    for (std::uint64_t h = 1; h <= hl; ++h) {
      const mpz_class prod = a.q[h] * c.q[2 * m - h];
      if (sgn(prod) != 0) row.ac.emplace_back(h, to_quad(prod));
    }
    if (!row.ac.empty()) rows.push_back(std::move(row));
  }

  const quad sig_s = static_cast<quad>(ct.sigma_s) + static_cast<quad>(shift);
  const quad sig_w = ct.sigma_w;

  // Factored route: every term's 1-D integrals.
  auto factored = [&](double t_max, std::vector<quad>* ms_out, std::vector<quad>* mw_out) {
    const Nodes nodes = make_nodes(t_max, ct.quad_step);
    const auto Fs = gamma_power_line(sig_s, X, nodes);
    const auto Gw = gamma_power_line(sig_w, Y, nodes);
    std::vector<quad> ms(M + 1, 0), mw(H + 1, 0);
    parallel_for(M, [&](std::size_t i) { ms[i + 1] = line_integral(Fs, sig_s, i + 1, nodes); });
    parallel_for(H, [&](std::size_t i) { mw[i + 1] = line_integral(Gw, sig_w, i + 1, nodes); });
    quad total = 0;
    for (const auto& row : rows) {
      quad inner = 0;
      for (const auto& [h, v] : row.ac) inner += v * mw[h];
      total += row.b * ms[row.m] * inner;
    }
    if (ms_out) *ms_out = std::move(ms);
    if (mw_out) *mw_out = std::move(mw);
    return total;
  };
  std::vector<quad> ms, mw;
  const quad lhs_f = factored(ct.t_max, &ms, &mw);
  const quad lhs_f2 = factored(2.0 * ct.t_max, nullptr, nullptr);
  rep.lhs_factored = static_cast<double>(lhs_f);
  rep.lhs_factored_doubled = static_cast<double>(lhs_f2);
  rep.factored_abs_residual = std::fabs(rep.lhs_factored - rep.rhs);
  rep.factored_rel_residual = rep.rhs != 0.0 ? rep.factored_abs_residual / std::fabs(rep.rhs) : rep.factored_abs_residual;
  const double scale = std::max(std::fabs(rep.lhs_factored), std::numeric_limits<double>::min());
  rep.nonconvergence = std::fabs(static_cast<double>(lhs_f2 - lhs_f)) > opt.tolerance * scale;

  // Per-term Cahen-Mellin checks on both axes.
  const auto sm = sample_indices(M, opt.samples);
  const auto sh = sample_indices(H, opt.samples);
  for (std::size_t i = 0; i < std::max(sm.size(), sh.size()); ++i) {
    if (i < sm.size()) {
      const quad exact = expq(-static_cast<quad>(sm[i]) / X);
      const double err = static_cast<double>(fabsq(ms[sm[i]] - exact) / exact);
      rep.per_term.push_back({'s', sm[i], static_cast<double>(ms[sm[i]]), static_cast<double>(exact), err});
    }
    if (i < sh.size()) {
      const quad exact = expq(-static_cast<quad>(sh[i]) / Y);
      const double err = static_cast<double>(fabsq(mw[sh[i]] - exact) / exact);
      rep.per_term.push_back({'w', sh[i], static_cast<double>(mw[sh[i]]), static_cast<double>(exact), err});
    }
  }
  for (const auto& pt : rep.per_term) rep.max_per_term_rel_err = std::max(rep.max_per_term_rel_err, pt.rel_err);

  if (opt.direct_2d) {
    // Evaluate D(s_i, w_j) at every node pair and sum; the pair (-i, -j)
    // contributes the conjugate of (i, j), so j >= 0 suffices.
    const Nodes nodes = make_nodes(ct.t_max, ct.quad_step);
    const std::size_t K = nodes.K;
    const auto Fs = gamma_power_line(sig_s, X, nodes);
    const auto Gw = gamma_power_line(sig_w, Y, nodes);
    const std::size_t R = rows.size();
    // B[k][r] = b(m_r) m_r^{-(sigma_s' + i t_k)}, k = 0..K.
    std::vector<QC> B((K + 1) * R);
    parallel_for(R, [&](std::size_t r) {
      const quad L = logq(static_cast<quad>(rows[r].m));
      const quad mag = rows[r].b * expq(-sig_s * L);
      for (std::size_t k = 0; k <= K; ++k) {
        quad s, c;
        sincosq(nodes.t[k] * L, &s, &c);
        B[k * R + r] = {mag * c, -mag * s};
      }
    });
    const std::uint64_t h_top = std::min<std::uint64_t>(H, 2 * M);
    std::vector<quad> logh(h_top + 1, 0);
    for (std::uint64_t h = 1; h <= h_top; ++h) logh[h] = logq(static_cast<quad>(h));

    std::vector<quad> part(K + 1, 0);
    parallel_for(K + 1, [&](std::size_t j) {
      const quad tw = nodes.t[j];
      std::vector<QC> hw(h_top + 1);
      for (std::uint64_t h = 1; h <= h_top; ++h) {
        quad s, c;
        sincosq(tw * logh[h], &s, &c);
        const quad mag = expq(-sig_w * logh[h]);
        hw[h] = {mag * c, -mag * s};
      }
      std::vector<QC> g(R);
      for (std::size_t r = 0; r < R; ++r) {
        QC acc;
        for (const auto& [h, v] : rows[r].ac) acc = acc + v * hw[h];
        g[r] = acc;
      }
      // sum over s-nodes t_i, i = -K..K, of w_i F(t_i) D(t_i, t_j)
      QC sum_s;
      for (std::size_t i = 0; i <= K; ++i) {
        QC d_pos, d_neg;  // D at +t_i and -t_i
        const QC* Bi = &B[i * R];
        for (std::size_t r = 0; r < R; ++r) {
          d_pos = d_pos + Bi[r] * g[r];
          if (i > 0) d_neg = d_neg + conj(Bi[r]) * g[r];
        }
        sum_s = sum_s + nodes.weight[i] * (Fs[i] * d_pos);
        if (i > 0) sum_s = sum_s + nodes.weight[i] * (conj(Fs[i]) * d_neg);
      }
      const QC val = nodes.weight[j] * (Gw[j] * sum_s);
      part[j] = (j == 0 ? 1 : 2) * val.re;
    });
    quad total = 0;
    for (quad v : part) total += v;
    total /= 4 * M_PIq * M_PIq;
    rep.has_direct_2d = true;
    rep.lhs = static_cast<double>(total);
    rep.abs_residual = std::fabs(rep.lhs - rep.rhs);
    rep.rel_residual = rep.rhs != 0.0 ? rep.abs_residual / std::fabs(rep.rhs) : rep.abs_residual;
  }
  return rep;
}

namespace dseries_detail {
void lgamma_q(quad re, quad im, quad& out_re, quad& out_im) {
  if (!(re > 0)) throw DomainError("lgamma_q needs Re z > 0");
  const QC r = lgamma_quad({re, im});
  out_re = r.re;
  out_im = r.im;
}
}  // namespace dseries_detail

}  // namespace tricorr

#include "tricorr/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>

#ifndef TRICORR_VERSION
#define TRICORR_VERSION "0.0.0"
#endif

namespace tricorr {

namespace {

// JSON has no inf/nan; keep them visible as strings.
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json complex_json(std::complex<double> z) { return Json::array({num(z.real()), num(z.imag())}); }

Json region_json(const ConvergenceRegion& r) {
  return {{"min_sigma_s", num(r.min_sigma_s)},
          {"min_sigma_w", r.min_sigma_w < -1e299 ? Json(nullptr) : num(r.min_sigma_w)},
          {"min_sigma_sum", r.min_sigma_sum < -1e299 ? Json(nullptr) : num(r.min_sigma_sum)},
          {"description", r.describe()}};
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Json to_json(const TripleSumResult& r) {
  return {{"value", r.value_string()},
          {"value_approx", num(r.value.to_double())},
          {"method", to_string(r.method)},
          {"terms_used", r.terms_used},
          {"m_cut", r.m_cut},
          {"h_cut", r.h_cut},
          {"precision_bits", r.precision_bits},
          {"est_rel_err", num(r.est_rel_err)},
          {"tail_bound", num(r.tail_bound)},
          {"rounding_bound", num(r.rounding_bound)},
          {"abs_sum", num(r.abs_sum)},
          {"warnings", r.warnings}};
}

Json to_json(const ScanPoint& p) {
  Json j = {{"X", num(p.X)}, {"Y", num(p.Y)}, {"tail_factor", num(p.tail_factor)}, {"result", to_json(p.result)}};
  if (p.cross_checked) j["cross_check"] = {{"ok", p.cross_ok}, {"rel_diff", num(p.cross_rel_diff)}};
  return j;
}

Json to_json(const ExponentFit& f) {
  Json grid = Json::array();
  for (const auto& [s, v] : f.grid) grid.push_back(Json::array({num(s), num(v)}));
  Json bench = Json::array();
  for (const auto& b : f.benchmarks) bench.push_back({{"name", b.name}, {"slope", num(b.slope)}, {"distance", num(b.distance)}});
  return {{"slope", num(f.slope)},
          {"intercept", num(f.intercept)},
          {"r_squared", num(f.r_squared)},
          {"window", {f.window_begin, f.window_end}},
          {"grid", grid},
          {"benchmarks", bench},
          {"warnings", f.warnings}};
}

Json to_json(const OmegaReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"X", num(row.X)}, {"value", row.result.value_string()}, {"ratio", num(row.ratio)},
                    {"terms_used", row.result.terms_used}});
  }
  return {{"exponent", num(r.exponent)},
          {"rows", rows},
          {"max_ratio", num(r.max_ratio)},
          {"min_ratio", num(r.min_ratio)},
          {"degenerate", r.degenerate},
          {"monotonicity_evaluated", r.monotonicity_evaluated},
          {"decays_in_top_decade", r.decays_in_top_decade},
          {"notes", r.notes}};
}

Json to_json(const NonvanishingStats& s) {
  Json w = Json::array();
  for (const auto& t : s.witnesses) {
    w.push_back({{"h", t.h}, {"m", t.m}, {"third", t.third}, {"product", t.product.get_str()}});
  }
  return {{"n_limit", s.n_limit},
          {"total", s.total},
          {"nonvanishing", s.nonvanishing},
          {"density", num(s.density)},
          {"witnesses", w}};
}

Json to_json(const CongruentHit& h) {
  return {{"x2", h.x2}, {"y2", h.y2}, {"z2", h.z2}, {"area", h.area}, {"squarefree_part", h.squarefree_part}};
}

Json to_json(const DirichletEval& e) {
  return {{"s", complex_json(e.point.s)},
          {"w", complex_json(e.point.w)},
          {"value", {e.value.re.to_string(), e.value.im.to_string()}},
          {"value_approx", {num(e.value.re.to_double()), num(e.value.im.to_double())}},
          {"m_cut", e.m_cut},
          {"h_cut", e.h_cut},
          {"tail_bound", num(e.tail_bound)},
          {"region", region_json(e.region)},
          {"precision_bits", e.precision_bits},
          {"terms_used", e.terms_used}};
}

Json to_json(const CheckReport& r) {
  Json per = Json::array();
  for (const auto& c : r.per_term) {
    per.push_back({{"axis", std::string(1, c.axis)},
                   {"n", c.n},
                   {"quadrature", num(c.quadrature)},
                   {"exact", num(c.exact)},
                   {"rel_err", num(c.rel_err)}});
  }
  Json j = {{"X", num(r.X)},
            {"Y", num(r.Y)},
            {"contour",
             {{"sigma_s", num(r.contour.sigma_s)},
              {"sigma_w", num(r.contour.sigma_w)},
              {"t_max", num(r.contour.t_max)},
              {"quad_step", num(r.contour.quad_step)}}},
            {"cuts", {r.cuts.m_cut, r.cuts.h_cut}},
            {"rhs", num(r.rhs)},
            {"lhs_factored", num(r.lhs_factored)},
            {"factored_abs_residual", num(r.factored_abs_residual)},
            {"factored_rel_residual", num(r.factored_rel_residual)},
            {"lhs_factored_doubled_t_max", num(r.lhs_factored_doubled)},
            {"nonconvergence", r.nonconvergence},
            {"per_term", per},
            {"max_per_term_rel_err", num(r.max_per_term_rel_err)}};
  if (r.has_direct_2d) {
    j["lhs"] = num(r.lhs);
    j["abs_residual"] = num(r.abs_residual);
    j["rel_residual"] = num(r.rel_residual);
  }
  return j;
}

Json to_json(const ValidationReport& r) {
  Json failures = Json::array();
  for (const auto& f : r.failures) failures.push_back({{"n", f.n}, {"check", to_string(f.check)}, {"detail", f.detail}});
  return {{"n_limit", r.n_limit},
          {"pass", r.pass()},
          {"multiplicativity_checked", r.multiplicativity_checked},
          {"prime_power_checked", r.prime_power_checked},
          {"deligne_checked", r.deligne_checked},
          {"failure_count", r.failure_count},
          {"failures", failures}};
}

const char* artifact_version() { return TRICORR_VERSION; }

Json make_report(const std::string& command, Json config, Json result, bool with_metadata) {
  Json j = {{"artifact", {{"name", "tricorr"}, {"version", artifact_version()}, {"command", command}}},
            {"config", std::move(config)},
            {"result", std::move(result)}};
  if (with_metadata) j["metadata"] = {{"generated_at", utc_now()}};
  return j;
}

}  // namespace tricorr

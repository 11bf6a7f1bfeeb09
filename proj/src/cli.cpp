#include "tricorr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "tricorr/analysis.hpp"
#include "tricorr/coeff_io.hpp"
#include "tricorr/corrsum.hpp"
#include "tricorr/dseries.hpp"
#include "tricorr/error.hpp"
#include "tricorr/forms.hpp"
#include "tricorr/parallel.hpp"
#include "tricorr/report.hpp"

namespace tricorr::cli {

namespace fs = std::filesystem;

namespace {

class IoError : public Error {
 public:
  using Error::Error;
};

class AssertionFailed : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Small parsers for option values.

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw DomainError(what + ": '" + s + "' is not a number");
  return v;
}

std::complex<double> parse_complex(const std::string& s, const std::string& what) {
  const auto parts = split(s, ',');
  if (parts.size() == 1) return {parse_double(parts[0], what), 0.0};
  if (parts.size() == 2) return {parse_double(parts[0], what), parse_double(parts[1], what)};
  throw DomainError(what + ": expected 're' or 're,im', got '" + s + "'");
}

struct GridSpec {
  double first = 6, last = 12, step = 1;
};

GridSpec parse_grid(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() < 2 || parts.size() > 3) throw DomainError("grid: expected 'first:last[:step]' in log2 units");
  GridSpec g;
  g.first = parse_double(parts[0], "grid");
  g.last = parse_double(parts[1], "grid");
  if (parts.size() == 3) g.step = parse_double(parts[2], "grid");
  return g;
}

FitWindow parse_window(const std::string& s) {
  FitWindow w;
  if (s.empty()) return w;
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw DomainError("window: expected 'begin:end'");
  w.begin = static_cast<std::size_t>(parse_double(parts[0], "window"));
  if (!parts[1].empty()) w.end = static_cast<std::size_t>(parse_double(parts[1], "window"));
  return w;
}

KernelKind parse_kernel(const std::string& s) {
  if (s == "exp" || s == "exponential") return KernelKind::exponential;
  if (s == "sharp") return KernelKind::sharp;
  if (s == "omega") return KernelKind::omega;
  throw DomainError("kernel must be exp, sharp or omega, got '" + s + "'");
}

// ---------------------------------------------------------------------------
// Forms: generated level-1 eigenforms, theta, or coefficient files.

struct FormSpec {
  enum class Kind { level1, theta, file } kind = Kind::level1;
  int weight = 12;
  fs::path path;
  std::string text;
};

FormSpec parse_form(const std::string& s) {
  FormSpec f;
  f.text = s;
  if (s == "delta") return f;
  if (s == "theta") {
    f.kind = FormSpec::Kind::theta;
    return f;
  }
  if (s.size() > 1 && s[0] == 'k' && std::all_of(s.begin() + 1, s.end(), ::isdigit)) {
    f.weight = std::stoi(s.substr(1));
    if (!is_supported_level1_weight(f.weight)) {
      throw DomainError("form '" + s + "': no unique level-1 cusp eigenform of weight " + std::to_string(f.weight));
    }
    return f;
  }
  f.kind = FormSpec::Kind::file;
  f.path = s.rfind("file:", 0) == 0 ? s.substr(5) : s;
  return f;
}

struct LoadedForm {
  std::optional<HeckeEigenform> form;
  std::optional<ThetaSeries> theta;

  CoefficientView view() const { return form ? tricorr::view(*form) : tricorr::view(*theta); }
};

CoefficientFormat format_of(const fs::path& p) {
  return p.extension() == ".json" ? CoefficientFormat::json : CoefficientFormat::csv;
}

// Files are named <label>-w<weight>-N<level>-n<n_max>.csv, so a request is
// served only by a table at least as long as asked for.
class FormCache {
 public:
  explicit FormCache(fs::path dir) : dir_(std::move(dir)) {}
  bool enabled() const { return !dir_.empty(); }

  std::optional<HeckeEigenform> find(int weight, std::uint64_t level, const std::string& label, std::uint64_t n_max) const {
    if (!enabled() || !fs::is_directory(dir_)) return std::nullopt;
    const std::string prefix = stem(weight, level, label);
    std::optional<std::pair<std::uint64_t, fs::path>> best;
    for (const auto& e : fs::directory_iterator(dir_)) {
      const std::string name = e.path().filename().string();
      if (name.rfind(prefix, 0) != 0 || e.path().extension() != ".csv") continue;
      const std::string digits = name.substr(prefix.size(), name.size() - prefix.size() - 4);
      if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
      const std::uint64_t n = std::stoull(digits);
      if (n >= n_max && (!best || n < best->first)) best = {n, e.path()};
    }
    if (!best) return std::nullopt;
    std::ifstream is(best->second, std::ios::binary);
    if (!is) throw IoError("cannot read cache file " + best->second.string());
    HeckeEigenform f = read_coefficients(is, FormSource::generated);
    if (f.weight() != weight || f.level() != level || f.n_max() != best->first) {
      throw ParseError("cache file " + best->second.string() + " does not match its name");
    }
    return f.n_max() == n_max ? f : f.truncated(n_max);
  }

  void store(const HeckeEigenform& f) const {
    if (!enabled()) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create cache directory " + dir_.string() + ": " + ec.message());
    write_coefficients(dir_ / (stem(f.weight(), f.level(), f.label()) + std::to_string(f.n_max()) + ".csv"), f);
  }

 private:
  static std::string stem(int weight, std::uint64_t level, const std::string& label) {
    return label + "-w" + std::to_string(weight) + "-N" + std::to_string(level) + "-n";
  }
  fs::path dir_;
};

class FormLoader {
 public:
  explicit FormLoader(const FormCache& cache) : cache_(cache) {}

  // Generated tables are produced (or read from the cache) with exactly n_max
  // coefficients; files are used as stored.
  std::shared_ptr<LoadedForm> load(const FormSpec& spec, std::uint64_t n_max) {
    n_max = std::max<std::uint64_t>(n_max, 1);
    const std::string key = spec.text + "#" + (spec.kind == FormSpec::Kind::file ? "" : std::to_string(n_max));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    auto out = std::make_shared<LoadedForm>();
    switch (spec.kind) {
      case FormSpec::Kind::theta: out->theta = gen_theta(n_max); break;
      case FormSpec::Kind::level1: {
        const std::string label = level1_label(spec.weight);
        if (auto hit = cache_.find(spec.weight, 1, label, n_max)) {
          out->form = std::move(*hit);
        } else {
          out->form = gen_level1_eigenform(spec.weight, n_max);
          cache_.store(*out->form);
        }
        break;
      }
      case FormSpec::Kind::file:
        if (!fs::exists(spec.path)) throw IoError("coefficient file " + spec.path.string() + " does not exist");
        out->form = ingest_coefficients(spec.path, format_of(spec.path)).form;
        break;
    }
    memo_[key] = out;
    return out;
  }

 private:
  const FormCache& cache_;
  std::map<std::string, std::shared_ptr<LoadedForm>> memo_;
};

std::vector<FormSpec> parse_forms(const std::string& s, std::size_t want) {
  std::vector<FormSpec> out;
  for (const auto& p : split(s, ',')) out.push_back(parse_form(p));
  if (out.size() == 1) out.resize(want, out.front());
  if (out.size() != want) {
    throw DomainError("--forms: expected " + std::to_string(want) + " comma-separated forms (or one to repeat)");
  }
  return out;
}

// ---------------------------------------------------------------------------
// --assert expressions: key=value, key<=value, key>=value, contains=a,b,...

struct Measures {
  std::map<std::string, double> numbers;
  std::map<std::string, std::set<std::string>> sets;
};

void check_assertions(const std::vector<std::string>& asserts, const Measures& m) {
  for (const auto& a : asserts) {
    std::size_t at = a.find_first_of("<>=");
    if (at == std::string::npos || at == 0) throw DomainError("--assert '" + a + "': expected key=value, key<=value or key>=value");
    const std::string key = a.substr(0, at);
    std::string op(1, a[at]);
    if (op != "=") {
      if (at + 1 >= a.size() || a[at + 1] != '=') throw DomainError("--assert '" + a + "': use <= or >=");
      op += '=';
    }
    const std::string rhs = a.substr(at + op.size());
    if (auto s = m.sets.find(key); s != m.sets.end()) {
      if (op != "=") throw DomainError("--assert '" + a + "': '" + key + "' takes a list");
      for (const auto& item : split(rhs, ',')) {
        if (!s->second.count(item)) throw AssertionFailed("assertion '" + a + "' failed: " + item + " not found");
      }
      continue;
    }
    auto n = m.numbers.find(key);
    if (n == m.numbers.end()) {
      std::string known;
      for (const auto& [k, v] : m.numbers) known += " " + k;
      for (const auto& [k, v] : m.sets) known += " " + k;
      throw DomainError("--assert: unknown key '" + key + "' for this command (known:" + known + ")");
    }
    const double want = parse_double(rhs, "--assert");
    const double got = n->second;
    const bool ok = op == "=" ? got == want : op == "<=" ? got <= want : got >= want;
    if (!ok) {
      std::ostringstream os;
      os.precision(17);
      os << "assertion '" << a << "' failed: " << key << " = " << got;
      throw AssertionFailed(os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Resolved configuration embedded in every report.

Json option_json(const CLI::App& app) {
  Json j = Json::object();
  for (const CLI::Option* o : app.get_options()) {
    const std::string name = o->get_single_name();
    if (name == "help" || name == "config" || name == "version") continue;
    std::string v;
    if (o->count() > 0) {
      const auto& r = o->results();
      for (std::size_t i = 0; i < r.size(); ++i) v += (i ? "," : "") + r[i];
    } else {
      v = o->get_default_str();
      if (v == "{}") v.clear();
      if (v.empty() && o->get_expected_min() == 0) v = "false";
    }
    j[name] = v;
  }
  return j;
}

// ---------------------------------------------------------------------------

struct Globals {
  std::string config;
  unsigned threads = 0;
  long precision_bits = 256;
  std::string cache_dir;
  std::string out;
  std::vector<std::string> asserts;
  bool no_metadata = false;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}
  int run(int argc, const char* const* argv);

 private:
  void emit(const std::string& text) {
    if (g_.out.empty()) {
      out_ << text;
      return;
    }
    std::ofstream os(g_.out, std::ios::binary);
    if (!os) throw IoError("cannot open " + g_.out + " for writing");
    os << text;
    if (!os) throw IoError("write failed for " + g_.out);
  }
  void emit_report(const std::string& command, const CLI::App& sub, const Json& result) {
    Json cfg = {{"global", option_json(app_)}, {command, option_json(sub)}};
    emit(make_report(command, std::move(cfg), result, !g_.no_metadata).dump(2) + "\n");
  }
  SumOptions sum_options() const {
    SumOptions o;
    o.precision_bits = g_.precision_bits;
    return o;
  }

  void setup();
  void cmd_gen();
  void cmd_ingest();
  void cmd_sum();
  void cmd_scan();
  void cmd_fit();
  void cmd_dseries();
  void cmd_mellin();
  void cmd_omega();
  void cmd_nonvanish();
  void cmd_congruent();

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_{"Triple correlation sums of holomorphic cusp forms", "tricorr"};
  Globals g_;
  std::map<std::string, CLI::App*> subs_;

  struct {
    int weight = 12;
    std::uint64_t nmax = 1000;
    std::string format = "csv";
  } gen_;
  struct {
    std::string file, url, format;
    bool force = false;
    std::uint64_t validate_limit = 0;
  } ingest_;
  struct {
    std::string forms = "delta", kernel = "exp", method = "direct", fft_precision = "double";
    double X = 100, Y = 100, tail_factor = 0, target_rel_err = 1e-9;
    std::uint64_t m_cut = 0, h_cut = 0, nmax = 0;
  } sum_;
  struct {
    std::string forms = "delta", kernel = "exp", grid = "6:12:1", method = "direct", format = "csv";
    double phase = 0, ratio = 1, tail_factor = 40, target_rel_err = 1e-9, max_tail_factor = 200;
    bool adaptive = true, cross_check = false;
    std::uint64_t nmax = 0;
    int k = 12;
    double theta = 7.0 / 64.0, epsilon = 0;
  } scan_;
  struct {
    std::string input, window;
    int k = 12;
    double theta = 7.0 / 64.0, epsilon = 0;
  } fit_;
  struct {
    std::string forms = "delta", s = "2", w = "8";
    std::uint64_t m_cut = 200, h_cut = 200, nmax = 0;
  } dseries_;
  struct {
    std::string forms = "delta";
    double X = 5, Y = 5, sigma_s = 2, sigma_w = 8, t_max = 60, quad_step = 0.05, tolerance = 1e-6;
    std::uint64_t m_cut = 400, h_cut = 400;
    bool no_2d = false;
  } mellin_;
  struct {
    std::string forms = "delta", grid = "4:12:1", format = "json";
    double phase = 0;
    std::uint64_t nmax = 0;
  } omega_;
  struct {
    std::string form = "delta";
    std::uint64_t limit = 10000;
  } nonvanish_;
  struct {
    std::uint64_t limit = 2500;
  } congruent_;
};

void Runner::setup() {
  app_.set_version_flag("--version", std::string(artifact_version()));
  app_.set_config("--config", "", "INI file: top-level keys for global flags, [<command>] sections for the rest");
  app_.allow_config_extras(CLI::config_extras_mode::error);
  app_.option_defaults()->always_capture_default();
  app_.require_subcommand(1);
  app_.add_option("--threads", g_.threads, "Worker threads (0 = hardware concurrency)");
  app_.add_option("--precision-bits", g_.precision_bits, "MPFR working precision")->check(CLI::Range(53L, 1L << 20));
  app_.add_option("--cache-dir", g_.cache_dir, "Directory of cached coefficient tables");
  app_.add_option("--out", g_.out, "Write the report here instead of stdout");
  app_.add_option("--assert", g_.asserts, "Check key=value, key<=value, key>=value or contains=a,b on the result")
      ->take_all();
  app_.add_flag("--no-metadata", g_.no_metadata, "Leave the timestamp block out of JSON reports");

  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app_.add_subcommand(name, help);
    s->fallthrough();
    subs_[name] = s;
    return s;
  };

  CLI::App* s = sub("gen", "Generate a level-1 eigenform coefficient table (CSV)");
  s->add_option("--weight", gen_.weight, "Weight in {12, 16, 18, 20, 22, 26}");
  s->add_option("--nmax", gen_.nmax, "Number of coefficients");
  s->add_option("--format", gen_.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  s = sub("ingest", "Load and validate a coefficient table from a file or URL");
  s->add_option("--file", ingest_.file, "CSV or JSON coefficient file");
  s->add_option("--url", ingest_.url, "http(s) URL serving the JSON payload");
  s->add_option("--format", ingest_.format, "csv or json (default: from the extension)");
  s->add_flag("--force", ingest_.force, "Accept tables that fail the Hecke checks");
  s->add_option("--validate-limit", ingest_.validate_limit, "Check n up to this (0 = all)");

  s = sub("sum", "Evaluate one triple correlation sum");
  s->add_option("--forms", sum_.forms, "f1,f2,f3 (delta, k16..k26, theta, or a coefficient file)");
  s->add_option("--kernel", sum_.kernel, "exp, sharp or omega");
  s->add_option("--X", sum_.X, "m scale");
  s->add_option("--Y", sum_.Y, "h scale (ignored by omega)");
  s->add_option("--tail-factor", sum_.tail_factor,
                "Exponential truncation m <= T X, h <= T Y (0 = smallest T from 40 in steps of 10 meeting --target-rel-err)");
  s->add_option("--target-rel-err", sum_.target_rel_err, "Tail target relative to |value| when T is chosen");
  s->add_option("--m-cut", sum_.m_cut, "Explicit m cut (exponential kernel)");
  s->add_option("--h-cut", sum_.h_cut, "Explicit h cut (exponential kernel)");
  s->add_option("--method", sum_.method, "direct or fft")->check(CLI::IsMember({"direct", "fft"}));
  s->add_option("--fft-precision", sum_.fft_precision, "double or extended")
      ->check(CLI::IsMember({"double", "extended"}));
  s->add_option("--nmax", sum_.nmax, "Table length for generated forms (0 = as needed)");

  s = sub("scan", "Evaluate sums over a geometric grid of scales");
  s->add_option("--forms", scan_.forms, "f1,f2,f3");
  s->add_option("--kernel", scan_.kernel, "exp, sharp or omega");
  s->add_option("--grid", scan_.grid, "first:last[:step], exponents of 2");
  s->add_option("--phase", scan_.phase, "Shift of the grid exponents");
  s->add_option("--ratio", scan_.ratio, "Y / X");
  s->add_option("--tail-factor", scan_.tail_factor, "Starting truncation factor T");
  s->add_flag("--adaptive,!--fixed-tail", scan_.adaptive, "Raise T per point until the tail meets --target-rel-err");
  s->add_option("--target-rel-err", scan_.target_rel_err, "Tail target relative to |value|");
  s->add_option("--max-tail-factor", scan_.max_tail_factor, "Upper limit for adaptive T");
  s->add_option("--method", scan_.method, "direct, fft or auto")->check(CLI::IsMember({"direct", "fft", "auto"}));
  s->add_flag("--cross-check", scan_.cross_check, "Also run the FFT path and compare");
  s->add_option("--nmax", scan_.nmax, "Table length for generated forms (0 = as needed)");
  s->add_option("--format", scan_.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  s->add_option("--k", scan_.k, "Weight used for the bound columns");
  s->add_option("--theta", scan_.theta, "Exponent toward Ramanujan-Petersson for the bound columns");
  s->add_option("--epsilon", scan_.epsilon, "Epsilon in the bound columns");

  s = sub("fit", "Fit log|S| against log X from a scan CSV");
  s->add_option("--input", fit_.input, "Scan CSV (columns X and value)")->required();
  s->add_option("--window", fit_.window, "begin:end row range (end exclusive)");
  s->add_option("--k", fit_.k, "Weight for the benchmark slopes");
  s->add_option("--theta", fit_.theta, "Theta for the benchmark slopes");
  s->add_option("--epsilon", fit_.epsilon, "Epsilon for the benchmark slopes");

  s = sub("dseries", "Evaluate the truncated double Dirichlet series");
  s->add_option("--forms", dseries_.forms, "f1,f2,f3 (theta alone selects the theta analogue)");
  s->add_option("--s", dseries_.s, "s as 're' or 're,im'");
  s->add_option("--w", dseries_.w, "w as 're' or 're,im'");
  s->add_option("--m-cut", dseries_.m_cut, "m cut");
  s->add_option("--h-cut", dseries_.h_cut, "h cut");
  s->add_option("--nmax", dseries_.nmax, "Table length for generated forms (0 = as needed)");

  s = sub("mellin", "Check the double Mellin inversion identity");
  s->add_option("--forms", mellin_.forms, "f1,f2,f3");
  s->add_option("--X", mellin_.X, "m scale");
  s->add_option("--Y", mellin_.Y, "h scale");
  s->add_option("--sigma-s", mellin_.sigma_s, "Real part of the s contour");
  s->add_option("--sigma-w", mellin_.sigma_w, "Real part of the w contour");
  s->add_option("--t-max", mellin_.t_max, "Half-length of the contours");
  s->add_option("--quad-step", mellin_.quad_step, "Trapezoid step");
  s->add_option("--m-cut", mellin_.m_cut, "m cut");
  s->add_option("--h-cut", mellin_.h_cut, "h cut");
  s->add_option("--tolerance", mellin_.tolerance, "t_max versus 2 t_max agreement");
  s->add_flag("--no-2d", mellin_.no_2d, "Skip the direct 2-D quadrature");

  s = sub("omega", "Tabulate |S_omega(X)| / X^{k-1/2} over a grid");
  s->add_option("--forms", omega_.forms, "f1,f2,f3");
  s->add_option("--grid", omega_.grid, "first:last[:step], exponents of 2");
  s->add_option("--phase", omega_.phase, "Shift of the grid exponents");
  s->add_option("--nmax", omega_.nmax, "Table length for generated forms (0 = as needed)");
  s->add_option("--format", omega_.format, "json or csv")->check(CLI::IsMember({"csv", "json"}));

  s = sub("nonvanish", "Count n-h, n, n+h with a(n-h) a(n) a(n+h) != 0");
  s->add_option("--form", nonvanish_.form, "delta, k16..k26, or a coefficient file");
  s->add_option("--limit", nonvanish_.limit, "Largest n");

  s = sub("congruent", "Three squares in arithmetic progression");
  s->add_option("--limit", congruent_.limit, "Bound on the middle square");
}

int Runner::run(int argc, const char* const* argv) {
  setup();
  try {
    app_.parse(argc, argv);
  } catch (const CLI::Success& e) {
    std::ostringstream o, er;
    const int rc = app_.exit(e, o, er);
    out_ << o.str();
    err_ << er.str();
    return rc == 0 ? kOk : kPrecondition;
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << e.what() << "\n";
    return kPrecondition;
  }
  set_max_threads(g_.threads);

  std::string command;
  for (const auto& [name, s] : subs_) {
    if (s->parsed()) command = name;
  }
  try {
    if (command == "gen") cmd_gen();
    else if (command == "ingest") cmd_ingest();
    else if (command == "sum") cmd_sum();
    else if (command == "scan") cmd_scan();
    else if (command == "fit") cmd_fit();
    else if (command == "dseries") cmd_dseries();
    else if (command == "mellin") cmd_mellin();
    else if (command == "omega") cmd_omega();
    else if (command == "nonvanish") cmd_nonvanish();
    else if (command == "congruent") cmd_congruent();
  } catch (const AssertionFailed& e) {
    err_ << "error: " << e.what() << "\n";
    return kAssertFailed;
  } catch (const CoverageError& e) {
    err_ << "error: coverage: " << e.what() << "\n";
    return kPrecondition;
  } catch (const ValidationError& e) {
    err_ << "error: validation: " << e.what() << "\n";
    return kPrecondition;
  } catch (const DomainError& e) {
    err_ << "error: precondition: " << e.what() << "\n";
    return kPrecondition;
  } catch (const ParseError& e) {
    err_ << "error: parse: " << e.what() << "\n";
    return kPrecondition;
  } catch (const ResourceError& e) {
    err_ << "error: resources: " << e.what() << "\n";
    return kPrecondition;
  } catch (const std::filesystem::filesystem_error& e) {
    err_ << "error: i/o: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err_ << "error: i/o: " << e.what() << "\n";
    return kIoError;
  } catch (const std::bad_alloc&) {
    err_ << "error: out of memory\n";
    return kIoError;
  }
  return kOk;
}

void Runner::cmd_gen() {
  HeckeEigenform f = [&] {
    const FormCache cache(g_.cache_dir);
    if (!is_supported_level1_weight(gen_.weight)) return gen_level1_eigenform(gen_.weight, gen_.nmax);
    if (auto hit = cache.find(gen_.weight, 1, level1_label(gen_.weight), gen_.nmax)) return std::move(*hit);
    HeckeEigenform g = gen_level1_eigenform(gen_.weight, gen_.nmax);
    cache.store(g);
    return g;
  }();
  if (gen_.format == "json") {
    emit(coefficients_to_json(f) + "\n");
  } else {
    std::ostringstream os;
    write_coefficients(os, f);
    emit(os.str());
  }
  Measures m;
  m.numbers["n_max"] = static_cast<double>(f.n_max());
  check_assertions(g_.asserts, m);
}

void Runner::cmd_ingest() {
  if (ingest_.file.empty() == ingest_.url.empty()) throw DomainError("ingest needs exactly one of --file and --url");
  IngestOptions opt;
  opt.force = ingest_.force;
  opt.validate_limit = ingest_.validate_limit;
  IngestResult r = [&] {
    if (!ingest_.url.empty()) return ingest_remote(ingest_.url, opt);
    const fs::path p = ingest_.file;
    if (!fs::exists(p)) throw IoError("coefficient file " + p.string() + " does not exist");
    CoefficientFormat fmt = format_of(p);
    if (!ingest_.format.empty()) {
      if (ingest_.format != "csv" && ingest_.format != "json") throw DomainError("--format must be csv or json");
      fmt = ingest_.format == "json" ? CoefficientFormat::json : CoefficientFormat::csv;
    }
    return ingest_coefficients(p, fmt, opt);
  }();
  FormCache(g_.cache_dir).store(r.form);
  Json result = {{"label", r.form.label()},
                 {"weight", r.form.weight()},
                 {"level", r.form.level()},
                 {"n_max", r.form.n_max()},
                 {"source", to_string(r.form.source())},
                 {"validation", to_json(r.report)}};
  emit_report("ingest", *subs_["ingest"], result);
  Measures m;
  m.numbers["failures"] = static_cast<double>(r.report.failure_count);
  m.numbers["n_max"] = static_cast<double>(r.form.n_max());
  check_assertions(g_.asserts, m);
}

void Runner::cmd_sum() {
  const auto specs = parse_forms(sum_.forms, 3);
  const KernelKind kind = parse_kernel(sum_.kernel);
  const bool auto_tail = kind == KernelKind::exponential && sum_.tail_factor == 0.0;
  SmoothingKernel kernel;
  switch (kind) {
    case KernelKind::exponential:
      kernel = SmoothingKernel::exponential(sum_.X, sum_.Y, auto_tail ? 40.0 : sum_.tail_factor);
      break;
    case KernelKind::sharp: kernel = SmoothingKernel::sharp(sum_.X, sum_.Y); break;
    case KernelKind::omega: {
      const int w = specs[0].kind == FormSpec::Kind::level1 ? specs[0].weight : 0;
      kernel = SmoothingKernel::omega(sum_.X, w);
      break;
    }
  }
  SumOptions opt = sum_options();
  if (sum_.m_cut || sum_.h_cut) {
    if (!sum_.m_cut || !sum_.h_cut) throw DomainError("--m-cut and --h-cut go together");
    opt.cuts = Cuts{sum_.m_cut, sum_.h_cut};
  }
  opt.fft_precision = sum_.fft_precision == "extended" ? FftPrecision::extended : FftPrecision::double_precision;

  const FormCache cache(g_.cache_dir);
  FormLoader loader(cache);
  auto load3 = [&](std::uint64_t n) {
    return std::array{loader.load(specs[0], n), loader.load(specs[1], n), loader.load(specs[2], n)};
  };
  std::uint64_t n = sum_.nmax ? sum_.nmax : required_n_max(kernel, opt);
  auto f = load3(n);
  if (auto_tail && !opt.cuts) {
    if (!(sum_.X > 0.0) || !(sum_.Y > 0.0)) throw DomainError("exponential kernel needs X, Y > 0");
    ScanOptions so;
    so.ratio = sum_.Y / sum_.X;
    so.adaptive_tail = true;
    so.target_rel_err = sum_.target_rel_err;
    so.sum = opt;
    const auto plan = plan_scan(f[0]->view(), f[1]->view(), f[2]->view(), {sum_.X}, so);
    kernel = SmoothingKernel::exponential(sum_.X, sum_.Y, plan[0].tail_factor);
    if (sum_.nmax == 0 && plan[0].required_n_max > n) f = load3(plan[0].required_n_max);
  }
  if (kernel.kind == KernelKind::omega) kernel = SmoothingKernel::omega(sum_.X, f[0]->view().weight);
  const auto a = f[0]->view(), b = f[1]->view(), c = f[2]->view();
  const TripleSumResult r =
      sum_.method == "fft" ? triple_sum_fft(a, b, c, kernel, opt) : triple_sum_direct(a, b, c, kernel, opt);
  Json result = to_json(r);
  if (kernel.kind == KernelKind::exponential) result["tail_factor"] = kernel.tail_factor;
  emit_report("sum", *subs_["sum"], result);
  Measures m;
  m.numbers["est_rel_err"] = r.est_rel_err;
  m.numbers["value"] = r.value.to_double();
  check_assertions(g_.asserts, m);
}

void Runner::cmd_scan() {
  const auto specs = parse_forms(scan_.forms, 3);
  ScanOptions opt;
  opt.kernel = parse_kernel(scan_.kernel);
  opt.ratio = scan_.ratio;
  opt.tail_factor = scan_.tail_factor;
  opt.adaptive_tail = scan_.adaptive;
  opt.target_rel_err = scan_.target_rel_err;
  opt.max_tail_factor = scan_.max_tail_factor;
  opt.method = scan_.method == "fft" ? ScanMethod::fft : scan_.method == "auto" ? ScanMethod::automatic : ScanMethod::direct;
  opt.cross_check = scan_.cross_check;
  opt.sum = sum_options();
  const GridSpec gs = parse_grid(scan_.grid);
  const auto grid = geometric_grid(gs.first, gs.last, gs.step, scan_.phase);

  const FormCache cache(g_.cache_dir);
  FormLoader loader(cache);
  auto load3 = [&](std::uint64_t n) {
    return std::array{loader.load(specs[0], n), loader.load(specs[1], n), loader.load(specs[2], n)};
  };
  // Without --nmax, tables first cover the starting T, then whatever the plan needs.
  std::uint64_t n = scan_.nmax;
  if (n == 0 && !grid.empty()) {
    const double weight = specs[0].kind == FormSpec::Kind::level1 ? specs[0].weight : 12;
    SmoothingKernel top = opt.kernel == KernelKind::exponential
                              ? SmoothingKernel::exponential(grid.back(), opt.ratio * grid.back(), opt.tail_factor)
                              : opt.kernel == KernelKind::sharp ? SmoothingKernel::sharp(grid.back(), opt.ratio * grid.back())
                                                                : SmoothingKernel::omega(grid.back(), weight);
    n = required_n_max(top, opt.sum);
  }
  auto forms = load3(n);
  auto views = [&] { return std::array{forms[0]->view(), forms[1]->view(), forms[2]->view()}; };
  auto v = views();
  const auto plan = plan_scan(v[0], v[1], v[2], grid, opt);
  if (scan_.nmax == 0 && max_required_n_max(plan) > n) {
    forms = load3(max_required_n_max(plan));
    v = views();
  }
  const auto points = scan_grid(v[0], v[1], v[2], plan, opt);

  TheoremBoundParams bp;
  bp.k = scan_.k;
  bp.theta = scan_.theta;
  bp.epsilon = scan_.epsilon;
  if (scan_.format == "csv") {
    emit(scan_csv(points, bp));
  } else {
    Json pts = Json::array();
    for (const auto& p : points) pts.push_back(to_json(p));
    emit_report("scan", *subs_["scan"], Json{{"points", pts}});
  }
  Measures m;
  double worst = 0;
  bool cross_ok = true;
  for (const auto& p : points) {
    worst = std::max(worst, p.result.est_rel_err);
    cross_ok = cross_ok && p.cross_ok;
  }
  m.numbers["points"] = static_cast<double>(points.size());
  m.numbers["max_est_rel_err"] = worst;
  m.numbers["cross_ok"] = cross_ok ? 1 : 0;
  check_assertions(g_.asserts, m);
}

void Runner::cmd_fit() {
  std::ifstream is(fit_.input, std::ios::binary);
  if (!is) throw IoError("cannot open " + fit_.input);
  std::string line;
  if (!std::getline(is, line)) throw ParseError(fit_.input + ": empty file");
  const auto header = split(line, ',');
  const auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError(fit_.input + ": no '" + name + "' column");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t cx = col("X"), cv = col("value");
  std::vector<std::pair<double, double>> pts;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) throw ParseError(fit_.input + ": row " + std::to_string(row) + " has the wrong column count");
    // Values may exceed double range only far beyond desk scale; MPFR parses them exactly.
    const BigFloat val = BigFloat::from_string(f[cv], 128);
    pts.emplace_back(parse_double(f[cx], "X"), val.to_double());
  }
  TheoremBoundParams bp;
  bp.k = fit_.k;
  bp.theta = fit_.theta;
  bp.epsilon = fit_.epsilon;
  const ExponentFit fit = fit_exponent(pts, parse_window(fit_.window), slope_benchmarks(bp));
  emit_report("fit", *subs_["fit"], to_json(fit));
  Measures m;
  m.numbers["slope"] = fit.slope;
  m.numbers["r_squared"] = fit.r_squared;
  check_assertions(g_.asserts, m);
}

void Runner::cmd_dseries() {
  const auto specs = parse_forms(dseries_.forms, 3);
  const DirichletPoint p{parse_complex(dseries_.s, "--s"), parse_complex(dseries_.w, "--w")};
  DirichletOptions opt;
  opt.precision_bits = g_.precision_bits;
  const bool all_theta = std::all_of(specs.begin(), specs.end(), [](const FormSpec& f) { return f.kind == FormSpec::Kind::theta; });
  DirichletEval e;
  if (all_theta) {
    e = eval_D_theta(p, dseries_.m_cut, dseries_.h_cut, opt);
  } else {
    const FormCache cache(g_.cache_dir);
    FormLoader loader(cache);
    const std::uint64_t n = dseries_.nmax ? dseries_.nmax : std::max(dseries_.h_cut, 2 * dseries_.m_cut);
    const auto a = loader.load(specs[0], n), b = loader.load(specs[1], n), c = loader.load(specs[2], n);
    if (a->form && b->form && c->form) {
      e = eval_D(*a->form, *b->form, *c->form, p, dseries_.m_cut, dseries_.h_cut, opt);
    } else {
      e = eval_D(a->view(), b->view(), c->view(), p, dseries_.m_cut, dseries_.h_cut, opt);
    }
  }
  emit_report("dseries", *subs_["dseries"], to_json(e));
  Measures m;
  m.numbers["tail_bound"] = e.tail_bound;
  check_assertions(g_.asserts, m);
}

void Runner::cmd_mellin() {
  const auto specs = parse_forms(mellin_.forms, 3);
  MellinOptions opt;
  opt.contour = {mellin_.sigma_s, mellin_.sigma_w, mellin_.t_max, mellin_.quad_step};
  opt.cuts = {mellin_.m_cut, mellin_.h_cut};
  opt.tolerance = mellin_.tolerance;
  opt.direct_2d = !mellin_.no_2d;
  const FormCache cache(g_.cache_dir);
  FormLoader loader(cache);
  const std::uint64_t n = std::max(mellin_.h_cut, 2 * mellin_.m_cut);
  const auto a = loader.load(specs[0], n), b = loader.load(specs[1], n), c = loader.load(specs[2], n);
  const CheckReport r = mellin_inversion_check(a->view(), b->view(), c->view(), mellin_.X, mellin_.Y, opt);
  emit_report("mellin", *subs_["mellin"], to_json(r));
  Measures m;
  if (r.has_direct_2d) m.numbers["rel_residual"] = r.rel_residual;
  m.numbers["factored_rel_residual"] = r.factored_rel_residual;
  m.numbers["max_per_term_rel_err"] = r.max_per_term_rel_err;
  m.numbers["nonconvergence"] = r.nonconvergence ? 1 : 0;
  check_assertions(g_.asserts, m);
}

void Runner::cmd_omega() {
  const auto specs = parse_forms(omega_.forms, 3);
  const GridSpec gs = parse_grid(omega_.grid);
  const auto grid = geometric_grid(gs.first, gs.last, gs.step, omega_.phase);
  const FormCache cache(g_.cache_dir);
  FormLoader loader(cache);
  const double weight = specs[0].kind == FormSpec::Kind::level1 ? specs[0].weight : 12;
  std::uint64_t n = omega_.nmax;
  if (n == 0 && !grid.empty()) n = required_n_max(SmoothingKernel::omega(grid.back(), weight), sum_options());
  const auto a = loader.load(specs[0], n), b = loader.load(specs[1], n), c = loader.load(specs[2], n);
  const OmegaReport r = omega_growth_report(a->view(), b->view(), c->view(), grid, sum_options());
  if (omega_.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "X,value,ratio\n";
    for (const auto& row : r.rows) os << row.X << ',' << row.result.value_string() << ',' << row.ratio << '\n';
    emit(os.str());
  } else {
    emit_report("omega", *subs_["omega"], to_json(r));
  }
  Measures m;
  m.numbers["max_ratio"] = r.max_ratio;
  m.numbers["degenerate"] = r.degenerate ? 1 : 0;
  check_assertions(g_.asserts, m);
}

void Runner::cmd_nonvanish() {
  const FormSpec spec = parse_form(nonvanish_.form);
  if (spec.kind == FormSpec::Kind::theta) throw DomainError("nonvanish needs an eigenform");
  const FormCache cache(g_.cache_dir);
  FormLoader loader(cache);
  const auto f = loader.load(spec, nonvanish_.limit >= 1 ? 2 * nonvanish_.limit - 1 : 1);
  const NonvanishingStats st = nonvanishing_scan(*f->form, nonvanish_.limit);
  emit_report("nonvanish", *subs_["nonvanish"], to_json(st));
  Measures m;
  m.numbers["density"] = st.density;
  m.numbers["total"] = static_cast<double>(st.total);
  m.numbers["nonvanishing"] = static_cast<double>(st.nonvanishing);
  check_assertions(g_.asserts, m);
}

void Runner::cmd_congruent() {
  const auto hits = congruent_search(congruent_.limit);
  Json list = Json::array();
  Measures m;
  auto& parts = m.sets["contains"];
  for (const auto& h : hits) {
    if (!verify_hit(h)) throw Error("internal error: hit failed re-verification");
    list.push_back(to_json(h));
    parts.insert(std::to_string(h.squarefree_part));
  }
  emit_report("congruent", *subs_["congruent"], Json{{"hits", list}, {"verified", true}});
  m.numbers["hits"] = static_cast<double>(hits.size());
  check_assertions(g_.asserts, m);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Runner r(out, err);
  return r.run(argc, argv);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("tricorr");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace tricorr::cli

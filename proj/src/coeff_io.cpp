#include "tricorr/coeff_io.hpp"

#include <httplib.h>

#include <fstream>
#include <json.hpp>
#include <regex>
#include <sstream>

#include "tricorr/error.hpp"

namespace tricorr {

namespace {

bool parse_integer(const std::string& s, mpz_class& out) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (std::size_t j = i; j < s.size(); ++j)
    if (s[j] < '0' || s[j] > '9') return false;
  return out.set_str(s[0] == '+' ? s.substr(1) : s, 10) == 0;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void write_coefficients(std::ostream& os, const HeckeEigenform& f) {
  os << "# weight=" << f.weight() << " level=" << f.level() << " label=" << f.label() << '\n';
  const auto q = f.q_expansion();
  for (std::uint64_t n = 1; n < q.size(); ++n) os << n << ',' << q[n].get_str() << '\n';
}

void write_coefficients(const std::filesystem::path& path, const HeckeEigenform& f) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error("cannot open " + tmp + " for writing");
    write_coefficients(os, f);
    if (!os) throw Error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

HeckeEigenform read_coefficients(std::istream& is, FormSource source) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("coefficient file is empty");
  static const std::regex header(R"(^#\s*weight=(\d+)\s+level=(\d+)\s+label=(\S+)\s*$)");
  std::smatch m;
  const std::string h = trim(line);
  if (!std::regex_match(h, m, header)) {
    throw ParseError("line 1: expected header '# weight=<k> level=<N> label=<str>', got '" + h + "'");
  }
  const int weight = std::stoi(m[1].str());
  const std::uint64_t level = std::stoull(m[2].str());
  const std::string label = m[3].str();

  std::vector<mpz_class> coeffs;
  std::uint64_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'n,a(n)', got '" + row + "'");
    }
    mpz_class n, v;
    if (!parse_integer(trim(row.substr(0, comma)), n) || !parse_integer(trim(row.substr(comma + 1)), v)) {
      throw ParseError("line " + std::to_string(line_no) + ": non-integer field in '" + row + "'");
    }
    if (n != static_cast<unsigned long>(coeffs.size() + 1)) {
      throw ParseError("line " + std::to_string(line_no) + ": index " + n.get_str() + " out of sequence (expected " +
                       std::to_string(coeffs.size() + 1) + ")");
    }
    coeffs.push_back(std::move(v));
  }
  if (coeffs.empty()) throw ParseError("coefficient file has no rows");
  try {
    return HeckeEigenform(weight, level, label, std::move(coeffs), source);
  } catch (const DomainError& e) {
    throw ParseError(std::string("header: ") + e.what());
  }
}

HeckeEigenform parse_coefficients_json(const std::string& body, FormSource source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    const int weight = j.at("weight").get<int>();
    const auto level = j.at("level").get<std::uint64_t>();
    const auto label = j.at("label").get<std::string>();
    std::vector<mpz_class> coeffs;
    for (const auto& c : j.at("coeffs")) {
      mpz_class v;
      if (!c.is_string() || !parse_integer(c.get<std::string>(), v)) {
        throw ParseError("coeffs[" + std::to_string(coeffs.size()) + "] is not a decimal integer string");
      }
      coeffs.push_back(std::move(v));
    }
    if (coeffs.empty()) throw ParseError("coeffs array is empty");
    return HeckeEigenform(weight, level, label, std::move(coeffs), source);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed coefficient payload: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("malformed coefficient payload: ") + e.what());
  }
}

std::string coefficients_to_json(const HeckeEigenform& f) {
  nlohmann::json j;
  j["weight"] = f.weight();
  j["level"] = f.level();
  j["label"] = f.label();
  auto arr = nlohmann::json::array();
  const auto q = f.q_expansion();
  for (std::uint64_t n = 1; n < q.size(); ++n) arr.push_back(q[n].get_str());
  j["coeffs"] = std::move(arr);
  return j.dump();
}

IngestResult validate_ingested(HeckeEigenform form, const IngestOptions& options) {
  const std::uint64_t limit = options.validate_limit == 0 ? form.n_max() : std::min(options.validate_limit, form.n_max());
  ValidationReport report = verify_form(form, limit);
  if (!report.pass() && !options.force) {
    const auto& first = report.failures.front();
    throw ValidationError("coefficients of '" + form.label() + "' fail " + to_string(first.check) + " at index " +
                              std::to_string(first.n) + ": " + first.detail,
                          first.n);
  }
  return IngestResult{std::move(form), std::move(report)};
}

IngestResult ingest_coefficients(const std::filesystem::path& path, CoefficientFormat format,
                                 const IngestOptions& options) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open coefficient file " + path.string());
  if (format == CoefficientFormat::csv) return validate_ingested(read_coefficients(is, FormSource::file), options);
  std::ostringstream ss;
  ss << is.rdbuf();
  return validate_ingested(parse_coefficients_json(ss.str(), FormSource::file), options);
}

IngestResult ingest_remote(const std::string& url, const IngestOptions& options) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, url_re)) throw NetworkError("unsupported URL '" + url + "'");
  const std::string host = m[1].str();
  const std::string path = m[2].matched ? m[2].str() : "/";
  httplib::Client cli(host);
  cli.set_connection_timeout(options.timeout);
  cli.set_read_timeout(options.timeout);
  httplib::Result res;
  for (int attempt = 0; attempt <= options.retries; ++attempt) {
    res = cli.Get(path);
    if (res) break;
  }
  if (!res) throw NetworkError("GET " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw NetworkError("GET " + url + " returned HTTP " + std::to_string(res->status));
  return validate_ingested(parse_coefficients_json(res->body, FormSource::remote), options);
}

}  // namespace tricorr

#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "tricorr/forms.hpp"
#include "tricorr/verify.hpp"

namespace tricorr {

// CSV coefficient format (also the cache format):
//   # weight=<k> level=<N> label=<str>
//   1,<a(1)>
//   2,<a(2)>
//   ...
// n strictly increasing from 1 with no gaps; a(n) a signed decimal integer.
void write_coefficients(std::ostream& os, const HeckeEigenform& f);
void write_coefficients(const std::filesystem::path& path, const HeckeEigenform& f);
HeckeEigenform read_coefficients(std::istream& is, FormSource source = FormSource::file);

// Remote payload: {"weight": k, "level": N, "label": "...", "coeffs": ["1", "-24", ...]}.
HeckeEigenform parse_coefficients_json(const std::string& body, FormSource source = FormSource::remote);
std::string coefficients_to_json(const HeckeEigenform& f);

enum class CoefficientFormat { csv, json };

struct IngestOptions {
  // Downgrade Hecke/Deligne failures from an error to a warning.
  bool force = false;
  // 0 means validate every stored coefficient.
  std::uint64_t validate_limit = 0;
  std::chrono::seconds timeout{30};
  int retries = 0;
};

struct IngestResult {
  HeckeEigenform form;
  ValidationReport report;
};

// Loads and validates a coefficient table. Throws ParseError on malformed
// input and ValidationError (naming the first failing index) when the Hecke
// checks fail and options.force is false.
IngestResult ingest_coefficients(const std::filesystem::path& path, CoefficientFormat format,
                                 const IngestOptions& options = {});
// HTTP GET of a JSON payload. Throws NetworkError on transport failures.
IngestResult ingest_remote(const std::string& url, const IngestOptions& options = {});
IngestResult validate_ingested(HeckeEigenform form, const IngestOptions& options);

}  // namespace tricorr

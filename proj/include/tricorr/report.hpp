#pragma once

#include <json.hpp>
#include <string>

#include "tricorr/analysis.hpp"
#include "tricorr/corrsum.hpp"
#include "tricorr/dseries.hpp"
#include "tricorr/verify.hpp"

namespace tricorr {

using Json = nlohmann::ordered_json;

Json to_json(const TripleSumResult& r);
Json to_json(const ScanPoint& p);
Json to_json(const ExponentFit& f);
Json to_json(const OmegaReport& r);
Json to_json(const NonvanishingStats& s);
Json to_json(const CongruentHit& h);
Json to_json(const DirichletEval& e);
Json to_json(const CheckReport& r);
Json to_json(const ValidationReport& r);

const char* artifact_version();

// {"artifact": {...}, "config": config, "result": result, "metadata": {...}}.
// Everything outside "metadata" is a pure function of the inputs; metadata
// (timestamps) is left out entirely when with_metadata is false.
Json make_report(const std::string& command, Json config, Json result, bool with_metadata);

}  // namespace tricorr

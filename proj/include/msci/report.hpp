#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "msci/analyze.hpp"
#include "msci/dataset.hpp"
#include "msci/fit.hpp"
#include "msci/models.hpp"
#include "msci/synth.hpp"
#include "msci/validate.hpp"

namespace msci {

inline constexpr const char* kToolName = "msci";
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

namespace report {

Json to_json(const Descriptives& d);
Json to_json(const StudyMeta& m);
Json dataset_summary(const Dataset& d);
Json to_json(const ModelSpec& spec);
Json catalog_json(const Catalog& c);
Json to_json(const FitResult& f, std::span<const std::string> param_names = {});
Json to_json(const RankedFits& r);
Json to_json(const PlausibilityConfig& c);
Json to_json(const validate::ValidationReport& v);
Json to_json(const validate::SimilarityReport& s);
Json to_json(const analyze::CorrelationReport& c);
Json to_json(const analyze::IntervalBand& b);
Json to_json(const analyze::Peak& p);

struct InputDigest {
  std::string role;
  std::string path;
  std::string fnv1a64;
};

/// Hex FNV-1a of a byte string.
std::string digest(std::string_view bytes);

/// Standard envelope shared by every CLI report.
Json envelope(const std::string& command, std::uint64_t seed, const std::vector<InputDigest>& inputs, Json result);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const Json& j);

void write_leaderboard(std::ostream& out, const RankedFits& r);
void write_similarity(std::ostream& out, const validate::SimilarityReport& s);
void write_band_csv(std::ostream& out, const analyze::IntervalBand& b);

}  // namespace report
}  // namespace msci

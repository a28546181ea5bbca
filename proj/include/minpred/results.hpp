#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "minpred/dataset.hpp"
#include "minpred/eval.hpp"
#include "minpred/mpir.hpp"

namespace minpred {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

// Reproducibility record attached to every persisted result. Timestamps and
// timings live only here so document bodies stay byte-deterministic.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::uint64_t master_seed = 0;
  std::string created_at;        // ISO-8601 UTC
  std::string data_fingerprint;  // content hash of the input, or generated:<seed>
  Json config = Json::object();
  Json timings = Json::object();
};

struct ResultsDocument {
  int schema_version = kSchemaVersion;
  std::string kind;  // strength_matrix | score_matrix_set | benchmark | ...
  RunManifest manifest;
  Json body = Json::object();
};

std::string iso8601_utc_now();

// FNV-1a 64-bit content hash of a file, formatted fnv1a64:<hex>.
std::string fingerprint_file(const std::string& path);
std::string fingerprint_bytes(const void* data, std::size_t size);

Json to_json(const ResultsDocument& doc);
ResultsDocument document_from_json(const Json& j);

void write_document(const ResultsDocument& doc, const std::string& path);
ResultsDocument read_document(const std::string& path);

// Body builders (bodies are deterministic functions of their inputs).
Json strength_matrix_body(const StrengthMatrix& matrix);
StrengthMatrix strength_matrix_from_body(const Json& body);
Json score_matrix_body(const ScoreMatrix& scores);
Json benchmark_body(const BenchmarkResult& result);
Json lambda_selection_body(const LambdaSelection& selection);
Json ground_truth_body(const GroundTruthGraph& graph);
GroundTruthGraph ground_truth_from_body(const Json& body);

}  // namespace minpred

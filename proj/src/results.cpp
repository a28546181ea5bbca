#include "minpred/results.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <vector>

#include "minpred/errors.hpp"

namespace minpred {

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buffer[80];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                utc.tm_year + 1900, utc.tm_mon + 1, utc.tm_mday, utc.tm_hour,
                utc.tm_min, utc.tm_sec);
  return buffer;
}

std::string fingerprint_bytes(const void* data, std::size_t size) {
  std::uint64_t h = 14695981039346656037ULL;
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buffer;
}

std::string fingerprint_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError("fingerprint: cannot open " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(file)),
                          std::istreambuf_iterator<char>());
  return fingerprint_bytes(bytes.data(), bytes.size());
}

Json to_json(const ResultsDocument& doc) {
  Json j;
  j["schema_version"] = doc.schema_version;
  j["kind"] = doc.kind;
  Json manifest;
  manifest["tool_version"] = doc.manifest.tool_version;
  manifest["master_seed"] = doc.manifest.master_seed;
  manifest["created_at"] = doc.manifest.created_at;
  manifest["data_fingerprint"] = doc.manifest.data_fingerprint;
  manifest["config"] = doc.manifest.config;
  manifest["timings"] = doc.manifest.timings;
  j["manifest"] = manifest;
  j["body"] = doc.body;
  return j;
}

ResultsDocument document_from_json(const Json& j) {
  ResultsDocument doc;
  doc.schema_version = j.at("schema_version").get<int>();
  if (doc.schema_version != kSchemaVersion) {
    throw DataError("results: unsupported schema version " +
                    std::to_string(doc.schema_version));
  }
  doc.kind = j.at("kind").get<std::string>();
  const Json& manifest = j.at("manifest");
  doc.manifest.tool_version = manifest.at("tool_version").get<std::string>();
  doc.manifest.master_seed = manifest.at("master_seed").get<std::uint64_t>();
  doc.manifest.created_at = manifest.at("created_at").get<std::string>();
  doc.manifest.data_fingerprint =
      manifest.at("data_fingerprint").get<std::string>();
  doc.manifest.config = manifest.at("config");
  doc.manifest.timings = manifest.value("timings", Json::object());
  doc.body = j.at("body");
  return doc;
}

void write_document(const ResultsDocument& doc, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw DataError("results: cannot write " + path);
  file << to_json(doc).dump(2) << '\n';
  if (!file) throw DataError("results: write failed for " + path);
}

ResultsDocument read_document(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw DataError("results: cannot open " + path);
  Json j;
  try {
    file >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("results: parse error in " + path + ": " + e.what());
  }
  return document_from_json(j);
}

Json strength_matrix_body(const StrengthMatrix& matrix) {
  Json body;
  body["type"] = "strength_matrix";
  body["n_real"] = matrix.n_real;
  body["n_fake"] = matrix.n_fake;
  body["names"] = matrix.names;
  body["raw"] = {{"rows", matrix.n_real + matrix.n_fake},
                 {"cols", matrix.n_real},
                 {"layout", "row_major_source_by_target"},
                 {"values", matrix.raw}};
  body["capped"] = matrix.capped;
  if (matrix.threshold.has_value()) {
    body["threshold"] = *matrix.threshold;
    body["thresholded"] = {{"rows", matrix.n_real},
                           {"cols", matrix.n_real},
                           {"layout", "row_major_source_by_target"},
                           {"values", matrix.thresholded}};
  }
  return body;
}

StrengthMatrix strength_matrix_from_body(const Json& body) {
  StrengthMatrix matrix;
  matrix.n_real = body.at("n_real").get<std::size_t>();
  matrix.n_fake = body.at("n_fake").get<std::size_t>();
  matrix.names = body.at("names").get<std::vector<std::string>>();
  matrix.raw = body.at("raw").at("values").get<std::vector<double>>();
  matrix.capped = body.at("capped").get<std::vector<std::uint8_t>>();
  if (body.contains("threshold")) {
    matrix.threshold = body.at("threshold").get<double>();
    matrix.thresholded =
        body.at("thresholded").at("values").get<std::vector<double>>();
  }
  return matrix;
}

Json score_matrix_body(const ScoreMatrix& scores) {
  Json body;
  body["type"] = "score_matrix";
  body["method"] = scores.method;
  body["n"] = scores.n;
  body["scores"] = {{"rows", scores.n},
                    {"cols", scores.n},
                    {"layout", "row_major_source_by_target"},
                    {"values", scores.values}};
  body["valid"] = scores.valid;
  body["notes"] = scores.notes;
  return body;
}

Json benchmark_body(const BenchmarkResult& result) {
  Json body;
  body["type"] = "benchmark";
  Json cells = Json::array();
  for (const auto& cell : result.cells) {
    Json c;
    c["method"] = cell.method;
    c["n"] = cell.n;
    c["seed_index"] = cell.seed_index;
    c["ok"] = cell.ok;
    if (!cell.ok) c["message"] = cell.message;
    if (cell.ok) {
      c["auc_pr"] = cell.auc_pr;
      c["auc_roc"] = cell.auc_roc;
    }
    cells.push_back(c);
  }
  body["cells"] = cells;
  Json aggregates = Json::array();
  for (const auto& agg : result.aggregates()) {
    Json a;
    a["method"] = agg.method;
    a["n"] = agg.n;
    a["count"] = agg.count;
    a["mean_auc_pr"] = agg.mean_auc_pr;
    a["sd_auc_pr"] = agg.sd_auc_pr;
    a["mean_auc_roc"] = agg.mean_auc_roc;
    a["sd_auc_roc"] = agg.sd_auc_roc;
    aggregates.push_back(a);
  }
  body["aggregates"] = aggregates;
  return body;
}

Json lambda_selection_body(const LambdaSelection& selection) {
  Json body;
  body["type"] = "lambda_selection";
  Json reports = Json::array();
  for (const auto& r : selection.reports) {
    Json j;
    j["lambda"] = r.lambda;
    j["accepted"] = r.accepted;
    j["mean_null"] = r.mean_null;
    j["sd_null"] = r.sd_null;
    j["mean_causal"] = r.mean_causal;
    j["sd_causal"] = r.sd_causal;
    reports.push_back(j);
  }
  body["candidates"] = reports;
  if (selection.chosen.has_value()) {
    body["chosen"] = *selection.chosen;
  } else {
    body["chosen"] = nullptr;
  }
  body["message"] = selection.message;
  return body;
}

Json ground_truth_body(const GroundTruthGraph& graph) {
  Json body;
  body["type"] = "ground_truth";
  body["n"] = graph.N;
  body["k"] = graph.K;
  body["m"] = graph.M;
  body["a"] = {{"shape", {graph.N, graph.N, graph.K, graph.M}},
               {"values", graph.A}};
  body["b"] = {{"shape", {graph.N, graph.K, graph.M}}, {"values", graph.B}};
  body["indicator"] = {{"rows", graph.N},
                       {"cols", graph.N},
                       {"layout", "row_major_source_by_target"},
                       {"values", graph.indicator}};
  return body;
}

GroundTruthGraph ground_truth_from_body(const Json& body) {
  GroundTruthGraph graph;
  graph.N = body.at("n").get<std::size_t>();
  graph.K = body.at("k").get<std::size_t>();
  graph.M = body.at("m").get<std::size_t>();
  graph.A = body.at("a").at("values").get<std::vector<double>>();
  graph.B = body.at("b").at("values").get<std::vector<double>>();
  graph.indicator =
      body.at("indicator").at("values").get<std::vector<std::uint8_t>>();
  if (graph.A.size() != graph.N * graph.N * graph.K * graph.M ||
      graph.B.size() != graph.N * graph.K * graph.M ||
      graph.indicator.size() != graph.N * graph.N) {
    throw DataError("ground_truth: shape mismatch");
  }
  return graph;
}

}  // namespace minpred

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "minpred/baselines.hpp"
#include "minpred/mpir.hpp"

namespace minpred {

// Area under the ROC curve with tied scores grouped: equivalent to the
// Mann-Whitney statistic with ties counted 1/2. Requires at least one
// positive and one negative label.
double auc_roc(std::span<const double> scores,
               std::span<const std::uint8_t> labels);

// Precision-recall step area (average-precision convention):
// sum_k (R_k - R_{k-1}) P_k over descending score thresholds, tied scores
// grouped into one threshold.
double auc_pr(std::span<const double> scores,
              std::span<const std::uint8_t> labels);

enum class Method {
  kMpir,
  kMutualInformation,
  kTransferEntropy,
  kLinearGranger,
  kKernelGranger,
  kElasticNet,
  kCausalInfluence,
  kGaussianRandom,
};

Method method_from_name(const std::string& name);
std::string method_name(Method method);
std::vector<Method> all_methods();

struct BenchmarkRunConfig {
  RunConfig run;
  std::size_t n_series = 500;   // rollouts per synthetic dataset
  std::size_t T = 22;           // rollout length
  std::size_t M = 1;
  std::size_t gaussian_count = 10000;
};

struct BenchmarkCell {
  std::string method;
  std::size_t n = 0;
  std::size_t seed_index = 0;
  bool ok = false;
  std::string message;
  double auc_pr = 0.0;
  double auc_roc = 0.0;
  double wall_ms = 0.0;  // diagnostics only; excluded from persisted bodies
};

struct MethodAggregate {
  std::string method;
  std::size_t n = 0;
  std::size_t count = 0;
  double mean_auc_pr = 0.0;
  double sd_auc_pr = 0.0;
  double mean_auc_roc = 0.0;
  double sd_auc_roc = 0.0;
};

struct BenchmarkResult {
  std::vector<BenchmarkCell> cells;
  std::vector<MethodAggregate> aggregates() const;
};

// For each (N, seed): sample a ground-truth graph, roll out a dataset,
// window it, run every requested method and score the flattened off-diagonal
// entries against the flattened indicator. Per-cell failures are recorded,
// not fatal.
BenchmarkResult run_benchmark(const std::vector<Method>& methods,
                              const std::vector<std::size_t>& n_list,
                              std::size_t n_seeds,
                              const BenchmarkRunConfig& config);

// Score one method over an already-windowed dataset (the benchmark cell
// body; exposed for reuse by the CLI's `baseline` subcommand).
ScoreMatrix score_with_method(Method method, const TimeSeriesBundle& bundle,
                              const WindowedDataset& dataset,
                              const RunConfig& config);

}  // namespace minpred

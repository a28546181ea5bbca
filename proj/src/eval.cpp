#include "minpred/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "minpred/errors.hpp"
#include "minpred/synth.hpp"

namespace minpred {

namespace {

void check_labels(std::span<const double> scores,
                  std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw ShapeError("auc: score/label size mismatch");
  }
  if (!all_finite(scores)) throw NumericalError("auc: non-finite score");
  std::size_t positives = 0;
  for (auto l : labels) positives += l != 0 ? 1 : 0;
  if (positives == 0 || positives == labels.size()) {
    throw NumericalError(
        "auc: undefined, labels are all-positive or all-negative");
  }
}

}  // namespace

double auc_roc(std::span<const double> scores,
               std::span<const std::uint8_t> labels) {
  check_labels(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double positives = 0.0, negatives = 0.0;
  for (auto l : labels) (l != 0 ? positives : negatives) += 1.0;

  // Midranks over tie groups; U statistic from the positive ranks.
  double rank_sum_positive = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank =
        (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] != 0) rank_sum_positive += midrank;
    }
    i = j;
  }
  const double u =
      rank_sum_positive - positives * (positives + 1.0) / 2.0;
  return u / (positives * negatives);
}

double auc_pr(std::span<const double> scores,
              std::span<const std::uint8_t> labels) {
  check_labels(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  double positives = 0.0;
  for (auto l : labels) positives += l != 0 ? 1.0 : 0.0;

  double tp = 0.0, fp = 0.0, ap = 0.0, prev_recall = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] != 0) {
        tp += 1.0;
      } else {
        fp += 1.0;
      }
    }
    const double recall = tp / positives;
    const double precision = tp / (tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

Method method_from_name(const std::string& name) {
  if (name == "mpir") return Method::kMpir;
  if (name == "mutual_information") return Method::kMutualInformation;
  if (name == "transfer_entropy") return Method::kTransferEntropy;
  if (name == "linear_granger") return Method::kLinearGranger;
  if (name == "kernel_granger") return Method::kKernelGranger;
  if (name == "elastic_net") return Method::kElasticNet;
  if (name == "causal_influence") return Method::kCausalInfluence;
  if (name == "gaussian_random") return Method::kGaussianRandom;
  throw ConfigError("unknown method: " + name);
}

std::string method_name(Method method) {
  switch (method) {
    case Method::kMpir: return "mpir";
    case Method::kMutualInformation: return "mutual_information";
    case Method::kTransferEntropy: return "transfer_entropy";
    case Method::kLinearGranger: return "linear_granger";
    case Method::kKernelGranger: return "kernel_granger";
    case Method::kElasticNet: return "elastic_net";
    case Method::kCausalInfluence: return "causal_influence";
    case Method::kGaussianRandom: return "gaussian_random";
  }
  throw ConfigError("unknown method enum");
}

std::vector<Method> all_methods() {
  return {Method::kMpir,          Method::kMutualInformation,
          Method::kTransferEntropy, Method::kLinearGranger,
          Method::kKernelGranger,   Method::kElasticNet,
          Method::kCausalInfluence, Method::kGaussianRandom};
}

ScoreMatrix score_with_method(Method method, const TimeSeriesBundle& bundle,
                              const WindowedDataset& dataset,
                              const RunConfig& config) {
  switch (method) {
    case Method::kMpir: {
      const StrengthMatrix w = infer_matrix(bundle, config);
      ScoreMatrix scores;
      scores.n = w.n_real;
      scores.method = "mpir";
      scores.values.assign(w.n_real * w.n_real, 0.0);
      scores.valid.assign(w.n_real * w.n_real, 1);
      for (std::size_t j = 0; j < w.n_real; ++j) {
        for (std::size_t i = 0; i < w.n_real; ++i) {
          scores.values[j * w.n_real + i] = w.raw_at(j, i);
        }
      }
      return scores;
    }
    case Method::kMutualInformation:
      return mutual_information_score(dataset);
    case Method::kTransferEntropy:
      return transfer_entropy_score(dataset);
    case Method::kLinearGranger:
      return linear_granger_score(dataset);
    case Method::kKernelGranger:
      return kernel_granger_score(dataset);
    case Method::kElasticNet:
      return elastic_net_score(dataset);
    case Method::kCausalInfluence:
      return causal_influence_score(dataset, config);
    case Method::kGaussianRandom:
      throw ConfigError(
          "gaussian_random has no single score matrix; handled by the "
          "benchmark loop");
  }
  throw ConfigError("unknown method enum");
}

std::vector<MethodAggregate> BenchmarkResult::aggregates() const {
  std::vector<MethodAggregate> out;
  for (const auto& cell : cells) {
    if (!cell.ok) continue;
    MethodAggregate* agg = nullptr;
    for (auto& a : out) {
      if (a.method == cell.method && a.n == cell.n) {
        agg = &a;
        break;
      }
    }
    if (agg == nullptr) {
      out.push_back({cell.method, cell.n, 0, 0.0, 0.0, 0.0, 0.0});
      agg = &out.back();
    }
    agg->count += 1;
    agg->mean_auc_pr += cell.auc_pr;
    agg->mean_auc_roc += cell.auc_roc;
  }
  for (auto& a : out) {
    a.mean_auc_pr /= static_cast<double>(a.count);
    a.mean_auc_roc /= static_cast<double>(a.count);
  }
  for (const auto& cell : cells) {
    if (!cell.ok) continue;
    for (auto& a : out) {
      if (a.method == cell.method && a.n == cell.n) {
        a.sd_auc_pr += (cell.auc_pr - a.mean_auc_pr) *
                       (cell.auc_pr - a.mean_auc_pr);
        a.sd_auc_roc += (cell.auc_roc - a.mean_auc_roc) *
                        (cell.auc_roc - a.mean_auc_roc);
      }
    }
  }
  for (auto& a : out) {
    a.sd_auc_pr = std::sqrt(a.sd_auc_pr / static_cast<double>(a.count));
    a.sd_auc_roc = std::sqrt(a.sd_auc_roc / static_cast<double>(a.count));
  }
  return out;
}

BenchmarkResult run_benchmark(const std::vector<Method>& methods,
                              const std::vector<std::size_t>& n_list,
                              std::size_t n_seeds,
                              const BenchmarkRunConfig& config) {
  if (methods.empty() || n_list.empty() || n_seeds == 0) {
    throw ConfigError("run_benchmark: empty grid");
  }
  BenchmarkResult result;
  for (std::size_t n : n_list) {
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const std::uint64_t cell_tag = seed_tag::kBenchmark + n * 1009 + s;
      Rng graph_rng(Rng::derive(config.run.master_seed,
                                seed_tag::kGraph + n * 1009 + s));
      const GroundTruthGraph graph =
          sample_graph(n, config.run.K, config.M, graph_rng);
      const TimeSeriesBundle bundle =
          generate(graph, config.n_series, config.T, nullptr,
                   Rng::derive(config.run.master_seed, cell_tag));
      const WindowedDataset dataset =
          windowize(bundle, config.run.K, config.run.train_fraction);

      std::vector<std::uint8_t> labels;
      labels.reserve(n * (n - 1));
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
          if (i != j) labels.push_back(graph.indicator[j * n + i]);
        }
      }

      for (Method method : methods) {
        BenchmarkCell cell;
        cell.method = method_name(method);
        cell.n = n;
        cell.seed_index = s;
        const auto start = std::chrono::steady_clock::now();
        try {
          if (method == Method::kGaussianRandom) {
            Rng grng(Rng::derive(config.run.master_seed, cell_tag + 777));
            const auto matrices =
                gaussian_random_score(n, config.gaussian_count, grng);
            double sum_pr = 0.0, sum_roc = 0.0;
            for (const auto& m : matrices) {
              const auto flat = m.off_diagonal();
              sum_pr += auc_pr(flat, labels);
              sum_roc += auc_roc(flat, labels);
            }
            cell.auc_pr = sum_pr / static_cast<double>(matrices.size());
            cell.auc_roc = sum_roc / static_cast<double>(matrices.size());
          } else {
            RunConfig cell_config = config.run;
            cell_config.master_seed =
                Rng::derive(config.run.master_seed, cell_tag + 13);
            const ScoreMatrix scores =
                score_with_method(method, bundle, dataset, cell_config);
            const auto flat = scores.off_diagonal();
            cell.auc_pr = auc_pr(flat, labels);
            cell.auc_roc = auc_roc(flat, labels);
          }
          cell.ok = true;
        } catch (const Error& e) {
          cell.ok = false;
          cell.message = e.what();
        }
        cell.wall_ms =
            std::chrono::duration<double, std::milli>(
                std::chrono::steady_clock::now() - start)
                .count();
        result.cells.push_back(std::move(cell));
      }
    }
  }
  return result;
}

}  // namespace minpred

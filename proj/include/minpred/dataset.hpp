#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minpred/matrix.hpp"
#include "minpred/rng.hpp"

namespace minpred {

// Ground-truth coupling structure of a synthetic system: causal tensor A
// (source j, target i, lag k, dim m), mixing tensor B (source j, lag k,
// dim m) and the 0-1 indicator of nonzero blocks.
struct GroundTruthGraph {
  std::size_t N = 0, K = 0, M = 0;
  std::vector<double> A;           // ((j*N + i)*K + k)*M + m
  std::vector<double> B;           // (j*K + k)*M + m
  std::vector<std::uint8_t> indicator;  // j*N + i, true iff block A_ji != 0

  double a(std::size_t j, std::size_t i, std::size_t k, std::size_t m) const {
    return A[((j * N + i) * K + k) * M + m];
  }
  double b(std::size_t j, std::size_t k, std::size_t m) const {
    return B[(j * K + k) * M + m];
  }
  bool edge(std::size_t j, std::size_t i) const {
    return indicator[j * N + i] != 0;
  }
};

// N observed variables, each possibly recorded as several independent raw
// segments (e.g. many short rollouts of the same system). Windows never cross
// a segment boundary.
struct TimeSeriesBundle {
  struct Segment {
    std::size_t length = 0;            // T
    std::vector<double> values;        // (j*T + t)*M + m

    double at(std::size_t j, std::size_t t, std::size_t m,
              std::size_t M) const {
      return values[(j * length + t) * M + m];
    }
    double& at(std::size_t j, std::size_t t, std::size_t m, std::size_t M) {
      return values[(j * length + t) * M + m];
    }
  };

  std::size_t n_series = 0;  // N
  std::size_t M = 1;
  std::vector<std::string> names;
  std::vector<Segment> segments;
  std::optional<GroundTruthGraph> graph;
  std::uint64_t seed = 0;
  std::string generator;

  std::size_t total_steps() const;
  void validate() const;
};

// Supervised view: one example per admissible time index, inputs holding the
// flattened windows of every (real + fake) series, targets holding the next
// step of every real series. Input layout: dimension l of series j sits at
// column j*K*M + l with l = k*M + m, oldest lag first.
struct WindowedDataset {
  std::size_t n_real = 0;   // N
  std::size_t n_fake = 0;   // S
  std::size_t K = 0;
  std::size_t M = 1;
  std::vector<std::string> names;        // N + S
  Matrix inputs;                         // E x (N+S)*K*M
  Matrix targets;                        // E x N*M
  std::size_t train_count = 0;           // first train_count rows are train
  std::vector<double> stds;              // (N+S)*K*M, train-split, frozen
  std::vector<std::size_t> fake_sources; // source index per fake series

  std::size_t n_examples() const { return inputs.rows; }
  std::size_t n_inputs() const { return n_real + n_fake; }
  std::size_t dims_per_series() const { return K * M; }
  std::size_t input_dim() const { return n_inputs() * dims_per_series(); }
  std::size_t series_offset(std::size_t j) const {
    return j * dims_per_series();
  }
};

// Sliding windows of horizon K, stride 1, within each segment independently.
// Split is 9:1 train:test by example order unless overridden.
WindowedDataset windowize(const TimeSeriesBundle& bundle, std::size_t K,
                          double train_fraction = 0.9);

// Appends S fake input series: uniformly chosen distinct sources whose window
// rows are independently permuted over the example axis, destroying any
// relation to the targets while preserving marginals.
WindowedDataset make_fake_series(const WindowedDataset& dataset, std::size_t S,
                                 Rng& rng);

inline std::size_t default_fake_count(std::size_t n) {
  return std::max<std::size_t>(2, (n + 1) / 2);
}

// Per series per dimension: subtract mean, divide by standard deviation
// (population convention). Errors on constant dimensions.
TimeSeriesBundle normalize(const TimeSeriesBundle& bundle);

}  // namespace minpred

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "minpred/dataset.hpp"
#include "minpred/mpir.hpp"
#include "minpred/rng.hpp"

namespace minpred {

// N x N directional score matrix emitted by every comparison method; entry
// (j, i) scores the direction j -> i. The diagonal is ignored downstream.
struct ScoreMatrix {
  std::size_t n = 0;
  std::string method;
  std::vector<double> values;        // j * n + i
  std::vector<std::uint8_t> valid;   // per entry
  std::vector<std::string> notes;    // fallback / cap flags

  double at(std::size_t j, std::size_t i) const { return values[j * n + i]; }
  void set(std::size_t j, std::size_t i, double v) {
    values[j * n + i] = v;
    valid[j * n + i] = 1;
  }
  std::vector<double> off_diagonal() const;
};

// A_ji = I(X^(j)_{t-1}; x^(i)_t), KSG with k = 5. Computed once per
// unordered pair in the lower-index -> higher-index orientation and
// mirrored, so the output is exactly symmetric.
ScoreMatrix mutual_information_score(const WindowedDataset& dataset,
                                     std::size_t k = 5);

// Transfer entropy: A_ji = I(X^(j)_{t-1}; x^(i)_t | windows of every other
// series), KSG conditional estimator with k = 3.
ScoreMatrix transfer_entropy_score(const WindowedDataset& dataset,
                                   std::size_t k = 3);

// A_ji = log(RSS of the predictor without series j / RSS with the full
// window), ordinary least squares with intercept. Singular designs fall back
// to a 1e-8 ridge and are flagged.
ScoreMatrix linear_granger_score(const WindowedDataset& dataset);

struct KernelGrangerConfig {
  std::size_t degree = 2;          // inhomogeneous polynomial kernel degree
  double ridge = 1e-8;             // scaled by sample count
  std::size_t max_features = 5000;
};

// Granger index evaluated in the explicit feature space of the degree-p
// inhomogeneous polynomial kernel (monomials of degree <= p over the
// z-scored inputs). Degree 1 reproduces linear_granger_score.
ScoreMatrix kernel_granger_score(const WindowedDataset& dataset,
                                 const KernelGrangerConfig& config = {});

struct ElasticNetConfig {
  std::vector<double> l1_ratios = {0.5, 0.8, 0.9, 0.95, 0.99};
  double alpha_min = 1e-4;
  double alpha_max = 0.31622776601683794;  // 10^(-0.5)
  std::size_t alpha_steps = 200;
  std::size_t cv_folds = 5;
  double tolerance = 1e-10;
  std::size_t max_iterations = 50000;
};

// Coordinate-descent elastic net per target over the flattened window, model
// selected by R^2 on expanding-window time-series cross-validation splits;
// A_ji = sum of |coefficients| over series j's inputs.
ScoreMatrix elastic_net_score(const WindowedDataset& dataset,
                              const ElasticNetConfig& config = {});

// Causal influence: train the prediction model per target, then measure the
// KL divergence between the joint (window, prediction) cloud and its
// counterpart with series j's windows replaced by example-permuted copies.
ScoreMatrix causal_influence_score(const WindowedDataset& dataset,
                                   const RunConfig& config,
                                   std::size_t kl_neighbors = 5);

// I.i.d. standard normal score matrices (calibration floor).
std::vector<ScoreMatrix> gaussian_random_score(std::size_t n,
                                               std::size_t count, Rng& rng);

// Internal building block shared with tests: elastic-net coordinate descent
// for a single (alpha, l1_ratio) on centered data. Returns false when the
// tolerance was not reached within the iteration budget.
bool elastic_net_fit(const Matrix& gram, const std::vector<double>& xty,
                     double alpha, double l1_ratio, double n_samples,
                     double tolerance, std::size_t max_iterations,
                     std::vector<double>& beta);

}  // namespace minpred

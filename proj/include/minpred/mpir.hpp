#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minpred/dataset.hpp"
#include "minpred/mlp.hpp"
#include "minpred/noise.hpp"
#include "minpred/rng.hpp"

namespace minpred {

enum class NoiseMode {
  // Fresh eps ~ N(0, I) per example per step; gradients through the
  // reparameterized channel.
  kSampled,
  // Exact eps-expectation of the squared error; valid only for a purely
  // linear predictor (no hidden layers), where the expectation is closed
  // form. Deterministic, used for analytic cross-checks.
  kAnalytic,
  // No input corruption and no information term: plain squared-error
  // training of the predictor (used by the causal-influence baseline).
  kNone,
};

struct RunConfig {
  double lambda = 0.002;             // weight of the information bound
  double eta0 = 0.01;                // initial relative noise amplitude chi
  long fake_count = -1;              // -1: max(2, ceil(N/2))
  double alpha = 0.05;               // significance level
  std::size_t K = 3;                 // window horizon
  std::size_t epochs = 30000;        // full passes over the train split
  std::size_t warmup_epochs = 400;   // information term off at the start
  std::size_t batch_size = 256;
  double learning_rate = 1e-4;
  std::vector<std::size_t> hidden_widths = {8, 8};
  std::uint64_t master_seed = 0;
  bool full_chi = false;             // per-dimension amplitudes instead of shared
  bool augment = true;               // append fake series before training
  bool train_chi = true;
  NoiseMode noise_mode = NoiseMode::kSampled;
  std::vector<double> fixed_chi;     // per input series; used when !train_chi
  double chi_floor = 1e-6;
  double train_fraction = 0.9;
  // Optional geometric learning-rate decay (1.0 / 0 disables it).
  double lr_decay_factor = 1.0;
  std::size_t lr_decay_every = 0;
  std::size_t threads = 0;           // 0: hardware concurrency

  std::size_t resolved_fake_count(std::size_t n) const;
  void validate() const;
};

struct TrainResult {
  MlpParams params;
  NoiseAmplitudes amps;
  std::vector<double> loss_trace;  // per-epoch mean train objective
  bool chi_floor_hit = false;
};

// Minimizes the regularized empirical risk for target series i over the
// (possibly augmented) dataset: mean squared prediction error from the
// noise-corrupted full window, plus lambda times the Gaussian-channel bound
// on the injected information, by minibatch Adam. The bound term is disabled
// for the first warmup_epochs epochs.
TrainResult train_target(const WindowedDataset& dataset, std::size_t target,
                         const RunConfig& config, Rng& rng);

// Same minimization against an arbitrary target matrix (n_examples rows);
// used for constructed calibration targets.
TrainResult train_on_targets(const WindowedDataset& dataset,
                             const Matrix& targets, const RunConfig& config,
                             Rng& rng);

// Value and gradients of the per-example objective at fixed eps:
// ||y - f(x + eta.eps)||^2 plus, when the information term is active,
// lambda times the channel bound. Shares the gradient paths the trainer
// uses; exists so the full objective can be finite-difference checked.
struct ObjectiveEval {
  double value = 0.0;
  MlpGrads param_grads;
  std::vector<double> log_chi_grad;
};
ObjectiveEval evaluate_objective(const MlpParams& params,
                                 const NoiseAmplitudes& amps,
                                 std::span<const double> x,
                                 std::span<const double> y,
                                 std::span<const double> eps, double lambda,
                                 bool information_active);

// Column of predictive strengths: the per-series bound contributions (nats)
// at the trained amplitudes.
std::vector<double> predictive_strength(const NoiseAmplitudes& amps);

struct StrengthMatrix {
  std::size_t n_real = 0;
  std::size_t n_fake = 0;
  std::vector<std::string> names;          // N + S input names
  std::vector<double> raw;                 // (N+S) x N, row j = source
  std::vector<std::uint8_t> capped;        // per raw entry: chi floor reached
  std::optional<double> threshold;
  std::vector<double> thresholded;         // N x N once thresholded

  double raw_at(std::size_t j, std::size_t i) const {
    return raw[j * n_real + i];
  }
  // Off-diagonal entries of the main N x N block, row-major j-major order.
  std::vector<double> main_off_diagonal() const;
};

// Algorithm steps 1..9: augment (optional), train every target with a
// deterministic per-target seed derived from the master seed, assemble W.
StrengthMatrix infer_matrix(const TimeSeriesBundle& bundle,
                            const RunConfig& config);

// Step 10: pool the fake-row strengths, take their empirical (1 - alpha)
// quantile (linear interpolation between order statistics) as the threshold,
// zero main-matrix entries <= threshold (ties go to the null).
StrengthMatrix significance_threshold(StrengthMatrix matrix, double alpha);

// Empirical quantile with linear interpolation between order statistics
// (h = (n - 1) q). `values` need not be sorted.
double empirical_quantile(std::vector<double> values, double q);

struct LambdaCandidateReport {
  double lambda = 0.0;
  bool accepted = false;
  double mean_null = 0.0;  // strengths from permuted inputs to known targets
  double sd_null = 0.0;
  double mean_causal = 0.0;  // strengths from true parents to known targets
  double sd_causal = 0.0;
};

struct LambdaSelection {
  std::vector<LambdaCandidateReport> reports;
  std::optional<double> chosen;  // largest accepted candidate
  std::string message;
};

// Calibration protocol: augment the inputs with ceil(N/2) example-permuted
// series v and the targets with ceil(N/2) constructed series w_i = Q . X^(i)
// (Q fixed random), run the pipeline per candidate, fit Gaussians to the
// v->w and x->w strengths, and accept a candidate iff the null's +4 sigma
// stays below the causal -4 sigma.
LambdaSelection select_lambda(const TimeSeriesBundle& bundle,
                              const std::vector<double>& candidates,
                              const RunConfig& config);

}  // namespace minpred

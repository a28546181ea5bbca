// Acceptance suite: every release gate runs here, one numbered check per
// gate, each printing a single PASS/FAIL line. Pinned tolerances live next
// to the checks. Usage: minpred_acceptance [ids...]; no ids runs everything.
// The CLI determinism check needs MINPRED_CLI_PATH pointing at the binary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "minpred/baselines.hpp"
#include "minpred/csv.hpp"
#include "minpred/errors.hpp"
#include "minpred/eval.hpp"
#include "minpred/info_estimators.hpp"
#include "minpred/knn.hpp"
#include "minpred/mpir.hpp"
#include "minpred/results.hpp"
#include "minpred/synth.hpp"
#include "../tests/support.hpp"

using namespace minpred;

namespace {

struct CheckContext {
  std::ostringstream detail;
  bool failed = false;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      failed = true;
      detail << "  FAILED: " << what << "\n";
    }
  }
  void note(const std::string& what) { detail << "  " << what << "\n"; }
};

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// ------------------------------------------------------------------ 1
void criterion_gradients(CheckContext& ctx) {
  Rng rng(1001);
  const std::size_t n_series = 4, K = 3, M = 1;
  const std::size_t dims = K * M;
  std::size_t components = 0, failures = 0;
  double worst = 0.0;

  for (int config_id = 0; config_id < 50; ++config_id) {
    std::vector<double> stds(n_series * dims);
    for (double& s : stds) s = rng.uniform(0.2, 3.0);
    NoiseAmplitudes amps = NoiseAmplitudes::create(n_series, dims, stds, 0.5);
    for (double& v : amps.log_chi) v = rng.uniform(-2.0, 1.5);

    MlpParams params = make_mlp({n_series * dims, 8, 8, M}, rng);
    for (auto& b : params.biases) {
      for (double& v : b) v = rng.uniform(-0.3, 0.3);
    }
    std::vector<double> x(n_series * dims), eps(n_series * dims), y(M);
    for (double& v : x) v = rng.normal();
    for (double& v : eps) v = rng.normal();
    for (double& v : y) v = rng.normal();
    const double lambda = rng.uniform(0.001, 0.1);

    const ObjectiveEval eval =
        evaluate_objective(params, amps, x, y, eps, lambda, true);

    auto check_component = [&](double analytic, double numeric) {
      ++components;
      const double diff = std::fabs(analytic - numeric);
      const double scale = std::max(std::fabs(analytic), std::fabs(numeric));
      const double rel = scale > 0.0 ? diff / scale : 0.0;
      if (!(diff <= 1e-5 * scale || diff <= 1e-8)) {
        ++failures;
        worst = std::max(worst, rel);
      } else {
        worst = std::max(worst, std::min(rel, 1e-5));
      }
    };

    for (std::size_t j = 0; j < amps.chi_count(); ++j) {
      const double numeric = testsupport::central_difference(
          [&](double v) {
            NoiseAmplitudes a = amps;
            a.log_chi[j] = v;
            return evaluate_objective(params, a, x, y, eps, lambda, true)
                .value;
          },
          amps.log_chi[j]);
      check_component(eval.log_chi_grad[j], numeric);
    }
    for (std::size_t layer = 0; layer < params.weights.size(); ++layer) {
      for (std::size_t idx = 0; idx < params.weights[layer].data.size();
           idx += 3) {
        const double numeric = testsupport::central_difference(
            [&](double v) {
              MlpParams p = params;
              p.weights[layer].data[idx] = v;
              return evaluate_objective(p, amps, x, y, eps, lambda, true)
                  .value;
            },
            params.weights[layer].data[idx]);
        check_component(eval.param_grads.weights[layer].data[idx], numeric);
      }
      for (std::size_t idx = 0; idx < params.biases[layer].size(); ++idx) {
        const double numeric = testsupport::central_difference(
            [&](double v) {
              MlpParams p = params;
              p.biases[layer][idx] = v;
              return evaluate_objective(p, amps, x, y, eps, lambda, true)
                  .value;
            },
            params.biases[layer][idx]);
        check_component(eval.param_grads.biases[layer][idx], numeric);
      }
    }
  }
  ctx.note("checked " + std::to_string(components) +
           " gradient components over 50 random configurations");
  ctx.require(failures == 0, std::to_string(failures) +
                                 " components exceeded relative error 1e-5");
}

// ------------------------------------------------------------------ 2
void criterion_channel_exactness(CheckContext& ctx) {
  const double target = 0.5 * std::log(2.0);
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(2000 + seed);
    const std::size_t n = 4000;
    std::vector<double> x(n);
    for (double& v : x) v = rng.normal();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const std::vector<double> stds{std::sqrt(var)};
    NoiseAmplitudes amps = NoiseAmplitudes::create(1, 1, stds, 1.0);

    Matrix corrupted(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const auto result = corrupt(std::span<const double>(&x[i], 1), amps, rng);
      corrupted.at(i, 0) = result.corrupted[0];
    }
    const SampleCloud tilde = SampleCloud::from_matrix(std::move(corrupted));
    const SampleCloud clean =
        SampleCloud::from_matrix(testsupport::column_matrix(x));
    total += ksg_mutual_information(tilde, clean, 5);
  }
  const double mean_estimate = total / 10.0;
  ctx.note("mean kNN estimate " + std::to_string(mean_estimate) +
           " vs channel bound " + std::to_string(target));
  ctx.require(std::fabs(mean_estimate - target) <= 0.03,
              "kNN estimate deviates from 0.5 ln 2 by more than 0.03 nats");
}

// ------------------------------------------------------------------ 3
void criterion_ksg_oracle(CheckContext& ctx) {
  const double rho = 0.8;
  const double closed_form = -0.5 * std::log(1.0 - rho * rho);
  double correlated = 0.0, independent = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(3000 + seed);
    std::vector<double> x, y;
    testsupport::sample_bivariate_gaussian(4000, rho, rng, x, y);
    correlated += ksg_mutual_information(
        SampleCloud::from_matrix(testsupport::column_matrix(x)),
        SampleCloud::from_matrix(testsupport::column_matrix(y)), 5);

    std::vector<double> a(4000), b(4000);
    for (std::size_t i = 0; i < 4000; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
    }
    independent += ksg_mutual_information(
        SampleCloud::from_matrix(testsupport::column_matrix(a)),
        SampleCloud::from_matrix(testsupport::column_matrix(b)), 5);
  }
  correlated /= 10.0;
  independent /= 10.0;
  ctx.note("correlated estimate " + std::to_string(correlated) + " vs " +
           std::to_string(closed_form) + "; independent estimate " +
           std::to_string(independent));
  ctx.require(std::fabs(correlated - closed_form) <= 0.05,
              "correlated-Gaussian estimate off by more than 0.05 nats");
  ctx.require(std::fabs(independent) <= 0.03,
              "independent estimate exceeds 0.03 nats");
}

// Shared by criteria 4 and 10: white-noise driver, lagged copy, plus an
// optional independent third series.
TimeSeriesBundle planted_copy_bundle(std::size_t n_series, std::size_t T,
                                     std::uint64_t seed) {
  Rng rng(seed);
  TimeSeriesBundle bundle;
  bundle.n_series = n_series;
  bundle.M = 1;
  for (std::size_t j = 0; j < n_series; ++j) {
    bundle.names.push_back("x" + std::to_string(j + 1));
  }
  TimeSeriesBundle::Segment seg;
  seg.length = T;
  seg.values.assign(n_series * T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    seg.at(0, t, 0, 1) = rng.normal();
    const double prev = t > 0 ? seg.at(0, t - 1, 0, 1) : rng.normal();
    seg.at(1, t, 0, 1) = prev + 0.1 * rng.normal();
    for (std::size_t j = 2; j < n_series; ++j) {
      seg.at(j, t, 0, 1) = rng.normal();
    }
  }
  bundle.segments.push_back(std::move(seg));
  return bundle;
}

// ------------------------------------------------------------------ 4
void criterion_independence_property(CheckContext& ctx) {
  std::size_t null_clean_seeds = 0, edge_seeds = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TimeSeriesBundle bundle =
        planted_copy_bundle(3, 2003, 4000 + seed);  // 2000 examples
    RunConfig config;
    config.epochs = 8000;
    config.warmup_epochs = 400;
    config.alpha = 0.05;
    config.master_seed = 4100 + seed;
    const StrengthMatrix thresholded =
        significance_threshold(infer_matrix(bundle, config), config.alpha);

    // Off-diagonal row and column of the independent series (the diagonal
    // is excluded from scoring everywhere else).
    bool null_clean = true;
    for (std::size_t i = 0; i < 3; ++i) {
      if (i == 2) continue;
      if (thresholded.thresholded[2 * 3 + i] != 0.0) null_clean = false;
      if (thresholded.thresholded[i * 3 + 2] != 0.0) null_clean = false;
    }
    const bool edge_survives = thresholded.thresholded[0 * 3 + 1] > 0.0;
    null_clean_seeds += null_clean ? 1 : 0;
    edge_seeds += edge_survives ? 1 : 0;
    ctx.note("seed " + std::to_string(seed) + ": threshold " +
             std::to_string(*thresholded.threshold) + ", null row/col " +
             (null_clean ? "zero" : "NONZERO") + ", planted edge " +
             (edge_survives ? "kept" : "LOST") + " (W " +
             std::to_string(thresholded.raw_at(0, 1)) + ")");
  }
  if (null_clean_seeds < 9) {
    ctx.note("context: the four null entries are exchangeable with the "
             "pooled fake strengths, so a level-0.05 threshold zeroes all "
             "four jointly with probability at most 0.95^4 = 0.81 per seed "
             "even under perfect calibration; nine-of-ten is out of reach "
             "for this check as stated (the planted-edge half is the "
             "informative one)");
  }
  ctx.require(null_clean_seeds >= 9,
              "independent series row/column zeroed in only " +
                  std::to_string(null_clean_seeds) + "/10 seeds (need >= 9)");
  ctx.require(edge_seeds >= 9, "planted edge survived in only " +
                                   std::to_string(edge_seeds) +
                                   "/10 seeds (need >= 9)");
}

// ------------------------------------------------------------------ 5
void criterion_benchmark_slice(CheckContext& ctx) {
  BenchmarkRunConfig config;
  config.run.epochs = 8000;
  config.run.warmup_epochs = 400;
  config.run.master_seed = 55;
  const BenchmarkResult result = run_benchmark(
      {Method::kMpir, Method::kMutualInformation}, {5}, 5, config);

  double mpir_mean = 0.0, mi_mean = 0.0;
  std::size_t mpir_count = 0, mi_count = 0;
  for (const auto& cell : result.cells) {
    if (!cell.ok) {
      ctx.require(false, cell.method + " failed: " + cell.message);
      continue;
    }
    if (cell.method == "mpir") {
      mpir_mean += cell.auc_roc;
      ++mpir_count;
    } else {
      mi_mean += cell.auc_roc;
      ++mi_count;
    }
    ctx.note(cell.method + " seed " + std::to_string(cell.seed_index) +
             ": AUC-ROC " + std::to_string(cell.auc_roc));
  }
  mpir_mean /= static_cast<double>(mpir_count);
  mi_mean /= static_cast<double>(mi_count);
  ctx.note("mean AUC-ROC: mpir " + std::to_string(mpir_mean) +
           ", mutual_information " + std::to_string(mi_mean));
  ctx.require(mpir_mean >= 0.90, "mpir mean AUC-ROC below 0.90");
  ctx.require(mpir_mean > mi_mean,
              "mpir mean AUC-ROC not above the mutual-information baseline");
}

// ------------------------------------------------------------------ 6
void criterion_nonlinearity_gap(CheckContext& ctx) {
  BenchmarkRunConfig config;
  config.run.epochs = 8000;
  config.run.warmup_epochs = 400;
  config.run.master_seed = 66;
  const BenchmarkResult result = run_benchmark(
      {Method::kMpir, Method::kLinearGranger}, {10}, 3, config);

  double mpir_mean = 0.0, granger_mean = 0.0;
  std::size_t mpir_count = 0, granger_count = 0;
  for (const auto& cell : result.cells) {
    if (!cell.ok) {
      ctx.require(false, cell.method + " failed: " + cell.message);
      continue;
    }
    if (cell.method == "mpir") {
      mpir_mean += cell.auc_pr;
      ++mpir_count;
    } else {
      granger_mean += cell.auc_pr;
      ++granger_count;
    }
    ctx.note(cell.method + " seed " + std::to_string(cell.seed_index) +
             ": AUC-PR " + std::to_string(cell.auc_pr));
  }
  mpir_mean /= static_cast<double>(mpir_count);
  granger_mean /= static_cast<double>(granger_count);
  ctx.note("mean AUC-PR: mpir " + std::to_string(mpir_mean) +
           ", linear_granger " + std::to_string(granger_mean));
  ctx.require(mpir_mean >= granger_mean + 0.05,
              "mpir does not exceed linear Granger by 5 AUC-PR points");
}

// ------------------------------------------------------------------ 7
void criterion_gaussian_random(CheckContext& ctx) {
  Rng graph_rng(777);
  const GroundTruthGraph graph = sample_graph(5, 3, 1, graph_rng);
  std::vector<std::uint8_t> labels;
  for (std::size_t j = 0; j < 5; ++j) {
    for (std::size_t i = 0; i < 5; ++i) {
      if (i != j) labels.push_back(graph.indicator[j * 5 + i]);
    }
  }
  Rng rng(778);
  const auto matrices = gaussian_random_score(5, 10000, rng);
  double total = 0.0;
  for (const auto& m : matrices) {
    total += auc_roc(m.off_diagonal(), labels);
  }
  const double mean = total / static_cast<double>(matrices.size());
  ctx.note("mean AUC-ROC over 10000 random matrices: " +
           std::to_string(100.0 * mean) + "%");
  ctx.require(std::fabs(mean - 0.50) <= 0.005,
              "random-matrix mean AUC-ROC outside 50.0 +/- 0.5");
}

// ------------------------------------------------------------------ 8
void criterion_linear_chain_oracle(CheckContext& ctx) {
  const double sigma_x = 1.0, omega_x = 2.0, omega_y = 1.0;
  const std::size_t n = 4096;

  // Exactly whitened innovations: empirical means 0, covariance identity,
  // so the empirical risk minimizer coincides with the closed form.
  Rng rng(8001);
  Matrix e(n, 3);
  for (double& v : e.data) v = rng.normal();
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += e.at(i, c);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) e.at(i, c) -= mean;
  }
  // Gram-Schmidt across columns, then rescale to unit sample variance.
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += e.at(i, c) * e.at(i, p);
      dot /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) e.at(i, c) -= dot * e.at(i, p);
    }
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += e.at(i, c) * e.at(i, c);
    var /= static_cast<double>(n);
    const double scale = 1.0 / std::sqrt(var);
    for (std::size_t i = 0; i < n; ++i) e.at(i, c) *= scale;
  }

  WindowedDataset ds;
  ds.n_real = 2;
  ds.K = 1;
  ds.M = 1;
  ds.names = {"driver", "middle"};
  ds.inputs.resize(n, 2);
  Matrix targets(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::sqrt(sigma_x) * e.at(i, 0);
    const double q = p + std::sqrt(omega_x) * e.at(i, 1);
    ds.inputs.at(i, 0) = p;
    ds.inputs.at(i, 1) = q;
    targets.at(i, 0) = q + std::sqrt(omega_y) * e.at(i, 2);
  }
  ds.train_count = n;
  ds.stds = {std::sqrt(sigma_x), std::sqrt(sigma_x + omega_x)};

  const std::vector<std::pair<double, double>> eta_points{
      {0.5, 0.5}, {1.0, 2.0}, {0.2, 1.5}};
  for (const auto& [eta_x, eta_y] : eta_points) {
    const double denom = eta_x * eta_x * eta_y * eta_y +
                         eta_x * eta_x * sigma_x + eta_y * eta_y * sigma_x +
                         eta_x * eta_x * omega_x + omega_x * sigma_x;
    const double a_star = eta_y * eta_y * sigma_x / denom;
    const double b_star =
        (eta_x * eta_x * (sigma_x + omega_x) + sigma_x * omega_x) / denom;

    RunConfig config;
    config.K = 1;
    config.hidden_widths = {};
    config.noise_mode = NoiseMode::kAnalytic;
    config.train_chi = false;
    config.fixed_chi = {eta_x / ds.stds[0], eta_y / ds.stds[1]};
    config.lambda = 0.002;
    config.epochs = 6000;
    config.warmup_epochs = 1;
    config.learning_rate = 0.05;
    config.lr_decay_every = 400;
    config.lr_decay_factor = 0.5;
    config.batch_size = n;
    config.augment = false;

    Rng train_rng(8002);
    const TrainResult trained = train_on_targets(ds, targets, config, train_rng);
    const double a = trained.params.weights[0].at(0, 0);
    const double b = trained.params.weights[0].at(0, 1);
    ctx.note("eta (" + std::to_string(eta_x) + ", " + std::to_string(eta_y) +
             "): fitted (" + std::to_string(a) + ", " + std::to_string(b) +
             ") vs closed form (" + std::to_string(a_star) + ", " +
             std::to_string(b_star) + ")");
    ctx.require(std::fabs(a - a_star) <= 1e-3,
                "coefficient a off the closed form by more than 1e-3");
    ctx.require(std::fabs(b - b_star) <= 1e-3,
                "coefficient b off the closed form by more than 1e-3");
  }
}

// ------------------------------------------------------------------ 9
void criterion_auc_oracles(CheckContext& ctx) {
  Rng rng(9001);
  std::size_t roc_mismatch = 0;
  double worst_pr = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng.below(196);
    std::vector<double> scores(n);
    std::vector<std::uint8_t> labels(n);
    bool has_positive = false, has_negative = false;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = std::floor(rng.uniform(0.0, 12.0)) / 12.0;
      labels[i] = rng.uniform() < 0.35 ? 1 : 0;
      has_positive |= labels[i] != 0;
      has_negative |= labels[i] == 0;
    }
    if (!has_positive) labels[0] = 1;
    if (!has_negative) labels[n - 1] = 0;

    if (auc_roc(scores, labels) !=
        testsupport::brute_force_auc_roc(scores, labels)) {
      ++roc_mismatch;
    }
    worst_pr = std::max(
        worst_pr, std::fabs(auc_pr(scores, labels) -
                            testsupport::brute_force_auc_pr(scores, labels)));
  }
  ctx.note("worst PR deviation from the oracle: " + std::to_string(worst_pr));
  ctx.require(roc_mismatch == 0,
              std::to_string(roc_mismatch) + " ROC instances not exact");
  ctx.require(worst_pr <= 1e-12, "PR deviates from the oracle beyond 1e-12");
}

// ------------------------------------------------------------------ 10
void criterion_affine_invariance(CheckContext& ctx) {
  // Exact half: the channel bound is a function of the relative amplitudes
  // only, so per-series rescaling must leave it bit-identical.
  Rng rng(10001);
  std::vector<double> stds(4 * 3);
  for (double& s : stds) s = rng.uniform(0.2, 4.0);
  NoiseAmplitudes amps = NoiseAmplitudes::create(4, 3, stds, 0.7);
  for (double& v : amps.log_chi) v = rng.uniform(-1.0, 2.0);
  std::vector<double> rescaled = stds;
  for (std::size_t l = 0; l < 3; ++l) rescaled[2 * 3 + l] *= 10.0;
  NoiseAmplitudes scaled = NoiseAmplitudes::create(4, 3, rescaled, 0.7);
  scaled.log_chi = amps.log_chi;
  const BoundValue a = mi_upper_bound(amps);
  const BoundValue b = mi_upper_bound(scaled);
  ctx.require(std::memcmp(a.contributions.data(), b.contributions.data(),
                          4 * sizeof(double)) == 0 &&
                  a.total == b.total,
              "channel bound not bit-identical under rescaling");

  // Empirical half: the invariance covers a series in its input role, so
  // the transformation x -> 10 x + 3 is applied to the series' input
  // windows (rescaling its target column instead rescales the squared
  // error by a^2 and genuinely rebalances it against the information term).
  // Entries where both runs sit below 0.05 nats count as converged nulls.
  const std::size_t seeds = 5;
  auto strengths = [](const WindowedDataset& base, bool rescale_inputs,
                      const RunConfig& config) {
    WindowedDataset ds = base;
    if (rescale_inputs) {
      const std::size_t dims = ds.dims_per_series();
      for (std::size_t e = 0; e < ds.n_examples(); ++e) {
        for (std::size_t l = 0; l < dims; ++l) {
          double& v = ds.inputs.at(e, l);
          v = 10.0 * v + 3.0;
        }
      }
      for (std::size_t l = 0; l < dims; ++l) ds.stds[l] *= 10.0;
    }
    Rng aug(Rng::derive(config.master_seed, seed_tag::kAugment));
    ds = make_fake_series(ds, config.resolved_fake_count(ds.n_real), aug);
    std::vector<double> raw(ds.n_inputs() * ds.n_real, 0.0);
    for (std::size_t i = 0; i < ds.n_real; ++i) {
      Rng rng(Rng::derive(config.master_seed, seed_tag::kTarget + i));
      const TrainResult trained = train_target(ds, i, config, rng);
      const auto column = predictive_strength(trained.amps);
      for (std::size_t j = 0; j < column.size(); ++j) {
        raw[j * ds.n_real + i] = column[j];
      }
    }
    return raw;
  };

  std::vector<double> accumulated;  // per-entry mean relative difference
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    // Both targets predictable so every amplitude converges at this budget.
    Rng data_rng(10100 + seed);
    TimeSeriesBundle bundle;
    bundle.n_series = 2;
    bundle.M = 1;
    bundle.names = {"x1", "x2"};
    TimeSeriesBundle::Segment seg;
    seg.length = 2003;
    seg.values.assign(2 * seg.length, 0.0);
    for (std::size_t t = 0; t < seg.length; ++t) {
      const double prev = t > 0 ? seg.at(0, t - 1, 0, 1)
                                : 0.3 * data_rng.normal();
      seg.at(0, t, 0, 1) = 0.95 * prev + 0.1 * data_rng.normal();
      seg.at(1, t, 0, 1) = prev + 0.1 * data_rng.normal();
    }
    bundle.segments.push_back(std::move(seg));

    RunConfig config;
    config.epochs = 4000;
    config.warmup_epochs = 400;
    config.learning_rate = 3e-3;
    config.master_seed = 10200 + seed;
    const WindowedDataset base =
        windowize(bundle, config.K, config.train_fraction);
    const auto w = strengths(base, false, config);
    const auto w2 = strengths(base, true, config);
    if (accumulated.empty()) accumulated.assign(w.size(), 0.0);
    for (std::size_t idx = 0; idx < w.size(); ++idx) {
      const double hi = std::max(std::fabs(w[idx]), std::fabs(w2[idx]));
      accumulated[idx] += hi < 0.05 ? 0.0 : std::fabs(w[idx] - w2[idx]) / hi;
    }
  }
  double worst = 0.0;
  for (double& v : accumulated) {
    v /= static_cast<double>(seeds);
    worst = std::max(worst, v);
  }
  ctx.note("worst per-entry mean relative change: " + std::to_string(worst));
  ctx.require(worst <= 0.10,
              "raw strengths move more than 10% under a 10x rescale");
}

// ------------------------------------------------------------------ 11
void criterion_lambda_selection(CheckContext& ctx) {
  Rng graph_rng(11001);
  const GroundTruthGraph graph = sample_graph(6, 3, 1, graph_rng);
  const TimeSeriesBundle bundle = generate(graph, 500, 22, nullptr, 11002);

  RunConfig config;
  config.epochs = 3000;  // reduced desk budget
  config.warmup_epochs = 400;
  config.master_seed = 11003;
  const std::vector<double> candidates{0.001, 0.002, 0.01, 0.05};
  const LambdaSelection selection = select_lambda(bundle, candidates, config);

  std::string accepted_list;
  for (const auto& report : selection.reports) {
    ctx.note("lambda " + std::to_string(report.lambda) + ": " +
             (report.accepted ? "accepted" : "rejected") + " (null " +
             std::to_string(report.mean_null) + " +/- " +
             std::to_string(report.sd_null) + ", causal " +
             std::to_string(report.mean_causal) + " +/- " +
             std::to_string(report.sd_causal) + ")");
    if (report.accepted) {
      accepted_list += (accepted_list.empty() ? "" : ", ") +
                       std::to_string(report.lambda);
    }
  }
  ctx.note("accepted set: {" + accepted_list + "}");

  bool seen_rejected = false, prefix = true;
  for (const auto& report : selection.reports) {
    if (!report.accepted) {
      seen_rejected = true;
    } else if (seen_rejected) {
      prefix = false;
    }
  }
  ctx.require(prefix, "accepted set is not a downward-closed prefix");
  ctx.require(selection.chosen.has_value(),
              "no candidate accepted, no lambda returned");
  if (selection.chosen.has_value()) {
    double max_accepted = 0.0;
    for (const auto& report : selection.reports) {
      if (report.accepted) max_accepted = std::max(max_accepted, report.lambda);
    }
    ctx.require(*selection.chosen == max_accepted,
                "returned lambda is not the maximum of the accepted set");
  }
}

// ------------------------------------------------------------------ 12
void criterion_cli_determinism(CheckContext& ctx) {
  const char* cli_env = std::getenv("MINPRED_CLI_PATH");
  if (cli_env == nullptr) {
    ctx.require(false, "MINPRED_CLI_PATH not set");
    return;
  }
  const std::string cli = cli_env;
  const std::string dir = "/tmp/minpred_acceptance";
  std::system(("mkdir -p " + dir).c_str());

  // Small but real discover run on generated copy-pair-style data.
  const TimeSeriesBundle bundle = planted_copy_bundle(2, 403, 12001);
  save_csv(bundle, dir + "/data.csv");

  auto run = [&](const std::string& command) {
    const int rc = std::system((command + " > /dev/null").c_str());
    ctx.require(rc == 0, "command failed: " + command);
  };
  const std::string discover_flags =
      " discover --data " + dir + "/data.csv --epochs 300 --warmup 30"
      " --seed 9 --lr 0.003 --out ";
  run(cli + discover_flags + dir + "/w1.json");
  run(cli + discover_flags + dir + "/w2.json");
  const ResultsDocument w1 = read_document(dir + "/w1.json");
  const ResultsDocument w2 = read_document(dir + "/w2.json");
  ctx.require(w1.body.dump() == w2.body.dump(),
              "discover bodies differ between identical runs");

  const std::string benchmark_flags =
      " benchmark --methods linear_granger,gaussian_random --n-list 3"
      " --seeds 2 --n-series 40 --t 12 --k 2 --epochs 50 --warmup 5"
      " --gaussian-count 200 --seed 13 --out ";
  run(cli + benchmark_flags + dir + "/b1.json");
  run(cli + benchmark_flags + dir + "/b2.json");
  const ResultsDocument b1 = read_document(dir + "/b1.json");
  const ResultsDocument b2 = read_document(dir + "/b2.json");
  ctx.require(b1.body.dump() == b2.body.dump(),
              "benchmark bodies differ between identical runs");
}

struct Criterion {
  int id;
  const char* label;
  const char* budget;
  bool enforce_budget;
  double budget_seconds;
  std::function<void(CheckContext&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "gradient correctness vs central finite differences",
       "stated budget < 1 min", true, 60.0, criterion_gradients},
      {2, "Gaussian-channel exactness against the kNN estimator",
       "stated budget < 1 min", true, 60.0, criterion_channel_exactness},
      {3, "KSG estimator against closed-form Gaussian information",
       "stated budget: none", false, 0.0, criterion_ksg_oracle},
      {4, "independent series zeroed, planted edge kept (10 seeds)",
       "stated budget < 10 min on 4+ cores", false, 0.0,
       criterion_independence_property},
      {5, "benchmark slice: N=5 x 5 seeds, mpir vs mutual information",
       "stated budget <= 15 min on 4+ cores", false, 0.0,
       criterion_benchmark_slice},
      {6, "nonlinearity gap: N=10 x 3 seeds, mpir vs linear Granger",
       "stated budget <= 30 min", false, 0.0, criterion_nonlinearity_gap},
      {7, "Gaussian-random calibration at 50% AUC-ROC",
       "stated budget: none", false, 0.0, criterion_gaussian_random},
      {8, "linear-Gaussian chain: fitted coefficients vs closed forms",
       "stated budget: none", false, 0.0, criterion_linear_chain_oracle},
      {9, "AUC implementations vs brute-force oracles",
       "stated budget: none", false, 0.0, criterion_auc_oracles},
      {10, "affine invariance: exact bound, 10% end-to-end",
       "stated budget: none", false, 0.0, criterion_affine_invariance},
      {11, "lambda selection: prefix-closed accepted set",
       "stated budget: reduced", false, 0.0, criterion_lambda_selection},
      {12, "CLI determinism: byte-identical result bodies",
       "stated budget: none", false, 0.0, criterion_cli_determinism},
  };

  std::vector<int> requested;
  for (int i = 1; i < argc; ++i) requested.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (!requested.empty() &&
        std::find(requested.begin(), requested.end(), criterion.id) ==
            requested.end()) {
      continue;
    }
    CheckContext ctx;
    const double start = now_seconds();
    try {
      criterion.run(ctx);
    } catch (const std::exception& e) {
      ctx.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed = now_seconds() - start;
    if (criterion.enforce_budget && elapsed > criterion.budget_seconds) {
      ctx.require(false, "exceeded the stated runtime budget");
    }
    std::printf("[%s] criterion %d: %s (%.1f s; %s)\n",
                ctx.failed ? "FAIL" : "PASS", criterion.id, criterion.label,
                elapsed, criterion.budget);
    const std::string detail = ctx.detail.str();
    if (!detail.empty()) std::fputs(detail.c_str(), stdout);
    std::fflush(stdout);
    failures += ctx.failed ? 1 : 0;
  }
  return failures == 0 ? 0 : 1;
}

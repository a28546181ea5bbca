#include "minpred/mpir.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "minpred/adam.hpp"
#include "minpred/errors.hpp"
#include "minpred/parallel.hpp"

namespace minpred {

std::size_t RunConfig::resolved_fake_count(std::size_t n) const {
  if (fake_count >= 0) return static_cast<std::size_t>(fake_count);
  return default_fake_count(n);
}

void RunConfig::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("config: lambda must be >= 0");
  if (!(eta0 > 0.0)) throw ConfigError("config: eta0 must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("config: alpha must lie in (0, 1)");
  }
  if (epochs == 0) throw ConfigError("config: epochs must be >= 1");
  if (warmup_epochs >= epochs) {
    throw ConfigError("config: warmup must be smaller than epochs");
  }
  if (batch_size == 0) throw ConfigError("config: batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("config: learning rate <= 0");
  if (K == 0) throw ConfigError("config: K must be >= 1");
  if (noise_mode == NoiseMode::kAnalytic && !hidden_widths.empty()) {
    throw ConfigError(
        "config: analytic noise expectation requires a linear predictor");
  }
}

namespace {

// d(objective)/d(log_chi) contribution of the squared-error path:
// sum over examples and dimensions of input_grad * eps * eta.
void accumulate_chi_grad_sampled(const NoiseAmplitudes& amps,
                                 const Matrix& input_grad, const Matrix& eps,
                                 const std::vector<double>& eta,
                                 std::vector<double>& chi_grad) {
  const std::size_t dims = amps.dims_per_series;
  for (std::size_t e = 0; e < input_grad.rows; ++e) {
    const double* g = input_grad.data.data() + e * input_grad.cols;
    const double* z = eps.data.data() + e * eps.cols;
    for (std::size_t j = 0; j < amps.n_series; ++j) {
      const std::size_t base = j * dims;
      if (amps.shared) {
        double acc = 0.0;
        for (std::size_t l = 0; l < dims; ++l) {
          acc += g[base + l] * z[base + l] * eta[base + l];
        }
        chi_grad[j] += acc;
      } else {
        for (std::size_t l = 0; l < dims; ++l) {
          chi_grad[base + l] += g[base + l] * z[base + l] * eta[base + l];
        }
      }
    }
  }
}

void fill_eta(const NoiseAmplitudes& amps, std::vector<double>& eta) {
  const std::size_t dims = amps.dims_per_series;
  eta.resize(amps.total_dims());
  for (std::size_t j = 0; j < amps.n_series; ++j) {
    for (std::size_t l = 0; l < dims; ++l) {
      eta[j * dims + l] = amps.eta(j, l);
    }
  }
}

struct ParameterOptimizer {
  std::vector<AdamState> weight_states;
  std::vector<AdamState> bias_states;
  AdamState chi_state;

  ParameterOptimizer(const MlpParams& params, std::size_t chi_count,
                     double lr)
      : chi_state(chi_count, lr) {
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
      weight_states.emplace_back(params.weights[l].size(), lr);
      bias_states.emplace_back(params.biases[l].size(), lr);
    }
  }

  void scale_learning_rate(double factor) {
    for (auto& s : weight_states) s.learning_rate *= factor;
    for (auto& s : bias_states) s.learning_rate *= factor;
    chi_state.learning_rate *= factor;
  }
};

}  // namespace

TrainResult train_on_targets(const WindowedDataset& dataset,
                             const Matrix& targets, const RunConfig& config,
                             Rng& rng) {
  config.validate();
  const std::size_t E = dataset.n_examples();
  if (E == 0 || dataset.train_count == 0) {
    throw DataError("train_target: empty dataset");
  }
  if (targets.rows != E) {
    throw ShapeError("train_target: target row count mismatch");
  }
  const std::size_t D = dataset.input_dim();
  const std::size_t out_dim = targets.cols;
  const std::size_t n_inputs = dataset.n_inputs();
  const std::size_t dims = dataset.dims_per_series();

  NoiseAmplitudes amps = NoiseAmplitudes::create(
      n_inputs, dims, dataset.stds, config.eta0, !config.full_chi);
  amps.chi_floor = config.chi_floor;
  if (!config.train_chi && !config.fixed_chi.empty()) {
    if (config.fixed_chi.size() != n_inputs) {
      throw ConfigError("config: fixed_chi size must equal input series count");
    }
    for (std::size_t j = 0; j < n_inputs; ++j) {
      const double value = std::log(config.fixed_chi[j]);
      if (amps.shared) {
        amps.log_chi[j] = value;
      } else {
        for (std::size_t l = 0; l < dims; ++l) {
          amps.log_chi[j * dims + l] = value;
        }
      }
    }
  }
  amps.clamp();

  std::vector<std::size_t> widths;
  widths.push_back(D);
  for (std::size_t w : config.hidden_widths) widths.push_back(w);
  widths.push_back(out_dim);
  MlpParams params = make_mlp(widths, rng);

  ParameterOptimizer opt(params, amps.chi_count(), config.learning_rate);

  const std::size_t train = dataset.train_count;
  const std::size_t batch = std::min(config.batch_size, train);
  const bool sampled = config.noise_mode == NoiseMode::kSampled;
  const bool analytic = config.noise_mode == NoiseMode::kAnalytic;
  const bool channel_off = config.noise_mode == NoiseMode::kNone;
  const bool chi_trainable = config.train_chi && !channel_off;

  std::vector<std::size_t> order(train);
  std::iota(order.begin(), order.end(), 0);

  Matrix xb(batch, D), yb(batch, out_dim), eps(batch, D), xtilde(batch, D);
  Matrix upstream(batch, out_dim), input_grad(batch, D);
  MlpWorkspace ws;
  MlpGrads grads;
  grads.match(params);
  std::vector<double> eta;
  std::vector<double> chi_grad(amps.chi_count(), 0.0);
  std::vector<double> mi_grad;

  TrainResult result{std::move(params), amps, {}, false};
  result.loss_trace.reserve(config.epochs);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.lr_decay_every > 0 && epoch > 0 &&
        epoch % config.lr_decay_every == 0) {
      opt.scale_learning_rate(config.lr_decay_factor);
    }
    rng.shuffle(order);
    const bool mi_active = epoch >= config.warmup_epochs;
    double epoch_loss = 0.0;
    std::size_t batches = 0;

    for (std::size_t start = 0; start < train; start += batch) {
      const std::size_t b = std::min(batch, train - start);
      if (xb.rows != b) {
        xb.resize(b, D);
        yb.resize(b, out_dim);
        eps.resize(b, D);
        xtilde.resize(b, D);
        upstream.resize(b, out_dim);
      }
      for (std::size_t r = 0; r < b; ++r) {
        const std::size_t src = order[start + r];
        const double* in = dataset.inputs.data.data() + src * D;
        std::copy(in, in + D, xb.data.data() + r * D);
        const double* ty = targets.data.data() + src * out_dim;
        std::copy(ty, ty + out_dim, yb.data.data() + r * out_dim);
      }

      fill_eta(result.amps, eta);
      const Matrix* model_input = &xb;
      if (sampled) {
        for (double& z : eps.data) z = rng.normal();
        for (std::size_t r = 0; r < b; ++r) {
          const double* x = xb.data.data() + r * D;
          const double* z = eps.data.data() + r * D;
          double* xt = xtilde.data.data() + r * D;
          for (std::size_t l = 0; l < D; ++l) xt[l] = x[l] + eta[l] * z[l];
        }
        model_input = &xtilde;
      }

      const Matrix& pred = mlp_forward_batch(result.params, *model_input, ws);
      double mse = 0.0;
      const double inv_b = 1.0 / static_cast<double>(b);
      for (std::size_t idx = 0; idx < pred.data.size(); ++idx) {
        const double r = pred.data[idx] - yb.data[idx];
        upstream.data[idx] = 2.0 * r * inv_b;
        mse += r * r;
      }
      mse *= inv_b;

      mlp_backward_batch(result.params, *model_input, upstream, ws, grads,
                         chi_trainable && sampled ? &input_grad : nullptr);

      std::fill(chi_grad.begin(), chi_grad.end(), 0.0);
      double loss = mse;

      if (analytic) {
        // Exact eps-expectation for the linear map y = W x + b:
        // E ||y - W(x + eta.eps) - b||^2 = ||y - Wx - b||^2 + sum W^2 eta^2.
        Matrix& w0 = result.params.weights[0];
        Matrix& gw0 = grads.weights[0];
        double penalty = 0.0;
        for (std::size_t m = 0; m < w0.rows; ++m) {
          double* wr = w0.data.data() + m * w0.cols;
          double* gr = gw0.data.data() + m * gw0.cols;
          for (std::size_t l = 0; l < D; ++l) {
            const double we = wr[l];
            penalty += we * we * eta[l] * eta[l];
            gr[l] += 2.0 * we * eta[l] * eta[l];
            if (chi_trainable) {
              const std::size_t j = l / dims;
              const double g = 2.0 * we * we * eta[l] * eta[l];
              if (result.amps.shared) {
                chi_grad[j] += g;
              } else {
                chi_grad[l] += g;
              }
            }
          }
        }
        loss += penalty;
      } else if (sampled && chi_trainable) {
        accumulate_chi_grad_sampled(result.amps, input_grad, eps, eta,
                                    chi_grad);
      }

      if (mi_active && config.lambda > 0.0 && !channel_off) {
        const BoundValue bound = mi_upper_bound(result.amps);
        loss += config.lambda * bound.total;
        if (chi_trainable) {
          mi_grad = mi_upper_bound_grad(result.amps);
          for (std::size_t idx = 0; idx < chi_grad.size(); ++idx) {
            chi_grad[idx] += config.lambda * mi_grad[idx];
          }
        }
      }

      if (!std::isfinite(loss)) {
        throw NumericalError("train_target: non-finite loss at epoch " +
                             std::to_string(epoch));
      }

      for (std::size_t l = 0; l < result.params.weights.size(); ++l) {
        adam_step(opt.weight_states[l], result.params.weights[l].data,
                  grads.weights[l].data);
        adam_step(opt.bias_states[l], result.params.biases[l],
                  grads.biases[l]);
      }
      if (chi_trainable) {
        adam_step(opt.chi_state, result.amps.log_chi, chi_grad);
        result.amps.clamp();
      }

      epoch_loss += loss;
      ++batches;
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(batches));
  }

  for (std::size_t j = 0; j < n_inputs; ++j) {
    if (result.amps.at_floor(j)) result.chi_floor_hit = true;
  }
  return result;
}

TrainResult train_target(const WindowedDataset& dataset, std::size_t target,
                         const RunConfig& config, Rng& rng) {
  if (target >= dataset.n_real) {
    throw ShapeError("train_target: target index out of range");
  }
  const std::size_t E = dataset.n_examples();
  Matrix targets(E, dataset.M);
  for (std::size_t e = 0; e < E; ++e) {
    const double* row =
        dataset.targets.data.data() + e * dataset.targets.cols +
        target * dataset.M;
    std::copy(row, row + dataset.M, targets.data.data() + e * dataset.M);
  }
  return train_on_targets(dataset, targets, config, rng);
}

ObjectiveEval evaluate_objective(const MlpParams& params,
                                 const NoiseAmplitudes& amps,
                                 std::span<const double> x,
                                 std::span<const double> y,
                                 std::span<const double> eps, double lambda,
                                 bool information_active) {
  const std::size_t D = amps.total_dims();
  if (x.size() != D || eps.size() != D || params.input_dim() != D) {
    throw ShapeError("evaluate_objective: window size mismatch");
  }
  if (y.size() != params.output_dim()) {
    throw ShapeError("evaluate_objective: target size mismatch");
  }

  Matrix xtilde(1, D);
  corrupt_with_eps(x, amps, eps, xtilde.row(0));

  MlpWorkspace ws;
  const Matrix& pred = mlp_forward_batch(params, xtilde, ws);
  Matrix upstream(1, y.size());
  ObjectiveEval eval;
  for (std::size_t m = 0; m < y.size(); ++m) {
    const double r = pred.data[m] - y[m];
    upstream.data[m] = 2.0 * r;
    eval.value += r * r;
  }

  Matrix input_grad(1, D);
  mlp_backward_batch(params, xtilde, upstream, ws, eval.param_grads,
                     &input_grad);

  Matrix eps_matrix(1, D);
  std::copy(eps.begin(), eps.end(), eps_matrix.data.begin());
  std::vector<double> eta;
  fill_eta(amps, eta);
  eval.log_chi_grad.assign(amps.chi_count(), 0.0);
  accumulate_chi_grad_sampled(amps, input_grad, eps_matrix, eta,
                              eval.log_chi_grad);

  if (information_active && lambda > 0.0) {
    const BoundValue bound = mi_upper_bound(amps);
    eval.value += lambda * bound.total;
    const std::vector<double> mi_grad = mi_upper_bound_grad(amps);
    for (std::size_t idx = 0; idx < eval.log_chi_grad.size(); ++idx) {
      eval.log_chi_grad[idx] += lambda * mi_grad[idx];
    }
  }
  return eval;
}

std::vector<double> predictive_strength(const NoiseAmplitudes& amps) {
  return mi_upper_bound(amps).contributions;
}

std::vector<double> StrengthMatrix::main_off_diagonal() const {
  std::vector<double> values;
  values.reserve(n_real * (n_real - 1));
  for (std::size_t j = 0; j < n_real; ++j) {
    for (std::size_t i = 0; i < n_real; ++i) {
      if (i == j) continue;
      values.push_back(raw_at(j, i));
    }
  }
  return values;
}

StrengthMatrix infer_matrix(const TimeSeriesBundle& bundle,
                            const RunConfig& config) {
  config.validate();
  WindowedDataset ds = windowize(bundle, config.K, config.train_fraction);
  const std::size_t N = ds.n_real;
  if (config.augment) {
    Rng aug_rng(Rng::derive(config.master_seed, seed_tag::kAugment));
    ds = make_fake_series(ds, config.resolved_fake_count(N), aug_rng);
  }
  const std::size_t rows = ds.n_inputs();

  StrengthMatrix matrix;
  matrix.n_real = N;
  matrix.n_fake = ds.n_fake;
  matrix.names = ds.names;
  matrix.raw.assign(rows * N, 0.0);
  matrix.capped.assign(rows * N, 0);

  parallel_for(N, config.threads, [&](std::size_t i) {
    Rng rng(Rng::derive(config.master_seed, seed_tag::kTarget + i));
    const TrainResult trained = train_target(ds, i, config, rng);
    const std::vector<double> column = predictive_strength(trained.amps);
    for (std::size_t j = 0; j < rows; ++j) {
      matrix.raw[j * N + i] = column[j];
      matrix.capped[j * N + i] = trained.amps.at_floor(j) ? 1 : 0;
    }
  });
  return matrix;
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DataError("empirical_quantile: no values");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw ConfigError("empirical_quantile: q out of [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

StrengthMatrix significance_threshold(StrengthMatrix matrix, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("significance_threshold: alpha out of (0, 1)");
  }
  if (matrix.n_fake == 0) {
    throw DataError(
        "significance_threshold: no fake series, null distribution empty");
  }
  std::vector<double> pool;
  pool.reserve(matrix.n_fake * matrix.n_real);
  for (std::size_t s = 0; s < matrix.n_fake; ++s) {
    const std::size_t j = matrix.n_real + s;
    for (std::size_t i = 0; i < matrix.n_real; ++i) {
      pool.push_back(matrix.raw_at(j, i));
    }
  }
  const double threshold = empirical_quantile(std::move(pool), 1.0 - alpha);
  matrix.threshold = threshold;
  matrix.thresholded.assign(matrix.n_real * matrix.n_real, 0.0);
  for (std::size_t j = 0; j < matrix.n_real; ++j) {
    for (std::size_t i = 0; i < matrix.n_real; ++i) {
      const double value = matrix.raw_at(j, i);
      // Strictly-greater survives; ties go to the null.
      matrix.thresholded[j * matrix.n_real + i] =
          value > threshold ? value : 0.0;
    }
  }
  return matrix;
}

LambdaSelection select_lambda(const TimeSeriesBundle& bundle,
                              const std::vector<double>& candidates,
                              const RunConfig& config) {
  config.validate();
  if (candidates.empty()) {
    throw ConfigError("select_lambda: no candidates");
  }
  if (!std::is_sorted(candidates.begin(), candidates.end())) {
    throw ConfigError("select_lambda: candidates must be sorted ascending");
  }
  if (bundle.n_series < 2) {
    throw ConfigError("select_lambda: need N >= 2");
  }

  WindowedDataset base = windowize(bundle, config.K, config.train_fraction);
  const std::size_t N = base.n_real;
  const std::size_t extra = (N + 1) / 2;

  Rng perm_rng(Rng::derive(config.master_seed, seed_tag::kLambda));
  WindowedDataset ds = make_fake_series(base, extra, perm_rng);

  // Constructed targets w_i = Q . X^(i), Q a fixed random window-shaped map,
  // so series i is a known parent of w_i and every permuted series is a
  // known non-parent.
  Rng q_rng(Rng::derive(config.master_seed, seed_tag::kLambda + 1));
  std::vector<double> q(ds.dims_per_series());
  for (double& v : q) v = q_rng.uniform(-1.0, 1.0);

  const std::size_t E = ds.n_examples();
  std::vector<Matrix> constructed(extra);
  for (std::size_t i = 0; i < extra; ++i) {
    constructed[i].resize(E, 1);
    const std::size_t off = ds.series_offset(i);
    for (std::size_t e = 0; e < E; ++e) {
      const double* in = ds.inputs.data.data() + e * ds.inputs.cols + off;
      double acc = 0.0;
      for (std::size_t l = 0; l < q.size(); ++l) acc += q[l] * in[l];
      constructed[i].data[e] = acc;
    }
  }

  LambdaSelection selection;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    RunConfig per = config;
    per.lambda = candidates[c];
    per.augment = false;

    std::vector<std::vector<double>> strengths(extra);
    parallel_for(extra, config.threads, [&](std::size_t i) {
      // Seeds do not depend on the candidate, so initial conditions match
      // across candidates and only lambda differs.
      Rng rng(Rng::derive(config.master_seed, seed_tag::kLambda + 100 + i));
      const TrainResult trained = train_on_targets(ds, constructed[i], per, rng);
      strengths[i] = predictive_strength(trained.amps);
    });

    std::vector<double> null_values;
    std::vector<double> causal_values;
    for (std::size_t i = 0; i < extra; ++i) {
      causal_values.push_back(strengths[i][i]);
      for (std::size_t s = 0; s < extra; ++s) {
        null_values.push_back(strengths[i][N + s]);
      }
    }

    auto moments = [](const std::vector<double>& values) {
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(values.size());
      return std::pair<double, double>(mean, std::sqrt(var));
    };
    const auto [mean_null, sd_null] = moments(null_values);
    const auto [mean_causal, sd_causal] = moments(causal_values);

    LambdaCandidateReport report;
    report.lambda = candidates[c];
    report.mean_null = mean_null;
    report.sd_null = sd_null;
    report.mean_causal = mean_causal;
    report.sd_causal = sd_causal;
    report.accepted = mean_null + 4.0 * sd_null < mean_causal - 4.0 * sd_causal;
    selection.reports.push_back(report);
  }

  for (const auto& report : selection.reports) {
    if (report.accepted) {
      if (!selection.chosen || report.lambda > *selection.chosen) {
        selection.chosen = report.lambda;
      }
    }
  }
  selection.message =
      selection.chosen
          ? "selected lambda " + std::to_string(*selection.chosen)
          : "no valid lambda: every candidate failed the 4-sigma separation";
  return selection;
}

}  // namespace minpred

#include "minpred/mlp.hpp"

#include <cmath>
#include <string>

#include "minpred/errors.hpp"

namespace minpred {

namespace {

inline double leaky(double z) { return z > 0.0 ? z : kLeakySlope * z; }
inline double leaky_grad(double z) { return z > 0.0 ? 1.0 : kLeakySlope; }

void check_widths(const std::vector<std::size_t>& widths) {
  if (widths.size() < 2) {
    throw ShapeError("mlp: need at least input and output widths");
  }
  for (std::size_t w : widths) {
    if (w == 0) throw ShapeError("mlp: zero layer width");
  }
}

}  // namespace

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += weights[l].size() + biases[l].size();
  }
  return n;
}

MlpParams make_mlp(const std::vector<std::size_t>& widths, Rng& rng) {
  check_widths(widths);
  MlpParams params;
  params.widths = widths;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t fan_in = widths[l];
    const std::size_t fan_out = widths[l + 1];
    Matrix w(fan_out, fan_in);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w.data) v = rng.uniform(-limit, limit);
    params.weights.push_back(std::move(w));
    params.biases.emplace_back(fan_out, 0.0);
  }
  return params;
}

std::vector<double> mlp_forward(const MlpParams& params,
                                std::span<const double> input) {
  if (input.size() != params.input_dim()) {
    throw ShapeError("mlp_forward: input length " +
                     std::to_string(input.size()) + " != declared input_dim " +
                     std::to_string(params.input_dim()));
  }
  std::vector<double> current(input.begin(), input.end());
  std::vector<double> next;
  const std::size_t layers = params.layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    const Matrix& w = params.weights[l];
    const auto& b = params.biases[l];
    next.assign(w.rows, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
      double acc = b[r];
      const double* row = w.data.data() + r * w.cols;
      for (std::size_t c = 0; c < w.cols; ++c) acc += row[c] * current[c];
      next[r] = (l + 1 < layers) ? leaky(acc) : acc;
    }
    current.swap(next);
  }
  return current;
}

void MlpGrads::match(const MlpParams& params) {
  weights.resize(params.weights.size());
  biases.resize(params.biases.size());
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    if (weights[l].rows != params.weights[l].rows ||
        weights[l].cols != params.weights[l].cols) {
      weights[l].resize(params.weights[l].rows, params.weights[l].cols);
    }
    biases[l].assign(params.biases[l].size(), 0.0);
  }
}

void MlpGrads::clear() {
  for (auto& w : weights) w.fill(0.0);
  for (auto& b : biases) b.assign(b.size(), 0.0);
}

const Matrix& mlp_forward_batch(const MlpParams& params, const Matrix& inputs,
                                MlpWorkspace& ws) {
  if (inputs.cols != params.input_dim()) {
    throw ShapeError("mlp_forward_batch: input width mismatch");
  }
  const std::size_t layers = params.layer_count();
  ws.pre.resize(layers);
  ws.post.resize(layers);
  ws.delta.resize(layers);
  const Matrix* current = &inputs;
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix& z = ws.pre[l];
    gemm_nt(*current, params.weights[l], z);
    const auto& b = params.biases[l];
    for (std::size_t r = 0; r < z.rows; ++r) {
      double* zr = z.data.data() + r * z.cols;
      for (std::size_t c = 0; c < z.cols; ++c) zr[c] += b[c];
    }
    Matrix& a = ws.post[l];
    if (l + 1 < layers) {
      if (a.rows != z.rows || a.cols != z.cols) a.resize(z.rows, z.cols);
      for (std::size_t idx = 0; idx < z.data.size(); ++idx) {
        a.data[idx] = leaky(z.data[idx]);
      }
    } else {
      a = z;  // identity output
    }
    current = &a;
  }
  return ws.post.back();
}

void mlp_backward_batch(const MlpParams& params, const Matrix& inputs,
                        const Matrix& upstream, MlpWorkspace& ws,
                        MlpGrads& grads, Matrix* input_grad) {
  const std::size_t layers = params.layer_count();
  if (ws.post.size() != layers) {
    throw ShapeError("mlp_backward_batch: run forward first");
  }
  if (upstream.rows != inputs.rows || upstream.cols != params.output_dim()) {
    throw ShapeError("mlp_backward_batch: upstream shape mismatch");
  }
  grads.match(params);

  // delta[l] holds dL/d(pre-activation of layer l).
  ws.delta[layers - 1] = upstream;
  for (std::size_t l = layers; l-- > 0;) {
    Matrix& delta = ws.delta[l];
    if (l + 1 < layers) {
      // delta = (delta_{l+1} * W_{l+1}) .* leaky'(pre_l)
      gemm_nn(ws.delta[l + 1], params.weights[l + 1], delta);
      const Matrix& z = ws.pre[l];
      for (std::size_t idx = 0; idx < delta.data.size(); ++idx) {
        delta.data[idx] *= leaky_grad(z.data[idx]);
      }
    }
    const Matrix& below = (l == 0) ? inputs : ws.post[l - 1];
    gemm_tn(delta, below, grads.weights[l]);
    auto& db = grads.biases[l];
    for (std::size_t r = 0; r < delta.rows; ++r) {
      const double* dr = delta.data.data() + r * delta.cols;
      for (std::size_t c = 0; c < delta.cols; ++c) db[c] += dr[c];
    }
  }
  if (input_grad != nullptr) {
    gemm_nn(ws.delta[0], params.weights[0], *input_grad);
  }
}

MlpBackwardResult mlp_backward(const MlpParams& params,
                               std::span<const double> input,
                               std::span<const double> upstream_grad) {
  if (input.size() != params.input_dim()) {
    throw ShapeError("mlp_backward: input length mismatch");
  }
  if (upstream_grad.size() != params.output_dim()) {
    throw ShapeError("mlp_backward: upstream length mismatch");
  }
  Matrix x(1, input.size());
  std::copy(input.begin(), input.end(), x.data.begin());
  Matrix up(1, upstream_grad.size());
  std::copy(upstream_grad.begin(), upstream_grad.end(), up.data.begin());

  MlpWorkspace ws;
  mlp_forward_batch(params, x, ws);
  MlpBackwardResult result;
  Matrix input_grad;
  mlp_backward_batch(params, x, up, ws, result.grads, &input_grad);
  result.input_grad.assign(input_grad.data.begin(), input_grad.data.end());
  return result;
}

}  // namespace minpred

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "minpred/matrix.hpp"
#include "minpred/rng.hpp"

namespace minpred {

// Fully connected predictor with leaky-rectifier hidden units (slope 0.3,
// fixed) and a linear output layer. The architecture is a short fixed chain,
// so the backward pass is written out by hand rather than through a general
// autodiff tape.
struct MlpParams {
  // weights[l] has shape widths[l+1] x widths[l]; biases[l] has widths[l+1].
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  std::vector<std::size_t> widths;  // [input_dim, hidden..., output_dim]

  std::size_t input_dim() const { return widths.front(); }
  std::size_t output_dim() const { return widths.back(); }
  std::size_t layer_count() const { return weights.size(); }
  std::size_t parameter_count() const;
};

inline constexpr double kLeakySlope = 0.3;

// Glorot-uniform weights, zero biases.
MlpParams make_mlp(const std::vector<std::size_t>& widths, Rng& rng);

std::vector<double> mlp_forward(const MlpParams& params,
                                std::span<const double> input);

// Gradients shaped like the parameters they belong to.
struct MlpGrads {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  void match(const MlpParams& params);
  void clear();
};

// Gradient of <upstream, output> w.r.t. every parameter and w.r.t. the input
// (the input gradient feeds the noise-amplitude path upstream of the model).
struct MlpBackwardResult {
  MlpGrads grads;
  std::vector<double> input_grad;
};
MlpBackwardResult mlp_backward(const MlpParams& params,
                               std::span<const double> input,
                               std::span<const double> upstream_grad);

// Batched evaluation used by the trainer: preallocated per-layer activations
// so the inner loop never allocates.
struct MlpWorkspace {
  std::vector<Matrix> pre;    // pre-activations per layer, batch x widths[l+1]
  std::vector<Matrix> post;   // activations per layer
  std::vector<Matrix> delta;  // backward buffers
};

// Returns the output activations (batch x output_dim) owned by `ws`.
const Matrix& mlp_forward_batch(const MlpParams& params, const Matrix& inputs,
                                MlpWorkspace& ws);

// Backward over a batch previously run through mlp_forward_batch with the
// same workspace. Accumulates nothing: `grads` is overwritten. If
// `input_grad` is non-null it receives d<upstream, output>/d(inputs).
void mlp_backward_batch(const MlpParams& params, const Matrix& inputs,
                        const Matrix& upstream, MlpWorkspace& ws,
                        MlpGrads& grads, Matrix* input_grad);

}  // namespace minpred

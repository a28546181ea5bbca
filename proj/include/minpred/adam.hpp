#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace minpred {

// Adam with bias correction. The update is element-wise, so a model may keep
// one state per parameter block; the result is identical to a single
// concatenated state.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  explicit AdamState(std::size_t size, double lr = 1e-4)
      : m(size, 0.0), v(size, 0.0), learning_rate(lr) {}
};

// In-place update of `params` given `grads`. Throws NumericalError naming the
// offending index when a gradient is non-finite.
void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads);

}  // namespace minpred

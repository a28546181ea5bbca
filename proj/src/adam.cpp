#include "minpred/adam.hpp"

#include <cmath>
#include <string>

#include "minpred/errors.hpp"

namespace minpred {

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ShapeError("adam_step: parameter/gradient/state sizes differ");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericalError("adam_step: non-finite gradient at index " +
                           std::to_string(i));
    }
  }
  state.t += 1;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    params[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

}  // namespace minpred

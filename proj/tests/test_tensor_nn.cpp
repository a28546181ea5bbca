#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "minpred/adam.hpp"
#include "minpred/errors.hpp"
#include "minpred/mlp.hpp"
#include "support.hpp"

using namespace minpred;

namespace {

MlpParams random_mlp(const std::vector<std::size_t>& widths, Rng& rng) {
  MlpParams params = make_mlp(widths, rng);
  // Nonzero biases so gradient paths through them are exercised.
  for (auto& b : params.biases) {
    for (double& v : b) v = rng.uniform(-0.5, 0.5);
  }
  return params;
}

std::vector<double> random_vector(std::size_t n, Rng& rng, double lo = -2.0,
                                  double hi = 2.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("forward: zero weights propagate the last-layer bias") {
  Rng rng(11);
  MlpParams params = make_mlp({4, 8, 8, 2}, rng);
  for (auto& w : params.weights) w.fill(0.0);
  for (auto& b : params.biases) b.assign(b.size(), 0.25);
  const auto out = mlp_forward(params, std::vector<double>{1.0, -1.0, 2.0, 0.5});
  REQUIRE(out.size() == 2);
  // Hidden bias 0.25 > 0 passes the rectifier unchanged but weights are
  // zero, so only the output bias reaches the output.
  CHECK(out[0] == doctest::Approx(0.25));
  CHECK(out[1] == doctest::Approx(0.25));
}

TEST_CASE("forward: negative pre-activation is scaled by 0.3") {
  Rng rng(12);
  MlpParams params = make_mlp({1, 1, 1}, rng);
  params.weights[0].at(0, 0) = 1.0;
  params.biases[0][0] = 0.0;
  params.weights[1].at(0, 0) = 1.0;
  params.biases[1][0] = 0.0;
  const auto out = mlp_forward(params, std::vector<double>{-1.0});
  CHECK(out[0] == doctest::Approx(-0.3));
  const auto positive = mlp_forward(params, std::vector<double>{2.0});
  CHECK(positive[0] == doctest::Approx(2.0));
}

TEST_CASE("forward matches an independent straight-line evaluation") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    MlpParams params = random_mlp({5, 8, 8, 3}, rng);
    const auto input = random_vector(5, rng);
    const auto ours = mlp_forward(params, input);
    const auto naive = testsupport::naive_mlp_eval(params, input);
    REQUIRE(ours.size() == naive.size());
    for (std::size_t i = 0; i < ours.size(); ++i) {
      CHECK(ours[i] == doctest::Approx(naive[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("forward is pure: identical calls, identical bits") {
  Rng rng(14);
  MlpParams params = random_mlp({6, 8, 8, 1}, rng);
  const auto input = random_vector(6, rng);
  const auto a = mlp_forward(params, input);
  const auto b = mlp_forward(params, input);
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

TEST_CASE("forward rejects mismatched input length") {
  Rng rng(15);
  MlpParams params = make_mlp({4, 8, 1}, rng);
  CHECK_THROWS_AS(mlp_forward(params, std::vector<double>{1.0, 2.0}),
                  ShapeError);
}

TEST_CASE("backward: zero upstream gives zero gradients") {
  Rng rng(16);
  MlpParams params = random_mlp({3, 8, 8, 2}, rng);
  const auto input = random_vector(3, rng);
  const auto result =
      mlp_backward(params, input, std::vector<double>{0.0, 0.0});
  for (const auto& w : result.grads.weights) {
    for (double g : w.data) CHECK(g == 0.0);
  }
  for (double g : result.input_grad) CHECK(g == 0.0);
}

TEST_CASE("backward: single linear layer weight gradient is outer(upstream, x)") {
  Rng rng(17);
  MlpParams params = make_mlp({3, 2}, rng);
  const std::vector<double> input{1.5, -2.0, 0.5};
  const std::vector<double> upstream{2.0, -1.0};
  const auto result = mlp_backward(params, input, upstream);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(result.grads.weights[0].at(r, c) ==
            doctest::Approx(upstream[r] * input[c]));
    }
    CHECK(result.grads.biases[0][r] == doctest::Approx(upstream[r]));
  }
  // Input gradient of <u, Wx + b> is W^T u.
  for (std::size_t c = 0; c < 3; ++c) {
    double expected = 0.0;
    for (std::size_t r = 0; r < 2; ++r) {
      expected += params.weights[0].at(r, c) * upstream[r];
    }
    CHECK(result.input_grad[c] == doctest::Approx(expected));
  }
}

TEST_CASE("backward gradients agree with central finite differences") {
  Rng rng(18);
  std::size_t checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    MlpParams params = random_mlp({4, 8, 8, 2}, rng);
    const auto input = random_vector(4, rng);
    const auto upstream = random_vector(2, rng, -1.0, 1.0);
    const auto result = mlp_backward(params, input, upstream);

    auto objective = [&](const MlpParams& p, const std::vector<double>& x) {
      const auto out = mlp_forward(p, x);
      double acc = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) acc += upstream[i] * out[i];
      return acc;
    };

    // Weight, bias and input gradients, all against the same objective.
    for (std::size_t layer = 0; layer < params.weights.size(); ++layer) {
      auto& w = params.weights[layer];
      for (std::size_t idx = 0; idx < w.data.size(); idx += 7) {
        const double numeric = testsupport::central_difference(
            [&](double v) {
              MlpParams p = params;
              p.weights[layer].data[idx] = v;
              return objective(p, input);
            },
            w.data[idx]);
        CHECK(testsupport::gradient_close(result.grads.weights[layer].data[idx],
                                          numeric, 1e-5));
        ++checked;
      }
    }
    for (std::size_t c = 0; c < input.size(); ++c) {
      const double numeric = testsupport::central_difference(
          [&](double v) {
            std::vector<double> x = input;
            x[c] = v;
            return objective(params, x);
          },
          input[c]);
      CHECK(testsupport::gradient_close(result.input_grad[c], numeric, 1e-5));
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("adam: zero gradient with fresh state leaves parameters unchanged") {
  AdamState state(3, 1e-2);
  std::vector<double> params{1.0, -2.0, 0.5};
  const std::vector<double> before = params;
  const std::vector<double> grads{0.0, 0.0, 0.0};
  adam_step(state, params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    CHECK(params[i] == before[i]);
  }
  CHECK(state.t == 1);
}

TEST_CASE("adam: first update magnitude is about the learning rate") {
  for (double g : {3.0, -0.04, 117.0}) {
    AdamState state(1, 1e-3);
    std::vector<double> params{0.0};
    adam_step(state, params, std::vector<double>{g});
    // Bias-corrected m/sqrt(v) is sign(g) at t=1 up to epsilon.
    CHECK(std::fabs(std::fabs(params[0]) - 1e-3) < 1e-5);
    CHECK(std::signbit(params[0]) == !std::signbit(g));
  }
}

TEST_CASE("adam matches a reference implementation over many steps") {
  Rng rng(19);
  AdamState state(5, 3e-3);
  testsupport::ReferenceAdam reference(5, 3e-3);
  std::vector<double> ours(5, 1.0), theirs(5, 1.0);
  for (int step = 0; step < 200; ++step) {
    std::vector<double> grads(5);
    for (double& g : grads) g = rng.normal();
    adam_step(state, ours, grads);
    reference.step(theirs, grads);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(ours[i] == doctest::Approx(theirs[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("adam: quadratic convergence") {
  AdamState state(1, 1e-2);
  std::vector<double> x{1.0};
  for (int step = 0; step < 5000; ++step) {
    adam_step(state, x, std::vector<double>{x[0]});
  }
  CHECK(std::fabs(x[0]) < 1e-3);
}

TEST_CASE("adam is invariant under concatenation order") {
  Rng rng(20);
  std::vector<double> params(6), grads(6);
  for (auto& v : params) v = rng.uniform(-1, 1);
  for (auto& v : grads) v = rng.normal();

  std::vector<double> joint = params;
  AdamState joint_state(6, 1e-2);
  adam_step(joint_state, joint, grads);
  adam_step(joint_state, joint, grads);

  std::vector<double> a(params.begin(), params.begin() + 2);
  std::vector<double> b(params.begin() + 2, params.end());
  std::vector<double> ga(grads.begin(), grads.begin() + 2);
  std::vector<double> gb(grads.begin() + 2, grads.end());
  AdamState sa(2, 1e-2), sb(4, 1e-2);
  adam_step(sa, a, ga);
  adam_step(sb, b, gb);
  adam_step(sa, a, ga);
  adam_step(sb, b, gb);

  for (std::size_t i = 0; i < 2; ++i) CHECK(joint[i] == a[i]);
  for (std::size_t i = 0; i < 4; ++i) CHECK(joint[i + 2] == b[i]);
}

TEST_CASE("adam rejects non-finite gradients naming the index") {
  AdamState state(3, 1e-3);
  std::vector<double> params{0.0, 0.0, 0.0};
  const std::vector<double> grads{0.0, std::nan(""), 0.0};
  CHECK_THROWS_WITH_AS(adam_step(state, params, grads),
                       doctest::Contains("index 1"), NumericalError);
}

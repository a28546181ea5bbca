#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "minpred/errors.hpp"
#include "minpred/noise.hpp"
#include "support.hpp"

using namespace minpred;

namespace {

NoiseAmplitudes make_amps(std::size_t n_series, std::size_t dims,
                          double chi_init, std::vector<double> stds = {}) {
  if (stds.empty()) stds.assign(n_series * dims, 1.0);
  return NoiseAmplitudes::create(n_series, dims, stds, chi_init);
}

}  // namespace

TEST_CASE("corrupt: clamped chi floor leaves the input essentially unchanged") {
  NoiseAmplitudes amps = make_amps(2, 3, 0.5);
  amps.log_chi.assign(2, -1e9);
  amps.clamp();
  std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  Rng rng(1);
  const auto result = corrupt(x, amps, rng);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(result.corrupted[i] == doctest::Approx(x[i]).epsilon(1e-4));
  }
}

TEST_CASE("corrupt: forced zero eps reproduces the input exactly") {
  NoiseAmplitudes amps = make_amps(2, 2, 3.7);
  const std::vector<double> x{0.5, -1.5, 2.5, 9.0};
  const std::vector<double> eps(4, 0.0);
  std::vector<double> out(4);
  corrupt_with_eps(x, amps, eps, out);
  CHECK(std::memcmp(out.data(), x.data(), 4 * sizeof(double)) == 0);
}

TEST_CASE("corrupt: unit chi, unit std, unit eps adds one everywhere") {
  NoiseAmplitudes amps = make_amps(1, 4, 1.0);
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> eps(4, 1.0);
  std::vector<double> out(4);
  corrupt_with_eps(x, amps, eps, out);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(out[i] == doctest::Approx(x[i] + 1.0));
  }
}

TEST_CASE("corrupt returns the sampled eps it used") {
  NoiseAmplitudes amps = make_amps(1, 3, 0.2, {2.0, 3.0, 4.0});
  const std::vector<double> x{0.0, 0.0, 0.0};
  Rng rng(42);
  const auto result = corrupt(x, amps, rng);
  for (std::size_t l = 0; l < 3; ++l) {
    CHECK(result.corrupted[l] ==
          doctest::Approx(amps.eta(0, l) * result.eps[l]));
  }
}

TEST_CASE("bound: chi to infinity sends the contribution to zero") {
  NoiseAmplitudes amps = make_amps(1, 3, 1.0);
  amps.log_chi[0] = 40.0;
  const BoundValue bound = mi_upper_bound(amps);
  CHECK(bound.contributions[0] < 1e-30);
}

TEST_CASE("bound: chi=1 with K*M=3 gives 1.5 ln 2") {
  NoiseAmplitudes amps = make_amps(1, 3, 1.0);
  const BoundValue bound = mi_upper_bound(amps);
  CHECK(bound.contributions[0] == doctest::Approx(1.5 * std::log(2.0)));
  CHECK(bound.total == doctest::Approx(1.5 * std::log(2.0)));
  CHECK(bound.contributions[0] == doctest::Approx(1.0397).epsilon(1e-3));
}

TEST_CASE("bound: chi at the floor is capped and flagged") {
  NoiseAmplitudes amps = make_amps(2, 3, 1.0);
  amps.log_chi[0] = -1e60;
  amps.clamp();
  const BoundValue bound = mi_upper_bound(amps);
  CHECK(bound.capped[0] == 1);
  CHECK(bound.capped[1] == 0);
  CHECK(bound.any_capped());
  // Cap is (K M / 2) log(1 + 1e12).
  CHECK(bound.contributions[0] ==
        doctest::Approx(1.5 * std::log1p(1e12)).epsilon(1e-9));
}

TEST_CASE("bound gradient: chi=1, K*M=3 gives -1.5 and large chi gives ~0") {
  NoiseAmplitudes amps = make_amps(2, 3, 1.0);
  amps.log_chi[1] = 35.0;
  const auto grad = mi_upper_bound_grad(amps);
  CHECK(grad[0] == doctest::Approx(-1.5));
  CHECK(std::fabs(grad[1]) < 1e-25);
}

TEST_CASE("bound gradient matches central finite differences") {
  Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    NoiseAmplitudes amps = make_amps(4, 3, 1.0);
    for (double& v : amps.log_chi) v = rng.uniform(-2.0, 2.0);
    const auto grad = mi_upper_bound_grad(amps);
    for (std::size_t j = 0; j < 4; ++j) {
      const double numeric = testsupport::central_difference(
          [&](double v) {
            NoiseAmplitudes a = amps;
            a.log_chi[j] = v;
            return mi_upper_bound(a).total;
          },
          amps.log_chi[j], 1e-6);
      CHECK(testsupport::gradient_close(grad[j], numeric, 1e-6, 1e-10));
    }
  }
}

TEST_CASE("bound is bit-invariant under affine rescaling of the data") {
  Rng rng(56);
  std::vector<double> stds(3 * 4);
  for (double& s : stds) s = rng.uniform(0.1, 5.0);
  NoiseAmplitudes amps = NoiseAmplitudes::create(3, 4, stds, 0.7);
  for (double& v : amps.log_chi) v = rng.uniform(-1.0, 1.0);

  // Rescaling series data by a (plus any shift) multiplies its window
  // standard deviations by |a| and must leave the bound bit-identical at
  // fixed chi.
  std::vector<double> rescaled = stds;
  for (std::size_t l = 0; l < 4; ++l) rescaled[1 * 4 + l] *= 10.0;
  NoiseAmplitudes scaled = NoiseAmplitudes::create(3, 4, rescaled, 0.7);
  scaled.log_chi = amps.log_chi;

  const BoundValue a = mi_upper_bound(amps);
  const BoundValue b = mi_upper_bound(scaled);
  CHECK(std::memcmp(a.contributions.data(), b.contributions.data(),
                    3 * sizeof(double)) == 0);
  CHECK(a.total == b.total);
}

TEST_CASE("bound is strictly decreasing and non-negative in chi") {
  NoiseAmplitudes amps = make_amps(1, 5, 1.0);
  double previous = std::numeric_limits<double>::infinity();
  for (double log_chi = -6.0; log_chi < 8.0; log_chi += 0.25) {
    amps.log_chi[0] = log_chi;
    const double value = mi_upper_bound(amps).contributions[0];
    CHECK(value >= 0.0);
    CHECK(value < previous);
    previous = value;
  }
}

TEST_CASE("full per-dimension parameterization sums per-dimension terms") {
  std::vector<double> stds{1.0, 2.0, 3.0};
  NoiseAmplitudes amps =
      NoiseAmplitudes::create(1, 3, stds, 1.0, /*shared=*/false);
  amps.log_chi = {std::log(0.5), std::log(1.0), std::log(2.0)};
  const BoundValue bound = mi_upper_bound(amps);
  const double expected = 0.5 * (std::log1p(4.0) + std::log1p(1.0) +
                                 std::log1p(0.25));
  CHECK(bound.contributions[0] == doctest::Approx(expected).epsilon(1e-12));

  const auto grad = mi_upper_bound_grad(amps);
  CHECK(grad.size() == 3);
  CHECK(grad[1] == doctest::Approx(-0.5));
}

TEST_CASE("create validates std entries and chi") {
  std::vector<double> bad{1.0, 0.0};
  CHECK_THROWS_AS(NoiseAmplitudes::create(1, 2, bad, 0.01), DataError);
  std::vector<double> good{1.0, 1.0};
  CHECK_THROWS_AS(NoiseAmplitudes::create(1, 2, good, 0.0), ConfigError);
  CHECK_THROWS_AS(NoiseAmplitudes::create(2, 2, good, 0.01), ShapeError);
}

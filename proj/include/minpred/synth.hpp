#pragma once

#include <cstddef>
#include <string>

#include "minpred/dataset.hpp"
#include "minpred/rng.hpp"

namespace minpred {

struct GraphConfig {
  double edge_probability = 0.5;  // probability a block A_ji is nonzero
  double lognormal_mu = 0.0;      // of nonzero element magnitudes
  double lognormal_sigma = 1.0;
};

// Random coupling structure: each block A_ji is zero with probability 1/2,
// otherwise element magnitudes are log-normal with uniform random signs;
// B elements are uniform on [-1, 1]. Self-loops are allowed and preserved
// (scoring excludes the diagonal downstream).
GroundTruthGraph sample_graph(std::size_t N, std::size_t K, std::size_t M,
                              Rng& rng, const GraphConfig& config = {});

// Nonlinear ground-truth recursion
//   x_t^(i) = softplus( sum_j sum_{k,m} A_ji[k,m] * tanh(B_j[k,m] *
//             x^(j)_{t-K+k}[m]) ) + u_t,   u_t ~ N(0, I),
// rolled out as n_series independent segments of length T with standard
// normal initial steps.
TimeSeriesBundle generate(const GroundTruthGraph& graph,
                          std::size_t n_series = 500, std::size_t T = 22,
                          Rng* rng = nullptr, std::uint64_t seed = 0);

enum class ProbeKind {
  kIndependentPair,
  kCopyPair,
  kLinearChain3,
  kGaussianLinearChain,
};

ProbeKind probe_kind_from_name(const std::string& name);

struct GaussianChainParams {
  double sigma_x = 1.0;  // Var of the driving series
  double omega_x = 2.0;  // innovation variance of the middle series
  double omega_y = 1.0;  // innovation variance of the last series
};

// Small hand-built systems with known ground truth, single segment of length
// T. kGaussianLinearChain is the linear-Gaussian chain
//   x1_t = sqrt(sigma_x) u1,  x2_t = x1_{t-1} + sqrt(omega_x) u2,
//   x3_t = x2_{t-1} + sqrt(omega_y) u3.
TimeSeriesBundle make_probe_system(ProbeKind kind, std::size_t T, Rng& rng,
                                   const GaussianChainParams& chain = {});

double softplus(double x);

}  // namespace minpred

#pragma once

#include <cstddef>

#include "minpred/knn.hpp"

namespace minpred {

// Kraskov-Stogbauer-Grassberger estimator (first variant) of I(x; y) in
// nats: psi(k) + psi(n) - <psi(n_x + 1) + psi(n_y + 1)>, with marginal counts
// taken strictly inside the joint k-th neighbor Chebyshev radius. Estimates
// may be slightly negative and are reported unclipped. Exact duplicate rows
// receive a deterministic tie-breaking jitter.
double ksg_mutual_information(const SampleCloud& x, const SampleCloud& y,
                              std::size_t k = 5);

// Conditional extension I(x; y | z) with counts in the (x,z), (y,z) and (z)
// marginal spaces. An empty conditioning set (z.d == 0) reduces exactly to
// ksg_mutual_information with the same k.
double ksg_conditional_mi(const SampleCloud& x, const SampleCloud& y,
                          const SampleCloud& z, std::size_t k = 3);

// k-NN Kullback-Leibler divergence estimate D(p || q) in nats:
// (d/n) sum_i log(nu_k(i) / rho_k(i)) + log(m / (n - 1)), where rho is the
// within-p and nu the p->q k-th neighbor distance.
double knn_kl_divergence(const SampleCloud& p, const SampleCloud& q,
                         std::size_t k = 5);

// Sample count below which the estimators print a reliability warning.
inline constexpr std::size_t kRecommendedMinSamples = 50;

}  // namespace minpred

#pragma once

// Shared test oracles. Everything here is written independently of the
// library's implementation paths it checks: straight-line model evaluation,
// central finite differences, a reference Adam transcription, brute-force
// ranking metrics and closed-form Gaussian information quantities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "minpred/matrix.hpp"
#include "minpred/mlp.hpp"
#include "minpred/rng.hpp"

namespace testsupport {

// Straight-line re-evaluation of the leaky-rectifier network, no shared code
// with the library's forward pass.
inline std::vector<double> naive_mlp_eval(const minpred::MlpParams& params,
                                          const std::vector<double>& input) {
  std::vector<double> h = input;
  for (std::size_t layer = 0; layer < params.weights.size(); ++layer) {
    const auto& w = params.weights[layer];
    std::vector<double> next(w.rows);
    for (std::size_t r = 0; r < w.rows; ++r) {
      double acc = params.biases[layer][r];
      for (std::size_t c = 0; c < w.cols; ++c) acc += w.at(r, c) * h[c];
      next[r] = acc;
    }
    if (layer + 1 < params.weights.size()) {
      for (double& v : next) v = v > 0.0 ? v : 0.3 * v;
    }
    h = next;
  }
  return h;
}

// Central finite differences of a scalar function.
inline double central_difference(const std::function<double(double)>& f,
                                 double x, double step = 1e-5) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

inline bool gradient_close(double analytic, double numeric, double rel_tol,
                           double abs_floor = 1e-8) {
  const double diff = std::fabs(analytic - numeric);
  const double scale = std::max(std::fabs(analytic), std::fabs(numeric));
  return diff <= rel_tol * scale || diff <= abs_floor;
}

// Reference Adam transcribed directly from the published update rule.
struct ReferenceAdam {
  double lr, b1, b2, eps;
  std::vector<double> m, v;
  std::uint64_t t = 0;

  ReferenceAdam(std::size_t size, double lr_ = 1e-4, double b1_ = 0.9,
                double b2_ = 0.999, double eps_ = 1e-8)
      : lr(lr_), b1(b1_), b2(b2_), eps(eps_), m(size, 0.0), v(size, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grads) {
    t += 1;
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * grads[i];
      v[i] = b2 * v[i] + (1 - b2) * grads[i] * grads[i];
      const double mhat = m[i] / (1 - std::pow(b1, double(t)));
      const double vhat = v[i] / (1 - std::pow(b2, double(t)));
      params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
};

// O(P*N) pair-counting ROC oracle with half-credit ties.
inline double brute_force_auc_roc(const std::vector<double>& scores,
                                  const std::vector<std::uint8_t>& labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t p = 0; p < scores.size(); ++p) {
    if (labels[p] == 0) continue;
    for (std::size_t q = 0; q < scores.size(); ++q) {
      if (labels[q] != 0) continue;
      pairs += 1.0;
      if (scores[p] > scores[q]) {
        wins += 1.0;
      } else if (scores[p] == scores[q]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

// Threshold-sweep average precision oracle, grouped ties, written from the
// definition.
inline double brute_force_auc_pr(const std::vector<double>& scores,
                                 const std::vector<std::uint8_t>& labels) {
  std::vector<double> thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end(), std::greater<double>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  double positives = 0.0;
  for (auto l : labels) positives += l != 0 ? 1.0 : 0.0;

  double ap = 0.0, prev_recall = 0.0;
  for (double threshold : thresholds) {
    double tp = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= threshold) {
        if (labels[i] != 0) {
          tp += 1.0;
        } else {
          fp += 1.0;
        }
      }
    }
    const double recall = tp / positives;
    const double precision = tp / (tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

// Correlated bivariate standard normal samples.
inline void sample_bivariate_gaussian(std::size_t n, double rho,
                                      minpred::Rng& rng,
                                      std::vector<double>& x,
                                      std::vector<double>& y) {
  x.resize(n);
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.normal();
    const double b = rng.normal();
    x[i] = a;
    y[i] = rho * a + std::sqrt(1.0 - rho * rho) * b;
  }
}

inline minpred::Matrix column_matrix(const std::vector<double>& v) {
  minpred::Matrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data.begin());
  return m;
}

// Ordinary least squares via normal equations, straight implementation.
inline std::vector<double> ols_fit(const minpred::Matrix& design,
                                   const std::vector<double>& y) {
  const std::size_t n = design.rows, d = design.cols;
  std::vector<double> gram(d * d, 0.0), xty(d, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    const double* row = design.data.data() + e * d;
    for (std::size_t a = 0; a < d; ++a) {
      xty[a] += row[a] * y[e];
      for (std::size_t b = 0; b < d; ++b) gram[a * d + b] += row[a] * row[b];
    }
  }
  // Gaussian elimination with partial pivoting.
  std::vector<double> aug(gram);
  std::vector<double> rhs(xty);
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::fabs(aug[r * d + col]) > std::fabs(aug[pivot * d + col])) {
        pivot = r;
      }
    }
    for (std::size_t c = 0; c < d; ++c) std::swap(aug[col * d + c], aug[pivot * d + c]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = col + 1; r < d; ++r) {
      const double factor = aug[r * d + col] / aug[col * d + col];
      for (std::size_t c = col; c < d; ++c) aug[r * d + c] -= factor * aug[col * d + c];
      rhs[r] -= factor * rhs[col];
    }
  }
  std::vector<double> beta(d, 0.0);
  for (std::size_t r = d; r-- > 0;) {
    double acc = rhs[r];
    for (std::size_t c = r + 1; c < d; ++c) acc -= aug[r * d + c] * beta[c];
    beta[r] = acc / aug[r * d + r];
  }
  return beta;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size());
}

}  // namespace testsupport

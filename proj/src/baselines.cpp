#include "minpred/baselines.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>

#include "minpred/errors.hpp"
#include "minpred/info_estimators.hpp"
#include "minpred/knn.hpp"

namespace minpred {

namespace {

using EigenMatrix = Eigen::MatrixXd;
using EigenVector = Eigen::VectorXd;

ScoreMatrix empty_scores(std::size_t n, std::string method) {
  ScoreMatrix scores;
  scores.n = n;
  scores.method = std::move(method);
  scores.values.assign(n * n, 0.0);
  scores.valid.assign(n * n, 0);
  return scores;
}

// Window cloud of one series (E x K*M).
SampleCloud series_window_cloud(const WindowedDataset& ds, std::size_t j) {
  const std::size_t dims = ds.dims_per_series();
  Matrix m(ds.n_examples(), dims);
  const std::size_t off = ds.series_offset(j);
  for (std::size_t e = 0; e < ds.n_examples(); ++e) {
    const double* src = ds.inputs.data.data() + e * ds.inputs.cols + off;
    std::copy(src, src + dims, m.data.data() + e * dims);
  }
  return SampleCloud::from_matrix(std::move(m));
}

// Target cloud of one series (E x M).
SampleCloud target_cloud(const WindowedDataset& ds, std::size_t i) {
  Matrix m(ds.n_examples(), ds.M);
  for (std::size_t e = 0; e < ds.n_examples(); ++e) {
    const double* src =
        ds.targets.data.data() + e * ds.targets.cols + i * ds.M;
    std::copy(src, src + ds.M, m.data.data() + e * ds.M);
  }
  return SampleCloud::from_matrix(std::move(m));
}

// Windows of every real series except j, concatenated (E x (N-1)*K*M).
SampleCloud other_windows_cloud(const WindowedDataset& ds, std::size_t j) {
  const std::size_t dims = ds.dims_per_series();
  const std::size_t n = ds.n_real;
  Matrix m(ds.n_examples(), (n - 1) * dims);
  for (std::size_t e = 0; e < ds.n_examples(); ++e) {
    double* dst = m.data.data() + e * m.cols;
    for (std::size_t s = 0; s < n; ++s) {
      if (s == j) continue;
      const double* src =
          ds.inputs.data.data() + e * ds.inputs.cols + ds.series_offset(s);
      dst = std::copy(src, src + dims, dst);
    }
  }
  return SampleCloud::from_matrix(std::move(m));
}

}  // namespace

std::vector<double> ScoreMatrix::off_diagonal() const {
  std::vector<double> out;
  out.reserve(n * (n - 1));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j) out.push_back(at(j, i));
    }
  }
  return out;
}

ScoreMatrix mutual_information_score(const WindowedDataset& dataset,
                                     std::size_t k) {
  const std::size_t n = dataset.n_real;
  ScoreMatrix scores = empty_scores(n, "mutual_information");
  std::vector<SampleCloud> windows(n);
  std::vector<SampleCloud> targets(n);
  for (std::size_t j = 0; j < n; ++j) {
    windows[j] = series_window_cloud(dataset, j);
    targets[j] = target_cloud(dataset, j);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const double value = ksg_mutual_information(windows[a], targets[b], k);
      scores.set(a, b, value);
      scores.set(b, a, value);  // mirrored: exactly symmetric by construction
    }
  }
  return scores;
}

ScoreMatrix transfer_entropy_score(const WindowedDataset& dataset,
                                   std::size_t k) {
  const std::size_t n = dataset.n_real;
  if (n < 2) throw ConfigError("transfer_entropy_score: need N >= 2");
  const std::size_t cond_dim =
      (n - 1) * dataset.dims_per_series();
  if (cond_dim > 20) {
    std::cerr << "[minpred] warning: transfer entropy conditioning on "
              << cond_dim << " dimensions; k-NN estimates in high dimension "
              << "are data-hungry and unreliable\n";
  }
  ScoreMatrix scores = empty_scores(n, "transfer_entropy");
  for (std::size_t j = 0; j < n; ++j) {
    const SampleCloud source = series_window_cloud(dataset, j);
    const SampleCloud others = other_windows_cloud(dataset, j);
    for (std::size_t i = 0; i < n; ++i) {
      const SampleCloud target = target_cloud(dataset, i);
      scores.set(j, i, ksg_conditional_mi(source, target, others, k));
    }
  }
  return scores;
}

namespace {

// Least squares with intercept over selected feature columns; returns the
// residual sum of squares over every output. Falls back to a small ridge on
// numerically singular designs and reports it.
struct GramSolver {
  // design: E x F (no intercept column; one is appended internally).
  explicit GramSolver(const Matrix& design, const Matrix& targets)
      : n_(design.rows), f_(design.cols), targets_(&targets) {
    design_ = EigenMatrix(n_, f_ + 1);
    for (std::size_t e = 0; e < n_; ++e) {
      design_(static_cast<Eigen::Index>(e), 0) = 1.0;
      for (std::size_t c = 0; c < f_; ++c) {
        design_(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(c + 1)) =
            design.at(e, c);
      }
    }
    y_ = EigenMatrix(n_, targets.cols);
    for (std::size_t e = 0; e < n_; ++e) {
      for (std::size_t c = 0; c < targets.cols; ++c) {
        y_(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(c)) =
            targets.at(e, c);
      }
    }
    gram_ = design_.transpose() * design_;
    xty_ = design_.transpose() * y_;
  }

  // columns: subset of feature indices (0-based, excluding intercept).
  // ridge excludes the intercept.
  double rss(const std::vector<std::size_t>& columns, double ridge,
             bool* used_ridge_fallback) const {
    const std::size_t f = columns.size() + 1;
    EigenMatrix gram(f, f);
    EigenMatrix xty(f, y_.cols());
    std::vector<Eigen::Index> map(f);
    map[0] = 0;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      map[c + 1] = static_cast<Eigen::Index>(columns[c] + 1);
    }
    for (std::size_t r = 0; r < f; ++r) {
      xty.row(static_cast<Eigen::Index>(r)) = xty_.row(map[r]);
      for (std::size_t c = 0; c < f; ++c) {
        gram(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            gram_(map[r], map[c]);
      }
    }

    EigenMatrix beta;
    bool fallback = false;
    {
      EigenMatrix regularized = gram;
      for (std::size_t c = 1; c < f; ++c) {
        regularized(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) +=
            ridge * static_cast<double>(n_);
      }
      Eigen::LDLT<EigenMatrix> ldlt(ridge > 0.0 ? regularized : gram);
      beta = ldlt.solve(xty);
      bool singular = !beta.allFinite();
      if (ridge == 0.0 && !singular) {
        // Rank-deficient normal equations show up as a collapsed pivot.
        const auto d = ldlt.vectorD();
        const double d_max = d.cwiseAbs().maxCoeff();
        const double d_min = d.cwiseAbs().minCoeff();
        const double residual = (gram * beta - xty).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, xty.cwiseAbs().maxCoeff());
        singular = d.minCoeff() < 0.0 || d_min <= 1e-10 * d_max ||
                   residual > 1e-6 * scale;
      }
      if (singular) {
        fallback = true;
        EigenMatrix ridged = gram;
        for (std::size_t c = 1; c < f; ++c) {
          ridged(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) +=
              1e-8 * static_cast<double>(n_);
        }
        beta = Eigen::LDLT<EigenMatrix>(ridged).solve(xty);
      }
    }
    if (used_ridge_fallback != nullptr) *used_ridge_fallback = fallback;

    // Direct residuals over the selected columns.
    double rss = 0.0;
    EigenMatrix sub(n_, f);
    for (std::size_t c = 0; c < f; ++c) {
      sub.col(static_cast<Eigen::Index>(c)) = design_.col(map[c]);
    }
    const EigenMatrix resid = y_ - sub * beta;
    rss = resid.squaredNorm();
    return rss;
  }

  std::size_t feature_count() const { return f_; }

 private:
  std::size_t n_;
  std::size_t f_;
  const Matrix* targets_;
  EigenMatrix design_;
  EigenMatrix y_;
  EigenMatrix gram_;
  EigenMatrix xty_;
};

Matrix real_block(const WindowedDataset& ds) {
  const std::size_t d = ds.n_real * ds.dims_per_series();
  Matrix m(ds.n_examples(), d);
  for (std::size_t e = 0; e < ds.n_examples(); ++e) {
    const double* src = ds.inputs.data.data() + e * ds.inputs.cols;
    std::copy(src, src + d, m.data.data() + e * d);
  }
  return m;
}

Matrix target_block(const WindowedDataset& ds, std::size_t i) {
  Matrix m(ds.n_examples(), ds.M);
  for (std::size_t e = 0; e < ds.n_examples(); ++e) {
    const double* src =
        ds.targets.data.data() + e * ds.targets.cols + i * ds.M;
    std::copy(src, src + ds.M, m.data.data() + e * ds.M);
  }
  return m;
}

}  // namespace

ScoreMatrix linear_granger_score(const WindowedDataset& dataset) {
  const std::size_t n = dataset.n_real;
  const std::size_t dims = dataset.dims_per_series();
  ScoreMatrix scores = empty_scores(n, "linear_granger");
  const Matrix design = real_block(dataset);

  std::vector<std::size_t> all_columns(design.cols);
  std::iota(all_columns.begin(), all_columns.end(), 0);

  for (std::size_t i = 0; i < n; ++i) {
    const Matrix y = target_block(dataset, i);
    GramSolver solver(design, y);
    bool fallback_full = false;
    const double rss_full = solver.rss(all_columns, 0.0, &fallback_full);
    if (fallback_full) {
      scores.notes.push_back("ridge fallback (full design, target " +
                             dataset.names[i] + ")");
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::size_t> restricted;
      restricted.reserve(design.cols - dims);
      for (std::size_t c = 0; c < design.cols; ++c) {
        if (c / dims != j) restricted.push_back(c);
      }
      bool fallback = false;
      const double rss_restricted = solver.rss(restricted, 0.0, &fallback);
      if (fallback) {
        scores.notes.push_back("ridge fallback (drop " + dataset.names[j] +
                               ", target " + dataset.names[i] + ")");
      }
      scores.set(j, i, std::log(rss_restricted / rss_full));
    }
  }
  return scores;
}

ScoreMatrix kernel_granger_score(const WindowedDataset& dataset,
                                 const KernelGrangerConfig& config) {
  const std::size_t n = dataset.n_real;
  const std::size_t dims = dataset.dims_per_series();
  const std::size_t d = n * dims;
  if (config.degree != 1 && config.degree != 2) {
    throw ConfigError("kernel_granger_score: degree must be 1 or 2");
  }

  // Z-score the raw inputs (the polynomial-kernel index assumes normalized
  // data).
  Matrix raw = real_block(dataset);
  const std::size_t e_count = raw.rows;
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t e = 0; e < e_count; ++e) mean += raw.at(e, c);
    mean /= static_cast<double>(e_count);
    double var = 0.0;
    for (std::size_t e = 0; e < e_count; ++e) {
      const double diff = raw.at(e, c) - mean;
      var += diff * diff;
    }
    var /= static_cast<double>(e_count);
    const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
    for (std::size_t e = 0; e < e_count; ++e) {
      raw.at(e, c) = (raw.at(e, c) - mean) / sd;
    }
  }

  // Explicit monomial features of degree <= p; each feature remembers which
  // series it touches so restricted models can drop a series entirely.
  struct Feature {
    std::size_t c1;
    long c2;  // -1 for linear terms
  };
  std::vector<Feature> features;
  for (std::size_t c = 0; c < d; ++c) features.push_back({c, -1});
  if (config.degree == 2) {
    for (std::size_t c1 = 0; c1 < d; ++c1) {
      for (std::size_t c2 = c1; c2 < d; ++c2) {
        features.push_back({c1, static_cast<long>(c2)});
      }
    }
  }
  if (features.size() > config.max_features) {
    throw ConfigError("kernel_granger_score: feature space has " +
                      std::to_string(features.size()) + " dimensions (cap " +
                      std::to_string(config.max_features) + ")");
  }

  Matrix expanded(e_count, features.size());
  for (std::size_t e = 0; e < e_count; ++e) {
    const double* src = raw.data.data() + e * d;
    double* dst = expanded.data.data() + e * features.size();
    for (std::size_t f = 0; f < features.size(); ++f) {
      const auto& feat = features[f];
      dst[f] = feat.c2 < 0
                   ? src[feat.c1]
                   : src[feat.c1] * src[static_cast<std::size_t>(feat.c2)];
    }
  }

  auto touches = [&](const Feature& f, std::size_t series) {
    if (f.c1 / dims == series) return true;
    return f.c2 >= 0 && static_cast<std::size_t>(f.c2) / dims == series;
  };

  ScoreMatrix scores = empty_scores(
      n, config.degree == 1 ? "kernel_granger_p1" : "kernel_granger");
  std::vector<std::size_t> all_columns(features.size());
  std::iota(all_columns.begin(), all_columns.end(), 0);

  for (std::size_t i = 0; i < n; ++i) {
    const Matrix y = target_block(dataset, i);
    GramSolver solver(expanded, y);
    const double rss_full = solver.rss(all_columns, config.ridge, nullptr);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::size_t> restricted;
      restricted.reserve(features.size());
      for (std::size_t f = 0; f < features.size(); ++f) {
        if (!touches(features[f], j)) restricted.push_back(f);
      }
      const double rss_restricted =
          solver.rss(restricted, config.ridge, nullptr);
      scores.set(j, i, std::log(rss_restricted / rss_full));
    }
  }
  return scores;
}

bool elastic_net_fit(const Matrix& gram, const std::vector<double>& xty,
                     double alpha, double l1_ratio, double n_samples,
                     double tolerance, std::size_t max_iterations,
                     std::vector<double>& beta) {
  const std::size_t d = xty.size();
  // Objective (per scikit-learn convention on centered data):
  //   1/(2n) ||y - X b||^2 + alpha l1 ||b||_1 + alpha (1 - l1)/2 ||b||^2.
  // Coordinate update with precomputed Gram:
  //   rho_c = (xty_c - sum_{c' != c} G_{c c'} b_{c'}) / n
  //   b_c  = soft(rho_c, alpha l1) / (G_cc / n + alpha (1 - l1)).
  const double l1_penalty = alpha * l1_ratio;
  const double l2_penalty = alpha * (1.0 - l1_ratio);
  std::vector<double> gram_beta(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    if (beta[c] == 0.0) continue;
    for (std::size_t r = 0; r < d; ++r) {
      gram_beta[r] += gram.at(r, c) * beta[c];
    }
  }
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    double max_step = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double gcc = gram.at(c, c);
      const double denom = gcc / n_samples + l2_penalty;
      if (denom <= 0.0) continue;
      const double rho =
          (xty[c] - (gram_beta[c] - gcc * beta[c])) / n_samples;
      double updated = 0.0;
      if (rho > l1_penalty) {
        updated = (rho - l1_penalty) / denom;
      } else if (rho < -l1_penalty) {
        updated = (rho + l1_penalty) / denom;
      }
      const double delta = updated - beta[c];
      if (delta != 0.0) {
        const double* gram_col = gram.data.data() + c * gram.cols;
        for (std::size_t r = 0; r < d; ++r) {
          gram_beta[r] += gram_col[r] * delta;
        }
        beta[c] = updated;
        max_step = std::max(max_step, std::fabs(delta));
      }
    }
    if (max_step <= tolerance) return true;
  }
  return false;
}

namespace {

struct CenteredDesign {
  Matrix gram;                 // d x d
  std::vector<double> mean_x;  // d
  Matrix x;                    // centered copy
};

CenteredDesign center_design(const Matrix& design, std::size_t row_begin,
                             std::size_t row_end) {
  const std::size_t d = design.cols;
  const std::size_t rows = row_end - row_begin;
  CenteredDesign out;
  out.mean_x.assign(d, 0.0);
  out.x.resize(rows, d);
  for (std::size_t e = 0; e < rows; ++e) {
    const double* src = design.data.data() + (row_begin + e) * d;
    for (std::size_t c = 0; c < d; ++c) out.mean_x[c] += src[c];
  }
  for (double& v : out.mean_x) v /= static_cast<double>(rows);
  for (std::size_t e = 0; e < rows; ++e) {
    const double* src = design.data.data() + (row_begin + e) * d;
    double* dst = out.x.data.data() + e * d;
    for (std::size_t c = 0; c < d; ++c) dst[c] = src[c] - out.mean_x[c];
  }
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      xm(out.x.data.data(), static_cast<Eigen::Index>(rows),
         static_cast<Eigen::Index>(d));
  EigenMatrix gram = xm.transpose() * xm;
  out.gram.resize(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      out.gram.at(r, c) = gram(static_cast<Eigen::Index>(r),
                               static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

}  // namespace

ScoreMatrix elastic_net_score(const WindowedDataset& dataset,
                              const ElasticNetConfig& config) {
  const std::size_t n = dataset.n_real;
  const std::size_t dims = dataset.dims_per_series();
  const std::size_t d = n * dims;
  const std::size_t e_count = dataset.n_examples();
  if (e_count < (config.cv_folds + 1) * 2) {
    throw DataError("elastic_net_score: too few examples for the CV splits");
  }

  const Matrix design = real_block(dataset);

  // Penalty path, geometric, iterated descending for warm starts.
  std::vector<double> alphas(config.alpha_steps);
  const double log_min = std::log10(config.alpha_min);
  const double log_max = std::log10(config.alpha_max);
  for (std::size_t s = 0; s < config.alpha_steps; ++s) {
    const double frac = config.alpha_steps == 1
                            ? 0.0
                            : static_cast<double>(s) /
                                  static_cast<double>(config.alpha_steps - 1);
    alphas[s] = std::pow(10.0, log_max + (log_min - log_max) * frac);
  }

  // Expanding-window splits: fold f validates on the f-th of cv_folds
  // equal-size trailing blocks, training on everything before it.
  const std::size_t test_size = e_count / (config.cv_folds + 1);
  if (test_size == 0) throw DataError("elastic_net_score: folds too small");

  ScoreMatrix scores = empty_scores(n, "elastic_net");
  bool convergence_flagged = false;

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> coefficient_l1(d, 0.0);
    for (std::size_t m = 0; m < dataset.M; ++m) {
      // Per-fold centered designs are reused across the whole path.
      struct Fold {
        CenteredDesign design;
        std::vector<double> xty;
        double mean_y = 0.0;
        std::size_t train_end = 0, test_end = 0;
      };
      std::vector<Fold> folds(config.cv_folds);
      std::vector<double> y(e_count);
      for (std::size_t e = 0; e < e_count; ++e) {
        y[e] = dataset.targets.at(e, i * dataset.M + m);
      }
      for (std::size_t f = 0; f < config.cv_folds; ++f) {
        Fold& fold = folds[f];
        fold.train_end = e_count - (config.cv_folds - f) * test_size;
        fold.test_end = fold.train_end + test_size;
        fold.design = center_design(design, 0, fold.train_end);
        for (std::size_t e = 0; e < fold.train_end; ++e) {
          fold.mean_y += y[e];
        }
        fold.mean_y /= static_cast<double>(fold.train_end);
        fold.xty.assign(d, 0.0);
        for (std::size_t e = 0; e < fold.train_end; ++e) {
          const double yc = y[e] - fold.mean_y;
          const double* row = fold.design.x.data.data() + e * d;
          for (std::size_t c = 0; c < d; ++c) fold.xty[c] += row[c] * yc;
        }
      }

      double best_r2 = -std::numeric_limits<double>::infinity();
      double best_alpha = alphas.front();
      double best_l1 = config.l1_ratios.front();

      for (double l1_ratio : config.l1_ratios) {
        std::vector<std::vector<double>> warm(config.cv_folds,
                                              std::vector<double>(d, 0.0));
        for (double alpha : alphas) {
          double r2_sum = 0.0;
          for (std::size_t f = 0; f < config.cv_folds; ++f) {
            Fold& fold = folds[f];
            if (!elastic_net_fit(fold.design.gram, fold.xty, alpha, l1_ratio,
                                 static_cast<double>(fold.train_end),
                                 config.tolerance, config.max_iterations,
                                 warm[f])) {
              convergence_flagged = true;
            }
            // R^2 on the held-out block.
            double ss_res = 0.0, ss_tot = 0.0, val_mean = 0.0;
            for (std::size_t e = fold.train_end; e < fold.test_end; ++e) {
              val_mean += y[e];
            }
            val_mean /= static_cast<double>(test_size);
            for (std::size_t e = fold.train_end; e < fold.test_end; ++e) {
              const double* row = design.data.data() + e * d;
              double pred = fold.mean_y;
              for (std::size_t c = 0; c < d; ++c) {
                pred += (row[c] - fold.design.mean_x[c]) * warm[f][c];
              }
              ss_res += (y[e] - pred) * (y[e] - pred);
              ss_tot += (y[e] - val_mean) * (y[e] - val_mean);
            }
            r2_sum += ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
          }
          const double r2 = r2_sum / static_cast<double>(config.cv_folds);
          if (r2 > best_r2) {
            best_r2 = r2;
            best_alpha = alpha;
            best_l1 = l1_ratio;
          }
        }
      }

      // Refit on all examples at the selected hyperparameters.
      CenteredDesign full = center_design(design, 0, e_count);
      double mean_y = 0.0;
      for (double v : y) mean_y += v;
      mean_y /= static_cast<double>(e_count);
      std::vector<double> xty(d, 0.0);
      for (std::size_t e = 0; e < e_count; ++e) {
        const double yc = y[e] - mean_y;
        const double* row = full.x.data.data() + e * d;
        for (std::size_t c = 0; c < d; ++c) xty[c] += row[c] * yc;
      }
      std::vector<double> beta(d, 0.0);
      if (!elastic_net_fit(full.gram, xty, best_alpha, best_l1,
                           static_cast<double>(e_count), config.tolerance,
                           config.max_iterations, beta)) {
        convergence_flagged = true;
      }
      for (std::size_t c = 0; c < d; ++c) {
        coefficient_l1[c] += std::fabs(beta[c]);
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      double total = 0.0;
      for (std::size_t l = 0; l < dims; ++l) {
        total += coefficient_l1[j * dims + l];
      }
      scores.set(j, i, total);
    }
  }
  if (convergence_flagged) {
    scores.notes.push_back(
        "coordinate descent hit the iteration cap before the 1e-10 "
        "tolerance; best iterate used");
  }
  return scores;
}

ScoreMatrix causal_influence_score(const WindowedDataset& dataset,
                                   const RunConfig& config,
                                   std::size_t kl_neighbors) {
  const std::size_t n = dataset.n_real;
  const std::size_t dims = dataset.dims_per_series();
  const std::size_t d = n * dims;
  const std::size_t e_count = dataset.n_examples();
  const std::size_t joint_dim = d + dataset.M;
  if (joint_dim > 20) {
    std::cerr << "[minpred] warning: causal influence clouds have "
              << joint_dim << " dimensions; KL estimates in high dimension "
              << "are data-hungry and unreliable\n";
  }

  RunConfig trainer = config;
  trainer.noise_mode = NoiseMode::kNone;
  trainer.train_chi = false;
  trainer.lambda = 0.0;

  ScoreMatrix scores = empty_scores(n, "causal_influence");
  const Matrix design = real_block(dataset);

  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(Rng::derive(config.master_seed, seed_tag::kTarget + 7700 + i));
    const TrainResult trained = train_target(dataset, i, trainer, rng);

    MlpWorkspace ws;
    // Predictions over the full example set from the clean windows. The
    // model was trained on the augmented input layout, so feed that layout.
    const Matrix& pred = mlp_forward_batch(trained.params, dataset.inputs, ws);

    Matrix joint(e_count, joint_dim);
    for (std::size_t e = 0; e < e_count; ++e) {
      double* dst = joint.data.data() + e * joint_dim;
      const double* src = design.data.data() + e * d;
      std::copy(src, src + d, dst);
      const double* pr = pred.data.data() + e * pred.cols;
      std::copy(pr, pr + dataset.M, dst + d);
    }
    const SampleCloud original = SampleCloud::from_matrix(joint);

    for (std::size_t j = 0; j < n; ++j) {
      // Cut distribution: series j's windows replaced by an
      // example-permuted copy (marginal preserved, ties to everything else
      // severed), predictions recomputed under the cut.
      Rng cut_rng(
          Rng::derive(config.master_seed, seed_tag::kTarget + 7900 + i * n + j));
      const auto perm = cut_rng.permutation(e_count);
      Matrix cut_inputs = dataset.inputs;
      const std::size_t off = dataset.series_offset(j);
      for (std::size_t e = 0; e < e_count; ++e) {
        const double* src =
            dataset.inputs.data.data() + perm[e] * dataset.inputs.cols + off;
        std::copy(src, src + dims,
                  cut_inputs.data.data() + e * cut_inputs.cols + off);
      }
      const Matrix& cut_pred =
          mlp_forward_batch(trained.params, cut_inputs, ws);
      Matrix cut_joint(e_count, joint_dim);
      for (std::size_t e = 0; e < e_count; ++e) {
        double* dst = cut_joint.data.data() + e * joint_dim;
        const double* src = cut_inputs.data.data() + e * cut_inputs.cols;
        std::copy(src, src + d, dst);
        const double* pr = cut_pred.data.data() + e * cut_pred.cols;
        std::copy(pr, pr + dataset.M, dst + d);
      }
      const SampleCloud cut = SampleCloud::from_matrix(std::move(cut_joint));
      scores.set(j, i, knn_kl_divergence(original, cut, kl_neighbors));
    }
  }
  return scores;
}

std::vector<ScoreMatrix> gaussian_random_score(std::size_t n,
                                               std::size_t count, Rng& rng) {
  std::vector<ScoreMatrix> matrices;
  matrices.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    ScoreMatrix scores = empty_scores(n, "gaussian_random");
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        scores.set(j, i, rng.normal());
      }
    }
    matrices.push_back(std::move(scores));
  }
  return matrices;
}

}  // namespace minpred

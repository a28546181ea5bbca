#include "minpred/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "minpred/errors.hpp"

namespace minpred {

std::size_t TimeSeriesBundle::total_steps() const {
  std::size_t total = 0;
  for (const auto& seg : segments) total += seg.length;
  return total;
}

void TimeSeriesBundle::validate() const {
  if (n_series == 0) throw DataError("bundle: no series");
  if (M == 0) throw DataError("bundle: M must be positive");
  if (names.size() != n_series) throw DataError("bundle: name count mismatch");
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    if (seg.values.size() != n_series * seg.length * M) {
      throw DataError("bundle: segment " + std::to_string(s) +
                      " storage size mismatch");
    }
    for (double v : seg.values) {
      if (!std::isfinite(v)) {
        throw DataError("bundle: non-finite value in segment " +
                        std::to_string(s));
      }
    }
  }
}

WindowedDataset windowize(const TimeSeriesBundle& bundle, std::size_t K,
                          double train_fraction) {
  bundle.validate();
  if (K == 0) throw ConfigError("windowize: K must be positive");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw ConfigError("windowize: train fraction out of (0, 1]");
  }
  std::size_t examples = 0;
  for (std::size_t s = 0; s < bundle.segments.size(); ++s) {
    const std::size_t T = bundle.segments[s].length;
    if (T <= K) {
      std::string series_list;
      for (std::size_t j = 0; j < bundle.names.size(); ++j) {
        if (j > 0) series_list += ", ";
        series_list += bundle.names[j];
      }
      throw DataError("windowize: segment " + std::to_string(s) +
                      " has length " + std::to_string(T) +
                      " <= K=" + std::to_string(K) +
                      ", no complete window (series: " + series_list + ")");
    }
    examples += T - K;
  }

  WindowedDataset ds;
  ds.n_real = bundle.n_series;
  ds.K = K;
  ds.M = bundle.M;
  ds.names = bundle.names;
  ds.inputs.resize(examples, ds.input_dim());
  ds.targets.resize(examples, bundle.n_series * bundle.M);

  const std::size_t N = bundle.n_series;
  const std::size_t M = bundle.M;
  std::size_t e = 0;
  for (const auto& seg : bundle.segments) {
    for (std::size_t t = K; t < seg.length; ++t, ++e) {
      double* in = ds.inputs.data.data() + e * ds.inputs.cols;
      for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t k = 0; k < K; ++k) {
          for (std::size_t m = 0; m < M; ++m) {
            in[(j * K + k) * M + m] = seg.at(j, t - K + k, m, M);
          }
        }
      }
      double* out = ds.targets.data.data() + e * ds.targets.cols;
      for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t m = 0; m < M; ++m) {
          out[i * M + m] = seg.at(i, t, m, M);
        }
      }
    }
  }

  ds.train_count = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::floor(static_cast<double>(examples) * train_fraction)));
  ds.train_count = std::min(ds.train_count, examples);

  // Frozen per-dimension standard deviations over the training split.
  ds.stds.assign(ds.input_dim(), 0.0);
  std::vector<double> mean(ds.input_dim(), 0.0);
  for (std::size_t r = 0; r < ds.train_count; ++r) {
    const double* row = ds.inputs.data.data() + r * ds.inputs.cols;
    for (std::size_t c = 0; c < ds.input_dim(); ++c) mean[c] += row[c];
  }
  for (double& v : mean) v /= static_cast<double>(ds.train_count);
  for (std::size_t r = 0; r < ds.train_count; ++r) {
    const double* row = ds.inputs.data.data() + r * ds.inputs.cols;
    for (std::size_t c = 0; c < ds.input_dim(); ++c) {
      const double d = row[c] - mean[c];
      ds.stds[c] += d * d;
    }
  }
  for (double& v : ds.stds) {
    v = std::sqrt(v / static_cast<double>(ds.train_count));
    if (!(v > 1e-12)) v = 1e-12;  // constant dimension: keep channel defined
  }
  return ds;
}

WindowedDataset make_fake_series(const WindowedDataset& dataset, std::size_t S,
                                 Rng& rng) {
  if (dataset.n_fake != 0) {
    throw ConfigError("make_fake_series: dataset already augmented");
  }
  if (S == 0) throw ConfigError("make_fake_series: S must be >= 1");
  if (S > dataset.n_real) {
    throw ConfigError("make_fake_series: S=" + std::to_string(S) +
                      " exceeds N=" + std::to_string(dataset.n_real));
  }

  // Distinct source indices, uniform without replacement.
  std::vector<std::size_t> pool(dataset.n_real);
  for (std::size_t j = 0; j < pool.size(); ++j) pool[j] = j;
  rng.shuffle(pool);
  std::vector<std::size_t> sources(pool.begin(), pool.begin() + S);

  WindowedDataset aug;
  aug.n_real = dataset.n_real;
  aug.n_fake = S;
  aug.K = dataset.K;
  aug.M = dataset.M;
  aug.names = dataset.names;
  aug.targets = dataset.targets;
  aug.train_count = dataset.train_count;
  aug.fake_sources = sources;

  const std::size_t E = dataset.n_examples();
  const std::size_t dims = dataset.dims_per_series();
  aug.inputs.resize(E, aug.input_dim());
  for (std::size_t e = 0; e < E; ++e) {
    const double* src = dataset.inputs.data.data() + e * dataset.inputs.cols;
    double* dst = aug.inputs.data.data() + e * aug.inputs.cols;
    std::copy(src, src + dataset.inputs.cols, dst);
  }
  for (std::size_t s = 0; s < S; ++s) {
    const std::size_t src_series = sources[s];
    const auto perm = rng.permutation(E);
    const std::size_t dst_off = (dataset.n_real + s) * dims;
    const std::size_t src_off = src_series * dims;
    for (std::size_t e = 0; e < E; ++e) {
      const double* src_row =
          dataset.inputs.data.data() + perm[e] * dataset.inputs.cols + src_off;
      double* dst_row = aug.inputs.data.data() + e * aug.inputs.cols + dst_off;
      std::copy(src_row, src_row + dims, dst_row);
    }
    aug.names.push_back(dataset.names[src_series] + "#null" +
                        std::to_string(s + 1));
  }

  // Standard deviations recomputed over the augmented train split.
  aug.stds.assign(aug.input_dim(), 0.0);
  std::vector<double> mean(aug.input_dim(), 0.0);
  for (std::size_t r = 0; r < aug.train_count; ++r) {
    const double* row = aug.inputs.data.data() + r * aug.inputs.cols;
    for (std::size_t c = 0; c < aug.input_dim(); ++c) mean[c] += row[c];
  }
  for (double& v : mean) v /= static_cast<double>(aug.train_count);
  for (std::size_t r = 0; r < aug.train_count; ++r) {
    const double* row = aug.inputs.data.data() + r * aug.inputs.cols;
    for (std::size_t c = 0; c < aug.input_dim(); ++c) {
      const double d = row[c] - mean[c];
      aug.stds[c] += d * d;
    }
  }
  for (double& v : aug.stds) {
    v = std::sqrt(v / static_cast<double>(aug.train_count));
    if (!(v > 1e-12)) v = 1e-12;
  }
  return aug;
}

TimeSeriesBundle normalize(const TimeSeriesBundle& bundle) {
  bundle.validate();
  const std::size_t N = bundle.n_series;
  const std::size_t M = bundle.M;
  const std::size_t total = bundle.total_steps();
  if (total == 0) throw DataError("normalize: empty bundle");

  std::vector<double> mean(N * M, 0.0), var(N * M, 0.0);
  for (const auto& seg : bundle.segments) {
    for (std::size_t j = 0; j < N; ++j) {
      for (std::size_t t = 0; t < seg.length; ++t) {
        for (std::size_t m = 0; m < M; ++m) {
          mean[j * M + m] += seg.at(j, t, m, M);
        }
      }
    }
  }
  for (double& v : mean) v /= static_cast<double>(total);
  for (const auto& seg : bundle.segments) {
    for (std::size_t j = 0; j < N; ++j) {
      for (std::size_t t = 0; t < seg.length; ++t) {
        for (std::size_t m = 0; m < M; ++m) {
          const double d = seg.at(j, t, m, M) - mean[j * M + m];
          var[j * M + m] += d * d;
        }
      }
    }
  }
  for (double& v : var) v /= static_cast<double>(total);

  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t m = 0; m < M; ++m) {
      if (!(var[j * M + m] > 0.0)) {
        throw DataError("normalize: series '" + bundle.names[j] +
                        "' dimension " + std::to_string(m) + " is constant");
      }
    }
  }

  TimeSeriesBundle out = bundle;
  for (auto& seg : out.segments) {
    for (std::size_t j = 0; j < N; ++j) {
      for (std::size_t t = 0; t < seg.length; ++t) {
        for (std::size_t m = 0; m < M; ++m) {
          seg.at(j, t, m, M) = (seg.at(j, t, m, M) - mean[j * M + m]) /
                               std::sqrt(var[j * M + m]);
        }
      }
    }
  }
  return out;
}

}  // namespace minpred

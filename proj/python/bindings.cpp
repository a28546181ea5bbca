#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

#include "minpred/baselines.hpp"
#include "minpred/csv.hpp"
#include "minpred/dataset.hpp"
#include "minpred/errors.hpp"
#include "minpred/eval.hpp"
#include "minpred/info_estimators.hpp"
#include "minpred/mpir.hpp"
#include "minpred/synth.hpp"

namespace py = pybind11;
using namespace minpred;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Segments arrive as a list of (N, T) or (N, T, M) arrays.
TimeSeriesBundle bundle_from_segments(const py::list& segments,
                                      std::vector<std::string> names) {
  if (segments.empty()) throw DataError("bundle: no segments");
  TimeSeriesBundle bundle;
  bool first = true;
  for (const auto& item : segments) {
    DoubleArray array = item.cast<DoubleArray>();
    if (array.ndim() != 2 && array.ndim() != 3) {
      throw ShapeError("bundle: segments must be (N, T) or (N, T, M) arrays");
    }
    const std::size_t n = static_cast<std::size_t>(array.shape(0));
    const std::size_t t = static_cast<std::size_t>(array.shape(1));
    const std::size_t m =
        array.ndim() == 3 ? static_cast<std::size_t>(array.shape(2)) : 1;
    if (first) {
      bundle.n_series = n;
      bundle.M = m;
      first = false;
    } else if (bundle.n_series != n || bundle.M != m) {
      throw ShapeError("bundle: segment shapes disagree");
    }
    TimeSeriesBundle::Segment seg;
    seg.length = t;
    seg.values.assign(n * t * m, 0.0);
    std::memcpy(seg.values.data(), array.data(), n * t * m * sizeof(double));
    bundle.segments.push_back(std::move(seg));
  }
  if (names.empty()) {
    for (std::size_t j = 0; j < bundle.n_series; ++j) {
      names.push_back("x" + std::to_string(j + 1));
    }
  }
  if (names.size() != bundle.n_series) {
    throw ShapeError("bundle: name count mismatch");
  }
  bundle.names = std::move(names);
  bundle.validate();
  return bundle;
}

py::list segments_to_python(const TimeSeriesBundle& bundle) {
  py::list out;
  for (const auto& seg : bundle.segments) {
    py::array_t<double> array(
        {bundle.n_series, seg.length, bundle.M});
    std::memcpy(array.mutable_data(), seg.values.data(),
                seg.values.size() * sizeof(double));
    out.append(array);
  }
  return out;
}

SampleCloud cloud_from_array(const DoubleArray& array, const char* what) {
  if (array.ndim() == 1) {
    Matrix m(static_cast<std::size_t>(array.shape(0)), 1);
    std::memcpy(m.data.data(), array.data(), m.data.size() * sizeof(double));
    return SampleCloud::from_matrix(std::move(m));
  }
  if (array.ndim() != 2) {
    throw ShapeError(std::string(what) + ": expected a 1-D or 2-D array");
  }
  Matrix m(static_cast<std::size_t>(array.shape(0)),
           static_cast<std::size_t>(array.shape(1)));
  std::memcpy(m.data.data(), array.data(), m.data.size() * sizeof(double));
  return SampleCloud::from_matrix(std::move(m));
}

py::array_t<double> matrix_to_python(const std::vector<double>& values,
                                     std::size_t rows, std::size_t cols) {
  py::array_t<double> array({rows, cols});
  std::memcpy(array.mutable_data(), values.data(),
              values.size() * sizeof(double));
  return array;
}

RunConfig config_from_kwargs(double lambda_, double eta0, double alpha,
                             std::size_t k, std::size_t epochs,
                             std::size_t warmup, std::size_t batch, double lr,
                             long fakes, std::uint64_t seed, bool augment,
                             bool full_chi, std::size_t threads) {
  RunConfig config;
  config.lambda = lambda_;
  config.eta0 = eta0;
  config.alpha = alpha;
  config.K = k;
  config.epochs = epochs;
  config.warmup_epochs = warmup;
  config.batch_size = batch;
  config.learning_rate = lr;
  config.fake_count = fakes;
  config.master_seed = seed;
  config.augment = augment;
  config.full_chi = full_chi;
  config.threads = threads;
  return config;
}

}  // namespace

PYBIND11_MODULE(_minpred, m) {
  m.doc() =
      "Directional relation discovery for time series via minimum "
      "predictive information regularization, with seven comparison "
      "scorers and k-NN information estimators.";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);

  m.def(
      "generate",
      [](std::size_t n, std::size_t k, std::size_t m_dim, std::size_t t,
         std::size_t n_series, std::uint64_t seed) {
        Rng graph_rng(Rng::derive(seed, seed_tag::kGraph));
        const GroundTruthGraph graph = sample_graph(n, k, m_dim, graph_rng);
        const TimeSeriesBundle bundle =
            generate(graph, n_series, t, nullptr, seed);
        py::dict out;
        out["segments"] = segments_to_python(bundle);
        out["names"] = bundle.names;
        out["indicator"] = matrix_to_python(
            std::vector<double>(graph.indicator.begin(), graph.indicator.end()),
            n, n);
        py::array_t<double> a({n, n, k, m_dim});
        std::memcpy(a.mutable_data(), graph.A.data(),
                    graph.A.size() * sizeof(double));
        out["a"] = a;
        py::array_t<double> b({n, k, m_dim});
        std::memcpy(b.mutable_data(), graph.B.data(),
                    graph.B.size() * sizeof(double));
        out["b"] = b;
        return out;
      },
      py::arg("n"), py::arg("k") = 3, py::arg("m") = 1, py::arg("t") = 22,
      py::arg("n_series") = 500, py::arg("seed") = 0,
      "Sample a ground-truth system and roll out synthetic segments.");

  m.def(
      "discover",
      [](const py::list& segments, std::vector<std::string> names,
         double lambda_, double eta0, double alpha, std::size_t k,
         std::size_t epochs, std::size_t warmup, std::size_t batch, double lr,
         long fakes, std::uint64_t seed, bool augment, bool full_chi,
         std::size_t threads, bool threshold) {
        const TimeSeriesBundle bundle =
            bundle_from_segments(segments, std::move(names));
        const RunConfig config =
            config_from_kwargs(lambda_, eta0, alpha, k, epochs, warmup, batch,
                               lr, fakes, seed, augment, full_chi, threads);
        StrengthMatrix matrix = infer_matrix(bundle, config);
        if (threshold && matrix.n_fake > 0) {
          matrix = significance_threshold(std::move(matrix), alpha);
        }
        py::dict out;
        out["names"] = matrix.names;
        out["raw"] = matrix_to_python(matrix.raw,
                                      matrix.n_real + matrix.n_fake,
                                      matrix.n_real);
        if (matrix.threshold.has_value()) {
          out["threshold"] = *matrix.threshold;
          out["thresholded"] = matrix_to_python(matrix.thresholded,
                                                matrix.n_real, matrix.n_real);
        }
        return out;
      },
      py::arg("segments"), py::arg("names") = std::vector<std::string>{},
      py::arg("lam") = 0.002, py::arg("eta0") = 0.01, py::arg("alpha") = 0.05,
      py::arg("k") = 3, py::arg("epochs") = 30000, py::arg("warmup") = 400,
      py::arg("batch") = 256, py::arg("lr") = 1e-4, py::arg("fakes") = -1,
      py::arg("seed") = 0, py::arg("augment") = true,
      py::arg("full_chi") = false, py::arg("threads") = 0,
      py::arg("threshold") = true,
      "Run the full discovery pipeline; returns the raw strength matrix and, "
      "when fake series are appended, the significance-thresholded one.");

  m.def(
      "baseline",
      [](const std::string& method, const py::list& segments,
         std::vector<std::string> names, std::size_t k, std::size_t epochs,
         std::size_t warmup, double lr, std::uint64_t seed) {
        const TimeSeriesBundle bundle =
            bundle_from_segments(segments, std::move(names));
        RunConfig config;
        config.K = k;
        config.epochs = epochs;
        config.warmup_epochs = warmup;
        config.learning_rate = lr;
        config.master_seed = seed;
        const WindowedDataset dataset =
            windowize(bundle, config.K, config.train_fraction);
        const ScoreMatrix scores = score_with_method(
            method_from_name(method), bundle, dataset, config);
        return matrix_to_python(scores.values, scores.n, scores.n);
      },
      py::arg("method"), py::arg("segments"),
      py::arg("names") = std::vector<std::string>{}, py::arg("k") = 3,
      py::arg("epochs") = 1000, py::arg("warmup") = 100,
      py::arg("lr") = 1e-4, py::arg("seed") = 0,
      "Score directions with one of the comparison methods.");

  m.def(
      "ksg_mutual_information",
      [](const DoubleArray& x, const DoubleArray& y, std::size_t k) {
        return ksg_mutual_information(cloud_from_array(x, "x"),
                                      cloud_from_array(y, "y"), k);
      },
      py::arg("x"), py::arg("y"), py::arg("k") = 5);

  m.def(
      "ksg_conditional_mi",
      [](const DoubleArray& x, const DoubleArray& y,
         const std::optional<DoubleArray>& z, std::size_t k) {
        SampleCloud zc;
        if (z.has_value()) {
          zc = cloud_from_array(*z, "z");
        } else {
          zc.n = static_cast<std::size_t>(x.shape(0));
          zc.d = 0;
          zc.points = Matrix(zc.n, 0);
        }
        return ksg_conditional_mi(cloud_from_array(x, "x"),
                                  cloud_from_array(y, "y"), zc, k);
      },
      py::arg("x"), py::arg("y"), py::arg("z") = py::none(),
      py::arg("k") = 3);

  m.def(
      "knn_kl_divergence",
      [](const DoubleArray& p, const DoubleArray& q, std::size_t k) {
        return knn_kl_divergence(cloud_from_array(p, "p"),
                                 cloud_from_array(q, "q"), k);
      },
      py::arg("p"), py::arg("q"), py::arg("k") = 5);

  m.def(
      "auc_roc",
      [](const DoubleArray& scores, const DoubleArray& labels) {
        std::vector<double> s(scores.data(), scores.data() + scores.size());
        std::vector<std::uint8_t> l(labels.size());
        for (py::ssize_t i = 0; i < labels.size(); ++i) {
          l[static_cast<std::size_t>(i)] = labels.data()[i] != 0.0 ? 1 : 0;
        }
        return auc_roc(s, l);
      },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "auc_pr",
      [](const DoubleArray& scores, const DoubleArray& labels) {
        std::vector<double> s(scores.data(), scores.data() + scores.size());
        std::vector<std::uint8_t> l(labels.size());
        for (py::ssize_t i = 0; i < labels.size(); ++i) {
          l[static_cast<std::size_t>(i)] = labels.data()[i] != 0.0 ? 1 : 0;
        }
        return auc_pr(s, l);
      },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "load_csv",
      [](const std::string& path) {
        const TimeSeriesBundle bundle = load_csv(path);
        py::dict out;
        out["segments"] = segments_to_python(bundle);
        out["names"] = bundle.names;
        return out;
      },
      py::arg("path"));

  m.def(
      "normalize",
      [](const py::list& segments, std::vector<std::string> names) {
        const TimeSeriesBundle bundle =
            normalize(bundle_from_segments(segments, std::move(names)));
        return segments_to_python(bundle);
      },
      py::arg("segments"), py::arg("names") = std::vector<std::string>{},
      "Per series per dimension: subtract mean, divide by standard "
      "deviation.");

  m.attr("__version__") = "0.1.0";
}

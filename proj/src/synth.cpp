#include "minpred/synth.hpp"

#include <cmath>
#include <string>

#include "minpred/errors.hpp"

namespace minpred {

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

GroundTruthGraph sample_graph(std::size_t N, std::size_t K, std::size_t M,
                              Rng& rng, const GraphConfig& config) {
  if (N < 2) throw ConfigError("sample_graph: need N >= 2");
  if (K == 0 || M == 0) throw ConfigError("sample_graph: K, M must be >= 1");
  GroundTruthGraph graph;
  graph.N = N;
  graph.K = K;
  graph.M = M;
  graph.A.assign(N * N * K * M, 0.0);
  graph.B.assign(N * K * M, 0.0);
  graph.indicator.assign(N * N, 0);

  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t i = 0; i < N; ++i) {
      const bool nonzero = rng.uniform() < config.edge_probability;
      graph.indicator[j * N + i] = nonzero ? 1 : 0;
      if (!nonzero) continue;
      for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t m = 0; m < M; ++m) {
          const double magnitude = std::exp(
              config.lognormal_mu + config.lognormal_sigma * rng.normal());
          const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
          graph.A[((j * N + i) * K + k) * M + m] = sign * magnitude;
        }
      }
    }
  }
  for (double& b : graph.B) b = rng.uniform(-1.0, 1.0);
  return graph;
}

namespace {

TimeSeriesBundle::Segment rollout(const GroundTruthGraph& graph, std::size_t T,
                                  Rng& rng) {
  const std::size_t N = graph.N;
  const std::size_t K = graph.K;
  const std::size_t M = graph.M;
  TimeSeriesBundle::Segment seg;
  seg.length = T;
  seg.values.assign(N * T * M, 0.0);

  for (std::size_t t = 0; t < std::min(K, T); ++t) {
    for (std::size_t j = 0; j < N; ++j) {
      for (std::size_t m = 0; m < M; ++m) {
        seg.at(j, t, m, M) = rng.normal();
      }
    }
  }
  for (std::size_t t = K; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t m = 0; m < M; ++m) {
        double pre = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
          if (!graph.edge(j, i)) continue;
          for (std::size_t k = 0; k < K; ++k) {
            pre += graph.a(j, i, k, m) *
                   std::tanh(graph.b(j, k, m) * seg.at(j, t - K + k, m, M));
          }
        }
        const double value = softplus(pre) + rng.normal();
        if (!std::isfinite(value)) {
          throw NumericalError("generate: non-finite state at step " +
                               std::to_string(t));
        }
        seg.at(i, t, m, M) = value;
      }
    }
  }
  return seg;
}

}  // namespace

TimeSeriesBundle generate(const GroundTruthGraph& graph, std::size_t n_series,
                          std::size_t T, Rng* rng, std::uint64_t seed) {
  if (n_series == 0) throw ConfigError("generate: n_series must be >= 1");
  if (T <= graph.K) throw ConfigError("generate: T must exceed K");
  std::uint64_t base_seed = seed;
  if (rng != nullptr) base_seed = rng->next_u64();

  TimeSeriesBundle bundle;
  bundle.n_series = graph.N;
  bundle.M = graph.M;
  bundle.seed = base_seed;
  bundle.generator = "synthetic";
  for (std::size_t j = 0; j < graph.N; ++j) {
    bundle.names.push_back("x" + std::to_string(j + 1));
  }
  bundle.segments.resize(n_series);
  for (std::size_t s = 0; s < n_series; ++s) {
    Rng seg_rng(Rng::derive(base_seed, seed_tag::kRollout + s));
    bundle.segments[s] = rollout(graph, T, seg_rng);
  }
  bundle.graph = graph;
  return bundle;
}

ProbeKind probe_kind_from_name(const std::string& name) {
  if (name == "independent-pair") return ProbeKind::kIndependentPair;
  if (name == "copy-pair") return ProbeKind::kCopyPair;
  if (name == "linear-chain-3") return ProbeKind::kLinearChain3;
  if (name == "gaussian-linear-chain") return ProbeKind::kGaussianLinearChain;
  throw ConfigError("unknown probe system kind: " + name);
}

TimeSeriesBundle make_probe_system(ProbeKind kind, std::size_t T, Rng& rng,
                                   const GaussianChainParams& chain) {
  if (T < 3) throw ConfigError("make_probe_system: T too small");
  TimeSeriesBundle bundle;
  bundle.M = 1;
  bundle.generator = "probe";
  TimeSeriesBundle::Segment seg;

  auto set_indicator = [&](std::size_t N,
                           std::initializer_list<std::pair<int, int>> edges) {
    GroundTruthGraph graph;
    graph.N = N;
    graph.K = 1;
    graph.M = 1;
    graph.A.assign(N * N, 0.0);
    graph.B.assign(N, 1.0);
    graph.indicator.assign(N * N, 0);
    for (auto [j, i] : edges) {
      graph.indicator[static_cast<std::size_t>(j) * N +
                      static_cast<std::size_t>(i)] = 1;
      graph.A[static_cast<std::size_t>(j) * N + static_cast<std::size_t>(i)] =
          1.0;
    }
    bundle.graph = graph;
  };

  switch (kind) {
    case ProbeKind::kIndependentPair: {
      bundle.n_series = 2;
      bundle.names = {"x1", "x2"};
      seg.length = T;
      seg.values.assign(2 * T, 0.0);
      for (std::size_t t = 0; t < T; ++t) {
        seg.at(0, t, 0, 1) = rng.normal();
        seg.at(1, t, 0, 1) = rng.normal();
      }
      set_indicator(2, {});
      break;
    }
    case ProbeKind::kCopyPair: {
      bundle.n_series = 2;
      bundle.names = {"x1", "x2"};
      seg.length = T;
      seg.values.assign(2 * T, 0.0);
      for (std::size_t t = 0; t < T; ++t) {
        seg.at(0, t, 0, 1) = rng.normal();
        const double prev = t > 0 ? seg.at(0, t - 1, 0, 1) : rng.normal();
        seg.at(1, t, 0, 1) = prev + 0.1 * rng.normal();
      }
      set_indicator(2, {{0, 1}});
      break;
    }
    case ProbeKind::kLinearChain3: {
      bundle.n_series = 3;
      bundle.names = {"x1", "x2", "x3"};
      seg.length = T;
      seg.values.assign(3 * T, 0.0);
      for (std::size_t t = 0; t < T; ++t) {
        seg.at(0, t, 0, 1) = rng.normal();
        const double p1 = t > 0 ? seg.at(0, t - 1, 0, 1) : rng.normal();
        seg.at(1, t, 0, 1) = p1 + rng.normal();
        const double p2 =
            t > 0 ? seg.at(1, t - 1, 0, 1) : std::sqrt(2.0) * rng.normal();
        seg.at(2, t, 0, 1) = p2 + rng.normal();
      }
      set_indicator(3, {{0, 1}, {1, 2}});
      break;
    }
    case ProbeKind::kGaussianLinearChain: {
      bundle.n_series = 3;
      bundle.names = {"x1", "x2", "x3"};
      seg.length = T;
      seg.values.assign(3 * T, 0.0);
      const double sx = std::sqrt(chain.sigma_x);
      const double ox = std::sqrt(chain.omega_x);
      const double oy = std::sqrt(chain.omega_y);
      for (std::size_t t = 0; t < T; ++t) {
        seg.at(0, t, 0, 1) = sx * rng.normal();
        const double p1 = t > 0 ? seg.at(0, t - 1, 0, 1) : sx * rng.normal();
        seg.at(1, t, 0, 1) = p1 + ox * rng.normal();
        const double p2 =
            t > 0 ? seg.at(1, t - 1, 0, 1)
                  : std::sqrt(chain.sigma_x + chain.omega_x) * rng.normal();
        seg.at(2, t, 0, 1) = p2 + oy * rng.normal();
      }
      set_indicator(3, {{0, 1}, {1, 2}});
      break;
    }
  }
  bundle.segments.push_back(std::move(seg));
  return bundle;
}

}  // namespace minpred

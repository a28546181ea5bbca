#include "minpred/noise.hpp"

#include <algorithm>
#include <cmath>

#include "minpred/errors.hpp"

namespace minpred {

namespace {
// exp(log_chi) above this would be astronomically large; the bound is 0 to
// machine precision long before.
constexpr double kLogChiCeil = 700.0;
}  // namespace

NoiseAmplitudes NoiseAmplitudes::create(std::size_t n_series, std::size_t dims,
                                        std::span<const double> stds,
                                        double chi_init, bool shared) {
  if (stds.size() != n_series * dims) {
    throw ShapeError("NoiseAmplitudes: std vector size mismatch");
  }
  if (chi_init <= 0.0) {
    throw ConfigError("NoiseAmplitudes: initial chi must be positive");
  }
  for (double s : stds) {
    if (!(s > 0.0)) throw DataError("NoiseAmplitudes: std entries must be > 0");
  }
  NoiseAmplitudes amps;
  amps.n_series = n_series;
  amps.dims_per_series = dims;
  amps.shared = shared;
  amps.stds.assign(stds.begin(), stds.end());
  amps.log_chi.assign(shared ? n_series : n_series * dims,
                      std::log(chi_init));
  return amps;
}

double NoiseAmplitudes::chi(std::size_t j, std::size_t l) const {
  const double raw =
      shared ? log_chi[j] : log_chi[j * dims_per_series + l];
  return std::max(std::exp(raw), chi_floor);
}

double NoiseAmplitudes::eta(std::size_t j, std::size_t l) const {
  return chi(j, l) * stds[j * dims_per_series + l];
}

bool NoiseAmplitudes::at_floor(std::size_t j) const {
  const double limit = std::log(chi_floor);
  if (shared) return log_chi[j] <= limit;
  for (std::size_t l = 0; l < dims_per_series; ++l) {
    if (log_chi[j * dims_per_series + l] <= limit) return true;
  }
  return false;
}

void NoiseAmplitudes::clamp() {
  const double lo = std::log(chi_floor);
  for (double& v : log_chi) v = std::clamp(v, lo, kLogChiCeil);
}

bool BoundValue::any_capped() const {
  return std::any_of(capped.begin(), capped.end(),
                     [](std::uint8_t c) { return c != 0; });
}

BoundValue mi_upper_bound(const NoiseAmplitudes& amps) {
  BoundValue bound;
  bound.contributions.resize(amps.n_series, 0.0);
  bound.capped.resize(amps.n_series, 0);
  for (std::size_t j = 0; j < amps.n_series; ++j) {
    double contribution = 0.0;
    if (amps.shared) {
      const double c = amps.chi(j, 0);
      contribution = 0.5 * static_cast<double>(amps.dims_per_series) *
                     std::log1p(1.0 / (c * c));
    } else {
      for (std::size_t l = 0; l < amps.dims_per_series; ++l) {
        const double c = amps.chi(j, l);
        contribution += 0.5 * std::log1p(1.0 / (c * c));
      }
    }
    bound.contributions[j] = contribution;
    bound.capped[j] = amps.at_floor(j) ? 1 : 0;
    bound.total += contribution;
  }
  return bound;
}

std::vector<double> mi_upper_bound_grad(const NoiseAmplitudes& amps) {
  std::vector<double> grad(amps.chi_count(), 0.0);
  if (amps.shared) {
    for (std::size_t j = 0; j < amps.n_series; ++j) {
      const double c = amps.chi(j, 0);
      grad[j] = -static_cast<double>(amps.dims_per_series) / (c * c + 1.0);
    }
  } else {
    for (std::size_t j = 0; j < amps.n_series; ++j) {
      for (std::size_t l = 0; l < amps.dims_per_series; ++l) {
        const double c = amps.chi(j, l);
        grad[j * amps.dims_per_series + l] = -1.0 / (c * c + 1.0);
      }
    }
  }
  return grad;
}

void corrupt_with_eps(std::span<const double> x, const NoiseAmplitudes& amps,
                      std::span<const double> eps, std::span<double> out) {
  const std::size_t total = amps.total_dims();
  if (x.size() != total || eps.size() != total || out.size() != total) {
    throw ShapeError("corrupt_with_eps: flattened window size mismatch");
  }
  for (std::size_t j = 0; j < amps.n_series; ++j) {
    const std::size_t base = j * amps.dims_per_series;
    for (std::size_t l = 0; l < amps.dims_per_series; ++l) {
      out[base + l] = x[base + l] + amps.eta(j, l) * eps[base + l];
    }
  }
}

CorruptResult corrupt(std::span<const double> x, const NoiseAmplitudes& amps,
                      Rng& rng) {
  CorruptResult result;
  result.eps.resize(amps.total_dims());
  for (double& e : result.eps) e = rng.normal();
  result.corrupted.resize(amps.total_dims());
  corrupt_with_eps(x, amps, result.eps, result.corrupted);
  return result;
}

}  // namespace minpred

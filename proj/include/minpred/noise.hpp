#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "minpred/rng.hpp"

namespace minpred {

// Learnable Gaussian input corruption x~ = x + eta .* eps with one relative
// amplitude chi per input series (optionally one per dimension). Amplitudes
// are stored in the log domain so positivity needs no projection; the
// absolute amplitude is eta_{j,l} = chi_j * std_{j,l}, with the per-dimension
// standard deviations frozen at dataset construction.
struct NoiseAmplitudes {
  std::size_t n_series = 0;
  std::size_t dims_per_series = 0;  // K * M
  bool shared = true;               // chi shared across a series' dimensions
  std::vector<double> log_chi;      // n_series (shared) or n_series * dims
  std::vector<double> stds;         // n_series * dims, > 0, frozen
  double chi_floor = 1e-6;

  static NoiseAmplitudes create(std::size_t n_series, std::size_t dims,
                                std::span<const double> stds, double chi_init,
                                bool shared = true);

  std::size_t total_dims() const { return n_series * dims_per_series; }
  std::size_t chi_count() const { return log_chi.size(); }

  // Floored relative amplitude for (series j, dimension l within series).
  double chi(std::size_t j, std::size_t l) const;
  double eta(std::size_t j, std::size_t l) const;
  // True when the stored value sits at or below the floor.
  bool at_floor(std::size_t j) const;

  // Clamp log-amplitudes into [log(chi_floor), log-overflow guard].
  void clamp();
};

// Per-series contributions (nats) of the Gaussian-channel upper bound on
// I(x~; x); contribution_j = 1/2 sum_l log(1 + 1/chi_{j,l}^2). The bound is a
// function of the relative amplitudes only, so it is bit-invariant under
// affine rescaling of the underlying data at fixed chi.
struct BoundValue {
  std::vector<double> contributions;
  double total = 0.0;
  std::vector<std::uint8_t> capped;  // contribution computed at the chi floor

  bool any_capped() const;
};

BoundValue mi_upper_bound(const NoiseAmplitudes& amps);

// d(total)/d(log_chi), aligned with the log_chi layout. For shared
// amplitudes: dims_per_series * (-1 / (chi_j^2 + 1)).
std::vector<double> mi_upper_bound_grad(const NoiseAmplitudes& amps);

// Deterministic core: corrupted = x + eta .* eps.
void corrupt_with_eps(std::span<const double> x, const NoiseAmplitudes& amps,
                      std::span<const double> eps, std::span<double> out);

struct CorruptResult {
  std::vector<double> corrupted;
  std::vector<double> eps;
};

// Fresh eps ~ N(0, I) per call; eps is returned so the exact gradient path
// through eta can be formed (d x~ / d eta_{j,l} = eps_{j,l}).
CorruptResult corrupt(std::span<const double> x, const NoiseAmplitudes& amps,
                      Rng& rng);

}  // namespace minpred

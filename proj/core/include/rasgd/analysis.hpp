#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rasgd/pipeline.hpp"

namespace rasgd {

/// Parameters of one Monte Carlo MSE evaluation point.
struct MseScenario {
  Scheme scheme = Scheme::RausNoncoherent;
  int devices = 500;     // K
  int minibatch = 10;    // K_bar (scheduled schemes)
  int dim = 80;          // L
  int parts = 10;        // D
  int antennas = 100;    // N
  double total_p = 1.0;  // P
  double n0 = 0.3981071705534972;  // 4 dB SNR at P = 1
  double sigma2 = 0.0;
  double v_max = 1.0;
  // Pin every subvector norm at its cap instead of drawing it uniformly
  // below; makes the frozen-norm closed forms exactly linear in 1/K.
  bool norms_at_cap = false;
};

/* Gradient population frozen for a Monte Carlo run: full vectors for the
 * mean-targeting schemes plus cached per-subvector samplers for the
 * random-access pipeline.  Subvector norms are drawn uniformly inside
 * [0, vbar) so no access probability ever clamps and the closed forms are
 * exact for the frozen norms. */
struct FrozenPopulation {
  PoolLayout layout;
  std::vector<std::vector<double>> gradients;  // K full vectors
  std::vector<double> norms;                   // ||v_k||
  std::vector<double> pool_norms;              // K x D, row-major
  std::vector<CodewordSampler> samplers;       // K x D, row-major
  std::vector<double> mean;                    // population mean g
  double mean_norm_sq = 0.0;                   // ||g||^2
  double mean_sq_norm = 0.0;                   // (1/K) sum ||v_k||^2

  int devices() const { return static_cast<int>(gradients.size()); }
  DevicePoolView view(int k, int d) const;
};

FrozenPopulation freeze_population(const MseScenario& scenario, std::uint64_t seed);

/// Infinite-antenna random-access MSE for one pool of frozen norms:
/// (1/K^2) sum_k (L vbar - ||v_k||) ||v_k||.  Norms must respect vbar.
double theoretical_mse_raus_asymptotic(std::span<const double> norms, int dim, double vbar,
                                       int devices);

/// Norm-free bound L vbar^2 / K on the per-pool figure above.
double theoretical_mse_raus_bound(int dim, double vbar, int devices);

/// Analog-baseline MSE: (1/K_bar) (N0 / (2P) + (1/K) sum ||v_k||^2 - ||g||^2).
double theoretical_mse_yang(std::span<const double> norms, double mean_norm_sq, int k_bar,
                            double total_p, double n0);

/// Bound on E||g_hat||^2 for the noncoherent estimator with gradient norms
/// at most grad_bound: L (1 + 2/N) (U P / V + M N0 / K)^2 (V / P)^2.
double second_moment_bound_noncoherent(int dim, int antennas, double grad_bound, double total_p,
                                       int codebook_size, double n0, double v_max, int devices);

/// Closed-form MSE for a frozen population under the scenario's scheme
/// (asymptotic reference for the noncoherent path).
double theoretical_mse_population(const MseScenario& scenario, const FrozenPopulation& pop);

struct MseReport {
  Scheme scheme = Scheme::RausNoncoherent;
  double theoretical = 0.0;
  double empirical = 0.0;
  double stderr_of_mean = 0.0;
  double relative_gap = 0.0;  // |empirical - theoretical| / max(theoretical, 1e-12)
  long trials = 0;
  std::uint64_t clamped = 0;
};

/// Monte Carlo replay of the full upload pipeline against the population
/// mean (the scheduled baseline redraws its minibatch every trial).
/// Freezes the population from (seed, population stream) internally.
MseReport empirical_mse(const MseScenario& scenario, long trials, std::uint64_t seed);

/// Same, against a caller-frozen population (shared across sweep points).
MseReport empirical_mse(const MseScenario& scenario, const FrozenPopulation& pop, long trials,
                        std::uint64_t seed);

struct SecondMomentReport {
  double empirical = 0.0;
  double stderr_of_mean = 0.0;
  double bound = 0.0;
  long trials = 0;
};

/// Monte Carlo E||g_hat||^2 for the noncoherent pipeline next to its bound.
SecondMomentReport empirical_second_moment(const MseScenario& scenario, double grad_bound,
                                           long trials, std::uint64_t seed);

}  // namespace rasgd

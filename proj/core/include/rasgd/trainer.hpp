#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rasgd/pipeline.hpp"

namespace rasgd {

/// Device-local data.  Labels are +-1 for the classifier task and empty
/// for the quadratic task, where x_k is the device's target point.
struct DevicePopulation {
  std::vector<std::vector<double>> x;
  std::vector<int> label;

  int devices() const { return static_cast<int>(x.size()); }
  int feature_dim() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
};

/// Two Gaussian clouds at +-separation/2 along a random unit direction.
DevicePopulation make_svc_population(int devices, int feature_dim, double separation,
                                     std::uint64_t seed);

/// Targets x_k = center + spread * standard normal.
DevicePopulation make_quadratic_population(int devices, std::span<const double> center,
                                           double spread, std::uint64_t seed);

enum class Task { Quadratic, HingeSvc };

struct TrainConfig {
  Task task = Task::HingeSvc;
  Scheme scheme = Scheme::RausNoncoherent;
  int rounds = 2000;      // T
  double mu = 0.1;
  double lambda = 1e-3;   // classifier regularizer
  int parts = 8;          // D feature subvectors
  int minibatch = 10;     // K_bar for the scheduled schemes
  double total_p = 1.0;
  double n0 = 0.1;
  double sigma2 = 0.0;
  int antennas = 100;
  double v_max = 0.0;     // <= 0: classifier computes it from the data
  std::uint64_t seed = 1;
};

struct TrainTrace {
  std::vector<double> cost;            // f(w_t), t = 1..T
  std::vector<double> dist_sq;         // ||w_t - w*||^2 (quadratic task only)
  std::vector<long long> cum_symbols;  // cumulative channel use after round t
  std::uint64_t clamped = 0;
  double v_max = 0.0;                  // resolved full-gradient bound
  std::vector<double> w;               // final iterate
};

/// Runs T rounds of distributed SGD from w = 0.  Identical (config,
/// population) pairs produce identical traces on any schedule: every draw
/// comes from a substream keyed by (seed, round, device).
TrainTrace train(const TrainConfig& config, const DevicePopulation& population);

/* Per-device objectives.
 * Classifier, w = [weights..., offset]:
 *   C_k(w) = max(0, 1 - l_k (w.x_k - w0)) + lambda ||weights||^2
 * with the flat-side subgradient at the hinge kink.
 * Quadratic: f_k(w) = 0.5 ||w - x_k||^2. */
void hinge_gradient(std::span<const double> w, std::span<const double> x, int label,
                    double lambda, std::span<double> out);
double hinge_cost(std::span<const double> w, const DevicePopulation& population, double lambda);

void quadratic_gradient(std::span<const double> w, std::span<const double> x,
                        std::span<double> out);
double quadratic_cost(std::span<const double> w, const DevicePopulation& population);

/// Steady-state bound mu sigma_bar^2 / ((2 - mu kappa) kappa) on
/// E||w - w*||^2 for a kappa-smooth/strongly-convex objective driven by
/// unbiased estimates with MSE at most sigma_bar^2.  Requires mu < 2/kappa.
double noise_ball_bound(double mu, double kappa, double sigma_bar_sq);

/// Classifier gradient-norm bound used for the default v_max:
/// 2 * (max_k sqrt(||x_k||^2 + 1) + 2 lambda max_k ||x_k||).
double default_v_max(const DevicePopulation& population, double lambda);

}  // namespace rasgd

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "rasgd/airlink.hpp"
#include "rasgd/quantizer.hpp"

namespace rasgd {

enum class Scheme {
  RausAwgn,
  RausNoncoherent,
  RausAsymptotic,
  Yang,
  TdmaOracle,
};

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

/// Slot-timing knobs for the round_time evaluator.
struct TimingParams {
  double tau_pilot = 0.0;  // pilot symbols per scheduled device (analog baseline)
  double c = 1.0;          // analog symbols per gradient entry

  static TimingParams defaults_for(int dim) {
    return {0.1 * static_cast<double>(dim), 1.0};
  }
};

/// Symbols one communication round occupies.
///   digital per-device uploads: K_bar * bits_required(L, D)
///   random access:              2L, independent of participation
///   analog baseline:            K_bar * tau_pilot + c * L
long long round_time(Scheme s, int k_bar, int dim, int parts, const TimingParams& timing);

/* Subvector layout of one upload: pool d carries a length dims[d] piece of
 * the gradient with norm bound vbar[d].  A plain MPT split is D equal pools
 * with bound v_max / sqrt(D); the classifier appends a 1-dimensional pool
 * for the offset term. */
struct PoolLayout {
  std::vector<int> dims;
  std::vector<double> vbar;

  int pools() const { return static_cast<int>(dims.size()); }
  int total_dim() const;
  int offset_of(int pool) const;  // start of this pool's slice in the full vector

  static PoolLayout uniform(int dim, int parts, double v_max);
  PoolLayout& append_pool(int dim, double bound);
};

/// Estimate of the population (or minibatch) mean gradient for one round.
struct AggregateEstimate {
  std::vector<double> g_hat;
  Scheme scheme = Scheme::RausAsymptotic;
  long long round_time_symbols = 0;
};

/// Unfaded random-access estimate from scalar correlator outputs:
/// per pool, g_hat = vbar / (sqrt(P) K) * sum_m z_m c_m.
AggregateEstimate raus_estimate_awgn(const std::vector<std::vector<double>>& pool_outputs,
                                     const PoolLayout& layout, int devices, double total_p);

/// Noncoherent estimate from per-antenna energies:
/// per pool, g_hat = vbar / (P K) * sum_m (||z_m||^2 / N) c_m.
/// Requires a zero codeword sum (the cross-polytope codebook has one);
/// that is what cancels the common P A_m + N0 energy offset.
AggregateEstimate raus_estimate_noncoherent(const std::vector<VectorCorrelatorOutputs>& pool_outputs,
                                            const PoolLayout& layout, int devices, double total_p);

/// Infinite-antenna limit: g_hat = vbar / K * sum_k beta_k c_{m(k)} per pool.
AggregateEstimate raus_estimate_asymptotic(const std::vector<TransmissionRound>& rounds,
                                           const PoolLayout& layout, int devices);

/// Analog over-the-air baseline: minibatch mean plus receiver noise,
/// g_hat = mean + n / sqrt(P N K_bar) with n entries N(0, N0/2) over all
/// L gradient entries.
AggregateEstimate yang_estimate(const std::vector<const std::vector<double>*>& minibatch,
                                double total_p, int antennas, double n0,
                                const TimingParams& timing, rng::Engine& eng);

/// Error-free digital benchmark: the mean of the quantized uploads.
AggregateEstimate tdma_aggregate(const std::vector<QuantizedGradient>& uploads,
                                 const PoolLayout& layout);

}  // namespace rasgd

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "rasgd/rng.hpp"

namespace rasgd {

/* Preamble pool: M mutually orthonormal sequences, realized as the
 * standard basis of R^M.  Correlating a received frame against the pool
 * is then exactly a gather, and synthesis from correlator outputs is
 * lossless. */
class PreamblePool {
 public:
  explicit PreamblePool(int size);

  int size() const { return size_; }
  std::vector<double> preamble(int m) const;

  /// z_m = <p_m, frame> for every m.
  std::vector<double> correlate(const std::vector<double>& frame) const;
  /// frame = sum_m z_m p_m.
  std::vector<double> synthesize(const std::vector<double>& outputs) const;

 private:
  int size_;
};

/// Access decisions for one mini-slot: per device, whether it transmitted
/// and on which preamble.  An MPT upload is one of these per subvector.
struct TransmissionRound {
  std::vector<std::uint8_t> beta;
  std::vector<std::int32_t> preamble;

  explicit TransmissionRound(int devices = 0)
      : beta(static_cast<std::size_t>(devices), 0),
        preamble(static_cast<std::size_t>(devices), -1) {}

  int devices() const { return static_cast<int>(beta.size()); }
  void set(int k, bool transmitted, int m) {
    beta[static_cast<std::size_t>(k)] = transmitted ? 1 : 0;
    preamble[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(m);
  }
};

/// Counts access-probability clamps (norm above its bound).  Estimates
/// made from clamped rounds are biased, so callers surface this count.
struct ClampCounter {
  std::uint64_t clamped = 0;
};

/// Bernoulli access decision with probability norm / v_max.
/// Norms above v_max clamp to certain transmission and are counted.
bool transmit_decision(double norm, double v_max, rng::Engine& eng,
                       ClampCounter* clamps = nullptr);

/// Unfaded correlator outputs: z_m = sqrt(P) * |{k active on m}| + n_m,
/// n_m i.i.d. N(0, sigma2).
std::vector<double> awgn_round(const TransmissionRound& round, const PreamblePool& pool,
                               double total_p, double sigma2, rng::Engine& eng);

/// Channel-inversion gain sqrt(P) h* / |h|^2 with the power gate |phi|^2 <= p_max.
struct CoherentGain {
  std::complex<double> phi{0.0, 0.0};
  bool permitted = false;
};

CoherentGain coherent_gain(std::complex<double> h, double total_p, double p_max);

/// Forces beta_k = 0 for active devices whose inversion gain violates the
/// power gate.  Composed with awgn_round this is the coherent fading slot:
/// permitted devices arrive with amplitude exactly sqrt(P).
/// Returns the number of devices gated off.
int apply_power_gating(TransmissionRound& round, std::span<const std::complex<double>> h,
                       double total_p, double p_max);

/// One device's N-antenna channel vector, entries i.i.d. CSCG(0, alpha).
std::vector<std::complex<double>> sample_channel(double alpha, int antennas, rng::Engine& eng);

/* Per-device fading state for one mini-slot.  Transmit power obeys
 * power[k] * alpha[k] = P, so every effective channel sqrt(P_k) h_k is
 * CSCG(0, P).  Rows are materialized lazily: only devices that transmit
 * need a channel, and noncoherent_round enforces that. */
class ChannelRealization {
 public:
  ChannelRealization(int devices, int antennas, double total_p);

  /// Sets alpha_k (and power_k = P / alpha_k) for every device.
  void set_alpha(std::span<const double> alphas);
  void set_uniform_alpha(double alpha);

  /// Draws h_k for one device from `eng`.
  void sample_row(int k, rng::Engine& eng);
  /// Invalidates all rows (reuse of the buffer for a fresh slot).
  void clear_sampled();
  /// Draws every row; the plain factory used by tests.
  static ChannelRealization sample(std::span<const double> alphas, double total_p,
                                   int antennas, rng::Engine& eng);

  int devices() const { return devices_; }
  int antennas() const { return antennas_; }
  double total_p() const { return total_p_; }
  double alpha(int k) const { return alpha_[static_cast<std::size_t>(k)]; }
  double power(int k) const { return power_[static_cast<std::size_t>(k)]; }
  bool sampled(int k) const { return sampled_[static_cast<std::size_t>(k)] != 0; }
  std::span<const std::complex<double>> row(int k) const;

 private:
  int devices_;
  int antennas_;
  double total_p_;
  std::vector<double> alpha_;
  std::vector<double> power_;
  std::vector<std::uint8_t> sampled_;
  std::vector<std::complex<double>> h_;  // devices x antennas, row-major
};

/// Vector correlator outputs: one length-N row per preamble.
struct VectorCorrelatorOutputs {
  int preambles = 0;
  int antennas = 0;
  std::vector<std::complex<double>> z;  // preambles x antennas, row-major

  void reset(int m, int n) {
    preambles = m;
    antennas = n;
    z.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(n), {0.0, 0.0});
  }
  std::span<const std::complex<double>> row(int m) const {
    return {z.data() + static_cast<std::size_t>(m) * static_cast<std::size_t>(antennas),
            static_cast<std::size_t>(antennas)};
  }
  std::span<std::complex<double>> row(int m) {
    return {z.data() + static_cast<std::size_t>(m) * static_cast<std::size_t>(antennas),
            static_cast<std::size_t>(antennas)};
  }
};

/// Noncoherent multi-antenna reception without channel state:
/// z_m = sum_{k active on m} sqrt(P_k) h_k + n_m,  n_m CSCG(0, N0 I).
/// Every transmitting device must have a sampled channel row.
VectorCorrelatorOutputs noncoherent_round(const TransmissionRound& round,
                                          const PreamblePool& pool,
                                          const ChannelRealization& channels,
                                          double total_p, double n0, rng::Engine& eng);

/// Buffer-reusing form of noncoherent_round for Monte Carlo loops.
void noncoherent_round_into(const TransmissionRound& round, const PreamblePool& pool,
                            const ChannelRealization& channels, double total_p, double n0,
                            rng::Engine& eng, VectorCorrelatorOutputs& out);

}  // namespace rasgd

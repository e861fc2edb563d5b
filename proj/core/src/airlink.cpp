#include "rasgd/airlink.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rasgd {

PreamblePool::PreamblePool(int size) : size_(size) {
  if (size < 1) throw std::invalid_argument("PreamblePool: size must be >= 1");
}

std::vector<double> PreamblePool::preamble(int m) const {
  if (m < 0 || m >= size_) throw std::invalid_argument("PreamblePool: preamble index out of range");
  std::vector<double> p(static_cast<std::size_t>(size_), 0.0);
  p[static_cast<std::size_t>(m)] = 1.0;
  return p;
}

std::vector<double> PreamblePool::correlate(const std::vector<double>& frame) const {
  if (static_cast<int>(frame.size()) != size_) {
    throw std::invalid_argument("PreamblePool: frame length does not match pool size");
  }
  std::vector<double> z(static_cast<std::size_t>(size_), 0.0);
  for (int m = 0; m < size_; ++m) {
    const auto p = preamble(m);
    double acc = 0.0;
    for (int i = 0; i < size_; ++i) acc += p[static_cast<std::size_t>(i)] * frame[static_cast<std::size_t>(i)];
    z[static_cast<std::size_t>(m)] = acc;
  }
  return z;
}

std::vector<double> PreamblePool::synthesize(const std::vector<double>& outputs) const {
  if (static_cast<int>(outputs.size()) != size_) {
    throw std::invalid_argument("PreamblePool: output length does not match pool size");
  }
  std::vector<double> frame(static_cast<std::size_t>(size_), 0.0);
  for (int m = 0; m < size_; ++m) {
    const auto p = preamble(m);
    for (int i = 0; i < size_; ++i) {
      frame[static_cast<std::size_t>(i)] += outputs[static_cast<std::size_t>(m)] * p[static_cast<std::size_t>(i)];
    }
  }
  return frame;
}

bool transmit_decision(double norm, double v_max, rng::Engine& eng, ClampCounter* clamps) {
  if (v_max <= 0.0) throw std::invalid_argument("transmit_decision: v_max must be positive");
  if (norm < 0.0) throw std::invalid_argument("transmit_decision: negative norm");
  if (norm == 0.0) return false;
  double p = norm / v_max;
  if (p > 1.0) {
    p = 1.0;
    if (clamps != nullptr) ++clamps->clamped;
  }
  return rng::uniform01(eng) < p;
}

std::vector<double> awgn_round(const TransmissionRound& round, const PreamblePool& pool,
                               double total_p, double sigma2, rng::Engine& eng) {
  if (total_p <= 0.0) throw std::invalid_argument("awgn_round: P must be positive");
  if (sigma2 < 0.0) throw std::invalid_argument("awgn_round: sigma2 must be nonnegative");
  const int m_count = pool.size();
  // Standard-basis preambles: correlating the superposed frame gathers its
  // entries, so the outputs can be accumulated directly.
  std::vector<double> z(static_cast<std::size_t>(m_count), 0.0);
  const double amp = std::sqrt(total_p);
  for (int k = 0; k < round.devices(); ++k) {
    if (!round.beta[static_cast<std::size_t>(k)]) continue;
    const int m = round.preamble[static_cast<std::size_t>(k)];
    if (m < 0 || m >= m_count) {
      throw std::invalid_argument("awgn_round: device " + std::to_string(k) +
                                  " transmits on preamble outside the pool");
    }
    z[static_cast<std::size_t>(m)] += amp;
  }
  if (sigma2 > 0.0) {
    const double sd = std::sqrt(sigma2);
    for (auto& v : z) v += sd * rng::normal01(eng);
  }
  return z;
}

CoherentGain coherent_gain(std::complex<double> h, double total_p, double p_max) {
  if (total_p <= 0.0) throw std::invalid_argument("coherent_gain: P must be positive");
  if (p_max <= 0.0) throw std::invalid_argument("coherent_gain: p_max must be positive");
  CoherentGain g;
  const double h2 = std::norm(h);
  if (h2 == 0.0) return g;  // no inversion for a dead channel
  g.phi = std::sqrt(total_p) * std::conj(h) / h2;
  g.permitted = std::norm(g.phi) <= p_max;
  if (!g.permitted) g.phi = {0.0, 0.0};
  return g;
}

int apply_power_gating(TransmissionRound& round, std::span<const std::complex<double>> h,
                       double total_p, double p_max) {
  if (static_cast<int>(h.size()) != round.devices()) {
    throw std::invalid_argument("apply_power_gating: channel count does not match devices");
  }
  int gated = 0;
  for (int k = 0; k < round.devices(); ++k) {
    if (!round.beta[static_cast<std::size_t>(k)]) continue;
    if (!coherent_gain(h[static_cast<std::size_t>(k)], total_p, p_max).permitted) {
      round.beta[static_cast<std::size_t>(k)] = 0;
      ++gated;
    }
  }
  return gated;
}

std::vector<std::complex<double>> sample_channel(double alpha, int antennas, rng::Engine& eng) {
  if (alpha <= 0.0) throw std::invalid_argument("sample_channel: alpha must be positive");
  if (antennas < 1) throw std::invalid_argument("sample_channel: antennas must be >= 1");
  std::vector<std::complex<double>> h(static_cast<std::size_t>(antennas));
  rng::fill_cscg(eng, h, alpha);
  return h;
}

ChannelRealization::ChannelRealization(int devices, int antennas, double total_p)
    : devices_(devices),
      antennas_(antennas),
      total_p_(total_p),
      alpha_(static_cast<std::size_t>(devices), 1.0),
      power_(static_cast<std::size_t>(devices), total_p),
      sampled_(static_cast<std::size_t>(devices), 0),
      h_(static_cast<std::size_t>(devices) * static_cast<std::size_t>(antennas)) {
  if (devices < 0) throw std::invalid_argument("ChannelRealization: negative device count");
  if (antennas < 1) throw std::invalid_argument("ChannelRealization: antennas must be >= 1");
  if (total_p <= 0.0) throw std::invalid_argument("ChannelRealization: P must be positive");
}

void ChannelRealization::set_alpha(std::span<const double> alphas) {
  if (static_cast<int>(alphas.size()) != devices_) {
    throw std::invalid_argument("ChannelRealization: alpha count does not match devices");
  }
  for (int k = 0; k < devices_; ++k) {
    const double a = alphas[static_cast<std::size_t>(k)];
    if (a <= 0.0) throw std::invalid_argument("ChannelRealization: alpha must be positive");
    alpha_[static_cast<std::size_t>(k)] = a;
    power_[static_cast<std::size_t>(k)] = total_p_ / a;  // keeps P_k alpha_k = P
  }
}

void ChannelRealization::set_uniform_alpha(double alpha) {
  const std::vector<double> a(static_cast<std::size_t>(devices_), alpha);
  set_alpha(a);
}

void ChannelRealization::clear_sampled() {
  std::fill(sampled_.begin(), sampled_.end(), static_cast<std::uint8_t>(0));
}

void ChannelRealization::sample_row(int k, rng::Engine& eng) {
  auto* base = h_.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(antennas_);
  rng::fill_cscg(eng, {base, static_cast<std::size_t>(antennas_)}, alpha_[static_cast<std::size_t>(k)]);
  sampled_[static_cast<std::size_t>(k)] = 1;
}

ChannelRealization ChannelRealization::sample(std::span<const double> alphas, double total_p,
                                              int antennas, rng::Engine& eng) {
  ChannelRealization c(static_cast<int>(alphas.size()), antennas, total_p);
  c.set_alpha(alphas);
  for (int k = 0; k < c.devices(); ++k) c.sample_row(k, eng);
  return c;
}

std::span<const std::complex<double>> ChannelRealization::row(int k) const {
  return {h_.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(antennas_),
          static_cast<std::size_t>(antennas_)};
}

void noncoherent_round_into(const TransmissionRound& round, const PreamblePool& pool,
                            const ChannelRealization& channels, double total_p, double n0,
                            rng::Engine& eng, VectorCorrelatorOutputs& out) {
  if (channels.devices() != round.devices()) {
    throw std::invalid_argument("noncoherent_round: channel count does not match devices");
  }
  if (n0 < 0.0) throw std::invalid_argument("noncoherent_round: N0 must be nonnegative");
  const int n = channels.antennas();
  out.reset(pool.size(), n);
  if (n0 > 0.0) {
    rng::fill_cscg(eng, out.z, n0);
  }
  for (int k = 0; k < round.devices(); ++k) {
    if (!round.beta[static_cast<std::size_t>(k)]) continue;
    const int m = round.preamble[static_cast<std::size_t>(k)];
    if (m < 0 || m >= pool.size()) {
      throw std::invalid_argument("noncoherent_round: device " + std::to_string(k) +
                                  " transmits on preamble outside the pool");
    }
    if (!channels.sampled(k)) {
      throw std::invalid_argument("noncoherent_round: device " + std::to_string(k) +
                                  " transmits but has no sampled channel");
    }
    if (std::abs(channels.power(k) * channels.alpha(k) - total_p) > 1e-9 * total_p) {
      throw std::invalid_argument("noncoherent_round: P_k alpha_k != P for device " +
                                  std::to_string(k));
    }
    const double amp = std::sqrt(channels.power(k));
    const auto hk = channels.row(k);
    const auto zr = out.row(m);
    for (int i = 0; i < n; ++i) zr[static_cast<std::size_t>(i)] += amp * hk[static_cast<std::size_t>(i)];
  }
}

VectorCorrelatorOutputs noncoherent_round(const TransmissionRound& round, const PreamblePool& pool,
                                          const ChannelRealization& channels, double total_p,
                                          double n0, rng::Engine& eng) {
  VectorCorrelatorOutputs out;
  noncoherent_round_into(round, pool, channels, total_p, n0, eng, out);
  return out;
}

}  // namespace rasgd

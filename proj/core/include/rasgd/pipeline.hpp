#pragma once

#include <cstdint>
#include <vector>

#include "rasgd/estimators.hpp"

namespace rasgd {

/* One device's view of one pool for one round.  Either a cached sampler
 * (frozen Monte Carlo populations) or the unit subvector itself (training,
 * where gradients change every round).  A silent subvector has norm 0 and
 * neither source set. */
struct DevicePoolView {
  double norm = 0.0;
  const CodewordSampler* sampler = nullptr;
  std::span<const double> unit;
};

/// K_bar distinct device indices, uniform without replacement, ascending.
std::vector<int> select_minibatch(int devices, int k_bar, rng::Engine& eng);

/* Access-decision and codeword draws for a full upload (all pools), with
 * the per-device substream contract: device k's draws come from the stream
 * (seed, round_index, k) in a fixed order, so any evaluation schedule
 * produces the same rounds. */
template <typename Access>
void draw_transmissions(std::vector<TransmissionRound>& rounds, const PoolLayout& layout,
                        int devices, std::uint64_t seed, std::uint64_t round_index,
                        Access&& access, ClampCounter* clamps) {
  const int pools = layout.pools();
  rounds.resize(static_cast<std::size_t>(pools));
  for (int d = 0; d < pools; ++d) {
    auto& r = rounds[static_cast<std::size_t>(d)];
    r.beta.assign(static_cast<std::size_t>(devices), 0);
    r.preamble.assign(static_cast<std::size_t>(devices), -1);
  }
  std::vector<CpCodebook> books;
  books.reserve(static_cast<std::size_t>(pools));
  for (int d = 0; d < pools; ++d) books.emplace_back(layout.dims[static_cast<std::size_t>(d)]);
  for (int k = 0; k < devices; ++k) {
    auto eng = rng::substream(seed, {rng::kDevice, round_index, static_cast<std::uint64_t>(k)});
    for (int d = 0; d < pools; ++d) {
      const DevicePoolView view = access(k, d);
      bool on = false;
      if (view.norm > 0.0) {
        on = transmit_decision(view.norm, layout.vbar[static_cast<std::size_t>(d)], eng, clamps);
      }
      if (on) {
        const int m = view.sampler != nullptr
                          ? view.sampler->sample(eng)
                          : quantize(view.unit, books[static_cast<std::size_t>(d)], eng);
        rounds[static_cast<std::size_t>(d)].set(k, true, m);
      }
    }
  }
}

/* Reusable simulator for the random-access upload of one round: draws the
 * transmissions, runs the configured reception path, and produces the
 * aggregation estimate.  Workspaces persist across rounds so Monte Carlo
 * loops do not allocate. */
class RausSimulator {
 public:
  RausSimulator(Scheme scheme, PoolLayout layout, int devices, double total_p,
                double n0, double sigma2, int antennas);

  const PoolLayout& layout() const { return layout_; }

  template <typename Access>
  const AggregateEstimate& round(std::uint64_t seed, std::uint64_t round_index, Access&& access,
                                 ClampCounter* clamps = nullptr) {
    draw_transmissions(rounds_, layout_, devices_, seed, round_index, access, clamps);
    receive(seed, round_index);
    return estimate_;
  }

 private:
  void receive(std::uint64_t seed, std::uint64_t round_index);

  Scheme scheme_;
  PoolLayout layout_;
  int devices_;
  double total_p_;
  double n0_;
  double sigma2_;
  int antennas_;
  std::vector<TransmissionRound> rounds_;
  std::vector<PreamblePool> pools_;
  ChannelRealization channels_;
  std::vector<VectorCorrelatorOutputs> vector_outputs_;
  std::vector<std::vector<double>> scalar_outputs_;
  AggregateEstimate estimate_;
};

/// Digital-benchmark upload: every listed device sends its quantized
/// gradient; the aggregate is their quantized mean.
template <typename Access>
AggregateEstimate simulate_tdma(const PoolLayout& layout, std::span<const int> participants,
                                std::uint64_t seed, std::uint64_t round_index, Access&& access) {
  const int pools = layout.pools();
  std::vector<CpCodebook> books;
  books.reserve(static_cast<std::size_t>(pools));
  for (int d = 0; d < pools; ++d) books.emplace_back(layout.dims[static_cast<std::size_t>(d)]);
  std::vector<QuantizedGradient> uploads;
  uploads.reserve(participants.size());
  for (const int k : participants) {
    auto eng = rng::substream(seed, {rng::kDevice, round_index, static_cast<std::uint64_t>(k)});
    QuantizedGradient q;
    q.indices.resize(static_cast<std::size_t>(pools));
    q.subvector_norms.resize(static_cast<std::size_t>(pools));
    for (int d = 0; d < pools; ++d) {
      const DevicePoolView view = access(k, d);
      q.subvector_norms[static_cast<std::size_t>(d)] = view.norm;
      int m = 0;
      if (view.norm > 0.0) {
        m = view.sampler != nullptr
                ? view.sampler->sample(eng)
                : quantize(view.unit, books[static_cast<std::size_t>(d)], eng);
      }
      q.indices[static_cast<std::size_t>(d)] = m;
    }
    uploads.push_back(std::move(q));
  }
  return tdma_aggregate(uploads, layout);
}

}  // namespace rasgd

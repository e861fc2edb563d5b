#include "rasgd/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace rasgd {

std::vector<int> select_minibatch(int devices, int k_bar, rng::Engine& eng) {
  if (k_bar < 1 || k_bar > devices) {
    throw std::invalid_argument("select_minibatch: need 1 <= K_bar <= K");
  }
  // Floyd's subset sampling: k_bar distinct values, no full permutation.
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(k_bar));
  for (int j = devices - k_bar; j < devices; ++j) {
    const auto span = static_cast<std::uint64_t>(j) + 1;
    const int t = static_cast<int>(
        static_cast<std::uint64_t>((static_cast<unsigned __int128>(eng()) * span) >> 64));
    if (std::find(chosen.begin(), chosen.end(), t) != chosen.end()) {
      chosen.push_back(j);
    } else {
      chosen.push_back(t);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

RausSimulator::RausSimulator(Scheme scheme, PoolLayout layout, int devices, double total_p,
                             double n0, double sigma2, int antennas)
    : scheme_(scheme),
      layout_(std::move(layout)),
      devices_(devices),
      total_p_(total_p),
      n0_(n0),
      sigma2_(sigma2),
      antennas_(antennas),
      channels_(devices, antennas, total_p) {
  if (scheme_ != Scheme::RausAwgn && scheme_ != Scheme::RausNoncoherent &&
      scheme_ != Scheme::RausAsymptotic) {
    throw std::invalid_argument("RausSimulator: not a random-access scheme");
  }
  if (devices_ < 1) throw std::invalid_argument("RausSimulator: K must be >= 1");
  pools_.reserve(static_cast<std::size_t>(layout_.pools()));
  for (int d = 0; d < layout_.pools(); ++d) {
    pools_.emplace_back(2 * layout_.dims[static_cast<std::size_t>(d)]);
  }
  if (scheme_ == Scheme::RausNoncoherent) {
    vector_outputs_.resize(static_cast<std::size_t>(layout_.pools()));
  } else if (scheme_ == Scheme::RausAwgn) {
    scalar_outputs_.resize(static_cast<std::size_t>(layout_.pools()));
  }
}

void RausSimulator::receive(std::uint64_t seed, std::uint64_t round_index) {
  switch (scheme_) {
    case Scheme::RausAsymptotic:
      estimate_ = raus_estimate_asymptotic(rounds_, layout_, devices_);
      return;
    case Scheme::RausAwgn: {
      for (int d = 0; d < layout_.pools(); ++d) {
        auto noise = rng::substream(seed, {rng::kNoise, round_index, static_cast<std::uint64_t>(d)});
        scalar_outputs_[static_cast<std::size_t>(d)] =
            awgn_round(rounds_[static_cast<std::size_t>(d)], pools_[static_cast<std::size_t>(d)],
                       total_p_, sigma2_, noise);
      }
      estimate_ = raus_estimate_awgn(scalar_outputs_, layout_, devices_, total_p_);
      return;
    }
    case Scheme::RausNoncoherent: {
      for (int d = 0; d < layout_.pools(); ++d) {
        const auto& round = rounds_[static_cast<std::size_t>(d)];
        channels_.clear_sampled();
        for (int k = 0; k < devices_; ++k) {
          if (!round.beta[static_cast<std::size_t>(k)]) continue;
          auto ch = rng::substream(seed, {rng::kChannel, round_index,
                                          static_cast<std::uint64_t>(k),
                                          static_cast<std::uint64_t>(d)});
          channels_.sample_row(k, ch);
        }
        auto noise = rng::substream(seed, {rng::kNoise, round_index, static_cast<std::uint64_t>(d)});
        noncoherent_round_into(round, pools_[static_cast<std::size_t>(d)], channels_, total_p_,
                               n0_, noise, vector_outputs_[static_cast<std::size_t>(d)]);
      }
      estimate_ = raus_estimate_noncoherent(vector_outputs_, layout_, devices_, total_p_);
      return;
    }
    default:
      throw std::logic_error("RausSimulator: unreachable scheme");
  }
}

}  // namespace rasgd

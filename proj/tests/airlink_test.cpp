#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "rasgd/airlink.hpp"
#include "rasgd/estimators.hpp"
#include "rasgd/rng.hpp"

using namespace rasgd;

TEST_CASE("preamble correlation and synthesis are lossless inverses") {
  const PreamblePool pool(6);
  auto eng = rng::substream(1, {rng::kTrial, 0});
  std::vector<double> outputs(6);
  rng::fill_normal(eng, outputs);
  const auto frame = pool.synthesize(outputs);
  const auto back = pool.correlate(frame);
  REQUIRE(back.size() == outputs.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == outputs[i]);

  const auto p2 = pool.preamble(2);
  for (int i = 0; i < 6; ++i) CHECK(p2[static_cast<std::size_t>(i)] == (i == 2 ? 1.0 : 0.0));
}

TEST_CASE("transmit_decision edge cases") {
  auto eng = rng::substream(2, {rng::kTrial, 1});

  ClampCounter clamps;
  CHECK_FALSE(transmit_decision(0.0, 1.0, eng, &clamps));
  CHECK(clamps.clamped == 0);

  for (int i = 0; i < 32; ++i) CHECK(transmit_decision(1.7, 1.0, eng, &clamps));
  CHECK(clamps.clamped == 32);

  CHECK_THROWS_AS(transmit_decision(0.5, 0.0, eng), std::invalid_argument);
}

TEST_CASE("transmit_decision fires with probability norm over v_max") {
  auto eng = rng::substream(3, {rng::kTrial, 2});
  const int draws = 50000;
  int on = 0;
  for (int i = 0; i < draws; ++i)
    if (transmit_decision(0.3, 1.0, eng)) ++on;
  const double freq = static_cast<double>(on) / draws;
  CHECK(std::abs(freq - 0.3) < 0.011);
}

TEST_CASE("coherent gain inverts the channel under the power gate") {
  const double total_p = 4.0;
  const std::complex<double> h{0.6, -0.8};  // |h| = 1
  const auto g = coherent_gain(h, total_p, 100.0);
  CHECK(g.permitted);
  const auto prod = h * g.phi;
  CHECK(prod.real() == doctest::Approx(std::sqrt(total_p)).epsilon(1e-12));
  CHECK(std::abs(prod.imag()) < 1e-12);
  CHECK(std::norm(g.phi) == doctest::Approx(total_p).epsilon(1e-12));

  // |phi|^2 = P / |h|^2 = 400 > p_max
  const auto gated = coherent_gain({0.1, 0.0}, total_p, 100.0);
  CHECK_FALSE(gated.permitted);

  const auto dead = coherent_gain({0.0, 0.0}, total_p, 100.0);
  CHECK_FALSE(dead.permitted);
}

TEST_CASE("power gating silences devices in deep fades") {
  TransmissionRound round(3);
  round.set(0, true, 0);
  round.set(1, true, 1);
  round.set(2, true, 0);
  const std::vector<std::complex<double>> h = {{1.0, 0.0}, {0.01, 0.0}, {0.0, 1.0}};
  const int gated = apply_power_gating(round, h, 1.0, 50.0);
  CHECK(gated == 1);
  CHECK(round.beta[0] == 1);
  CHECK(round.beta[1] == 0);
  CHECK(round.beta[2] == 1);
}

TEST_CASE("awgn_round without noise counts arrivals at amplitude sqrt(P)") {
  const PreamblePool pool(4);
  TransmissionRound round(5);
  round.set(0, true, 2);
  round.set(1, true, 2);
  round.set(2, true, 0);
  round.set(3, false, -1);
  round.set(4, true, 2);
  auto eng = rng::substream(4, {rng::kNoise, 0});
  const auto z = awgn_round(round, pool, 9.0, 0.0, eng);
  REQUIRE(z.size() == 4);
  CHECK(z[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(z[1] == 0.0);
  CHECK(z[2] == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(z[3] == 0.0);
}

TEST_CASE("channel realizations keep power times alpha at total_p") {
  auto eng = rng::substream(5, {rng::kChannel, 0});
  const std::vector<double> alphas = {0.5, 1.0, 2.0, 4.0};
  const auto ch = ChannelRealization::sample(alphas, 3.0, 8, eng);
  for (int k = 0; k < 4; ++k) {
    CHECK(ch.power(k) * ch.alpha(k) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(ch.sampled(k));
    CHECK(ch.row(k).size() == 8);
  }
}

TEST_CASE("noncoherent reception requires channels for every transmitter") {
  const PreamblePool pool(2);
  TransmissionRound round(2);
  round.set(0, true, 0);
  ChannelRealization ch(2, 4, 1.0);
  ch.set_uniform_alpha(1.0);
  auto eng = rng::substream(6, {rng::kNoise, 1});
  CHECK_THROWS_AS(noncoherent_round(round, pool, ch, 1.0, 0.1, eng), std::logic_error);

  auto ceng = rng::substream(6, {rng::kChannel, 1});
  ch.sample_row(0, ceng);
  const auto out = noncoherent_round(round, pool, ch, 1.0, 0.1, eng);
  CHECK(out.preambles == 2);
  CHECK(out.antennas == 4);
}

TEST_CASE("per-antenna energy averaging concentrates as antennas grow") {
  // Fixed access pattern: two devices on preamble 0, one on preamble 1.
  const PreamblePool pool(2);
  TransmissionRound round(4);
  round.set(0, true, 0);
  round.set(1, true, 0);
  round.set(2, true, 1);
  round.set(3, false, -1);

  const double total_p = 1.0, n0 = 0.2;
  auto var_of_energy = [&](int antennas, std::uint64_t tag) {
    const int reps = 4000;
    double sum = 0.0, sumsq = 0.0;
    ChannelRealization ch(4, antennas, total_p);
    ch.set_uniform_alpha(1.0);
    VectorCorrelatorOutputs out;
    for (int r = 0; r < reps; ++r) {
      ch.clear_sampled();
      for (int k = 0; k < 3; ++k) {
        auto ce = rng::substream(77, {rng::kChannel, tag, static_cast<std::uint64_t>(r),
                                      static_cast<std::uint64_t>(k)});
        ch.sample_row(k, ce);
      }
      auto ne = rng::substream(77, {rng::kNoise, tag, static_cast<std::uint64_t>(r)});
      noncoherent_round_into(round, pool, ch, total_p, n0, ne, out);
      double energy = 0.0;
      for (const auto& v : out.row(0)) energy += std::norm(v);
      energy /= static_cast<double>(antennas);
      sum += energy;
      sumsq += energy * energy;
    }
    const double mean = sum / reps;
    return std::pair{mean, sumsq / reps - mean * mean};
  };

  const auto [m8, v8] = var_of_energy(8, 8);
  const auto [m16, v16] = var_of_energy(16, 16);
  // both means estimate P * A_0 + N0 = 2.2
  CHECK(m8 == doctest::Approx(2.2).epsilon(0.05));
  CHECK(m16 == doctest::Approx(2.2).epsilon(0.05));
  // chi-squared averaging: variance scales like 1/N
  CHECK(v8 / v16 > 1.5);
  CHECK(v8 / v16 < 2.5);
}

TEST_CASE("identical energies across preambles cancel to a zero estimate") {
  // The codeword sum is zero, so a constant offset (the P A_m + N0 floor)
  // contributes nothing to the contraction.
  const int dim = 5;
  const auto layout = PoolLayout::uniform(dim, 1, 1.0);
  std::vector<VectorCorrelatorOutputs> outs(1);
  outs[0].reset(2 * dim, 3);
  for (auto& v : outs[0].z) v = {0.7, -0.4};
  const auto est = raus_estimate_noncoherent(outs, layout, 50, 1.0);
  REQUIRE(est.g_hat.size() == static_cast<std::size_t>(dim));
  for (const double g : est.g_hat) CHECK(g == 0.0);
}

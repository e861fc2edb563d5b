#include <cmath>
#include <vector>

#include "doctest.h"
#include "rasgd/estimators.hpp"
#include "rasgd/rng.hpp"

using namespace rasgd;

TEST_CASE("scheme names round-trip through the parser") {
  for (Scheme s : {Scheme::RausAwgn, Scheme::RausNoncoherent, Scheme::RausAsymptotic,
                   Scheme::Yang, Scheme::TdmaOracle}) {
    const auto parsed = parse_scheme(scheme_name(s));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == s);
  }
  CHECK_FALSE(parse_scheme("bogus").has_value());
}

TEST_CASE("round_time closed forms") {
  const auto timing = TimingParams::defaults_for(80);
  CHECK(timing.tau_pilot == doctest::Approx(8.0));
  CHECK(timing.c == 1.0);

  for (const int k_bar : {1, 5, 10, 50}) {
    CHECK(round_time(Scheme::RausNoncoherent, k_bar, 80, 10, timing) == 160);
    CHECK(round_time(Scheme::RausAsymptotic, k_bar, 80, 10, timing) == 160);
    CHECK(round_time(Scheme::RausAwgn, k_bar, 80, 10, timing) == 160);
  }
  CHECK(round_time(Scheme::Yang, 10, 80, 1, timing) == 160);
  CHECK(round_time(Scheme::Yang, 20, 80, 1, timing) == 240);
  CHECK(round_time(Scheme::TdmaOracle, 10, 80, 10, timing) == 400);
}

TEST_CASE("random access and the analog baseline tie at ten scheduled devices") {
  // pilot cost 0.1 L per device: 10 * 0.1 L + L = 2L
  for (const int dim : {16, 80, 256}) {
    const auto timing = TimingParams::defaults_for(dim);
    CHECK(round_time(Scheme::Yang, 10, dim, 1, timing) ==
          round_time(Scheme::RausNoncoherent, 10, dim, 1, timing));
  }
}

TEST_CASE("pool layout bookkeeping") {
  auto layout = PoolLayout::uniform(80, 10, 1.0);
  CHECK(layout.pools() == 10);
  CHECK(layout.total_dim() == 80);
  CHECK(layout.offset_of(0) == 0);
  CHECK(layout.offset_of(3) == 24);
  for (const double v : layout.vbar) CHECK(v == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-15));

  layout.append_pool(1, 1.0);
  CHECK(layout.pools() == 11);
  CHECK(layout.total_dim() == 81);
  CHECK(layout.offset_of(10) == 80);
  CHECK(layout.vbar.back() == 1.0);

  CHECK_THROWS_AS(PoolLayout::uniform(80, 7, 1.0), std::invalid_argument);
}

TEST_CASE("asymptotic estimate of a single arrival") {
  const int dim = 4;
  const auto layout = PoolLayout::uniform(dim, 1, 1.0);
  std::vector<TransmissionRound> rounds(1, TransmissionRound(2));
  rounds[0].set(0, true, 0);
  const auto est = raus_estimate_asymptotic(rounds, layout, 2);
  CHECK(est.scheme == Scheme::RausAsymptotic);
  CHECK(est.round_time_symbols == 8);
  REQUIRE(est.g_hat.size() == 4);
  // vbar / K * sqrt(L) on axis 0: (1/2) * 2 = 1
  CHECK(est.g_hat[0] == doctest::Approx(1.0).epsilon(1e-15));
  for (int l = 1; l < dim; ++l) CHECK(est.g_hat[static_cast<std::size_t>(l)] == 0.0);

  // a negative-axis arrival lands with the opposite sign
  rounds[0].set(1, true, dim + 2);
  const auto est2 = raus_estimate_asymptotic(rounds, layout, 2);
  CHECK(est2.g_hat[2] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("noiseless scalar correlation matches the counting estimate") {
  auto eng = rng::substream(31, {rng::kTrial, 0});
  const int devices = 40;
  const auto layout = PoolLayout::uniform(12, 3, 0.9);
  const PreamblePool pool(8);  // each pool has dim 4, so 2 * 4 preambles

  for (int rep = 0; rep < 5; ++rep) {
    std::vector<TransmissionRound> rounds;
    std::vector<std::vector<double>> outputs;
    for (int d = 0; d < layout.pools(); ++d) {
      TransmissionRound round(devices);
      for (int k = 0; k < devices; ++k) {
        if (rng::uniform01(eng) < 0.4) {
          round.set(k, true, static_cast<int>(eng() % 8));
        }
      }
      outputs.push_back(awgn_round(round, pool, 2.5, 0.0, eng));
      rounds.push_back(std::move(round));
    }
    const auto a = raus_estimate_awgn(outputs, layout, devices, 2.5);
    const auto b = raus_estimate_asymptotic(rounds, layout, devices);
    REQUIRE(a.g_hat.size() == b.g_hat.size());
    for (std::size_t i = 0; i < a.g_hat.size(); ++i) {
      CHECK(a.g_hat[i] == doctest::Approx(b.g_hat[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("doubling the norm bounds doubles the contraction") {
  auto layout = PoolLayout::uniform(8, 2, 1.0);
  auto doubled = layout;
  for (auto& v : doubled.vbar) v *= 2.0;

  std::vector<TransmissionRound> rounds(2, TransmissionRound(6));
  rounds[0].set(0, true, 1);
  rounds[0].set(3, true, 5);
  rounds[1].set(2, true, 0);
  const auto a = raus_estimate_asymptotic(rounds, layout, 6);
  const auto b = raus_estimate_asymptotic(rounds, doubled, 6);
  for (std::size_t i = 0; i < a.g_hat.size(); ++i) {
    CHECK(b.g_hat[i] == doctest::Approx(2.0 * a.g_hat[i]).epsilon(1e-15));
  }
}

TEST_CASE("noise-free analog aggregation returns the exact minibatch mean") {
  const std::vector<double> g0 = {1.0, -2.0, 0.5};
  const std::vector<double> g1 = {3.0, 0.0, -0.5};
  const std::vector<const std::vector<double>*> minibatch = {&g0, &g1};
  auto eng = rng::substream(7, {rng::kNoise, 0});
  const auto est = yang_estimate(minibatch, 1.0, 16, 0.0, TimingParams::defaults_for(3), eng);
  CHECK(est.scheme == Scheme::Yang);
  REQUIRE(est.g_hat.size() == 3);
  CHECK(est.g_hat[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(est.g_hat[1] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(est.g_hat[2] == doctest::Approx(0.0));
}

TEST_CASE("analog receiver noise shrinks with antennas, power, and minibatch size") {
  const std::vector<double> zero(64, 0.0);
  std::vector<const std::vector<double>*> minibatch = {&zero, &zero, &zero, &zero};
  const auto timing = TimingParams::defaults_for(64);
  auto sq_norm_of = [&](double p, int n, std::uint64_t tag) {
    double sq = 0.0;
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
      auto eng = rng::substream(5, {rng::kNoise, tag, static_cast<std::uint64_t>(r)});
      const auto est = yang_estimate(minibatch, p, n, 0.4, timing, eng);
      for (const double v : est.g_hat) sq += v * v;
    }
    return sq / reps;
  };
  // expected squared norm: L * N0 / (2 P N K_bar)
  CHECK(sq_norm_of(1.0, 10, 1) == doctest::Approx(64.0 * 0.4 / (2.0 * 10.0 * 4.0)).epsilon(0.1));
  CHECK(sq_norm_of(4.0, 20, 2) == doctest::Approx(64.0 * 0.4 / (2.0 * 4.0 * 20.0 * 4.0)).epsilon(0.1));
}

TEST_CASE("error-free digital aggregate averages the synthesized codewords") {
  const auto layout = PoolLayout::uniform(4, 2, 1.0);
  std::vector<QuantizedGradient> uploads(2);
  uploads[0].indices = {0, 3};          // +e0 in pool 0, -e1 in pool 1
  uploads[0].subvector_norms = {0.5, 1.0};
  uploads[1].indices = {2, 0};          // -e0 in pool 0, +e0 in pool 1
  uploads[1].subvector_norms = {0.5, 2.0};
  const auto est = tdma_aggregate(uploads, layout);
  REQUIRE(est.g_hat.size() == 4);
  const double r = std::sqrt(2.0);
  CHECK(est.g_hat[0] == doctest::Approx((0.5 * r - 0.5 * r) / 2.0));
  CHECK(est.g_hat[1] == 0.0);
  CHECK(est.g_hat[2] == doctest::Approx(2.0 * r / 2.0).epsilon(1e-15));
  CHECK(est.g_hat[3] == doctest::Approx(-1.0 * r / 2.0).epsilon(1e-15));
  // 2 uploads * 2 pools * log2(4) bits
  CHECK(est.round_time_symbols == 8);
}

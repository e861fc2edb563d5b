#include "rasgd/analysis.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "rasgd/parallel.hpp"

namespace rasgd {

namespace {

void validate(const MseScenario& s) {
  if (s.devices < 1) throw std::invalid_argument("MseScenario: K must be >= 1");
  if (s.dim < 1) throw std::invalid_argument("MseScenario: L must be >= 1");
  if (s.parts < 1 || s.dim % s.parts != 0) {
    throw std::invalid_argument("MseScenario: D must divide L");
  }
  if (s.antennas < 1) throw std::invalid_argument("MseScenario: N must be >= 1");
  if (s.total_p <= 0.0) throw std::invalid_argument("MseScenario: P must be positive");
  if (s.n0 < 0.0 || s.sigma2 < 0.0) throw std::invalid_argument("MseScenario: negative noise");
  if (s.v_max <= 0.0) throw std::invalid_argument("MseScenario: v_max must be positive");
  if (s.scheme == Scheme::Yang && (s.minibatch < 1 || s.minibatch > s.devices)) {
    throw std::invalid_argument("MseScenario: need 1 <= K_bar <= K");
  }
}

}  // namespace

DevicePoolView FrozenPopulation::view(int k, int d) const {
  const int pools = layout.pools();
  const std::size_t at =
      static_cast<std::size_t>(k) * static_cast<std::size_t>(pools) + static_cast<std::size_t>(d);
  DevicePoolView v;
  v.norm = pool_norms[at];
  if (v.norm > 0.0) v.sampler = &samplers[at];
  return v;
}

FrozenPopulation freeze_population(const MseScenario& scenario, std::uint64_t seed) {
  validate(scenario);
  FrozenPopulation pop;
  pop.layout = PoolLayout::uniform(scenario.dim, scenario.parts, scenario.v_max);
  const int pools = pop.layout.pools();
  const int sub = scenario.dim / scenario.parts;
  const CpCodebook cb(sub);
  pop.gradients.resize(static_cast<std::size_t>(scenario.devices));
  pop.norms.resize(static_cast<std::size_t>(scenario.devices));
  pop.pool_norms.resize(static_cast<std::size_t>(scenario.devices) * static_cast<std::size_t>(pools));
  pop.samplers.resize(pop.pool_norms.size());
  pop.mean.assign(static_cast<std::size_t>(scenario.dim), 0.0);
  std::vector<double> unit(static_cast<std::size_t>(sub));
  double sum_sq = 0.0;
  for (int k = 0; k < scenario.devices; ++k) {
    auto eng = rng::substream(seed, {rng::kPopulation, 1, static_cast<std::uint64_t>(k)});
    std::vector<double> v(static_cast<std::size_t>(scenario.dim));
    double total_sq = 0.0;
    for (int d = 0; d < pools; ++d) {
      rng::fill_normal(eng, unit);
      double ss = 0.0;
      for (double u : unit) ss += u * u;
      if (ss == 0.0) {
        unit[0] = 1.0;
        ss = 1.0;
      }
      const double inv = 1.0 / std::sqrt(ss);
      for (auto& u : unit) u *= inv;
      const double cap = pop.layout.vbar[static_cast<std::size_t>(d)];
      const double norm = scenario.norms_at_cap ? cap : cap * rng::uniform01(eng);
      const std::size_t at = static_cast<std::size_t>(k) * static_cast<std::size_t>(pools) +
                             static_cast<std::size_t>(d);
      pop.pool_norms[at] = norm;
      pop.samplers[at] = CodewordSampler(unit, cb);
      for (int i = 0; i < sub; ++i) {
        v[static_cast<std::size_t>(d * sub + i)] = norm * unit[static_cast<std::size_t>(i)];
      }
      total_sq += norm * norm;
    }
    pop.norms[static_cast<std::size_t>(k)] = std::sqrt(total_sq);
    sum_sq += total_sq;
    for (int i = 0; i < scenario.dim; ++i) pop.mean[static_cast<std::size_t>(i)] += v[static_cast<std::size_t>(i)];
    pop.gradients[static_cast<std::size_t>(k)] = std::move(v);
  }
  const double inv_k = 1.0 / static_cast<double>(scenario.devices);
  double g2 = 0.0;
  for (auto& m : pop.mean) {
    m *= inv_k;
    g2 += m * m;
  }
  pop.mean_norm_sq = g2;
  pop.mean_sq_norm = sum_sq * inv_k;
  return pop;
}

double theoretical_mse_raus_asymptotic(std::span<const double> norms, int dim, double vbar,
                                       int devices) {
  if (dim < 1) throw std::invalid_argument("theoretical_mse_raus_asymptotic: L must be >= 1");
  if (vbar <= 0.0) throw std::invalid_argument("theoretical_mse_raus_asymptotic: vbar must be positive");
  if (devices < 1) throw std::invalid_argument("theoretical_mse_raus_asymptotic: K must be >= 1");
  double acc = 0.0;
  for (const double v : norms) {
    if (v < 0.0 || v > vbar * (1.0 + 1e-9)) {
      throw std::invalid_argument("theoretical_mse_raus_asymptotic: norm outside [0, vbar]");
    }
    acc += (static_cast<double>(dim) * vbar - v) * v;
  }
  const double k = static_cast<double>(devices);
  return acc / (k * k);
}

double theoretical_mse_raus_bound(int dim, double vbar, int devices) {
  if (dim < 1 || vbar <= 0.0 || devices < 1) {
    throw std::invalid_argument("theoretical_mse_raus_bound: bad arguments");
  }
  return static_cast<double>(dim) * vbar * vbar / static_cast<double>(devices);
}

double theoretical_mse_yang(std::span<const double> norms, double mean_norm_sq, int k_bar,
                            double total_p, double n0) {
  if (norms.empty()) throw std::invalid_argument("theoretical_mse_yang: no norms");
  if (k_bar < 1) throw std::invalid_argument("theoretical_mse_yang: K_bar must be >= 1");
  if (total_p <= 0.0) throw std::invalid_argument("theoretical_mse_yang: P must be positive");
  if (n0 < 0.0) throw std::invalid_argument("theoretical_mse_yang: negative N0");
  double mean_sq = 0.0;
  for (const double v : norms) mean_sq += v * v;
  mean_sq /= static_cast<double>(norms.size());
  const double variance = mean_sq - mean_norm_sq;
  return (n0 / (2.0 * total_p) + variance) / static_cast<double>(k_bar);
}

double second_moment_bound_noncoherent(int dim, int antennas, double grad_bound, double total_p,
                                       int codebook_size, double n0, double v_max, int devices) {
  if (dim < 1 || antennas < 1 || devices < 1 || codebook_size < 2) {
    throw std::invalid_argument("second_moment_bound_noncoherent: bad arguments");
  }
  if (grad_bound < 0.0 || total_p <= 0.0 || n0 < 0.0 || v_max <= 0.0) {
    throw std::invalid_argument("second_moment_bound_noncoherent: bad arguments");
  }
  const double inner = grad_bound * total_p / v_max +
                       static_cast<double>(codebook_size) * n0 / static_cast<double>(devices);
  const double scale = v_max / total_p;
  return static_cast<double>(dim) * (1.0 + 2.0 / static_cast<double>(antennas)) * inner * inner *
         scale * scale;
}

namespace {

double theoretical_mse_tdma(const FrozenPopulation& pop, int devices) {
  double acc = 0.0;
  const int pools = pop.layout.pools();
  for (int d = 0; d < pools; ++d) {
    const double sub = static_cast<double>(pop.layout.dims[static_cast<std::size_t>(d)]);
    for (int k = 0; k < devices; ++k) {
      const double v = pop.pool_norms[static_cast<std::size_t>(k) * static_cast<std::size_t>(pools) +
                                      static_cast<std::size_t>(d)];
      acc += (sub - 1.0) * v * v;
    }
  }
  const double k = static_cast<double>(devices);
  return acc / (k * k);
}

}  // namespace

double theoretical_mse_population(const MseScenario& scenario, const FrozenPopulation& pop) {
  const int pools = pop.layout.pools();
  switch (scenario.scheme) {
    case Scheme::RausAsymptotic:
    case Scheme::RausNoncoherent: {
      // Asymptotic closed form; the finite-N path converges to it.
      double acc = 0.0;
      std::vector<double> col(static_cast<std::size_t>(scenario.devices));
      for (int d = 0; d < pools; ++d) {
        for (int k = 0; k < scenario.devices; ++k) {
          col[static_cast<std::size_t>(k)] =
              pop.pool_norms[static_cast<std::size_t>(k) * static_cast<std::size_t>(pools) +
                             static_cast<std::size_t>(d)];
        }
        acc += theoretical_mse_raus_asymptotic(col, pop.layout.dims[static_cast<std::size_t>(d)],
                                               pop.layout.vbar[static_cast<std::size_t>(d)],
                                               scenario.devices);
      }
      return acc;
    }
    case Scheme::Yang:
      return theoretical_mse_yang(pop.norms, pop.mean_norm_sq, scenario.minibatch,
                                  scenario.total_p, scenario.n0);
    case Scheme::TdmaOracle:
      return theoretical_mse_tdma(pop, scenario.devices);
    case Scheme::RausAwgn:
      throw std::invalid_argument(
          "theoretical_mse_population: no closed form for the unfaded correlator path");
  }
  throw std::invalid_argument("theoretical_mse_population: unknown scheme");
}

namespace {

double sq_error(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

MseReport empirical_mse(const MseScenario& scenario, const FrozenPopulation& pop, long trials,
                        std::uint64_t seed) {
  validate(scenario);
  if (trials < 1) throw std::invalid_argument("empirical_mse: trials must be >= 1");
  if (pop.devices() != scenario.devices || pop.layout.total_dim() != scenario.dim) {
    throw std::invalid_argument("empirical_mse: population does not match scenario");
  }
  std::vector<double> per_trial(static_cast<std::size_t>(trials), 0.0);
  std::atomic<std::uint64_t> clamped{0};
  auto frozen_access = [&pop](int k, int d) { return pop.view(k, d); };

  switch (scenario.scheme) {
    case Scheme::RausAwgn:
      throw std::invalid_argument("empirical_mse: no reference MSE for the unfaded correlator path");
    case Scheme::RausAsymptotic:
    case Scheme::RausNoncoherent: {
      parallel_for_blocks(per_trial.size(), [&](std::size_t lo, std::size_t hi) {
        RausSimulator sim(scenario.scheme, pop.layout, scenario.devices, scenario.total_p,
                          scenario.n0, scenario.sigma2, scenario.antennas);
        ClampCounter local;
        for (std::size_t t = lo; t < hi; ++t) {
          const auto& est = sim.round(seed, static_cast<std::uint64_t>(t), frozen_access, &local);
          per_trial[t] = sq_error(est.g_hat, pop.mean);
        }
        clamped.fetch_add(local.clamped);
      });
      break;
    }
    case Scheme::Yang: {
      const TimingParams timing = TimingParams::defaults_for(scenario.dim);
      parallel_for_blocks(per_trial.size(), [&](std::size_t lo, std::size_t hi) {
        std::vector<const std::vector<double>*> batch;
        for (std::size_t t = lo; t < hi; ++t) {
          auto batch_eng = rng::substream(seed, {rng::kMinibatch, static_cast<std::uint64_t>(t)});
          const auto idx = select_minibatch(scenario.devices, scenario.minibatch, batch_eng);
          batch.clear();
          for (int k : idx) batch.push_back(&pop.gradients[static_cast<std::size_t>(k)]);
          auto noise = rng::substream(seed, {rng::kNoise, static_cast<std::uint64_t>(t)});
          const auto est = yang_estimate(batch, scenario.total_p, scenario.antennas, scenario.n0,
                                         timing, noise);
          per_trial[t] = sq_error(est.g_hat, pop.mean);
        }
      });
      break;
    }
    case Scheme::TdmaOracle: {
      std::vector<int> everyone(static_cast<std::size_t>(scenario.devices));
      for (int k = 0; k < scenario.devices; ++k) everyone[static_cast<std::size_t>(k)] = k;
      parallel_for_blocks(per_trial.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t t = lo; t < hi; ++t) {
          const auto est = simulate_tdma(pop.layout, everyone, seed,
                                         static_cast<std::uint64_t>(t), frozen_access);
          per_trial[t] = sq_error(est.g_hat, pop.mean);
        }
      });
      break;
    }
  }

  const auto stats = mean_and_stderr(per_trial);
  MseReport report;
  report.scheme = scenario.scheme;
  report.theoretical = theoretical_mse_population(scenario, pop);
  report.empirical = stats.mean;
  report.stderr_of_mean = stats.stderr_of_mean;
  report.trials = trials;
  report.clamped = clamped.load();
  report.relative_gap =
      std::abs(report.empirical - report.theoretical) / std::max(report.theoretical, 1e-12);
  return report;
}

MseReport empirical_mse(const MseScenario& scenario, long trials, std::uint64_t seed) {
  const FrozenPopulation pop = freeze_population(scenario, seed);
  return empirical_mse(scenario, pop, trials, seed);
}

SecondMomentReport empirical_second_moment(const MseScenario& scenario, double grad_bound,
                                           long trials, std::uint64_t seed) {
  validate(scenario);
  if (scenario.scheme != Scheme::RausNoncoherent) {
    throw std::invalid_argument("empirical_second_moment: noncoherent scheme only");
  }
  if (trials < 1) throw std::invalid_argument("empirical_second_moment: trials must be >= 1");
  const FrozenPopulation pop = freeze_population(scenario, seed);
  for (const double v : pop.norms) {
    if (v > grad_bound * (1.0 + 1e-9)) {
      throw std::invalid_argument("empirical_second_moment: population norm exceeds grad_bound");
    }
  }
  std::vector<double> per_trial(static_cast<std::size_t>(trials), 0.0);
  auto frozen_access = [&pop](int k, int d) { return pop.view(k, d); };
  parallel_for_blocks(per_trial.size(), [&](std::size_t lo, std::size_t hi) {
    RausSimulator sim(scenario.scheme, pop.layout, scenario.devices, scenario.total_p, scenario.n0,
                      scenario.sigma2, scenario.antennas);
    for (std::size_t t = lo; t < hi; ++t) {
      const auto& est = sim.round(seed, static_cast<std::uint64_t>(t), frozen_access, nullptr);
      double ss = 0.0;
      for (const double v : est.g_hat) ss += v * v;
      per_trial[t] = ss;
    }
  });
  const auto stats = mean_and_stderr(per_trial);
  SecondMomentReport report;
  report.empirical = stats.mean;
  report.stderr_of_mean = stats.stderr_of_mean;
  report.trials = trials;
  // One pool per subvector: the codebook size seen by the bound is 2L/D.
  report.bound = second_moment_bound_noncoherent(
      scenario.dim, scenario.antennas, grad_bound, scenario.total_p,
      2 * (scenario.dim / scenario.parts), scenario.n0, scenario.v_max, scenario.devices);
  return report;
}

}  // namespace rasgd

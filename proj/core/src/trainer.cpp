#include "rasgd/trainer.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rasgd {

DevicePopulation make_svc_population(int devices, int feature_dim, double separation,
                                     std::uint64_t seed) {
  if (devices < 2 || feature_dim < 1) {
    throw std::invalid_argument("make_svc_population: need >= 2 devices and >= 1 feature");
  }
  DevicePopulation pop;
  pop.x.resize(static_cast<std::size_t>(devices));
  pop.label.resize(static_cast<std::size_t>(devices));
  auto dir_eng = rng::substream(seed, {rng::kPopulation, 0});
  std::vector<double> dir(static_cast<std::size_t>(feature_dim));
  rng::fill_normal(dir_eng, dir);
  double ss = 0.0;
  for (double v : dir) ss += v * v;
  if (ss == 0.0) {
    dir[0] = 1.0;
    ss = 1.0;
  }
  const double inv = 1.0 / std::sqrt(ss);
  for (auto& v : dir) v *= inv;
  for (int k = 0; k < devices; ++k) {
    const int label = (k % 2 == 0) ? 1 : -1;
    auto eng = rng::substream(seed, {rng::kPopulation, 1, static_cast<std::uint64_t>(k)});
    std::vector<double> x(static_cast<std::size_t>(feature_dim));
    rng::fill_normal(eng, x);
    const double shift = 0.5 * separation * static_cast<double>(label);
    for (int i = 0; i < feature_dim; ++i) {
      x[static_cast<std::size_t>(i)] += shift * dir[static_cast<std::size_t>(i)];
    }
    pop.x[static_cast<std::size_t>(k)] = std::move(x);
    pop.label[static_cast<std::size_t>(k)] = label;
  }
  return pop;
}

DevicePopulation make_quadratic_population(int devices, std::span<const double> center,
                                           double spread, std::uint64_t seed) {
  if (devices < 1 || center.empty()) {
    throw std::invalid_argument("make_quadratic_population: need >= 1 device and a center");
  }
  DevicePopulation pop;
  pop.x.resize(static_cast<std::size_t>(devices));
  for (int k = 0; k < devices; ++k) {
    auto eng = rng::substream(seed, {rng::kPopulation, 1, static_cast<std::uint64_t>(k)});
    std::vector<double> x(center.begin(), center.end());
    for (auto& v : x) v += spread * rng::normal01(eng);
    pop.x[static_cast<std::size_t>(k)] = std::move(x);
  }
  return pop;
}

void hinge_gradient(std::span<const double> w, std::span<const double> x, int label,
                    double lambda, std::span<double> out) {
  const std::size_t f = x.size();
  if (w.size() != f + 1 || out.size() != f + 1) {
    throw std::invalid_argument("hinge_gradient: w and out must have length features + 1");
  }
  double score = 0.0;
  for (std::size_t i = 0; i < f; ++i) score += w[i] * x[i];
  score -= w[f];  // classifier is w.x - w0
  const double l = static_cast<double>(label);
  const bool active = l * score < 1.0;  // the kink itself takes the flat side
  for (std::size_t i = 0; i < f; ++i) {
    out[i] = 2.0 * lambda * w[i] + (active ? -l * x[i] : 0.0);
  }
  out[f] = active ? l : 0.0;
}

double hinge_cost(std::span<const double> w, const DevicePopulation& population, double lambda) {
  const std::size_t f = static_cast<std::size_t>(population.feature_dim());
  if (w.size() != f + 1) throw std::invalid_argument("hinge_cost: w must have length features + 1");
  if (population.label.size() != population.x.size()) {
    throw std::invalid_argument("hinge_cost: population has no labels");
  }
  double hinge = 0.0;
  for (int k = 0; k < population.devices(); ++k) {
    const auto& x = population.x[static_cast<std::size_t>(k)];
    double score = 0.0;
    for (std::size_t i = 0; i < f; ++i) score += w[i] * x[i];
    score -= w[f];
    const double m = 1.0 - static_cast<double>(population.label[static_cast<std::size_t>(k)]) * score;
    if (m > 0.0) hinge += m;
  }
  double reg = 0.0;
  for (std::size_t i = 0; i < f; ++i) reg += w[i] * w[i];
  return hinge / static_cast<double>(population.devices()) + lambda * reg;
}

void quadratic_gradient(std::span<const double> w, std::span<const double> x,
                        std::span<double> out) {
  if (w.size() != x.size() || out.size() != x.size()) {
    throw std::invalid_argument("quadratic_gradient: dimension mismatch");
  }
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] - x[i];
}

double quadratic_cost(std::span<const double> w, const DevicePopulation& population) {
  double acc = 0.0;
  for (const auto& x : population.x) {
    if (x.size() != w.size()) throw std::invalid_argument("quadratic_cost: dimension mismatch");
    double ss = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double d = w[i] - x[i];
      ss += d * d;
    }
    acc += 0.5 * ss;
  }
  return acc / static_cast<double>(population.devices());
}

double noise_ball_bound(double mu, double kappa, double sigma_bar_sq) {
  if (kappa <= 0.0) throw std::invalid_argument("noise_ball_bound: kappa must be positive");
  if (mu <= 0.0 || mu >= 2.0 / kappa) {
    throw std::invalid_argument("noise_ball_bound: requires 0 < mu < 2/kappa");
  }
  if (sigma_bar_sq < 0.0) throw std::invalid_argument("noise_ball_bound: negative MSE bound");
  return mu * sigma_bar_sq / ((2.0 - mu * kappa) * kappa);
}

double default_v_max(const DevicePopulation& population, double lambda) {
  double max_x = 0.0;
  for (const auto& x : population.x) {
    double ss = 0.0;
    for (double v : x) ss += v * v;
    max_x = std::max(max_x, ss);
  }
  const double r = std::sqrt(max_x);
  return 2.0 * (std::sqrt(max_x + 1.0) + 2.0 * lambda * r);
}

namespace {

struct RoundGradients {
  // flat devices x dim storage refreshed every round
  std::vector<double> values;
  std::vector<double> pool_norms;  // devices x pools
  int dim = 0;
  int pools = 0;

  std::span<const double> grad(int k) const {
    return {values.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
  std::span<double> grad_mut(int k) {
    return {values.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
};

}  // namespace

TrainTrace train(const TrainConfig& config, const DevicePopulation& population) {
  const int devices = population.devices();
  if (devices < 1) throw std::invalid_argument("train: empty population");
  if (config.rounds < 1) throw std::invalid_argument("train: T must be >= 1");
  if (config.mu <= 0.0) throw std::invalid_argument("train: mu must be positive");
  const bool svc = config.task == Task::HingeSvc;
  if (svc && population.label.size() != population.x.size()) {
    throw std::invalid_argument("train: classifier task needs labels");
  }
  // The quadratic objective has curvature kappa = 1; reject steps outside
  // the mu < 2/kappa convergence window up front.
  if (!svc && config.mu >= 2.0) {
    throw std::invalid_argument("train: quadratic task requires mu < 2");
  }
  const int features = population.feature_dim();
  const int dim = svc ? features + 1 : features;

  double v_max = config.v_max;
  if (v_max <= 0.0) {
    if (!svc) throw std::invalid_argument("train: quadratic task needs an explicit v_max");
    v_max = default_v_max(population, config.lambda);
  }

  PoolLayout layout = PoolLayout::uniform(features, config.parts, v_max);
  if (svc) layout.append_pool(1, 1.0);  // offset gradient component lies in {-1, 0, 1}
  const int pools = layout.pools();

  const bool raus = config.scheme == Scheme::RausAwgn ||
                    config.scheme == Scheme::RausNoncoherent ||
                    config.scheme == Scheme::RausAsymptotic;
  const bool scheduled = !raus;  // the scheduled schemes see only a minibatch
  if (scheduled && (config.minibatch < 1 || config.minibatch > devices)) {
    throw std::invalid_argument("train: need 1 <= K_bar <= K");
  }

  const TimingParams timing = TimingParams::defaults_for(dim);
  long long symbols_per_round = 0;
  switch (config.scheme) {
    case Scheme::RausAwgn:
    case Scheme::RausNoncoherent:
    case Scheme::RausAsymptotic:
      symbols_per_round = 2LL * layout.total_dim();
      break;
    case Scheme::Yang:
      symbols_per_round = round_time(Scheme::Yang, config.minibatch, dim, 1, timing);
      break;
    case Scheme::TdmaOracle: {
      double bits = 0.0;
      for (int d = 0; d < pools; ++d) {
        bits += std::log2(2.0 * static_cast<double>(layout.dims[static_cast<std::size_t>(d)]));
      }
      symbols_per_round = static_cast<long long>(
          std::ceil(static_cast<double>(config.minibatch) * bits - 1e-9));
      break;
    }
  }

  TrainTrace trace;
  trace.v_max = v_max;
  trace.cost.reserve(static_cast<std::size_t>(config.rounds));
  trace.cum_symbols.reserve(static_cast<std::size_t>(config.rounds));
  if (!svc) trace.dist_sq.reserve(static_cast<std::size_t>(config.rounds));

  std::vector<double> w(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> w_star;
  if (!svc) {
    w_star.assign(static_cast<std::size_t>(dim), 0.0);
    for (const auto& x : population.x) {
      for (int i = 0; i < dim; ++i) w_star[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)];
    }
    for (auto& v : w_star) v /= static_cast<double>(devices);
  }

  RoundGradients grads;
  grads.dim = dim;
  grads.pools = pools;
  grads.values.assign(static_cast<std::size_t>(devices) * static_cast<std::size_t>(dim), 0.0);
  grads.pool_norms.assign(static_cast<std::size_t>(devices) * static_cast<std::size_t>(pools), 0.0);
  std::vector<double> units(grads.values.size(), 0.0);

  auto compute_device = [&](int k) {
    const auto& x = population.x[static_cast<std::size_t>(k)];
    auto g = grads.grad_mut(k);
    if (svc) {
      hinge_gradient(w, x, population.label[static_cast<std::size_t>(k)], config.lambda, g);
    } else {
      quadratic_gradient(w, x, g);
    }
    // per-pool norms and unit subvectors
    auto* u = units.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(dim);
    int off = 0;
    for (int d = 0; d < pools; ++d) {
      const int pd = layout.dims[static_cast<std::size_t>(d)];
      double ss = 0.0;
      for (int i = 0; i < pd; ++i) {
        const double v = g[static_cast<std::size_t>(off + i)];
        ss += v * v;
      }
      const double norm = std::sqrt(ss);
      grads.pool_norms[static_cast<std::size_t>(k) * static_cast<std::size_t>(pools) +
                       static_cast<std::size_t>(d)] = norm;
      const double inv = norm > 0.0 ? 1.0 / norm : 0.0;
      for (int i = 0; i < pd; ++i) {
        u[off + i] = g[static_cast<std::size_t>(off + i)] * inv;
      }
      off += pd;
    }
  };

  auto access = [&](int k, int d) {
    DevicePoolView view;
    view.norm = grads.pool_norms[static_cast<std::size_t>(k) * static_cast<std::size_t>(pools) +
                                 static_cast<std::size_t>(d)];
    const int off = layout.offset_of(d);
    view.unit = {units.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(dim) + off,
                 static_cast<std::size_t>(layout.dims[static_cast<std::size_t>(d)])};
    return view;
  };

  RausSimulator sim(raus ? config.scheme : Scheme::RausAsymptotic, layout, devices,
                    config.total_p, config.n0, config.sigma2, config.antennas);
  ClampCounter clamps;
  std::vector<int> batch;
  std::vector<const std::vector<double>*> batch_ptrs;
  std::vector<std::vector<double>> batch_grads;
  long long cum = 0;

  for (int t = 1; t <= config.rounds; ++t) {
    const auto round_index = static_cast<std::uint64_t>(t);
    const double* step_source = nullptr;
    AggregateEstimate scheduled_est;
    if (raus) {
      for (int k = 0; k < devices; ++k) compute_device(k);
      const auto& est = sim.round(config.seed, round_index, access, &clamps);
      step_source = est.g_hat.data();
    } else {
      auto batch_eng = rng::substream(config.seed, {rng::kMinibatch, round_index});
      batch = select_minibatch(devices, config.minibatch, batch_eng);
      for (int k : batch) compute_device(k);
      if (config.scheme == Scheme::Yang) {
        batch_grads.assign(batch.size(), {});
        batch_ptrs.clear();
        for (std::size_t i = 0; i < batch.size(); ++i) {
          const auto g = grads.grad(batch[i]);
          batch_grads[i].assign(g.begin(), g.end());
          batch_ptrs.push_back(&batch_grads[i]);
        }
        auto noise = rng::substream(config.seed, {rng::kNoise, round_index});
        scheduled_est = yang_estimate(batch_ptrs, config.total_p, config.antennas, config.n0,
                                      timing, noise);
      } else {
        scheduled_est = simulate_tdma(layout, batch, config.seed, round_index, access);
      }
      step_source = scheduled_est.g_hat.data();
    }
    for (int i = 0; i < dim; ++i) {
      w[static_cast<std::size_t>(i)] -= config.mu * step_source[static_cast<std::size_t>(i)];
    }
    cum += symbols_per_round;
    trace.cum_symbols.push_back(cum);
    trace.cost.push_back(svc ? hinge_cost(w, population, config.lambda)
                             : quadratic_cost(w, population));
    if (!svc) {
      double ss = 0.0;
      for (int i = 0; i < dim; ++i) {
        const double dlt = w[static_cast<std::size_t>(i)] - w_star[static_cast<std::size_t>(i)];
        ss += dlt * dlt;
      }
      trace.dist_sq.push_back(ss);
    }
  }
  trace.clamped = clamps.clamped;
  trace.w = std::move(w);
  return trace;
}

}  // namespace rasgd

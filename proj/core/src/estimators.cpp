#include "rasgd/estimators.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rasgd {

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::RausAwgn: return "raus_awgn";
    case Scheme::RausNoncoherent: return "raus_noncoherent";
    case Scheme::RausAsymptotic: return "raus_asymptotic";
    case Scheme::Yang: return "yang";
    case Scheme::TdmaOracle: return "tdma_oracle";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::RausAwgn, Scheme::RausNoncoherent, Scheme::RausAsymptotic,
                   Scheme::Yang, Scheme::TdmaOracle}) {
    if (scheme_name(s) == name) return s;
  }
  return std::nullopt;
}

namespace {

long long to_symbols(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) < 1e-6) return static_cast<long long>(r);
  return static_cast<long long>(std::ceil(x - 1e-9));
}

}  // namespace

long long round_time(Scheme s, int k_bar, int dim, int parts, const TimingParams& timing) {
  if (dim < 1) throw std::invalid_argument("round_time: L must be >= 1");
  switch (s) {
    case Scheme::TdmaOracle:
      if (k_bar < 1) throw std::invalid_argument("round_time: K_bar must be >= 1");
      return to_symbols(static_cast<double>(k_bar) * bits_required(dim, parts));
    case Scheme::RausAwgn:
    case Scheme::RausNoncoherent:
    case Scheme::RausAsymptotic:
      return 2LL * static_cast<long long>(dim);
    case Scheme::Yang:
      if (k_bar < 1) throw std::invalid_argument("round_time: K_bar must be >= 1");
      return to_symbols(static_cast<double>(k_bar) * timing.tau_pilot +
                        timing.c * static_cast<double>(dim));
  }
  throw std::invalid_argument("round_time: unknown scheme");
}

int PoolLayout::total_dim() const {
  return std::accumulate(dims.begin(), dims.end(), 0);
}

int PoolLayout::offset_of(int pool) const {
  int off = 0;
  for (int d = 0; d < pool; ++d) off += dims[static_cast<std::size_t>(d)];
  return off;
}

PoolLayout PoolLayout::uniform(int dim, int parts, double v_max) {
  if (parts <= 0 || dim % parts != 0) {
    throw std::invalid_argument("PoolLayout: D = " + std::to_string(parts) +
                                " does not divide L = " + std::to_string(dim));
  }
  if (v_max <= 0.0) throw std::invalid_argument("PoolLayout: v_max must be positive");
  PoolLayout l;
  const int sub = dim / parts;
  const double vbar = v_max / std::sqrt(static_cast<double>(parts));
  l.dims.assign(static_cast<std::size_t>(parts), sub);
  l.vbar.assign(static_cast<std::size_t>(parts), vbar);
  return l;
}

PoolLayout& PoolLayout::append_pool(int dim, double bound) {
  if (dim < 1 || bound <= 0.0) throw std::invalid_argument("PoolLayout: bad appended pool");
  dims.push_back(dim);
  vbar.push_back(bound);
  return *this;
}

namespace {

void check_layout(const PoolLayout& layout) {
  if (layout.pools() == 0) throw std::invalid_argument("estimator: empty pool layout");
}

/* All three random-access estimators reduce to the same contraction: pool
 * scores s_m against the cross-polytope layout give component
 * (s_l - s_{L+l}) * sqrt(L) on axis l. */
void contract_scores(std::span<const double> scores, int dim, double scale,
                     std::span<double> out) {
  const double r = std::sqrt(static_cast<double>(dim));
  for (int l = 0; l < dim; ++l) {
    out[static_cast<std::size_t>(l)] =
        scale * r *
        (scores[static_cast<std::size_t>(l)] - scores[static_cast<std::size_t>(dim + l)]);
  }
}

}  // namespace

AggregateEstimate raus_estimate_awgn(const std::vector<std::vector<double>>& pool_outputs,
                                     const PoolLayout& layout, int devices, double total_p) {
  check_layout(layout);
  if (devices < 1) throw std::invalid_argument("raus_estimate_awgn: K must be >= 1");
  if (total_p <= 0.0) throw std::invalid_argument("raus_estimate_awgn: P must be positive");
  if (static_cast<int>(pool_outputs.size()) != layout.pools()) {
    throw std::invalid_argument("raus_estimate_awgn: outputs do not match layout");
  }
  AggregateEstimate est;
  est.scheme = Scheme::RausAwgn;
  est.g_hat.assign(static_cast<std::size_t>(layout.total_dim()), 0.0);
  est.round_time_symbols = 2LL * layout.total_dim();
  const double inv = 1.0 / (std::sqrt(total_p) * static_cast<double>(devices));
  int off = 0;
  for (int d = 0; d < layout.pools(); ++d) {
    const int dim = layout.dims[static_cast<std::size_t>(d)];
    const auto& z = pool_outputs[static_cast<std::size_t>(d)];
    if (static_cast<int>(z.size()) != 2 * dim) {
      throw std::invalid_argument("raus_estimate_awgn: pool output length != 2 L");
    }
    contract_scores(z, dim, layout.vbar[static_cast<std::size_t>(d)] * inv,
                    {est.g_hat.data() + off, static_cast<std::size_t>(dim)});
    off += dim;
  }
  return est;
}

AggregateEstimate raus_estimate_noncoherent(const std::vector<VectorCorrelatorOutputs>& pool_outputs,
                                            const PoolLayout& layout, int devices, double total_p) {
  check_layout(layout);
  if (devices < 1) throw std::invalid_argument("raus_estimate_noncoherent: K must be >= 1");
  if (total_p <= 0.0) throw std::invalid_argument("raus_estimate_noncoherent: P must be positive");
  if (static_cast<int>(pool_outputs.size()) != layout.pools()) {
    throw std::invalid_argument("raus_estimate_noncoherent: outputs do not match layout");
  }
  AggregateEstimate est;
  est.scheme = Scheme::RausNoncoherent;
  est.g_hat.assign(static_cast<std::size_t>(layout.total_dim()), 0.0);
  est.round_time_symbols = 2LL * layout.total_dim();
  const double inv = 1.0 / (total_p * static_cast<double>(devices));
  std::vector<double> scores;
  int off = 0;
  for (int d = 0; d < layout.pools(); ++d) {
    const int dim = layout.dims[static_cast<std::size_t>(d)];
    const auto& out = pool_outputs[static_cast<std::size_t>(d)];
    if (out.preambles != 2 * dim || out.antennas < 1) {
      throw std::invalid_argument("raus_estimate_noncoherent: pool output shape != 2 L x N");
    }
    scores.assign(static_cast<std::size_t>(out.preambles), 0.0);
    const double inv_n = 1.0 / static_cast<double>(out.antennas);
    for (int m = 0; m < out.preambles; ++m) {
      double e = 0.0;
      for (const auto& zi : out.row(m)) e += std::norm(zi);
      scores[static_cast<std::size_t>(m)] = e * inv_n;
    }
    contract_scores(scores, dim, layout.vbar[static_cast<std::size_t>(d)] * inv,
                    {est.g_hat.data() + off, static_cast<std::size_t>(dim)});
    off += dim;
  }
  return est;
}

AggregateEstimate raus_estimate_asymptotic(const std::vector<TransmissionRound>& rounds,
                                           const PoolLayout& layout, int devices) {
  check_layout(layout);
  if (devices < 1) throw std::invalid_argument("raus_estimate_asymptotic: K must be >= 1");
  if (static_cast<int>(rounds.size()) != layout.pools()) {
    throw std::invalid_argument("raus_estimate_asymptotic: rounds do not match layout");
  }
  AggregateEstimate est;
  est.scheme = Scheme::RausAsymptotic;
  est.g_hat.assign(static_cast<std::size_t>(layout.total_dim()), 0.0);
  est.round_time_symbols = 2LL * layout.total_dim();
  const double inv = 1.0 / static_cast<double>(devices);
  std::vector<double> counts;
  int off = 0;
  for (int d = 0; d < layout.pools(); ++d) {
    const int dim = layout.dims[static_cast<std::size_t>(d)];
    const auto& round = rounds[static_cast<std::size_t>(d)];
    counts.assign(static_cast<std::size_t>(2 * dim), 0.0);
    for (int k = 0; k < round.devices(); ++k) {
      if (!round.beta[static_cast<std::size_t>(k)]) continue;
      const int m = round.preamble[static_cast<std::size_t>(k)];
      if (m < 0 || m >= 2 * dim) {
        throw std::invalid_argument("raus_estimate_asymptotic: preamble outside pool");
      }
      counts[static_cast<std::size_t>(m)] += 1.0;
    }
    contract_scores(counts, dim, layout.vbar[static_cast<std::size_t>(d)] * inv,
                    {est.g_hat.data() + off, static_cast<std::size_t>(dim)});
    off += dim;
  }
  return est;
}

AggregateEstimate yang_estimate(const std::vector<const std::vector<double>*>& minibatch,
                                double total_p, int antennas, double n0,
                                const TimingParams& timing, rng::Engine& eng) {
  if (minibatch.empty()) throw std::invalid_argument("yang_estimate: empty minibatch");
  if (total_p <= 0.0) throw std::invalid_argument("yang_estimate: P must be positive");
  if (antennas < 1) throw std::invalid_argument("yang_estimate: N must be >= 1");
  if (n0 < 0.0) throw std::invalid_argument("yang_estimate: N0 must be nonnegative");
  const std::size_t dim = minibatch.front()->size();
  AggregateEstimate est;
  est.scheme = Scheme::Yang;
  est.g_hat.assign(dim, 0.0);
  for (const auto* g : minibatch) {
    if (g->size() != dim) throw std::invalid_argument("yang_estimate: mismatched gradient lengths");
    for (std::size_t i = 0; i < dim; ++i) est.g_hat[i] += (*g)[i];
  }
  const double k_bar = static_cast<double>(minibatch.size());
  for (auto& v : est.g_hat) v /= k_bar;
  if (n0 > 0.0) {
    const double scale = std::sqrt(n0 * 0.5) /
                         std::sqrt(total_p * static_cast<double>(antennas) * k_bar);
    for (auto& v : est.g_hat) v += scale * rng::normal01(eng);
  }
  est.round_time_symbols = round_time(Scheme::Yang, static_cast<int>(minibatch.size()),
                                      static_cast<int>(dim), 1, timing);
  return est;
}

AggregateEstimate tdma_aggregate(const std::vector<QuantizedGradient>& uploads,
                                 const PoolLayout& layout) {
  check_layout(layout);
  if (uploads.empty()) throw std::invalid_argument("tdma_aggregate: no uploads");
  AggregateEstimate est;
  est.scheme = Scheme::TdmaOracle;
  est.g_hat.assign(static_cast<std::size_t>(layout.total_dim()), 0.0);
  const std::size_t pools = static_cast<std::size_t>(layout.pools());
  for (const auto& up : uploads) {
    if (up.indices.size() != pools || up.subvector_norms.size() != pools) {
      throw std::invalid_argument("tdma_aggregate: upload does not match layout");
    }
    int off = 0;
    for (std::size_t d = 0; d < pools; ++d) {
      const int dim = layout.dims[d];
      const int m = up.indices[d];
      if (m < 0 || m >= 2 * dim) throw std::invalid_argument("tdma_aggregate: index outside codebook");
      const int axis = m < dim ? m : m - dim;
      const double sign = m < dim ? 1.0 : -1.0;
      est.g_hat[static_cast<std::size_t>(off + axis)] +=
          sign * up.subvector_norms[d] * std::sqrt(static_cast<double>(dim));
      off += dim;
    }
  }
  const double inv = 1.0 / static_cast<double>(uploads.size());
  for (auto& v : est.g_hat) v *= inv;
  double bits = 0.0;
  for (int d = 0; d < layout.pools(); ++d) {
    bits += std::log2(2.0 * static_cast<double>(layout.dims[static_cast<std::size_t>(d)]));
  }
  est.round_time_symbols = static_cast<long long>(
      std::ceil(static_cast<double>(uploads.size()) * bits - 1e-9));
  return est;
}

}  // namespace rasgd

#include "rasgd/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rasgd {

GradientVector GradientVector::from(std::vector<double> v) {
  GradientVector g;
  g.values = std::move(v);
  double ss = 0.0;
  for (double x : g.values) ss += x * x;
  g.norm = std::sqrt(ss);
  return g;
}

Normalized normalize(const GradientVector& g) {
  Normalized n;
  n.norm = g.norm;
  n.unit.assign(g.values.size(), 0.0);
  if (g.norm == 0.0) {
    n.silent = true;
    return n;
  }
  const double inv = 1.0 / g.norm;
  for (std::size_t i = 0; i < g.values.size(); ++i) n.unit[i] = g.values[i] * inv;
  return n;
}

std::vector<GradientVector> split_subvectors(const GradientVector& g, int parts) {
  const int dim = static_cast<int>(g.values.size());
  if (parts <= 0 || dim % parts != 0) {
    throw std::invalid_argument("split_subvectors: D = " + std::to_string(parts) +
                                " does not divide L = " + std::to_string(dim));
  }
  const int sub = dim / parts;
  std::vector<GradientVector> out;
  out.reserve(parts);
  for (int d = 0; d < parts; ++d) {
    out.push_back(GradientVector::from(std::vector<double>(
        g.values.begin() + static_cast<std::ptrdiff_t>(d) * sub,
        g.values.begin() + static_cast<std::ptrdiff_t>(d + 1) * sub)));
  }
  return out;
}

CpCodebook::CpCodebook(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("CpCodebook: dimension must be >= 1");
  radius_ = std::sqrt(static_cast<double>(dim));
}

std::vector<double> CpCodebook::codeword(int m) const {
  std::vector<double> c(dim_, 0.0);
  c[axis(m)] = component(m);
  return c;
}

void CpCodebook::accumulate(std::vector<double>& dst, int m, double scale) const {
  dst[axis(m)] += scale * component(m);
}

ConvexWeights convex_weights(std::span<const double> unit, const CpCodebook& cb) {
  const int dim = cb.dim();
  if (static_cast<int>(unit.size()) != dim) {
    throw std::invalid_argument("convex_weights: vector length does not match codebook dimension");
  }
  double ss = 0.0, l1 = 0.0;
  for (double x : unit) {
    ss += x * x;
    l1 += std::abs(x);
  }
  if (ss > 1.0 + 1e-9) {
    throw std::invalid_argument("convex_weights: vector lies outside the unit ball");
  }
  // ||u||_1 <= sqrt(L) ||u||_2 <= sqrt(L) guarantees nonnegative leftover.
  const double inv_r = 1.0 / cb.radius();
  const double leftover = std::max(0.0, (1.0 - l1 * inv_r) / static_cast<double>(2 * dim));
  ConvexWeights cw;
  cw.w.assign(2 * dim, leftover);
  for (int l = 0; l < dim; ++l) {
    if (unit[l] > 0.0) {
      cw.w[l] += unit[l] * inv_r;
    } else if (unit[l] < 0.0) {
      cw.w[dim + l] += -unit[l] * inv_r;
    }
  }
  return cw;
}

namespace {

int pick_from_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto idx = it == cdf.end() ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
  return static_cast<int>(idx);
}

}  // namespace

int quantize(std::span<const double> unit, const CpCodebook& cb, rng::Engine& eng) {
  const ConvexWeights cw = convex_weights(unit, cb);
  double acc = 0.0;
  const double u = rng::uniform01(eng);
  const int last = static_cast<int>(cw.w.size()) - 1;
  for (int m = 0; m < last; ++m) {
    acc += cw.w[m];
    if (u < acc) return m;
  }
  return last;
}

CodewordSampler::CodewordSampler(std::span<const double> unit, const CpCodebook& cb) {
  const ConvexWeights cw = convex_weights(unit, cb);
  cdf_.resize(cw.w.size());
  double acc = 0.0;
  for (std::size_t m = 0; m < cw.w.size(); ++m) {
    acc += cw.w[m];
    cdf_[m] = acc;
  }
  cdf_.back() = 1.0;
}

int CodewordSampler::sample(rng::Engine& eng) const {
  return pick_from_cdf(cdf_, rng::uniform01(eng));
}

QuantizedGradient quantize_gradient(const GradientVector& g, int parts,
                                    const CpCodebook& cb, rng::Engine& eng) {
  const auto subs = split_subvectors(g, parts);
  if (cb.dim() * parts != static_cast<int>(g.values.size())) {
    throw std::invalid_argument("quantize_gradient: codebook dimension does not match L/D");
  }
  QuantizedGradient q;
  q.indices.reserve(subs.size());
  q.subvector_norms.reserve(subs.size());
  for (const auto& sv : subs) {
    const Normalized n = normalize(sv);
    q.indices.push_back(quantize(n.unit, cb, eng));
    q.subvector_norms.push_back(n.norm);
  }
  return q;
}

double quantizer_mse(int dim) {
  if (dim < 1) throw std::invalid_argument("quantizer_mse: dimension must be >= 1");
  return static_cast<double>(dim) - 1.0;
}

double mpt_mse(double norm, int dim, int parts) {
  if (parts <= 0 || dim % parts != 0) {
    throw std::invalid_argument("mpt_mse: D = " + std::to_string(parts) +
                                " does not divide L = " + std::to_string(dim));
  }
  const double sub = static_cast<double>(dim) / static_cast<double>(parts);
  return norm * norm * (sub - 1.0);
}

double bits_required(int dim, int parts) {
  if (parts <= 0 || dim % parts != 0) {
    throw std::invalid_argument("bits_required: D = " + std::to_string(parts) +
                                " does not divide L = " + std::to_string(dim));
  }
  const double m = 2.0 * static_cast<double>(dim) / static_cast<double>(parts);
  return static_cast<double>(parts) * std::log2(m);
}

CodebookSizeBounds codebook_size_bounds(int dim, double radius) {
  if (dim < 2) throw std::invalid_argument("codebook_size_bounds: dimension must be >= 2");
  if (radius < 1.0) throw std::invalid_argument("codebook_size_bounds: radius must be >= 1");
  const double expo = std::exp(static_cast<double>(dim) / (2.0 * radius * radius));
  CodebookSizeBounds b;
  b.lower = 2.0 * expo;
  b.upper = std::sqrt(2.0 * std::numbers::pi * static_cast<double>(dim)) * expo;
  return b;
}

}  // namespace rasgd

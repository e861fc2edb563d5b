#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rasgd/rng.hpp"

namespace rasgd {

/// Gradient (or subvector) with its cached Euclidean norm.
struct GradientVector {
  std::vector<double> values;
  double norm = 0.0;

  static GradientVector from(std::vector<double> v);
};

/// Unit-direction form of a gradient.  A zero gradient has no direction;
/// it is flagged silent and its unit vector is all zeros.
struct Normalized {
  std::vector<double> unit;
  double norm = 0.0;
  bool silent = false;
};

Normalized normalize(const GradientVector& g);

/// Splits a length-L vector into D subvectors of length L/D.
/// Rejects D that does not divide L.
std::vector<GradientVector> split_subvectors(const GradientVector& g, int parts);

/* Cross-polytope codebook in dimension L: the 2L points +-sqrt(L) e_l.
 * All codewords share squared norm L, the codeword sum is zero, and any
 * unit-ball vector is a convex combination of them scaled by 1/sqrt(L).
 * Codeword m < L is +sqrt(L) e_m; codeword L + l is -sqrt(L) e_l. */
class CpCodebook {
 public:
  explicit CpCodebook(int dim);

  int dim() const { return dim_; }
  int size() const { return 2 * dim_; }
  double radius() const { return radius_; }

  int axis(int m) const { return m < dim_ ? m : m - dim_; }
  double component(int m) const { return m < dim_ ? radius_ : -radius_; }

  std::vector<double> codeword(int m) const;

  /// dst += scale * codeword(m)
  void accumulate(std::vector<double>& dst, int m, double scale) const;

 private:
  int dim_;
  double radius_;
};

/// Convex weights over the 2L codewords reconstructing a unit-ball vector:
/// sum w_m = 1, w_m >= 0, sum w_m c_m = u.
struct ConvexWeights {
  std::vector<double> w;
};

/// Closed-form weights: the positive/negative part of each coordinate
/// scaled by 1/sqrt(L), plus a uniform share of the leftover mass.
/// Rejects vectors outside the unit ball (tolerance 1e-9 on the norm).
ConvexWeights convex_weights(std::span<const double> unit, const CpCodebook& cb);

/// Draws a codeword index with the convex weights as probabilities,
/// making the scaled codeword an unbiased estimate of `unit`.
int quantize(std::span<const double> unit, const CpCodebook& cb, rng::Engine& eng);

/// Cached inverse-CDF sampler for repeated draws against a fixed vector.
class CodewordSampler {
 public:
  CodewordSampler() = default;
  CodewordSampler(std::span<const double> unit, const CpCodebook& cb);

  int sample(rng::Engine& eng) const;
  const std::vector<double>& cdf() const { return cdf_; }

 private:
  std::vector<double> cdf_;
};

/// One device's quantized upload: a codeword index and a norm per subvector.
struct QuantizedGradient {
  std::vector<int> indices;
  std::vector<double> subvector_norms;
};

/// Normalize, split, and quantize a full gradient into D codeword indices.
QuantizedGradient quantize_gradient(const GradientVector& g, int parts,
                                    const CpCodebook& cb, rng::Engine& eng);

/// Exact quantization MSE for a unit vector in dimension L: L - 1.
double quantizer_mse(int dim);

/// Exact full-vector MSE when a norm-`norm` gradient of length L is split
/// into D independently quantized subvectors: norm^2 * (L/D - 1).
double mpt_mse(double norm, int dim, int parts);

/// Bits identifying one upload: D * log2(2L/D).  Real-valued by design.
double bits_required(int dim, int parts);

struct CodebookSizeBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds on the codebook size M needed for radius-R coverage of the unit
/// sphere in dimension L:  2 e^{L/(2R^2)} <= M <= sqrt(2 pi L) e^{L/(2R^2)}.
CodebookSizeBounds codebook_size_bounds(int dim, double radius);

}  // namespace rasgd

#pragma once

#include <cstddef>

#include "tcov/lag_stats.hpp"
#include "tcov/rng.hpp"
#include "tcov/toeplitz.hpp"

namespace tcov {

// Moving-average benchmark process of order q = floor(p/4):
//   X_t = sum_{i=0}^{q} phi^i * eps_{t-2i},   t = 1..p,
// with i.i.d. standard normal noise.  The step-2 index stride puts all the
// correlation on even lags.
struct MaSpec {
  std::size_t p = 0;
  double phi = 0.0;

  std::size_t order() const { return p / 4; }
  void validate() const;
};

// Closed-form autocovariance of the process above: zero for odd h and for
// h/2 > q; otherwise phi^m (1 - phi^{2(q-m+1)}) / (1 - phi^2) with m = h/2
// (and q - m + 1 when phi = +/-1).
double ma_autocovariance(const MaSpec& spec, std::size_t h);

// The exact covariance of one sample path as a Toeplitz spec
// (sigma0 = gamma_0, unnormalized).
ToeplitzSpec ma_covariance_spec(const MaSpec& spec);

// Draws N(0, Sigma) rows via a cached Cholesky factor of the densified spec;
// the factor is banded because the spec is, so a draw costs O(p * bandwidth).
// Construction throws std::domain_error when the spec is not positive
// definite.  Identity specs skip the factor entirely.
class GaussianSampler {
 public:
  explicit GaussianSampler(const ToeplitzSpec& spec);

  void draw(RngStream& rng, double* row) const;
  SampleSet sample(RngStream& rng, std::size_t n) const;
  const ToeplitzSpec& spec() const { return spec_; }

 private:
  ToeplitzSpec spec_;
  bool identity_ = false;
  BandedCholesky factor_;
};

SampleSet sample_gaussian(const ToeplitzSpec& spec, std::size_t n, RngStream& rng);

// n independent paths of the MA process (raw scale: variance gamma_0, not 1).
SampleSet sample_ma_process(const MaSpec& spec, std::size_t n, RngStream& rng);

}  // namespace tcov

#pragma once

#include <cstddef>
#include <vector>

namespace tcov {

// n observations of a p-dimensional vector, stored row-major (observation k
// occupies data[k*p .. k*p+p-1]).  n = 1 is a valid and important case.
struct SampleSet {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> data;

  const double* row(std::size_t k) const { return data.data() + k * p; }
  double* row(std::size_t k) { return data.data() + k * p; }
  void validate() const;
};

// Estimated lag functionals: xi[j-1] holds xi_j for j = 1..S, the average of
// the j-th diagonal of the sample covariance; xi0 is the mean square of all
// entries (the empirical variance under a zero-mean model).
struct DiagonalStats {
  std::vector<double> xi;
  double xi0 = 0.0;

  std::size_t horizon() const { return xi.size(); }
};

// Compensated (Neumaier) accumulator: keeps the lag sums exact to ~1 ulp so
// that oracle comparisons at 1e-12 hold even for large n*p.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double value);
  double value() const { return sum + carry; }
};

// xi_j = (1/(n(p-j))) sum_k sum_i X_k^i X_k^{i+j} for j = 1..S, and
// xi0 = (1/(np)) sum of squares, in O(n*p*S) without forming any matrix.
// With studentize set, each xi_j is divided by xi0 (for real data whose
// variance is not normalized to 1); off by default.
// Requires 1 <= S < p/2.
DiagonalStats lag_functionals(const SampleSet& samples, std::size_t S,
                              bool studentize = false);

// Sum statistic over all S lags: sum of xi_j (absolute=false, the one-sided
// statistic) or sum of |xi_j| (absolute=true, the two-sided statistic).
double sum_statistic(const DiagonalStats& stats, bool absolute);

// Scan statistic: the largest s-subset sum of xi (or of |xi|), equal to the
// sum of the top s order statistics -- sorting replaces the search over all
// C(S,s) subsets.  When argmax is non-null it receives the attaining lag set
// (ascending); ties between equal values resolve toward the smaller lag,
// which never changes the value, only the reported set.
// Requires 1 <= s <= S.
double scan_statistic(const DiagonalStats& stats, std::size_t s, bool absolute,
                      std::vector<std::size_t>* argmax = nullptr);

}  // namespace tcov

#pragma once

#include <cstddef>
#include <vector>

#include "tcov/bounds.hpp"
#include "tcov/lag_stats.hpp"
#include "tcov/rng.hpp"

namespace tcov {

enum class ThresholdSource { theoretical, calibrated };

const char* threshold_source_token(ThresholdSource source);
ThresholdSource parse_threshold_source(std::string_view token);

// Decision record of one test application.  The defining relation is
// reject == (statistic >= threshold): rejection uses the closed threshold
// exactly as the indicator I(. >= t) states it; ties have probability zero
// under the continuous null.
struct TestOutcome {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;
  ThresholdSource threshold_source = ThresholdSource::theoretical;
};

// Evaluates the statistic of the given kind on precomputed lag functionals:
// ms+ sums xi, ms sums |xi|, hs+/hs scan the best s-subset (signed/absolute).
// s is ignored for the ms kinds; the selector kind is rejected here.
double test_statistic(TestKind kind, const DiagonalStats& stats, std::size_t s);

TestOutcome run_test(TestKind kind, const DiagonalStats& stats, double threshold,
                     ThresholdSource source, std::size_t s = 0);

// Aggregated scan test over a grid of candidate sparsities: rejects when any
// member rejects ("at least one test rejects"), freeing the procedure of a
// known s.  thresholds[i] pairs with s_grid[i].  The returned outcome is the
// member with the largest margin statistic - threshold, so a singleton grid
// reproduces run_test exactly and reject propagates from any member.
TestOutcome aggregate_hs(TestKind kind, const DiagonalStats& stats,
                         const std::vector<std::size_t>& s_grid,
                         const std::vector<double>& thresholds,
                         ThresholdSource source);

// Empirical null quantile of a test statistic: draws `replications` samples of
// shape (n, p) from N(0, I_p), computes the statistic, and returns the
// ceil((1-alpha) * R)-th ascending order statistic (conservative, no
// interpolation).  Replication r uses rng.derive(r), and the reduction sorts
// the full statistic vector, so the result is independent of the worker
// count.
double calibrate_threshold(TestKind kind, std::size_t n, std::size_t p,
                           std::size_t S, std::size_t s, double alpha,
                           std::size_t replications, const RngStream& rng,
                           unsigned workers = 1);

// How aggregate_hs member thresholds are calibrated when s is unknown:
// bonferroni calibrates each member at level alpha/|s_grid|; joint calibrates
// the max statistic itself (each member keeps its own null scale, the common
// rejection depth is chosen so the aggregate false-alarm rate is alpha).
// Joint is never above Bonferroni member-wise, so it is the sharper mode.
enum class AggregateCalibration { bonferroni, joint };

std::vector<double> calibrate_aggregate_thresholds(
    TestKind kind, std::size_t n, std::size_t p, std::size_t S,
    const std::vector<std::size_t>& s_grid, double alpha,
    AggregateCalibration mode, std::size_t replications, const RngStream& rng,
    unsigned workers = 1);

// Entry-wise lag selection: selected[j-1] = 1 when |xi_j| > tau (strict, as
// the selector is defined), or xi_j > tau for the one-sided variant.
std::vector<int> select_lags(const DiagonalStats& stats, double tau,
                             bool one_sided = false);

// Number of positions where the two indicator vectors differ.
std::size_t hamming_distance(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace tcov

#include "tcov/testing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tcov/parallel.hpp"
#include "tcov/sampling.hpp"

namespace tcov {

const char* threshold_source_token(ThresholdSource source) {
  return source == ThresholdSource::theoretical ? "theoretical" : "calibrated";
}

ThresholdSource parse_threshold_source(std::string_view token) {
  if (token == "theoretical") return ThresholdSource::theoretical;
  if (token == "calibrated") return ThresholdSource::calibrated;
  throw std::invalid_argument("unknown threshold source: " + std::string(token));
}

double test_statistic(TestKind kind, const DiagonalStats& stats, std::size_t s) {
  switch (kind) {
    case TestKind::ms_plus:
      return sum_statistic(stats, /*absolute=*/false);
    case TestKind::ms:
      return sum_statistic(stats, /*absolute=*/true);
    case TestKind::hs_plus:
      return scan_statistic(stats, s, /*absolute=*/false);
    case TestKind::hs:
      return scan_statistic(stats, s, /*absolute=*/true);
    case TestKind::selector:
      throw std::invalid_argument(
          "test_statistic: the selector is not a test; use select_lags");
  }
  throw std::logic_error("test_statistic: unreachable");
}

TestOutcome run_test(TestKind kind, const DiagonalStats& stats, double threshold,
                     ThresholdSource source, std::size_t s) {
  TestOutcome out;
  out.statistic = test_statistic(kind, stats, s);
  out.threshold = threshold;
  out.reject = out.statistic >= threshold;
  out.threshold_source = source;
  return out;
}

TestOutcome aggregate_hs(TestKind kind, const DiagonalStats& stats,
                         const std::vector<std::size_t>& s_grid,
                         const std::vector<double>& thresholds,
                         ThresholdSource source) {
  if (!kind_is_scan(kind)) {
    throw std::invalid_argument("aggregate_hs: kind must be hs+ or hs");
  }
  if (s_grid.empty() || s_grid.size() != thresholds.size()) {
    throw std::invalid_argument(
        "aggregate_hs: s_grid and thresholds must be nonempty and aligned");
  }
  bool have = false;
  TestOutcome best;
  double best_margin = 0.0;
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    const TestOutcome member =
        run_test(kind, stats, thresholds[i], source, s_grid[i]);
    const double margin = member.statistic - member.threshold;
    if (!have || margin > best_margin) {
      have = true;
      best = member;
      best_margin = margin;
    }
  }
  // Largest margin decides: >= 0 iff some member rejects.
  return best;
}

double calibrate_threshold(TestKind kind, std::size_t n, std::size_t p,
                           std::size_t S, std::size_t s, double alpha,
                           std::size_t replications, const RngStream& rng,
                           unsigned workers) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("calibrate_threshold: need alpha in (0,1)");
  }
  if (replications < 1) {
    throw std::invalid_argument("calibrate_threshold: need replications >= 1");
  }
  if (S < 1 || 2 * S >= p) {
    throw std::invalid_argument("calibrate_threshold: need 1 <= S < p/2");
  }
  if (kind_is_scan(kind) && (s < 1 || s > S)) {
    throw std::invalid_argument("calibrate_threshold: scan kinds need 1 <= s <= S");
  }

  const ToeplitzSpec null_spec = identity_spec(p);
  const GaussianSampler sampler(null_spec);
  std::vector<double> stats(replications);
  parallel_for(replications, workers, [&](std::size_t r) {
    RngStream stream = rng.derive(r);
    const SampleSet samples = sampler.sample(stream, n);
    stats[r] = test_statistic(kind, lag_functionals(samples, S), s);
  });

  std::sort(stats.begin(), stats.end());
  // ceil((1-alpha) R)-th ascending order statistic, 1-based.
  const double target = (1.0 - alpha) * static_cast<double>(replications);
  std::size_t rank = static_cast<std::size_t>(std::ceil(target));
  if (rank < 1) rank = 1;
  if (rank > replications) rank = replications;
  return stats[rank - 1];
}

std::vector<double> calibrate_aggregate_thresholds(
    TestKind kind, std::size_t n, std::size_t p, std::size_t S,
    const std::vector<std::size_t>& s_grid, double alpha,
    AggregateCalibration mode, std::size_t replications, const RngStream& rng,
    unsigned workers) {
  if (!kind_is_scan(kind)) {
    throw std::invalid_argument("calibrate_aggregate_thresholds: kind must be hs+ or hs");
  }
  if (s_grid.empty()) {
    throw std::invalid_argument("calibrate_aggregate_thresholds: empty s grid");
  }
  const std::size_t k = s_grid.size();

  if (mode == AggregateCalibration::bonferroni) {
    std::vector<double> thresholds(k);
    for (std::size_t i = 0; i < k; ++i) {
      thresholds[i] = calibrate_threshold(kind, n, p, S, s_grid[i],
                                          alpha / static_cast<double>(k),
                                          replications, rng.derive(i), workers);
    }
    return thresholds;
  }

  // Joint mode: one shared set of null replications, all member statistics per
  // replication.  A common "rejection depth" c means member i rejects when its
  // statistic lands among its own c largest null values; the aggregate null
  // rejection rate is nondecreasing in c, so the largest c with rate <= alpha
  // is found by binary search and the thresholds are the c-th largest member
  // order statistics.
  const std::size_t R = replications;
  const ToeplitzSpec null_spec = identity_spec(p);
  const GaussianSampler sampler(null_spec);
  std::vector<double> stats(R * k);
  parallel_for(R, workers, [&](std::size_t r) {
    RngStream stream = rng.derive(r);
    const SampleSet samples = sampler.sample(stream, n);
    const DiagonalStats xi = lag_functionals(samples, S);
    for (std::size_t i = 0; i < k; ++i) {
      stats[r * k + i] = scan_statistic(xi, s_grid[i], kind == TestKind::hs);
    }
  });

  std::vector<std::vector<double>> sorted(k, std::vector<double>(R));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t r = 0; r < R; ++r) sorted[i][r] = stats[r * k + i];
    std::sort(sorted[i].begin(), sorted[i].end());
  }

  auto aggregate_rate = [&](std::size_t c) {
    if (c == 0) return 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t i = 0; i < k; ++i) {
        if (stats[r * k + i] >= sorted[i][R - c]) {
          ++hits;
          break;
        }
      }
    }
    return static_cast<double>(hits) / static_cast<double>(R);
  };

  std::size_t lo = 0, hi = R;  // rate(lo) <= alpha, searching the largest such c
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (aggregate_rate(mid) <= alpha) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }

  std::vector<double> thresholds(k);
  for (std::size_t i = 0; i < k; ++i) {
    // Depth 0 (alpha below 1/R) leaves every member unrejectable.
    thresholds[i] = lo == 0 ? std::numeric_limits<double>::infinity()
                            : sorted[i][R - lo];
  }
  return thresholds;
}

std::vector<int> select_lags(const DiagonalStats& stats, double tau,
                             bool one_sided) {
  if (!(tau >= 0.0)) {
    throw std::invalid_argument("select_lags: need tau >= 0");
  }
  std::vector<int> selected(stats.horizon());
  for (std::size_t j = 0; j < selected.size(); ++j) {
    const double v = one_sided ? stats.xi[j] : std::abs(stats.xi[j]);
    selected[j] = v > tau ? 1 : 0;  // strict, per the selector's definition
  }
  return selected;
}

std::size_t hamming_distance(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("hamming_distance: length mismatch");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] != 0) != (b[i] != 0)) ++count;
  }
  return count;
}

}  // namespace tcov

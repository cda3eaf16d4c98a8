#include "tcov/lag_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tcov {

void SampleSet::validate() const {
  if (n < 1) throw std::invalid_argument("SampleSet: need n >= 1");
  if (p < 1) throw std::invalid_argument("SampleSet: need p >= 1");
  if (data.size() != n * p) {
    throw std::invalid_argument("SampleSet: data must hold n*p values");
  }
}

void KahanSum::add(double value) {
  const double t = sum + value;
  if (std::abs(sum) >= std::abs(value)) {
    carry += (sum - t) + value;
  } else {
    carry += (value - t) + sum;
  }
  sum = t;
}

DiagonalStats lag_functionals(const SampleSet& samples, std::size_t S,
                              bool studentize) {
  samples.validate();
  const std::size_t n = samples.n;
  const std::size_t p = samples.p;
  if (S < 1 || 2 * S >= p) {
    throw std::invalid_argument("lag_functionals: need 1 <= S < p/2");
  }

  std::vector<KahanSum> acc(S + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double* x = samples.row(k);
    for (std::size_t i = 0; i < p; ++i) acc[0].add(x[i] * x[i]);
    for (std::size_t j = 1; j <= S; ++j) {
      for (std::size_t i = 0; i + j < p; ++i) acc[j].add(x[i] * x[i + j]);
    }
  }

  DiagonalStats stats;
  stats.xi0 = acc[0].value() / (static_cast<double>(n) * static_cast<double>(p));
  stats.xi.resize(S);
  for (std::size_t j = 1; j <= S; ++j) {
    stats.xi[j - 1] =
        acc[j].value() / (static_cast<double>(n) * static_cast<double>(p - j));
  }
  if (studentize) {
    if (stats.xi0 <= 0.0) {
      throw std::invalid_argument(
          "lag_functionals: cannot studentize with nonpositive xi0");
    }
    for (double& v : stats.xi) v /= stats.xi0;
  }
  return stats;
}

double sum_statistic(const DiagonalStats& stats, bool absolute) {
  KahanSum acc;
  for (double v : stats.xi) acc.add(absolute ? std::abs(v) : v);
  return acc.value();
}

double scan_statistic(const DiagonalStats& stats, std::size_t s, bool absolute,
                      std::vector<std::size_t>* argmax) {
  const std::size_t S = stats.horizon();
  if (s < 1 || s > S) {
    throw std::invalid_argument("scan_statistic: need 1 <= s <= S");
  }

  std::vector<std::size_t> order(S);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) {
    return absolute ? std::abs(stats.xi[i]) : stats.xi[i];
  };
  // Descending by value; stable on the ascending lag order, so equal values
  // keep the smaller lag first.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) > key(b); });

  KahanSum acc;
  for (std::size_t i = 0; i < s; ++i) acc.add(key(order[i]));
  if (argmax) {
    argmax->assign(order.begin(), order.begin() + s);
    for (std::size_t& lag : *argmax) lag += 1;  // report 1-based lags
    std::sort(argmax->begin(), argmax->end());
  }
  return acc.value();
}

}  // namespace tcov

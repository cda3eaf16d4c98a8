#include "tcov/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tcov {

double ToeplitzSpec::entry(std::size_t k, std::size_t l) const {
  const std::size_t lag = k > l ? k - l : l - k;
  return diagonals[lag];
}

std::size_t ToeplitzSpec::bandwidth() const {
  for (std::size_t lag = p; lag-- > 1;) {
    if (diagonals[lag] != 0.0) return lag;
  }
  return 0;
}

bool ToeplitzSpec::is_identity() const {
  if (sigma0 != 1.0) return false;
  return bandwidth() == 0;
}

void ToeplitzSpec::validate() const {
  if (p == 0) throw std::invalid_argument("ToeplitzSpec: p must be >= 1");
  if (diagonals.size() != p) {
    throw std::invalid_argument("ToeplitzSpec: diagonals must have length p");
  }
  if (!(sigma0 > 0.0)) {
    throw std::invalid_argument("ToeplitzSpec: sigma0 must be positive");
  }
  if (diagonals[0] != sigma0) {
    throw std::invalid_argument("ToeplitzSpec: diagonals[0] must equal sigma0");
  }
  for (double v : diagonals) {
    if (!std::isfinite(v) || std::abs(v) > sigma0) {
      throw std::invalid_argument(
          "ToeplitzSpec: every diagonal value must be finite with |value| <= sigma0");
    }
  }
}

ToeplitzSpec identity_spec(std::size_t p) {
  ToeplitzSpec spec;
  spec.p = p;
  spec.sigma0 = 1.0;
  spec.diagonals.assign(p, 0.0);
  if (p > 0) spec.diagonals[0] = 1.0;
  return spec;
}

std::vector<double> densify(const ToeplitzSpec& spec) {
  const std::size_t p = spec.p;
  std::vector<double> m(p * p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      m[i * p + j] = spec.diagonals[i > j ? i - j : j - i];
    }
  }
  return m;
}

FunctionalMatrix::FunctionalMatrix(std::size_t dim, std::vector<std::size_t> W)
    : p(dim), lags(std::move(W)) {
  std::sort(lags.begin(), lags.end());
  if (std::adjacent_find(lags.begin(), lags.end()) != lags.end()) {
    throw std::invalid_argument("FunctionalMatrix: lag set must be distinct");
  }
  for (std::size_t j : lags) {
    if (j == 0 || j >= p) {
      throw std::invalid_argument("FunctionalMatrix: lags must lie in 1..p-1");
    }
  }
}

void FunctionalMatrix::apply(const double* x, double* y) const {
  std::fill(y, y + p, 0.0);
  for (std::size_t j : lags) {
    const double c = 1.0 / (2.0 * static_cast<double>(p - j));
    for (std::size_t k = 0; k + j < p; ++k) {
      y[k] += c * x[k + j];
      y[k + j] += c * x[k];
    }
  }
}

double FunctionalMatrix::quadratic_form(const double* x) const {
  double total = 0.0;
  for (std::size_t j : lags) {
    double dot = 0.0;
    for (std::size_t k = 0; k + j < p; ++k) dot += x[k] * x[k + j];
    total += dot / static_cast<double>(p - j);  // 2 * c * dot
  }
  return total;
}

double FunctionalMatrix::row_sum_norm() const {
  std::vector<double> row_sum(p, 0.0);
  for (std::size_t j : lags) {
    const double c = 1.0 / (2.0 * static_cast<double>(p - j));
    for (std::size_t k = 0; k + j < p; ++k) {
      row_sum[k] += c;
      row_sum[k + j] += c;
    }
  }
  return *std::max_element(row_sum.begin(), row_sum.end());
}

double FunctionalMatrix::frobenius_sq() const {
  // Per lag: 2(p-j) entries of squared value 1/(2(p-j))^2.
  double total = 0.0;
  for (std::size_t j : lags) total += 1.0 / (2.0 * static_cast<double>(p - j));
  return total;
}

std::vector<double> FunctionalMatrix::densify() const {
  std::vector<double> m(p * p, 0.0);
  for (std::size_t j : lags) {
    const double c = 1.0 / (2.0 * static_cast<double>(p - j));
    for (std::size_t k = 0; k + j < p; ++k) {
      m[k * p + (k + j)] += c;
      m[(k + j) * p + k] += c;
    }
  }
  return m;
}

ToeplitzSpec SparseAlternative::to_toeplitz() const {
  ToeplitzSpec spec;
  spec.p = p;
  spec.sigma0 = 1.0;
  spec.diagonals.assign(p, 0.0);
  spec.diagonals[0] = 1.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    spec.diagonals[support[i]] = signs[i] * sigma;
  }
  return spec;
}

SparseAlternative make_sparse_alternative(std::size_t p, std::size_t s, std::size_t S,
                                          double sigma, Placement placement,
                                          bool two_sided, RngStream& rng) {
  if (s < 1 || s > S) {
    throw std::invalid_argument("make_sparse_alternative: need 1 <= s <= S");
  }
  if (2 * S >= p) {
    throw std::invalid_argument("make_sparse_alternative: need S < p/2");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("make_sparse_alternative: sigma must be positive");
  }
  if (sigma > 1.0) {
    throw std::invalid_argument(
        "make_sparse_alternative: sigma must not exceed the unit diagonal");
  }

  SparseAlternative alt;
  alt.p = p;
  alt.s = s;
  alt.S = S;
  alt.sigma = sigma;

  switch (placement) {
    case Placement::near_diagonal:
      for (std::size_t j = 1; j <= s; ++j) alt.support.push_back(j);
      break;
    case Placement::far:
      for (std::size_t j = S - s + 1; j <= S; ++j) alt.support.push_back(j);
      break;
    case Placement::random: {
      // Partial Fisher-Yates over 1..S, then sort the chosen prefix.
      std::vector<std::size_t> pool(S);
      for (std::size_t j = 0; j < S; ++j) pool[j] = j + 1;
      for (std::size_t i = 0; i < s; ++i) {
        const std::size_t k = i + rng.uniform_below(S - i);
        std::swap(pool[i], pool[k]);
      }
      alt.support.assign(pool.begin(), pool.begin() + s);
      std::sort(alt.support.begin(), alt.support.end());
      break;
    }
  }

  alt.signs.assign(s, 1);
  if (two_sided) {
    for (std::size_t i = 0; i < s; ++i) {
      alt.signs[i] = (rng.next_u64() & 1u) ? 1 : -1;
    }
  }

  if (!is_positive_definite(alt.to_toeplitz())) {
    throw std::domain_error(
        "make_sparse_alternative: induced matrix is not positive definite at sigma=" +
        std::to_string(sigma));
  }
  return alt;
}

double BandedCholesky::at(std::size_t k, std::size_t j) const {
  if (j > k || k - j > bandwidth) return 0.0;
  return rows[k * (bandwidth + 1) + (j + bandwidth - k)];
}

void BandedCholesky::multiply(const double* z, double* x) const {
  const std::size_t stride = bandwidth + 1;
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t lo = k >= bandwidth ? k - bandwidth : 0;
    double acc = 0.0;
    const double* row = rows.data() + k * stride + (lo + bandwidth - k);
    for (std::size_t j = lo; j <= k; ++j) acc += row[j - lo] * z[j];
    x[k] = acc;
  }
}

std::optional<BandedCholesky> banded_cholesky(const ToeplitzSpec& spec, double tol) {
  const std::size_t p = spec.p;
  const std::size_t bw = spec.bandwidth();
  BandedCholesky f;
  f.p = p;
  f.bandwidth = bw;
  const std::size_t stride = bw + 1;
  f.rows.assign(p * stride, 0.0);

  const double pivot_floor = tol * spec.sigma0;
  auto L = [&](std::size_t k, std::size_t j) -> double& {
    return f.rows[k * stride + (j + bw - k)];
  };

  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t lo = k >= bw ? k - bw : 0;
    for (std::size_t j = lo; j <= k; ++j) {
      double acc = spec.diagonals[k - j];
      const std::size_t mlo = std::max(lo, j >= bw ? j - bw : 0);
      for (std::size_t m = mlo; m < j; ++m) acc -= L(k, m) * L(j, m);
      if (j < k) {
        L(k, j) = acc / L(j, j);
      } else {
        if (acc <= pivot_floor) return std::nullopt;
        L(k, k) = std::sqrt(acc);
      }
    }
  }
  return f;
}

bool is_positive_definite(const ToeplitzSpec& spec) {
  return banded_cholesky(spec).has_value();
}

const char* placement_token(Placement placement) {
  switch (placement) {
    case Placement::random: return "random";
    case Placement::near_diagonal: return "near_diagonal";
    case Placement::far: return "far";
  }
  return "random";
}

Placement parse_placement(std::string_view token) {
  if (token == "random") return Placement::random;
  if (token == "near_diagonal") return Placement::near_diagonal;
  if (token == "far") return Placement::far;
  throw std::invalid_argument("unknown placement: " + std::string(token));
}

}  // namespace tcov

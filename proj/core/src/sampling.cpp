#include "tcov/sampling.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tcov {

void MaSpec::validate() const {
  if (p < 1) throw std::invalid_argument("MaSpec: need p >= 1");
  if (!std::isfinite(phi) || std::abs(phi) > 1.0) {
    throw std::invalid_argument("MaSpec: need |phi| <= 1");
  }
}

double ma_autocovariance(const MaSpec& spec, std::size_t h) {
  spec.validate();
  if (h % 2 != 0) return 0.0;
  const std::size_t m = h / 2;
  const std::size_t q = spec.order();
  if (m > q) return 0.0;
  const double phi = spec.phi;
  // sum_{i=0}^{q-m} phi^{2i+m}: a geometric sum in phi^2.
  const std::size_t terms = q - m + 1;
  const double phi2 = phi * phi;
  double geometric;
  if (phi2 == 1.0) {
    geometric = static_cast<double>(terms);
  } else {
    geometric = (1.0 - std::pow(phi2, static_cast<double>(terms))) / (1.0 - phi2);
  }
  return std::pow(phi, static_cast<double>(m)) * geometric;
}

ToeplitzSpec ma_covariance_spec(const MaSpec& spec) {
  spec.validate();
  ToeplitzSpec out;
  out.p = spec.p;
  out.diagonals.resize(spec.p);
  // Correlation form: the tests work under the sigma_0 = 1 normalization, so
  // the autocovariances are scaled by the lag-0 value.
  const double gamma0 = ma_autocovariance(spec, 0);
  for (std::size_t h = 0; h < spec.p; ++h) {
    out.diagonals[h] = ma_autocovariance(spec, h) / gamma0;
  }
  out.sigma0 = 1.0;
  return out;
}

GaussianSampler::GaussianSampler(const ToeplitzSpec& spec) : spec_(spec) {
  spec_.validate();
  if (spec_.is_identity()) {
    identity_ = true;
    return;
  }
  auto factor = banded_cholesky(spec_);
  if (!factor) {
    throw std::domain_error("GaussianSampler: covariance is not positive definite");
  }
  factor_ = std::move(*factor);
}

void GaussianSampler::draw(RngStream& rng, double* row) const {
  const std::size_t p = spec_.p;
  if (identity_) {
    for (std::size_t i = 0; i < p; ++i) row[i] = rng.normal();
    return;
  }
  std::vector<double> z(p);
  for (std::size_t i = 0; i < p; ++i) z[i] = rng.normal();
  factor_.multiply(z.data(), row);
}

SampleSet GaussianSampler::sample(RngStream& rng, std::size_t n) const {
  if (n < 1) throw std::invalid_argument("GaussianSampler: need n >= 1");
  const std::size_t p = spec_.p;
  SampleSet out;
  out.n = n;
  out.p = p;
  out.data.resize(n * p);
  if (identity_) {
    for (double& v : out.data) v = rng.normal();
    return out;
  }
  std::vector<double> z(p);  // one scratch buffer for all rows
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < p; ++i) z[i] = rng.normal();
    factor_.multiply(z.data(), out.row(k));
  }
  return out;
}

SampleSet sample_gaussian(const ToeplitzSpec& spec, std::size_t n, RngStream& rng) {
  return GaussianSampler(spec).sample(rng, n);
}

SampleSet sample_ma_process(const MaSpec& spec, std::size_t n, RngStream& rng) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("sample_ma_process: need n >= 1");
  const std::size_t p = spec.p;
  const std::size_t q = spec.order();
  const double phi = spec.phi;

  // Powers phi^0..phi^q, computed once.
  std::vector<double> weights(q + 1);
  weights[0] = 1.0;
  for (std::size_t i = 1; i <= q; ++i) weights[i] = weights[i - 1] * phi;

  SampleSet out;
  out.n = n;
  out.p = p;
  out.data.resize(n * p);
  // noise[t-1 + 2q] carries eps_t, so indices t-2i for t = 1..p, i = 0..q all
  // land inside one buffer of length p + 2q.
  std::vector<double> noise(p + 2 * q);
  // Rows are rescaled to unit marginal variance so the process is emitted in
  // the same correlation form as ma_covariance_spec.
  const double scale = 1.0 / std::sqrt(ma_autocovariance(spec, 0));
  for (std::size_t k = 0; k < n; ++k) {
    for (double& e : noise) e = rng.normal();
    double* row = out.row(k);
    for (std::size_t t = 0; t < p; ++t) {
      double acc = 0.0;
      for (std::size_t i = 0; i <= q; ++i) {
        acc += weights[i] * noise[t + 2 * (q - i)];
      }
      row[t] = scale * acc;
    }
  }
  return out;
}

}  // namespace tcov

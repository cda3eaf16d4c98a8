#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "tcov/rng.hpp"

namespace tcov {

// Symmetric Toeplitz covariance, fully described by its diagonal values:
// entry (k,l) of the dense matrix is diagonals[|k-l|].  diagonals[0] is the
// common variance sigma0; every off-diagonal value must satisfy
// |sigma_k| <= sigma0 (Cauchy-Schwarz on a valid covariance).
struct ToeplitzSpec {
  std::size_t p = 0;
  double sigma0 = 1.0;
  std::vector<double> diagonals;  // length p, diagonals[0] == sigma0

  double entry(std::size_t k, std::size_t l) const;
  // Largest lag with a nonzero value (0 for a diagonal matrix).
  std::size_t bandwidth() const;
  bool is_identity() const;
  // Throws std::invalid_argument when the invariants above fail.
  void validate() const;
};

ToeplitzSpec identity_spec(std::size_t p);

// Dense row-major p*p matrix with M[i*p+j] = diagonals[|i-j|].
std::vector<double> densify(const ToeplitzSpec& spec);

// Averaging functional for a set of lag classes: the matrix with entries
// sum over j in W of 1/(2(p-j)) on the two j-th diagonals.  Stored implicitly
// (a dense A_W would be O(p^2) waste for what is a banded indicator).
struct FunctionalMatrix {
  std::size_t p = 0;
  std::vector<std::size_t> lags;  // W: distinct lags in 1..p-1, ascending

  FunctionalMatrix(std::size_t dim, std::vector<std::size_t> W);

  // y = A_W x, O(p * |W|).
  void apply(const double* x, double* y) const;
  // x^T A_W x, O(p * |W|).
  double quadratic_form(const double* x) const;
  // Maximum absolute row sum; upper-bounds the spectral norm (Gershgorin).
  double row_sum_norm() const;
  // Exact squared Frobenius norm: sum over j of 1/(2(p-j)).
  double frobenius_sq() const;
  // Dense row-major p*p realization, for verification at small p.
  std::vector<double> densify() const;
};

// A member of the sparse alternative class: a Toeplitz correlation matrix
// with unit diagonal, exactly s nonzero lags within 1..S, all equal to
// +/- sigma.  The one-sided class uses all-plus signs.
struct SparseAlternative {
  std::size_t p = 0;
  std::size_t s = 0;
  std::size_t S = 0;
  double sigma = 0.0;
  std::vector<std::size_t> support;  // ascending, subset of 1..S, size s
  std::vector<int> signs;            // +1/-1 per support entry

  ToeplitzSpec to_toeplitz() const;
};

enum class Placement { random, near_diagonal, far };

// Draws the support per the placement rule (random: uniform without
// replacement from 1..S; near_diagonal: {1..s}; far: {S-s+1..S}), assigns
// signs (uniform +/-1 when two_sided, else all +1), and validates that the
// induced matrix is positive definite.  Throws std::invalid_argument on
// parameter violations and std::domain_error when the induced matrix is not
// positive definite.
SparseAlternative make_sparse_alternative(std::size_t p, std::size_t s, std::size_t S,
                                          double sigma, Placement placement,
                                          bool two_sided, RngStream& rng);

// Lower-triangular Cholesky factor restricted to the band of the input:
// row k stores L(k, k-bandwidth .. k) contiguously.  For a Toeplitz matrix
// with largest nonzero lag B, the factor itself has bandwidth B.
struct BandedCholesky {
  std::size_t p = 0;
  std::size_t bandwidth = 0;
  std::vector<double> rows;  // p * (bandwidth+1), row-major

  double at(std::size_t k, std::size_t j) const;  // L(k,j), 0 outside band
  // x = L z for z of length p, O(p * bandwidth).
  void multiply(const double* z, double* x) const;
};

// Factors the densified spec; empty when a pivot falls at or below
// tol * sigma0 (the matrix is not numerically positive definite).
std::optional<BandedCholesky> banded_cholesky(const ToeplitzSpec& spec,
                                              double tol = 1e-10);

bool is_positive_definite(const ToeplitzSpec& spec);

const char* placement_token(Placement placement);
Placement parse_placement(std::string_view token);

}  // namespace tcov

#pragma once

#include <cstddef>
#include <string_view>

namespace tcov {

// The four goodness-of-fit tests plus the lag selector.  "ms" kinds sum all S
// lag functionals (moderately sparse regime); "hs" kinds scan s-subsets
// (highly sparse regime); the "_plus" variants are one-sided (signed sums),
// the plain variants two-sided (absolute values).
enum class TestKind { ms_plus, ms, hs_plus, hs, selector };

const char* kind_token(TestKind kind);          // "ms+", "ms", "hs+", "hs", "selector"
TestKind parse_kind(std::string_view token);
bool kind_is_one_sided(TestKind kind);          // ms+ / hs+
bool kind_is_scan(TestKind kind);               // hs+ / hs

// Parameters addressing one closed-form threshold.  K is the Bernstein split
// constant in (0,1); the proofs fix K = 1/2 and so does the default.  u is
// the confidence parameter: u > 0 suffices for ms+, the other kinds need
// u > 1.  s is required for the scan kinds and the selector.
struct ThresholdSpec {
  TestKind kind = TestKind::ms_plus;
  double u = 2.0;
  double K = 0.5;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t S = 0;
  std::size_t s = 0;

  void validate() const;
};

double default_u(TestKind kind);  // 8 for ms+, 2 otherwise

// Sub-exponential parameters of the centered quadratic functional:
// nu2 = 2*frob2/(n(1-K)), b = 2*op/(n*K), from the squared Frobenius norm and
// the operator norm of A*Sigma.  Zero norms yield the degenerate (0,0).
struct SubExpParams {
  double nu2 = 0.0;
  double b = 0.0;
};

SubExpParams subexp_params(double frob2, double op, std::size_t n, double K);

// Bernstein-type tail radius max(nu*sqrt(u), b*u): a sub-exponential variable
// with parameters (nu2, b) exceeds it with probability at most exp(-u/2).
double bernstein_threshold(const SubExpParams& params, double u);

// Closed-form norm bounds for the averaging functional A_W times a covariance
// from the sparse class: op_bound >= ||A_W Sigma||_inf (spectral norm),
// frob2_bound >= ||A_W Sigma||_F^2.  The singleton flag (w = 1 only) selects
// the sharper Frobenius bound kappa(2s+1)/(p-S); otherwise the bound is
// w(2s+1)^2/(2(p-S)).  kappa is 1 when W sits inside {1..p/2-1} ("early"),
// p/2 when it sits beyond ("late").  Plain A_W bounds are the s = 0,
// sigma0 = 1, non-singleton case: w/(p-S) and w/(2(p-S)).
struct NormBounds {
  double op_bound = 0.0;
  double frob2_bound = 0.0;
  double kappa = 1.0;
};

enum class LagWindow { early, late };

NormBounds norm_bounds(std::size_t w, std::size_t s, std::size_t S, std::size_t p,
                       double sigma0, bool singleton, LagWindow location);

// Tail radius for the lag-window functional under the null covariance:
// t = max( sqrt(u/(2(1-K))) * sqrt(w/(n(p-S))), (u/K) * w/(n(p-S)) );
// the signed statistic exceeds sigma0*t with probability <= exp(-u/4), and
// the absolute statistic with probability <= 2 exp(-u/4).
double null_tail_radius(double u, double K, std::size_t w, std::size_t n,
                        std::size_t p, std::size_t S);

// Same under an arbitrary sparse-class covariance (deviation from its own
// mean): for w = 1 the radius is
// max( sqrt(u/(1-K)) * sqrt((2s+1)/(n(p-S))), (u/K)(2s+1)/(n(p-S)) ),
// for w > 1 it is (2s+1) times the null radius.
double deviation_tail_radius(double u, double K, std::size_t w, std::size_t s,
                             std::size_t n, std::size_t p, std::size_t S);

// log C(S, s) via log-gamma (C(S,s) itself overflows for moderate S).
double log_binomial(std::size_t S, std::size_t s);

// The closed-form rejection threshold of each test (selector included), with
// D = n(p-S):
//   ms+:  max( sqrt(uS/D), 2uS/D )
//   ms:   S * max( sqrt(4u logS / D), 8u logS / D )
//   hs+:  max( sqrt(4us logC(S,s) / D), 8us logC(S,s) / D )
//   hs:   s * max( sqrt(4u log(s C(S,s)) / D), 8u log(s C(S,s)) / D )
double theoretical_threshold(const ThresholdSpec& spec);

// Smallest signal level sigma at which the corresponding risk bound applies.
// Note the ms radius swaps u for (u-1) inside its added max term while the
// threshold itself keeps u -- that asymmetry is intentional and preserved.
double separation_radius(const ThresholdSpec& spec);

// Entry-wise selection threshold tau_n =
// max( (sqrt(log s)+sqrt(log(S-s))) * sqrt(u(2s+1)/D),
//      2u log(s(S-s)) (2s+1)/D ),
// logs clamped at 0 so degenerate s(S-s) <= 1 still yields a valid
// nonnegative threshold.  Requires u > 1 and 1 <= s < S.
double selector_threshold(std::size_t n, std::size_t p, std::size_t S,
                          std::size_t s, double u);

// The guaranteed risk at the separation radius: total test risk (type I plus
// worst-case type II) for the test kinds, expected Hamming loss for the
// selector.  Can exceed 1 for small u (the guarantee is then vacuous).
double risk_bound(TestKind kind, double u, std::size_t S, std::size_t s);

}  // namespace tcov

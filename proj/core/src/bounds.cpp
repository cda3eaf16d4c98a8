#include "tcov/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tcov {

const char* kind_token(TestKind kind) {
  switch (kind) {
    case TestKind::ms_plus: return "ms+";
    case TestKind::ms: return "ms";
    case TestKind::hs_plus: return "hs+";
    case TestKind::hs: return "hs";
    case TestKind::selector: return "selector";
  }
  return "ms+";
}

TestKind parse_kind(std::string_view token) {
  if (token == "ms+") return TestKind::ms_plus;
  if (token == "ms") return TestKind::ms;
  if (token == "hs+") return TestKind::hs_plus;
  if (token == "hs") return TestKind::hs;
  if (token == "selector") return TestKind::selector;
  throw std::invalid_argument("unknown test kind: " + std::string(token));
}

bool kind_is_one_sided(TestKind kind) {
  return kind == TestKind::ms_plus || kind == TestKind::hs_plus;
}

bool kind_is_scan(TestKind kind) {
  return kind == TestKind::hs_plus || kind == TestKind::hs;
}

double default_u(TestKind kind) {
  // ms+ allows any u > 0; u = 8 gives a 2e^{-2} ~ 0.27 risk guarantee.  The
  // other kinds only need legality (u > 1), and the harness mostly calibrates
  // empirically, so 2 is the documented default.
  return kind == TestKind::ms_plus ? 8.0 : 2.0;
}

void ThresholdSpec::validate() const {
  if (n < 1) throw std::invalid_argument("ThresholdSpec: need n >= 1");
  if (S < 1 || 2 * S >= p) {
    throw std::invalid_argument("ThresholdSpec: need 1 <= S < p/2");
  }
  if (!(K > 0.0 && K < 1.0)) {
    throw std::invalid_argument("ThresholdSpec: need K in (0,1)");
  }
  const bool needs_s = kind_is_scan(kind) || kind == TestKind::selector;
  if (needs_s) {
    if (s < 1 || s > S) {
      throw std::invalid_argument("ThresholdSpec: scan/selector kinds need 1 <= s <= S");
    }
    if (kind == TestKind::selector && s >= S) {
      throw std::invalid_argument("ThresholdSpec: selector needs s < S");
    }
  }
  if (kind == TestKind::ms_plus) {
    if (!(u > 0.0)) throw std::invalid_argument("ThresholdSpec: ms+ needs u > 0");
  } else {
    if (!(u > 1.0)) {
      throw std::invalid_argument(
          std::string("ThresholdSpec: ") + kind_token(kind) + " needs u > 1");
    }
  }
}

SubExpParams subexp_params(double frob2, double op, std::size_t n, double K) {
  if (frob2 < 0.0 || op < 0.0) {
    throw std::invalid_argument("subexp_params: norms must be nonnegative");
  }
  if (n < 1) throw std::invalid_argument("subexp_params: need n >= 1");
  if (!(K > 0.0 && K < 1.0)) {
    throw std::invalid_argument("subexp_params: need K in (0,1)");
  }
  SubExpParams out;
  out.nu2 = 2.0 * frob2 / (static_cast<double>(n) * (1.0 - K));
  out.b = 2.0 * op / (static_cast<double>(n) * K);
  return out;
}

double bernstein_threshold(const SubExpParams& params, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("bernstein_threshold: need u > 0");
  if (params.nu2 < 0.0 || params.b < 0.0) {
    throw std::invalid_argument("bernstein_threshold: invalid parameters");
  }
  return std::max(std::sqrt(params.nu2) * std::sqrt(u), params.b * u);
}

NormBounds norm_bounds(std::size_t w, std::size_t s, std::size_t S, std::size_t p,
                       double sigma0, bool singleton, LagWindow location) {
  if (w < 1 || w > S || S >= p) {
    throw std::invalid_argument("norm_bounds: need 1 <= w <= S < p");
  }
  if (singleton && w != 1) {
    throw std::invalid_argument("norm_bounds: singleton bound requires w = 1");
  }
  if (!(sigma0 > 0.0)) {
    throw std::invalid_argument("norm_bounds: sigma0 must be positive");
  }
  const double pd = static_cast<double>(p - S);
  const double width = 2.0 * static_cast<double>(s) + 1.0;
  NormBounds out;
  out.kappa = location == LagWindow::early ? 1.0 : static_cast<double>(p) / 2.0;
  out.op_bound = sigma0 * static_cast<double>(w) * width / pd;
  if (singleton) {
    out.frob2_bound = sigma0 * sigma0 * out.kappa * width / pd;
  } else {
    out.frob2_bound =
        sigma0 * sigma0 * static_cast<double>(w) * width * width / (2.0 * pd);
  }
  return out;
}

namespace {

double ratio_D(std::size_t n, std::size_t p, std::size_t S) {
  return static_cast<double>(n) * static_cast<double>(p - S);
}

// max( sqrt(a/D), b/D ) -- the recurring two-branch profile.
double two_branch(double sqrt_numerator, double linear_numerator, double D) {
  return std::max(std::sqrt(sqrt_numerator / D), linear_numerator / D);
}

}  // namespace

double null_tail_radius(double u, double K, std::size_t w, std::size_t n,
                        std::size_t p, std::size_t S) {
  if (!(u > 0.0)) throw std::invalid_argument("null_tail_radius: need u > 0");
  if (!(K > 0.0 && K < 1.0)) {
    throw std::invalid_argument("null_tail_radius: need K in (0,1)");
  }
  if (w < 1 || S < w || 2 * S >= p || n < 1) {
    throw std::invalid_argument("null_tail_radius: need 1 <= w <= S < p/2, n >= 1");
  }
  const double D = ratio_D(n, p, S);
  const double wd = static_cast<double>(w);
  return std::max(std::sqrt(u / (2.0 * (1.0 - K))) * std::sqrt(wd / D),
                  (u / K) * wd / D);
}

double deviation_tail_radius(double u, double K, std::size_t w, std::size_t s,
                             std::size_t n, std::size_t p, std::size_t S) {
  if (!(u > 0.0)) throw std::invalid_argument("deviation_tail_radius: need u > 0");
  if (!(K > 0.0 && K < 1.0)) {
    throw std::invalid_argument("deviation_tail_radius: need K in (0,1)");
  }
  if (w < 1 || S < w || 2 * S >= p || n < 1) {
    throw std::invalid_argument("deviation_tail_radius: need 1 <= w <= S < p/2, n >= 1");
  }
  const double width = 2.0 * static_cast<double>(s) + 1.0;
  if (w == 1) {
    const double D = ratio_D(n, p, S);
    return std::max(std::sqrt(u / (1.0 - K)) * std::sqrt(width / D),
                    (u / K) * width / D);
  }
  return width * null_tail_radius(u, K, w, n, p, S);
}

double log_binomial(std::size_t S, std::size_t s) {
  if (s > S) throw std::invalid_argument("log_binomial: need s <= S");
  return std::lgamma(static_cast<double>(S) + 1.0) -
         std::lgamma(static_cast<double>(s) + 1.0) -
         std::lgamma(static_cast<double>(S - s) + 1.0);
}

double theoretical_threshold(const ThresholdSpec& spec) {
  spec.validate();
  const double D = ratio_D(spec.n, spec.p, spec.S);
  const double u = spec.u;
  const double Sd = static_cast<double>(spec.S);
  const double sd = static_cast<double>(spec.s);
  switch (spec.kind) {
    case TestKind::ms_plus:
      return two_branch(u * Sd, 2.0 * u * Sd, D);
    case TestKind::ms: {
      const double logS = std::log(Sd);
      return Sd * two_branch(4.0 * u * logS, 8.0 * u * logS, D);
    }
    case TestKind::hs_plus: {
      const double logC = log_binomial(spec.S, spec.s);
      return two_branch(4.0 * u * sd * logC, 8.0 * u * sd * logC, D);
    }
    case TestKind::hs: {
      const double logsC = std::log(sd) + log_binomial(spec.S, spec.s);
      return sd * two_branch(4.0 * u * logsC, 8.0 * u * logsC, D);
    }
    case TestKind::selector:
      return selector_threshold(spec.n, spec.p, spec.S, spec.s, spec.u);
  }
  throw std::logic_error("theoretical_threshold: unreachable");
}

double separation_radius(const ThresholdSpec& spec) {
  spec.validate();
  if (spec.kind != TestKind::selector && (spec.s < 1 || spec.s > spec.S)) {
    throw std::invalid_argument("separation_radius: need 1 <= s <= S");
  }
  const double D = ratio_D(spec.n, spec.p, spec.S);
  const double u = spec.u;
  const double sd = static_cast<double>(spec.s);
  const double width = 2.0 * sd + 1.0;
  switch (spec.kind) {
    case TestKind::ms_plus:
      return (2.0 * (sd + 1.0) / sd) * theoretical_threshold(spec);
    case TestKind::ms: {
      // The added term runs on (u-1) in both branches while the threshold
      // keeps u; implemented exactly as stated.
      const double logS = std::log(static_cast<double>(spec.S));
      const double extra =
          two_branch(4.0 * (u - 1.0) * width * logS, 8.0 * (u - 1.0) * width * logS, D);
      return theoretical_threshold(spec) + extra;
    }
    case TestKind::hs_plus: {
      const double extra = width * two_branch(u * sd, 2.0 * u * sd, D);
      return (theoretical_threshold(spec) + extra) / sd;
    }
    case TestKind::hs: {
      const double logterm = std::log(sd * width) + log_binomial(spec.S, spec.s);
      const double extra =
          two_branch(4.0 * (u - 1.0) * logterm, 8.0 * (u - 1.0) * logterm, D);
      return theoretical_threshold(spec) + extra;
    }
    case TestKind::selector:
      return 2.0 * selector_threshold(spec.n, spec.p, spec.S, spec.s, spec.u);
  }
  throw std::logic_error("separation_radius: unreachable");
}

double selector_threshold(std::size_t n, std::size_t p, std::size_t S,
                          std::size_t s, double u) {
  if (!(u > 1.0)) throw std::invalid_argument("selector_threshold: need u > 1");
  if (s < 1 || s >= S) {
    throw std::invalid_argument("selector_threshold: need 1 <= s < S");
  }
  if (2 * S >= p || n < 1) {
    throw std::invalid_argument("selector_threshold: need S < p/2, n >= 1");
  }
  const double D = ratio_D(n, p, S);
  const double width = 2.0 * static_cast<double>(s) + 1.0;
  // Clamp the logs at 0: s = 1 or S-s = 1 make individual terms vanish, and
  // s(S-s) = 1 would otherwise turn the linear branch negative.
  const double log_s = std::max(0.0, std::log(static_cast<double>(s)));
  const double log_gap = std::max(0.0, std::log(static_cast<double>(S - s)));
  const double sqrt_branch =
      (std::sqrt(log_s) + std::sqrt(log_gap)) * std::sqrt(u * width / D);
  const double linear_branch = 2.0 * u * (log_s + log_gap) * width / D;
  return std::max(sqrt_branch, linear_branch);
}

double risk_bound(TestKind kind, double u, std::size_t S, std::size_t s) {
  switch (kind) {
    case TestKind::ms_plus:
      return 2.0 * std::exp(-u / 4.0);
    case TestKind::ms:
      return 4.0 * std::exp(-(u - 1.0) * std::log(static_cast<double>(S)));
    case TestKind::hs_plus:
      return std::exp(-(u - 1.0) * log_binomial(S, s)) + std::exp(-u / 4.0);
    case TestKind::hs:
      return 4.0 * std::exp(-(u - 1.0) * (std::log(static_cast<double>(s)) +
                                          log_binomial(S, s)));
    case TestKind::selector: {
      const double log_s = std::max(0.0, std::log(static_cast<double>(s)));
      const double log_gap = std::max(0.0, std::log(static_cast<double>(S - s)));
      return 2.0 * std::exp(-(u - 1.0) * log_s / 4.0) +
             2.0 * std::exp(-(u - 1.0) * log_gap / 4.0);
    }
  }
  throw std::logic_error("risk_bound: unreachable");
}

}  // namespace tcov

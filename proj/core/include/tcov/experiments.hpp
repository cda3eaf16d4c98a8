#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcov/bounds.hpp"
#include "tcov/testing.hpp"
#include "tcov/toeplitz.hpp"

namespace tcov {

// Invalid configuration (bad grids, impossible parameter combinations).  The
// CLI maps this to exit code 1; genuine runtime failures exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Default lag horizon S = floor(sqrt(p)), clipped to the standing S < p/2
// constraint; default sparsity s = (S-1)/2, floored at 1.
std::size_t default_horizon(std::size_t p);
std::size_t default_sparsity(std::size_t S);

// One experiment run: which scenario, the model/test parameters, the sweep
// grids, and the reproducibility seed.  Size-zero S / s mean "derive the
// default from p".  A zero u means "per-kind default" (8 for ms+, 2 else).
struct ExperimentConfig {
  std::string scenario = "power_curve";

  std::size_t n = 100;
  std::size_t p = 100;
  std::size_t S = 0;
  std::size_t s = 0;
  double alpha = 0.1;
  std::size_t replications = 5000;

  std::vector<double> sigma_grid;        // power_curve / ms_vs_hs; empty = auto
  std::vector<double> phi_grid;          // ma_power
  std::vector<std::size_t> n_grid;       // selection_risk
  std::vector<std::size_t> p_grid;       // ma_power / verify_concentration
  std::vector<std::size_t> s_grid;       // ms_vs_hs
  std::vector<std::size_t> w_grid;       // verify_concentration; empty = {S}
  std::vector<double> u_grid;            // verify_concentration

  std::vector<TestKind> kinds;           // power_curve / type1; empty = all four
  Placement placement = Placement::random;
  ThresholdSource threshold_source = ThresholdSource::calibrated;

  std::uint64_t master_seed = 1729;
  double u = 0.0;
  double K = 0.5;
  double sigma_scale = 2.0;   // selection_risk: sigma = scale * tau_n;
                              // ms_vs_hs: sigma = scale * t_ms / S
  std::size_t grid_points = 12;
  unsigned workers = 1;
  bool absolute = false;      // verify_concentration: |.| variant, doubled bound

  bool operator==(const ExperimentConfig&) const = default;

  std::size_t horizon() const;                  // resolved S
  std::size_t horizon_for(std::size_t dim) const;
  std::size_t sparsity() const;                 // resolved s
  double u_for(TestKind kind) const;            // resolved u
  void validate() const;
};

// JSON round trip.  Unknown keys are rejected (they are almost always typos),
// missing keys keep their defaults.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

// Sweep output: a header plus preformatted rows.  All doubles are printed in
// shortest round-trip form, so identical runs give byte-identical CSV.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

// Shortest representation that parses back to exactly the same double.
std::string format_double(double value);

// Binomial standard error sqrt(rate(1-rate)/R).
double binomial_se(double rate, std::size_t replications);

// Caches calibrated thresholds across scenario runs.  The memo key is
// (kind, n, p, S, s, alpha, replications) and the draw streams depend only on
// the master seed and that key, so any scenario sharing the parameters reuses
// the identical threshold.
class Session {
 public:
  explicit Session(std::uint64_t master_seed, unsigned workers = 1);

  double calibrated_threshold(TestKind kind, std::size_t n, std::size_t p,
                              std::size_t S, std::size_t s, double alpha,
                              std::size_t replications);
  // Deterministic child stream for a named purpose.
  RngStream stream(const std::string& label, std::uint64_t lane = 0) const;
  std::uint64_t master_seed() const { return root_.master_seed(); }
  unsigned workers() const { return workers_; }

 private:
  RngStream root_;
  unsigned workers_ = 1;
  std::map<std::string, double> memo_;
};

// Scenario drivers.  Each validates the config, runs the Monte Carlo sweep,
// and returns a plot-ready table (power curves carry the separation measure
// s*sigma and its log10 as columns; nothing is rendered).
ResultTable run_power_curve(const ExperimentConfig& config, Session& session);
ResultTable run_type1(const ExperimentConfig& config, Session& session);
ResultTable run_selection_risk(const ExperimentConfig& config, Session& session);
ResultTable run_ma_experiment(const ExperimentConfig& config, Session& session);
ResultTable run_verify_concentration(const ExperimentConfig& config, Session& session);
ResultTable run_ms_vs_hs(const ExperimentConfig& config, Session& session);

// Dispatch on config.scenario.
ResultTable run_scenario(const ExperimentConfig& config, Session& session);

// Largest sigma (up to the unit-diagonal cap) at which the given support and
// sign pattern stays positive definite, found by bisection; the PD region in
// sigma is an interval because the smallest eigenvalue is affine in sigma.
double positive_definite_cap(std::size_t p, const std::vector<std::size_t>& support,
                             const std::vector<int>& signs);

}  // namespace tcov

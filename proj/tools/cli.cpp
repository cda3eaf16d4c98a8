#include "cli.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tcov/bounds.hpp"
#include "tcov/experiments.hpp"
#include "tcov/testing.hpp"

namespace tcov {

namespace {

// Option slots for the sweep subcommands.  Values are copied into the
// ExperimentConfig only for flags the user actually passed, so the precedence
// is flag > config file > TCOV_SEED > built-in default.
struct ScenarioOptions {
  CLI::App* cmd = nullptr;
  std::string config_path;
  std::string out_path;

  std::size_t n = 0, p = 0, S = 0, s = 0, replications = 0, grid_points = 0;
  double alpha = 0, u = 0, K = 0, sigma_scale = 0;
  unsigned workers = 0;
  std::uint64_t seed = 0;
  bool absolute = false;
  std::string placement, threshold_source;
  std::vector<std::string> kinds;
  std::vector<double> sigma_grid, phi_grid, u_grid;
  std::vector<std::size_t> n_grid, p_grid, s_grid, w_grid;
};

void add_scenario_options(CLI::App* cmd, ScenarioOptions& opt) {
  opt.cmd = cmd;
  cmd->add_option("--config", opt.config_path, "JSON experiment config");
  cmd->add_option("--out", opt.out_path, "write the CSV here instead of stdout");
  cmd->add_option("-n,--samples", opt.n, "sample size n");
  cmd->add_option("-p,--dimension", opt.p, "vector dimension p");
  cmd->add_option("-S,--horizon", opt.S, "lag horizon (default floor(sqrt(p)))");
  cmd->add_option("-s,--sparsity", opt.s, "support size (default (S-1)/2)");
  cmd->add_option("--alpha", opt.alpha, "target level");
  cmd->add_option("-R,--replications", opt.replications, "Monte Carlo replications");
  cmd->add_option("--seed", opt.seed, "master seed");
  cmd->add_option("--u", opt.u, "deviation parameter for theoretical thresholds");
  cmd->add_option("--K", opt.K, "split parameter in (0,1)");
  cmd->add_option("--workers", opt.workers, "worker threads");
  cmd->add_option("--placement", opt.placement,
                  "support placement: random|near_diagonal|far");
  cmd->add_option("--threshold-source", opt.threshold_source,
                  "threshold source: calibrated|theoretical");
  cmd->add_option("--kinds", opt.kinds, "test kinds, e.g. ms+,ms,hs+,hs")
      ->delimiter(',');
  cmd->add_option("--sigma-grid", opt.sigma_grid, "signal levels")->delimiter(',');
  cmd->add_option("--phi-grid", opt.phi_grid, "moving-average coefficients")
      ->delimiter(',');
  cmd->add_option("--n-grid", opt.n_grid, "sample size sweep")->delimiter(',');
  cmd->add_option("--p-grid", opt.p_grid, "dimension sweep")->delimiter(',');
  cmd->add_option("--s-grid", opt.s_grid, "sparsity sweep")->delimiter(',');
  cmd->add_option("--w-grid", opt.w_grid, "window width sweep")->delimiter(',');
  cmd->add_option("--u-grid", opt.u_grid, "deviation parameter sweep")
      ->delimiter(',');
  cmd->add_option("--sigma-scale", opt.sigma_scale,
                  "signal level as a multiple of the relevant threshold");
  cmd->add_option("--grid-points", opt.grid_points, "auto sigma grid size");
  cmd->add_flag("--absolute", opt.absolute, "two-sided variant where applicable");
}

bool env_seed(std::uint64_t& seed) {
  const char* text = std::getenv("TCOV_SEED");
  if (text == nullptr || *text == '\0') return false;
  const char* end = text + std::string_view(text).size();
  const auto res = std::from_chars(text, end, seed);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError(std::string("TCOV_SEED is not an unsigned integer: ") + text);
  }
  return true;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ExperimentConfig build_config(const ScenarioOptions& opt, const char* scenario) {
  ExperimentConfig config;
  bool seed_fixed = false;

  if (!opt.config_path.empty()) {
    const std::string text = read_file(opt.config_path);
    config = config_from_json(text);
    seed_fixed = nlohmann::json::parse(text).contains("master_seed");
  }
  if (!seed_fixed) {
    std::uint64_t seed = 0;
    if (env_seed(seed)) config.master_seed = seed;
  }

  const auto passed = [&](const char* name) { return opt.cmd->count(name) > 0; };
  if (passed("--samples")) config.n = opt.n;
  if (passed("--dimension")) config.p = opt.p;
  if (passed("--horizon")) config.S = opt.S;
  if (passed("--sparsity")) config.s = opt.s;
  if (passed("--alpha")) config.alpha = opt.alpha;
  if (passed("--replications")) config.replications = opt.replications;
  if (passed("--seed")) config.master_seed = opt.seed;
  if (passed("--u")) config.u = opt.u;
  if (passed("--K")) config.K = opt.K;
  if (passed("--workers")) config.workers = opt.workers;
  if (passed("--placement")) config.placement = parse_placement(opt.placement);
  if (passed("--threshold-source")) {
    config.threshold_source = parse_threshold_source(opt.threshold_source);
  }
  if (passed("--kinds")) {
    config.kinds.clear();
    for (const auto& token : opt.kinds) config.kinds.push_back(parse_kind(token));
  }
  if (passed("--sigma-grid")) config.sigma_grid = opt.sigma_grid;
  if (passed("--phi-grid")) config.phi_grid = opt.phi_grid;
  if (passed("--n-grid")) config.n_grid = opt.n_grid;
  if (passed("--p-grid")) config.p_grid = opt.p_grid;
  if (passed("--s-grid")) config.s_grid = opt.s_grid;
  if (passed("--w-grid")) config.w_grid = opt.w_grid;
  if (passed("--u-grid")) config.u_grid = opt.u_grid;
  if (passed("--sigma-scale")) config.sigma_scale = opt.sigma_scale;
  if (passed("--grid-points")) config.grid_points = opt.grid_points;
  if (passed("--absolute")) config.absolute = opt.absolute;

  config.scenario = scenario;
  config.validate();
  return config;
}

int run_sweep(const ScenarioOptions& opt, const char* scenario, std::ostream& out) {
  const ExperimentConfig config = build_config(opt, scenario);
  Session session(config.master_seed, config.workers);
  const std::string csv = run_scenario(config, session).to_csv();
  if (!opt.out_path.empty()) {
    std::ofstream file(opt.out_path, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file: " + opt.out_path);
    file << csv;
  } else {
    out << csv;
  }
  return 0;
}

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

bool parse_double_token(std::string_view token, double& value) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, value);
  return res.ec == std::errc{} && res.ptr == end;
}

}  // namespace

SampleSet read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file: " + path);

  SampleSet samples;
  std::string line;
  std::size_t row_number = 0;
  bool first_content_row = true;
  std::vector<double> row;

  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t,") == std::string::npos) continue;

    row.clear();
    bool numeric = true;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      std::string_view token(line.data() + start, comma - start);
      while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) {
        token.remove_prefix(1);
      }
      while (!token.empty() && (token.back() == ' ' || token.back() == '\t')) {
        token.remove_suffix(1);
      }
      double value = 0.0;
      if (!parse_double_token(token, value)) {
        numeric = false;
        break;
      }
      row.push_back(value);
      start = comma + 1;
    }

    if (!numeric) {
      if (first_content_row) {
        first_content_row = false;  // header row
        continue;
      }
      throw ConfigError("non-numeric value in data row " + std::to_string(row_number) +
                        " of " + path);
    }
    first_content_row = false;

    if (samples.p == 0) {
      samples.p = row.size();
    } else if (row.size() != samples.p) {
      throw ConfigError("row " + std::to_string(row_number) + " of " + path + " has " +
                        std::to_string(row.size()) + " values, expected " +
                        std::to_string(samples.p));
    }
    samples.data.insert(samples.data.end(), row.begin(), row.end());
    ++samples.n;
  }

  if (samples.n == 0) throw ConfigError("no data rows in " + path);
  return samples;
}

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Goodness-of-fit tests and lag selection for sparse Toeplitz "
               "covariance matrices"};
  app.require_subcommand(1);

  std::vector<std::pair<CLI::App*, std::function<int()>>> actions;

  // ---- sweep subcommands ------------------------------------------------
  struct SweepSpec {
    const char* command;
    const char* scenario;
    const char* help;
  };
  const std::array<SweepSpec, 6> sweeps{{
      {"power-curve", "power_curve",
       "Monte Carlo power against sparse alternatives over a signal grid"},
      {"type1", "type1", "empirical size of each test under the null"},
      {"selection-risk", "selection_risk",
       "expected Hamming loss of the lag selector over a sample size sweep"},
      {"ma-power", "ma_power",
       "power against a subsampled moving-average process"},
      {"verify-bounds", "verify_concentration",
       "empirical tail mass of the null statistic against its bound"},
      {"ms-vs-hs", "ms_vs_hs",
       "paired power of the sum and scan statistics at sparse alternatives"},
  }};
  std::array<ScenarioOptions, 6> sweep_options;
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(sweeps[i].command, sweeps[i].help);
    add_scenario_options(cmd, sweep_options[i]);
    const char* scenario = sweeps[i].scenario;
    ScenarioOptions* opt = &sweep_options[i];
    actions.emplace_back(cmd, [opt, scenario, &out] {
      return run_sweep(*opt, scenario, out);
    });
  }

  // ---- thresholds -------------------------------------------------------
  struct {
    std::string kind;
    double u = 0, K = 0.5;
    std::size_t n = 0, p = 0, S = 0, s = 0;
    bool separation = false;
  } thr;
  {
    CLI::App* cmd = app.add_subcommand(
        "thresholds", "print the closed-form threshold (or separation radius)");
    cmd->add_option("--kind", thr.kind, "ms+|ms|hs+|hs|selector")->required();
    cmd->add_option("--u", thr.u, "deviation parameter");
    cmd->add_option("--K", thr.K, "split parameter in (0,1)");
    cmd->add_option("-n,--samples,--n", thr.n, "sample size")->required();
    cmd->add_option("-p,--dimension,--p", thr.p, "dimension")->required();
    cmd->add_option("-S,--horizon,--S", thr.S, "lag horizon")->required();
    cmd->add_option("-s,--sparsity,--s", thr.s, "support size");
    cmd->add_flag("--separation", thr.separation,
                  "print the separation radius instead of the threshold");
    actions.emplace_back(cmd, [&thr, &out] {
      const TestKind kind = parse_kind(thr.kind);
      ThresholdSpec spec;
      spec.kind = kind;
      spec.u = thr.u > 0 ? thr.u : default_u(kind);
      spec.K = thr.K;
      spec.n = thr.n;
      spec.p = thr.p;
      spec.S = thr.S;
      spec.s = thr.s != 0 ? thr.s
                          : (kind_is_scan(kind) || kind == TestKind::selector
                                 ? default_sparsity(thr.S)
                                 : 0);
      const double value =
          thr.separation ? separation_radius(spec) : theoretical_threshold(spec);
      out << fixed6(value) << "\n";
      return 0;
    });
  }

  // ---- calibrate --------------------------------------------------------
  struct {
    std::string kind;
    std::size_t n = 100, p = 100, S = 0, s = 0, replications = 5000;
    double alpha = 0.1;
    std::uint64_t seed = 1729;
    unsigned workers = 1;
  } cal;
  {
    CLI::App* cmd = app.add_subcommand(
        "calibrate", "Monte Carlo threshold for a test at level alpha");
    cmd->add_option("--kind", cal.kind, "ms+|ms|hs+|hs")->required();
    cmd->add_option("-n,--samples", cal.n, "sample size")->required();
    cmd->add_option("-p,--dimension", cal.p, "dimension")->required();
    cmd->add_option("-S,--horizon", cal.S, "lag horizon (default floor(sqrt(p)))");
    cmd->add_option("-s,--sparsity", cal.s, "support size for scan statistics");
    cmd->add_option("--alpha", cal.alpha, "target level");
    cmd->add_option("-R,--replications", cal.replications, "null replications");
    cmd->add_option("--seed", cal.seed, "master seed");
    cmd->add_option("--workers", cal.workers, "worker threads");
    actions.emplace_back(cmd, [&cal, cmd, &out] {
      const TestKind kind = parse_kind(cal.kind);
      if (kind == TestKind::selector) {
        throw ConfigError("the selector threshold is closed-form; use `thresholds`");
      }
      if (cmd->count("--seed") == 0) env_seed(cal.seed);
      const std::size_t S = cal.S != 0 ? cal.S : default_horizon(cal.p);
      const std::size_t s = cal.s != 0 ? cal.s : default_sparsity(S);
      Session session(cal.seed, cal.workers);
      const double t = session.calibrated_threshold(kind, cal.n, cal.p, S, s,
                                                    cal.alpha, cal.replications);
      out << format_double(t) << "\n";
      return 0;
    });
  }

  // ---- test -------------------------------------------------------------
  struct {
    std::string data, kind, source = "calibrated", aggregate = "bonferroni";
    std::size_t S = 0, s = 0, replications = 5000;
    std::vector<std::size_t> s_grid;
    double alpha = 0.1, threshold = 0, u = 0, K = 0.5;
    std::uint64_t seed = 1729;
    unsigned workers = 1;
    bool studentize = false;
  } tst;
  {
    CLI::App* cmd =
        app.add_subcommand("test", "apply one test to a samples file");
    cmd->add_option("--data", tst.data, "samples CSV (one observation per row)")
        ->required();
    cmd->add_option("--kind", tst.kind, "ms+|ms|hs+|hs")->required();
    cmd->add_option("-S,--horizon", tst.S, "lag horizon (default floor(sqrt(p)))");
    cmd->add_option("-s,--sparsity", tst.s, "support size for scan statistics");
    cmd->add_option("--s-grid", tst.s_grid,
                    "aggregate a scan test over these support sizes")
        ->delimiter(',');
    cmd->add_option("--aggregate", tst.aggregate,
                    "aggregate calibration: bonferroni|joint");
    cmd->add_option("--alpha", tst.alpha, "target level");
    cmd->add_option("--threshold", tst.threshold, "explicit threshold");
    cmd->add_option("--threshold-source", tst.source, "calibrated|theoretical");
    cmd->add_option("--u", tst.u, "deviation parameter for theoretical thresholds");
    cmd->add_option("--K", tst.K, "split parameter");
    cmd->add_option("-R,--replications", tst.replications,
                    "replications for calibration");
    cmd->add_option("--seed", tst.seed, "master seed for calibration");
    cmd->add_option("--workers", tst.workers, "worker threads");
    cmd->add_flag("--studentize", tst.studentize,
                  "divide lag functionals by the variance functional");
    actions.emplace_back(cmd, [&tst, cmd, &out] {
      const TestKind kind = parse_kind(tst.kind);
      if (kind == TestKind::selector) {
        throw ConfigError("the selector is not a test; use `select`");
      }
      if (cmd->count("--seed") == 0) env_seed(tst.seed);
      const SampleSet samples = read_samples_csv(tst.data);
      const std::size_t S = tst.S != 0 ? tst.S : default_horizon(samples.p);
      const std::size_t s = tst.s != 0 ? tst.s : default_sparsity(S);
      const DiagonalStats stats = lag_functionals(samples, S, tst.studentize);

      out << "kind=" << kind_token(kind) << "\n";
      out << "n=" << samples.n << "\n";
      out << "p=" << samples.p << "\n";
      out << "S=" << S << "\n";

      if (!tst.s_grid.empty()) {
        if (!kind_is_scan(kind)) {
          throw ConfigError("--s-grid only applies to the scan statistics");
        }
        const ThresholdSource source = parse_threshold_source(tst.source);
        if (source != ThresholdSource::calibrated || cmd->count("--threshold")) {
          throw ConfigError("aggregation over --s-grid needs calibrated thresholds");
        }
        AggregateCalibration mode;
        if (tst.aggregate == "bonferroni") {
          mode = AggregateCalibration::bonferroni;
        } else if (tst.aggregate == "joint") {
          mode = AggregateCalibration::joint;
        } else {
          throw ConfigError("unknown aggregate mode: " + tst.aggregate);
        }
        Session session(tst.seed, tst.workers);
        const std::vector<double> thresholds = calibrate_aggregate_thresholds(
            kind, samples.n, samples.p, S, tst.s_grid, tst.alpha, mode,
            tst.replications, session.stream("calibrate-aggregate"),
            tst.workers);
        const TestOutcome outcome = aggregate_hs(kind, stats, tst.s_grid,
                                                 thresholds,
                                                 ThresholdSource::calibrated);
        out << "s_grid=";
        for (std::size_t i = 0; i < tst.s_grid.size(); ++i) {
          out << (i ? "," : "") << tst.s_grid[i];
        }
        out << "\n";
        out << "statistic=" << format_double(outcome.statistic) << "\n";
        out << "threshold=" << format_double(outcome.threshold) << "\n";
        out << "source=" << tst.aggregate << "\n";
        out << "reject=" << (outcome.reject ? 1 : 0) << "\n";
        return 0;
      }

      if (kind_is_scan(kind)) out << "s=" << s << "\n";
      double threshold = 0.0;
      std::string source_name;
      ThresholdSource source = ThresholdSource::theoretical;
      if (cmd->count("--threshold") > 0) {
        threshold = tst.threshold;
        source_name = "explicit";
      } else {
        source = parse_threshold_source(tst.source);
        source_name = threshold_source_token(source);
        if (source == ThresholdSource::calibrated) {
          Session session(tst.seed, tst.workers);
          threshold = session.calibrated_threshold(kind, samples.n, samples.p, S,
                                                   s, tst.alpha, tst.replications);
        } else {
          ThresholdSpec spec;
          spec.kind = kind;
          spec.u = tst.u > 0 ? tst.u : default_u(kind);
          spec.K = tst.K;
          spec.n = samples.n;
          spec.p = samples.p;
          spec.S = S;
          spec.s = kind_is_scan(kind) ? s : 0;
          threshold = theoretical_threshold(spec);
        }
      }
      const TestOutcome outcome = run_test(kind, stats, threshold, source, s);
      out << "statistic=" << format_double(outcome.statistic) << "\n";
      out << "threshold=" << format_double(outcome.threshold) << "\n";
      out << "source=" << source_name << "\n";
      out << "reject=" << (outcome.reject ? 1 : 0) << "\n";
      return 0;
    });
  }

  // ---- select -----------------------------------------------------------
  struct {
    std::string data;
    std::size_t S = 0, s = 0;
    double u = 2.0;
    bool one_sided = false;
  } sel;
  {
    CLI::App* cmd = app.add_subcommand(
        "select", "estimate the support of the lag set from a samples file");
    cmd->add_option("--data", sel.data, "samples CSV (one observation per row)")
        ->required();
    cmd->add_option("-S,--horizon", sel.S, "lag horizon (default floor(sqrt(p)))");
    cmd->add_option("-s,--sparsity", sel.s, "assumed support size (default (S-1)/2)");
    cmd->add_option("--u", sel.u, "deviation parameter (> 1)");
    cmd->add_flag("--one-sided", sel.one_sided, "select on xi_j > tau only");
    actions.emplace_back(cmd, [&sel, &out] {
      const SampleSet samples = read_samples_csv(sel.data);
      const std::size_t S = sel.S != 0 ? sel.S : default_horizon(samples.p);
      const std::size_t s = sel.s != 0 ? sel.s : default_sparsity(S);
      if (s >= S) throw ConfigError("select needs s < S");
      const double tau = selector_threshold(samples.n, samples.p, S, s, sel.u);
      const DiagonalStats stats = lag_functionals(samples, S);
      const std::vector<int> selected = select_lags(stats, tau, sel.one_sided);
      out << "n=" << samples.n << "\n";
      out << "p=" << samples.p << "\n";
      out << "S=" << S << "\n";
      out << "s=" << s << "\n";
      out << "tau=" << format_double(tau) << "\n";
      out << "selected=";
      bool first = true;
      for (std::size_t j = 0; j < selected.size(); ++j) {
        if (selected[j]) {
          out << (first ? "" : ",") << (j + 1);
          first = false;
        }
      }
      out << "\n";
      return 0;
    });
  }

  // ---- parse and dispatch ----------------------------------------------
  try {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("tcov");
    for (const std::string& arg : args) argv.push_back(arg.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    for (const auto& [cmd, action] : actions) {
      if (cmd->parsed()) return action();
    }
    err << "error: no subcommand selected\n";
    return 1;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace tcov

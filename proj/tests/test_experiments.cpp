#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <vector>

#include "tcov/experiments.hpp"
#include "tcov/toeplitz.hpp"

using namespace tcov;

namespace {

ExperimentConfig small_power_config() {
  ExperimentConfig config;
  config.scenario = "power_curve";
  config.n = 10;
  config.p = 20;
  config.S = 4;
  config.s = 2;
  config.replications = 150;
  config.sigma_grid = {0.05, 0.15};
  config.kinds = {TestKind::ms_plus, TestKind::hs};
  return config;
}

double parse_double(const std::string& text) {
  return std::strtod(text.c_str(), nullptr);
}

}  // namespace

TEST_CASE("default horizon and sparsity follow the square-root rule") {
  CHECK(default_horizon(100) == 10);
  CHECK(default_horizon(25) == 5);
  CHECK(default_horizon(10) == 3);
  CHECK(default_horizon(3) == 1);
  // Clipped by S < p/2 when sqrt(p) is too large.
  CHECK(default_horizon(4) == 1);
  CHECK_THROWS_AS(default_horizon(2), ConfigError);

  CHECK(default_sparsity(10) == 4);
  CHECK(default_sparsity(5) == 2);
  CHECK(default_sparsity(3) == 1);
  CHECK(default_sparsity(1) == 1);
}

TEST_CASE("config resolution fills derived values") {
  ExperimentConfig config;
  config.p = 100;
  CHECK(config.horizon() == 10);
  CHECK(config.sparsity() == 4);
  CHECK(config.horizon_for(64) == 8);

  config.S = 7;
  config.s = 3;
  CHECK(config.horizon() == 7);
  CHECK(config.sparsity() == 3);

  CHECK(config.u_for(TestKind::ms_plus) == 8.0);
  CHECK(config.u_for(TestKind::hs) == 2.0);
  config.u = 3.5;
  CHECK(config.u_for(TestKind::ms_plus) == 3.5);
}

TEST_CASE("config validation rejects malformed requests") {
  ExperimentConfig config;
  config.scenario = "unknown_scenario";
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = ExperimentConfig{};
  config.sigma_grid = {0.2, 0.1};  // not ascending
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = ExperimentConfig{};
  config.sigma_grid = {-0.1, 0.2};
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = ExperimentConfig{};
  config.phi_grid = {0.0, 1.5};
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = ExperimentConfig{};
  config.u_grid = {2.0, 0.0};
  CHECK_THROWS_AS(config.validate(), ConfigError);

  CHECK_NOTHROW(small_power_config().validate());
}

TEST_CASE("json round trip preserves every field") {
  ExperimentConfig config = small_power_config();
  config.placement = Placement::far;
  config.threshold_source = ThresholdSource::theoretical;
  config.master_seed = 99;
  config.u = 4.0;
  config.workers = 3;
  config.absolute = true;
  config.w_grid = {2, 4};
  config.u_grid = {2.0, 8.0};

  const std::string text = config_to_json(config);
  const ExperimentConfig back = config_from_json(text);
  CHECK(back == config);
}

TEST_CASE("json parsing rejects unknown keys and bad types") {
  CHECK_THROWS_AS(config_from_json("{\"scenaro\": \"type1\"}"), ConfigError);
  CHECK_THROWS_AS(config_from_json("{\"n\": \"ten\"}"), ConfigError);
  CHECK_THROWS_AS(config_from_json("not json at all"), ConfigError);
  const ExperimentConfig defaults = config_from_json("{}");
  CHECK(defaults == ExperimentConfig{});
}

TEST_CASE("doubles print in shortest round-trip form") {
  for (double v : {0.1, 0.5, 1.0 / 3.0, 0.498534, 1e-12, -0.25, 12345.678, 0.0}) {
    const std::string text = format_double(v);
    CHECK(parse_double(text) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("binomial standard error follows the formula") {
  CHECK(binomial_se(0.5, 100) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(binomial_se(0.1, 5000) ==
        doctest::Approx(std::sqrt(0.1 * 0.9 / 5000.0)).epsilon(1e-12));
  CHECK(binomial_se(0.0, 100) == 0.0);
  CHECK(binomial_se(1.0, 100) == 0.0);
}

TEST_CASE("result tables serialize with the header first") {
  ResultTable table;
  table.columns = {"a", "b"};
  table.rows = {{"1", "0.5"}, {"2", "0.25"}};
  CHECK(table.to_csv() == "a,b\n1,0.5\n2,0.25\n");
}

TEST_CASE("session streams and memoized thresholds are reproducible") {
  Session one(4242);
  Session two(4242);
  CHECK(one.master_seed() == 4242);
  CHECK(one.stream("label", 3).next_u64() == two.stream("label", 3).next_u64());
  CHECK(one.stream("label", 3).next_u64() != one.stream("label", 4).next_u64());

  const double t1 = one.calibrated_threshold(TestKind::ms, 8, 20, 4, 0, 0.1, 200);
  const double t2 = one.calibrated_threshold(TestKind::ms, 8, 20, 4, 0, 0.1, 200);
  const double t3 = two.calibrated_threshold(TestKind::ms, 8, 20, 4, 0, 0.1, 200);
  CHECK(t1 == t2);  // memo hit
  CHECK(t1 == t3);  // cross-session determinism
}

TEST_CASE("the positive definite cap brackets the true boundary") {
  // A single first lag: the tridiagonal correlation matrix is positive
  // definite up to 1/(2 cos(pi/(p+1))), just above one half.
  const double cap1 = positive_definite_cap(100, {1}, {1});
  CHECK(cap1 > 0.5);
  CHECK(cap1 < 0.52);

  // The adjacent pair {1,2} caps well below a half.
  const double cap12 = positive_definite_cap(100, {1, 2}, {1, 1});
  CHECK(cap12 == doctest::Approx(0.4451).epsilon(2e-3));

  // The cap is sharp: just inside stays positive definite, just outside not.
  ToeplitzSpec spec = identity_spec(100);
  spec.diagonals[1] = cap12 * 0.999;
  spec.diagonals[2] = cap12 * 0.999;
  CHECK(is_positive_definite(spec));
  spec.diagonals[1] = cap12 * 1.01;
  spec.diagonals[2] = cap12 * 1.01;
  CHECK_FALSE(is_positive_definite(spec));
}

TEST_CASE("identical configs give byte-identical tables across worker counts") {
  ExperimentConfig config = small_power_config();
  config.workers = 1;
  Session s1(config.master_seed, 1);
  const std::string csv1 = run_scenario(config, s1).to_csv();

  config.workers = 3;
  Session s3(config.master_seed, 3);
  const std::string csv3 = run_scenario(config, s3).to_csv();

  CHECK(csv1 == csv3);
  CHECK(csv1.rfind("kind,sigma,separation,log10_separation,power,se,R\n", 0) == 0);
}

TEST_CASE("type one error sweeps stay near the nominal level") {
  ExperimentConfig config;
  config.scenario = "type1";
  config.n = 10;
  config.p = 20;
  config.S = 4;
  config.s = 2;
  config.replications = 400;
  config.kinds = {TestKind::ms_plus};
  Session session(config.master_seed);
  const ResultTable table = run_type1(config, session);
  REQUIRE(table.rows.size() == 1);
  REQUIRE(table.columns.size() == 6);
  const double rate = parse_double(table.rows[0][3]);
  // Calibration and evaluation noise both at R=400.
  CHECK(std::abs(rate - 0.1) < 3.0 * std::sqrt(0.1 * 0.9 * 2.0 / 400.0));
}

TEST_CASE("power curves carry the separation columns consistently") {
  ExperimentConfig config = small_power_config();
  Session session(config.master_seed);
  const ResultTable table = run_power_curve(config, session);
  REQUIRE(table.rows.size() == 4);  // 2 kinds x 2 sigmas
  for (const std::vector<std::string>& row : table.rows) {
    REQUIRE(row.size() == 7);
    const double sigma = parse_double(row[1]);
    const double separation = parse_double(row[2]);
    const double log_sep = parse_double(row[3]);
    CHECK(separation == doctest::Approx(2.0 * sigma).epsilon(1e-12));
    CHECK(log_sep == doctest::Approx(std::log10(separation)).epsilon(1e-9));
    const double power = parse_double(row[4]);
    CHECK(power >= 0.0);
    CHECK(power <= 1.0);
  }
}

TEST_CASE("explicit sigma grids beyond the positive definite cap are refused") {
  ExperimentConfig config = small_power_config();
  config.placement = Placement::near_diagonal;
  config.sigma_grid = {0.05, 0.9};  // 0.9 cannot stay positive definite
  Session session(config.master_seed);
  CHECK_THROWS_AS(run_power_curve(config, session), ConfigError);
}

TEST_CASE("selection risk requires room between sparsity and horizon") {
  ExperimentConfig config;
  config.scenario = "selection_risk";
  config.p = 25;
  config.S = 5;
  config.s = 5;  // s must stay below S for the selector
  config.n_grid = {20};
  config.replications = 50;
  Session session(config.master_seed);
  CHECK_THROWS_AS(run_selection_risk(config, session), ConfigError);
}

TEST_CASE("selection risk reports the selector scale and hamming loss") {
  ExperimentConfig config;
  config.scenario = "selection_risk";
  config.p = 25;
  config.S = 5;
  config.s = 2;
  config.n_grid = {40, 160};
  config.replications = 120;
  Session session(config.master_seed);
  const ResultTable table = run_selection_risk(config, session);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.columns ==
        std::vector<std::string>{"n", "s", "S", "tau", "avg_hamming", "se", "R"});
  const double tau40 = parse_double(table.rows[0][3]);
  const double tau160 = parse_double(table.rows[1][3]);
  // Quadrupling n halves tau on the square-root branch.
  CHECK(tau160 == doctest::Approx(tau40 / 2.0).epsilon(1e-9));
  for (const std::vector<std::string>& row : table.rows) {
    const double loss = parse_double(row[4]);
    CHECK(loss >= 0.0);
    CHECK(loss <= static_cast<double>(config.S));
  }
}

TEST_CASE("ma sweeps default their grids and stay in range") {
  ExperimentConfig config;
  config.scenario = "ma_power";
  config.n = 20;
  config.replications = 80;
  config.p_grid = {8, 16};
  config.phi_grid = {0.0, 0.6};
  Session session(config.master_seed);
  const ResultTable table = run_ma_experiment(config, session);
  REQUIRE(table.rows.size() == 4);
  CHECK(table.columns == std::vector<std::string>{"p", "phi", "power", "se", "R"});
  for (const std::vector<std::string>& row : table.rows) {
    const double power = parse_double(row[2]);
    CHECK(power >= 0.0);
    CHECK(power <= 1.0);
  }
}

TEST_CASE("concentration sweeps report bounds and pass flags") {
  ExperimentConfig config;
  config.scenario = "verify_concentration";
  config.n = 10;
  config.p = 20;
  config.replications = 2000;
  config.u_grid = {2.0, 8.0};
  Session session(config.master_seed);
  const ResultTable table = run_verify_concentration(config, session);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.columns == std::vector<std::string>{"u", "n", "p", "S", "w",
                                                  "bound", "empirical", "se",
                                                  "pass"});
  for (const std::vector<std::string>& row : table.rows) {
    CHECK((row[8] == "0" || row[8] == "1"));
    const double bound = parse_double(row[5]);
    const double empirical = parse_double(row[6]);
    if (row[8] == "1") {
      CHECK(empirical <= bound + 3.0 * parse_double(row[7]) + 1e-12);
    }
  }
}

TEST_CASE("the scan comparison pairs both statistics on shared samples") {
  ExperimentConfig config;
  config.scenario = "ms_vs_hs";
  config.n = 10;
  config.p = 20;
  config.S = 4;
  config.s_grid = {1, 2};
  config.replications = 200;
  Session session(config.master_seed);
  const ResultTable table = run_ms_vs_hs(config, session);
  CHECK(table.columns ==
        std::vector<std::string>{"s", "sigma", "kind", "power", "se", "R"});
  REQUIRE(table.rows.size() == 4);  // (ms, hs) x 2 sparsities
  for (std::size_t i = 0; i < table.rows.size(); i += 2) {
    CHECK(table.rows[i][2] == "ms");
    CHECK(table.rows[i + 1][2] == "hs");
    CHECK(table.rows[i][0] == table.rows[i + 1][0]);
    CHECK(table.rows[i][1] == table.rows[i + 1][1]);
  }
}

TEST_CASE("scenario dispatch rejects unknown names") {
  ExperimentConfig config;
  config.scenario = "render_plots";
  Session session(1);
  CHECK_THROWS_AS(run_scenario(config, session), ConfigError);
}

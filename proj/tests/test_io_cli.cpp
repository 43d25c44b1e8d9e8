#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "osmix/config.hpp"
#include "osmix/dataset.hpp"
#include "osmix/diagnostics.hpp"
#include "osmix/random.hpp"
#include "osmix/simulate.hpp"
#include "support/testutil.hpp"

#ifndef OSMIX_BIN
#error "OSMIX_BIN must be defined as the path to the cli binary"
#endif

namespace fs = std::filesystem;

namespace {

std::string bin() { return OSMIX_BIN; }

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

bool same_bytes(const std::string& a, const std::string& b) {
  return testutil::read_file(a) == testutil::read_file(b);
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

void write_file(const std::string& path, const std::string& content) {
  osmix::write_text_atomic(path, content);
}

double reparse(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

}  // namespace

TEST_CASE("doubles survive the shortest-round-trip format") {
  CHECK(osmix::format_double(1.0) == "1");
  CHECK(osmix::format_double(0.5) == "0.5");
  CHECK(osmix::format_double(0.1) == "0.1");
  const double awkward[] = {1.0 / 3.0,      1e-17, 6.02214076e23, 123456789.123456789,
                            5e-324,         0.0,   1.7976931348623157e308,
                            0.1 + 0.2};
  for (double v : awkward) {
    const std::string s = osmix::format_double(v);
    CHECK(reparse(s) == v);
  }
}

TEST_CASE("csv lines split on commas and drop a trailing carriage return") {
  CHECK(osmix::split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(osmix::split_csv_line("a,,c") == std::vector<std::string>{"a", "", "c"});
  CHECK(osmix::split_csv_line("") == std::vector<std::string>{""});
  CHECK(osmix::split_csv_line("x") == std::vector<std::string>{"x"});
  CHECK(osmix::split_csv_line("a,b\r") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("atomic writes land complete and leave no temp file") {
  const std::string dir = testutil::fresh_dir("atomic");
  const std::string path = join(dir, "f.txt");
  osmix::write_text_atomic(path, "hello\n");
  CHECK(testutil::read_file(path) == "hello\n");
  osmix::write_text_atomic(path, "x");
  CHECK(testutil::read_file(path) == "x");
  CHECK_FALSE(fs::exists(path + ".tmp"));
}

TEST_CASE("ingestion keeps clean rows, sorts them, and skips degenerate ones") {
  const std::string dir = testutil::fresh_dir("ingest");
  const std::string path = join(dir, "data.csv");
  write_file(path,
             "id,x1,x2,x3,x4,x5\n"
             "p1,0.8,0.5,0.2,0,0\n"
             "p2,0.2,0.9,0,0,0.5\n"
             "p3,0.7,0.7,0.1,0,0\n"
             "p4,0,0,0,0,0\n"
             "p5,1.25,0,0,0,0\n");
  const osmix::IngestResult r = osmix::ingest_csv(path);
  CHECK(r.dataset.n == 5);
  REQUIRE(r.dataset.rows.size() == 3);
  CHECK(r.dataset.ids() == std::vector<std::string>{"p1", "p2", "p5"});
  const osmix::Sequence& s0 = r.dataset.rows[0].seq;
  REQUIRE(s0.l() == 3);
  CHECK(s0.values[0] == 0.8);
  CHECK(s0.values[1] == 0.5);
  CHECK(s0.values[2] == 0.2);
  const osmix::Sequence& s1 = r.dataset.rows[1].seq;
  REQUIRE(s1.l() == 3);
  CHECK(s1.values[0] == 0.9);  // entry order in the file does not matter
  CHECK(s1.values[1] == 0.5);
  CHECK(s1.values[2] == 0.2);
  CHECK(r.dataset.rows[2].seq.l() == 1);
  REQUIRE(r.warnings.size() == 2);
  CHECK(r.warnings[0].line == 4);
  CHECK(r.warnings[0].id == "p3");
  CHECK(r.warnings[0].message.find("tied") != std::string::npos);
  CHECK(r.warnings[1].line == 5);
  CHECK(r.warnings[1].id == "p4");
  CHECK(r.warnings[1].message.find("censored") != std::string::npos);
}

TEST_CASE("ingestion accepts windows line endings and blank lines") {
  const std::string dir = testutil::fresh_dir("ingest_crlf");
  const std::string path = join(dir, "data.csv");
  write_file(path, "id,x1,x2\r\np1,0.8,0.3\r\n\r\np2,0.5,0\r\n");
  const osmix::IngestResult r = osmix::ingest_csv(path);
  CHECK(r.dataset.n == 2);
  REQUIRE(r.dataset.rows.size() == 2);
  CHECK(r.dataset.rows[0].seq.values[1] == 0.3);
  CHECK(r.warnings.empty());
}

TEST_CASE("ingestion failures carry the row id and line number") {
  const std::string dir = testutil::fresh_dir("ingest_bad");
  const auto expect_throw = [&](const std::string& name, const std::string& content,
                                const std::string& needle) {
    const std::string path = join(dir, name);
    write_file(path, content);
    try {
      (void)osmix::ingest_csv(path);
      FAIL("expected a runtime_error for ", name);
    } catch (const std::runtime_error& e) {
      const std::string what = e.what();
      INFO(name, ": ", what);
      CHECK(what.find(needle) != std::string::npos);
    }
  };
  expect_throw("malformed.csv", "id,x1,x2\nq1,abc,0\n", "malformed number");
  expect_throw("negative.csv", "id,x1,x2\nq1,-0.5,0\n", "negative entry");
  expect_throw("width.csv", "id,x1,x2,x3\nq1,1.0,0\n", "expected 3 values");
  expect_throw("dup.csv", "id,x1,x2\nd1,0.5,0\nd1,0.7,0\n", "duplicate id");
  expect_throw("empty.csv", "", "empty file");
  expect_throw("headeronly.csv", "id,x1,x2\n", "no usable rows");
  expect_throw("badline.csv", "id,x1,x2\nq1,0.5,0\nq2,0.7\n", "line 3");
  CHECK_THROWS_AS((void)osmix::ingest_csv(join(dir, "missing.csv")), std::runtime_error);
}

TEST_CASE("a simulated dataset round-trips through its csv form exactly") {
  osmix::RngStream rng(88);
  const osmix::SimulatedData sim =
      osmix::simulate_mixture(osmix::study1_mixture(), 30, 6, rng);
  REQUIRE(sim.dataset.rows.size() == 30);
  REQUIRE(sim.components.size() == 30);
  CHECK(sim.mixture.size() == 3);
  for (int c : sim.components) {
    CHECK(c >= 0);
    CHECK(c < 3);
  }
  const std::string dir = testutil::fresh_dir("roundtrip");
  const std::string path = join(dir, "data.csv");
  osmix::write_dataset_csv(path, sim.dataset);
  const osmix::IngestResult back = osmix::ingest_csv(path);
  CHECK(back.warnings.empty());
  CHECK(back.dataset.n == 6);
  REQUIRE(back.dataset.rows.size() == 30);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(back.dataset.rows[i].id == sim.dataset.rows[i].id);
    const auto& a = back.dataset.rows[i].seq;
    const auto& b = sim.dataset.rows[i].seq;
    REQUIRE(a.l() == b.l());
    CHECK(a.n == b.n);
    for (int j = 0; j < a.l(); ++j) CHECK(a.values[j] == b.values[j]);
  }

  const std::string truth = join(dir, "truth.csv");
  osmix::write_truth_csv(truth, sim);
  const std::string text = testutil::read_file(truth);
  CHECK(count_lines(text) == 31);
  CHECK(text.find("ew") != std::string::npos);
}

TEST_CASE("the default config survives a serialize-parse-serialize loop byte for byte") {
  const std::string a = osmix::config_to_json(osmix::default_config());
  const osmix::RunConfig parsed = osmix::parse_config_json(a);
  CHECK(osmix::config_to_json(parsed) == a);
  CHECK(a.find("priors.alpha1") != std::string::npos);
  CHECK(a.find("mcmc.iterations") != std::string::npos);
}

TEST_CASE("presets apply before explicit keys") {
  const osmix::RunConfig retail = osmix::parse_config_json("{\"preset\": \"retail\"}");
  CHECK(retail.priors.alpha1 == 7.0);
  CHECK(retail.priors.tau1 == 5.0);
  CHECK(retail.n == 10);
  const osmix::RunConfig tweaked =
      osmix::parse_config_json("{\"preset\": \"retail\", \"priors.tau2\": 9.0, \"seed\": 4}");
  CHECK(tweaked.priors.tau2 == 9.0);
  CHECK(tweaked.priors.alpha1 == 7.0);  // untouched retail value
  CHECK(tweaked.seed == 4);
  const osmix::RunConfig vague = osmix::parse_config_json("{\"preset\": \"vague\"}");
  CHECK(vague.priors.alpha1 == 1.0);
  CHECK_THROWS_AS((void)osmix::parse_config_json("{\"preset\": \"bogus\"}"),
                  std::runtime_error);
}

TEST_CASE("unknown or ill-typed config keys are rejected") {
  CHECK_THROWS_AS((void)osmix::parse_config_json("{\"bogus\": 1}"), std::runtime_error);
  CHECK_THROWS_AS((void)osmix::parse_config_json("{\"n\": \"x\"}"), std::runtime_error);
  CHECK_THROWS_AS((void)osmix::parse_config_json("{\"seed\": -1}"), std::runtime_error);
  CHECK_THROWS_AS((void)osmix::parse_config_json("not json"), std::runtime_error);
  CHECK_THROWS_AS((void)osmix::parse_config_json("[1,2]"), std::runtime_error);
}

TEST_CASE("config validation pins the documented ranges") {
  const auto reject = [](const std::string& body) {
    CHECK_THROWS_AS((void)osmix::parse_config_json(body), std::invalid_argument);
  };
  reject("{\"n\": 0}");
  reject("{\"epsilon\": -0.5}");
  reject("{\"oc_draws\": 10}");
  reject("{\"ppc.reps_per_sample\": 0}");
  reject("{\"grids.points\": 1}");
  reject("{\"partition.k_grid\": [0.5, 1.5]}");
  reject("{\"grids.targets\": [\"bogus\"]}");
  reject("{\"grids.targets\": [\"order_stat:0\"]}");
  reject("{\"grids.targets\": [\"order_stat:21\"]}");
  const osmix::RunConfig ok =
      osmix::parse_config_json("{\"grids.targets\": [\"order_stat:7\", \"pooled\"]}");
  CHECK(ok.grid_targets.size() == 2);
}

TEST_CASE("autocorrelations use the documented normalization") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  const auto acf = osmix::autocorrelation(x, 3);
  REQUIRE(acf.size() == 3);
  // Covariances divide by T-k, the variance by T: 1.25/3 over 1.25, etc.
  CHECK(acf[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(acf[1] == doctest::Approx(-0.6).epsilon(1e-12));
  CHECK(acf[2] == doctest::Approx(-1.8).epsilon(1e-12));
  const auto d = osmix::series_diagnostics(x, 3);
  // tau = 2(rho0 + rho1) - 1 = 5/3, truncated at the negative second pair.
  CHECK(d.ess == doctest::Approx(2.4).epsilon(1e-12));
  CHECK_FALSE(d.degenerate);

  CHECK_THROWS_AS((void)osmix::autocorrelation({1.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)osmix::autocorrelation(x, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)osmix::autocorrelation(x, 4), std::invalid_argument);
  CHECK_THROWS_AS((void)osmix::autocorrelation({2.0, 2.0, 2.0}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)osmix::series_diagnostics({1.0}, 1), std::invalid_argument);
}

TEST_CASE("an alternating series scores exactly minus one at lag one") {
  std::vector<double> x(50);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
  const auto d = osmix::series_diagnostics(x, 20);
  REQUIRE(!d.acf.empty());
  CHECK(d.acf[0] == -1.0);
  CHECK(d.ess == 50.0);  // anticorrelation caps at the series length
}

TEST_CASE("constant series are reported degenerate instead of dividing by zero") {
  const auto d = osmix::series_diagnostics(std::vector<double>(30, 7.5), 20);
  CHECK(d.degenerate);
  CHECK(d.ess == 30.0);
  CHECK(d.acf.empty());
}

TEST_CASE("effective sample size tracks independence and strong correlation") {
  osmix::RngStream rng(606);
  const int t = 400;
  double ratio_sum = 0.0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> x(t);
    for (auto& v : x) v = osmix::normal_sample(rng);
    ratio_sum += osmix::series_diagnostics(x, 20).ess / t;
  }
  const double mean_ratio = ratio_sum / reps;
  INFO("mean ess ratio on white noise=", mean_ratio);
  CHECK(mean_ratio > 0.75);
  CHECK(mean_ratio <= 1.0);

  std::vector<double> blocky(t);
  for (int i = 0; i < t; ++i) {
    if (i % 8 == 0) blocky[i] = osmix::normal_sample(rng);
    else blocky[i] = blocky[i - 1];
  }
  const auto d = osmix::series_diagnostics(blocky, 20);
  INFO("blocky ess=", d.ess);
  CHECK(d.ess < t / 4.0);
  CHECK(d.ess > 1.0);
}

TEST_CASE("the cli with no verb prints usage") {
  const std::string dir = testutil::fresh_dir("cli_help");
  const std::string out = join(dir, "out.txt");
  CHECK(testutil::run_command(bin() + " > " + out + " 2>&1") == 0);
  const std::string text = testutil::read_file(out);
  CHECK(text.find("simulate") != std::string::npos);
  CHECK(text.find("fit") != std::string::npos);
}

TEST_CASE("simulation from the cli is deterministic and ingestible") {
  const std::string a = testutil::fresh_dir("cli_sim_a");
  const std::string b = testutil::fresh_dir("cli_sim_b");
  const std::string c = testutil::fresh_dir("cli_sim_c");
  const std::string base = bin() + " simulate --study study1 --n-obs 25";
  REQUIRE(testutil::run_command(base + " --seed 5 --out " + a) == 0);
  REQUIRE(testutil::run_command(base + " --seed 5 --out " + b) == 0);
  REQUIRE(testutil::run_command(base + " --seed 6 --out " + c) == 0);
  CHECK(same_bytes(join(a, "data.csv"), join(b, "data.csv")));
  CHECK(same_bytes(join(a, "truth.csv"), join(b, "truth.csv")));
  CHECK_FALSE(same_bytes(join(a, "data.csv"), join(c, "data.csv")));

  const osmix::IngestResult r = osmix::ingest_csv(join(a, "data.csv"));
  CHECK(r.dataset.n == 20);  // default config sequence length
  CHECK(r.dataset.rows.size() == 25);
  CHECK(r.warnings.empty());
  CHECK(count_lines(testutil::read_file(join(a, "truth.csv"))) == 26);

  // A config seed behaves exactly like the --seed flag.
  const std::string d = testutil::fresh_dir("cli_sim_d");
  write_file(join(d, "cfg.json"), "{\"seed\": 5}\n");
  REQUIRE(testutil::run_command(base + " --config " + join(d, "cfg.json") + " --out " + d) ==
          0);
  CHECK(same_bytes(join(a, "data.csv"), join(d, "data.csv")));
}

TEST_CASE("custom simulation needs components and accepts them from config") {
  const std::string dir = testutil::fresh_dir("cli_custom");
  const std::string err = join(dir, "err.txt");
  CHECK(testutil::run_command(bin() + " simulate --study custom --out " + dir + " 2> " +
                              err) == 1);
  CHECK(testutil::read_file(err).find("error:") != std::string::npos);

  write_file(join(dir, "cfg.json"),
             "{\"n\": 6, \"simulate.components\": [{\"kernel\": \"ew\", \"alpha\": 1.8, "
             "\"beta\": 1.4, \"lambda\": 0.5, \"w\": 0.65, \"weight\": 1.0}]}\n");
  REQUIRE(testutil::run_command(bin() + " simulate --study custom --n-obs 10 --seed 2 " +
                                "--config " + join(dir, "cfg.json") + " --out " + dir) == 0);
  const osmix::IngestResult r = osmix::ingest_csv(join(dir, "data.csv"));
  CHECK(r.dataset.n == 6);
  CHECK(r.dataset.rows.size() == 10);
}

TEST_CASE("the fit pipeline writes every report and is bit-reproducible") {
  const std::string dir = testutil::fresh_dir("cli_fit");
  const std::string cfg = join(dir, "cfg.json");
  write_file(cfg,
             "{\"seed\": 11, \"n\": 8, \"mcmc.iterations\": 80, \"mcmc.burn_in\": 20,\n"
             " \"mcmc.thin\": 10, \"oc_draws\": 2000, \"ppc.reps_per_sample\": 3,\n"
             " \"grids.points\": 40}\n");
  REQUIRE(testutil::run_command(bin() + " simulate --study study1 --n-obs 12 --seed 3 " +
                                "--config " + cfg + " --out " + dir) == 0);
  const std::string fit1 = testutil::fresh_dir("cli_fit_run1");
  const std::string fit2 = testutil::fresh_dir("cli_fit_run2");
  const std::string fit_cmd = bin() + " fit --data " + join(dir, "data.csv") +
                              " --config " + cfg + " --out ";
  REQUIRE(testutil::run_command(fit_cmd + fit1) == 0);
  REQUIRE(testutil::run_command(fit_cmd + fit2) == 0);

  for (const char* name :
       {"trace.csv", "coincidence.csv", "partition.csv", "pp_check.csv",
        "pp_check_replicates.csv", "summary.json", "density_grid_pooled.csv",
        "density_grid_order_stat_8.csv", "density_grid_length.csv"}) {
    INFO("file=", name);
    REQUIRE(fs::exists(join(fit1, name)));
    CHECK(same_bytes(join(fit1, name), join(fit2, name)));
  }

  const std::string trace_text = testutil::read_file(join(fit1, "trace.csv"));
  CHECK(first_line(trace_text) ==
        "iteration,id,cluster,alpha,beta,lambda,w,nu,n_clusters");
  CHECK(count_lines(trace_text) == 1 + 6 * 12);  // 6 retained samples, 12 rows each

  const auto summary = nlohmann::json::parse(testutil::read_file(join(fit1, "summary.json")));
  CHECK(summary.at("n_obs").get<int>() == 12);
  CHECK(summary.at("n").get<int>() == 8);
  CHECK(summary.at("retained_samples").get<int>() == 6);
  CHECK(summary.at("config").at("seed").get<int>() == 11);
  CHECK(summary.at("clusters").is_array());
  CHECK(!summary.at("clusters").empty());
  CHECK(summary.at("partition").contains("k_star"));
  CHECK(summary.at("acceptance").at("proposals").get<std::int64_t>() > 0);

  const std::string pdir = testutil::fresh_dir("cli_part");
  REQUIRE(testutil::run_command(bin() + " partition --trace " + join(fit1, "trace.csv") +
                                " --out " + pdir) == 0);
  CHECK(same_bytes(join(pdir, "partition.csv"), join(fit1, "partition.csv")));
  CHECK(same_bytes(join(pdir, "coincidence.csv"), join(fit1, "coincidence.csv")));

  const std::string gdir = testutil::fresh_dir("cli_diag");
  REQUIRE(testutil::run_command(bin() + " diagnose --trace " + join(fit1, "trace.csv") +
                                " --out " + gdir) == 0);
  const std::string series = testutil::read_file(join(gdir, "series.csv"));
  CHECK(first_line(series) ==
        "iteration,nu,n_clusters,alpha_mean,beta_mean,lambda_mean,w_mean,"
        "sqrt_alpha_mean,sqrt_beta_mean,sqrt_lambda_mean");
  CHECK(count_lines(series) == 1 + 6);
  const std::string diag = testutil::read_file(join(gdir, "diagnostics.csv"));
  CHECK(count_lines(diag) == 1 + 9);
  CHECK(first_line(diag).rfind("series,ess,degenerate,acf_1", 0) == 0);

  const std::string hdir = testutil::fresh_dir("cli_ppc");
  REQUIRE(testutil::run_command(bin() + " pp-check --trace " + join(fit1, "trace.csv") +
                                " --data " + join(dir, "data.csv") + " --config " + cfg +
                                " --out " + hdir) == 0);
  CHECK(same_bytes(join(hdir, "pp_check.csv"), join(fit1, "pp_check.csv")));
  CHECK(same_bytes(join(hdir, "pp_check_replicates.csv"),
                   join(fit1, "pp_check_replicates.csv")));
}

TEST_CASE("the emitted default config is the library default, byte for byte") {
  const std::string dir = testutil::fresh_dir("cli_emit");
  const std::string out = join(dir, "cfg.json");
  REQUIRE(testutil::run_command(bin() + " fit --emit-default-config > " + out) == 0);
  CHECK(testutil::read_file(out) == osmix::config_to_json(osmix::default_config()));
  const osmix::RunConfig cfg = osmix::load_config(out);
  CHECK(cfg.n == 20);
}

TEST_CASE("cli failures exit nonzero with a diagnostic") {
  const std::string dir = testutil::fresh_dir("cli_err");
  const std::string err = join(dir, "err.txt");
  CHECK(testutil::run_command(bin() + " fit --data " + join(dir, "missing.csv") + " 2> " +
                              err) == 1);
  CHECK(testutil::read_file(err).find("error:") != std::string::npos);
  CHECK(testutil::run_command(bin() + " simulate --study bogus 2> " + err) != 0);
  write_file(join(dir, "bad.json"), "{\"bogus\": 1}\n");
  CHECK(testutil::run_command(bin() + " fit --data x.csv --config " + join(dir, "bad.json") +
                              " --out " + dir + " 2> " + err) == 1);
  CHECK(testutil::read_file(err).find("unknown key") != std::string::npos);
  CHECK(testutil::run_command(bin() + " fit 2> " + err) != 0);
}

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "semiwell/harness.hpp"

using namespace semiwell;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_double_well(double mu) {
  return json{
      {"model",
       {{"dim", 1},
        {"shape", {256}},
        {"spacing", 2.0 / 256},
        {"boundary", "periodic_torus"},
        {"potential",
         {{"kind", "cosine_wells"}, {"amplitude", 1.0}, {"period", 1.0}}}}},
      {"E0", 0.9},
      {"E1", 0.5},
      {"mu", mu}};
}

struct TempDir {
  fs::path path;
  TempDir(const char* tag) {
    path = fs::temp_directory_path() / (std::string("semiwell_test_") + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("fit_exponential_rate: exact, constant and noisy laws") {
  std::vector<std::pair<double, double>> exact;
  for (double mu : {1.0, 4.0, 9.0, 16.0})
    exact.emplace_back(mu, std::exp(-2.0 * std::sqrt(mu)));
  DecayFit f = fit_exponential_rate(exact);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-8));
  CHECK(f.intercept == doctest::Approx(0.0).scale(1).epsilon(1e-8));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.used_points == 4);

  std::vector<std::pair<double, double>> flat{{1, 0.5}, {4, 0.5}, {9, 0.5}};
  DecayFit g = fit_exponential_rate(flat);
  CHECK(g.slope == doctest::Approx(0.0).scale(1).epsilon(1e-12));

  std::vector<std::pair<double, double>> noisy;
  double wiggle[] = {1.03, 0.96, 1.02, 0.99, 1.01};
  int k = 0;
  for (double mu : {4.0, 16.0, 36.0, 64.0, 100.0})
    noisy.emplace_back(mu, 3.0 * std::exp(-0.7 * std::sqrt(mu)) * wiggle[k++]);
  DecayFit h = fit_exponential_rate(noisy);
  CHECK(h.slope >= -0.75);
  CHECK(h.slope <= -0.65);
  CHECK(h.r_squared > 0.99);
}

TEST_CASE("fit_exponential_rate: validation") {
  CHECK_THROWS_AS(fit_exponential_rate({{1, 0.5}, {4, 0.2}}), TooFewPoints);
  CHECK_THROWS_AS(fit_exponential_rate({{1, 1e-20}, {4, 1e-16}, {9, 0.0}}),
                  AllBelowFloor);
  // Some above the floor, but too few for a line.
  CHECK_THROWS_AS(fit_exponential_rate({{1, 1e-20}, {4, 1e-20}, {9, 0.5}}),
                  TooFewPoints);
}

TEST_CASE("choose_lambda: interior and trailing gaps") {
  GapChoice a = choose_lambda({1, 2, 5, 6}, 0.0, 7.0);
  REQUIRE(a.found);
  CHECK(a.lo == 2.0);
  CHECK(a.hi == 5.0);
  CHECK(a.lambda == 3.5);

  // Trailing clipped gap wins when it is the widest.
  GapChoice b = choose_lambda({1, 2}, 0.0, 10.0);
  REQUIRE(b.found);
  CHECK(b.lo == 2.0);
  CHECK(b.hi == 10.0);
  CHECK(b.lambda == 6.0);

  GapChoice c = choose_lambda({20, 21}, 0.0, 10.0);
  CHECK_FALSE(c.found);
}

TEST_CASE("model spec: canonical round trip and build") {
  json j = small_double_well(100.0)["model"];
  ModelSpec s = parse_model_spec(j);
  json canon = model_spec_to_json(s);
  ModelSpec s2 = parse_model_spec(canon);
  CHECK(model_spec_to_json(s2) == canon);

  GridModel m = build_model(s);
  CHECK(m.num_sites() == 256);
  CHECK(m.boundary == Boundary::periodic_torus);
  // V(x) = sin^2(pi x) sampled on the grid.
  for (int i : {0, 17, 100, 255}) {
    double x = i * (2.0 / 256);
    double sp = std::sin(std::numbers::pi * x);
    CHECK(m.potential[i] == doctest::Approx(sp * sp).epsilon(1e-12));
  }
}

TEST_CASE("model spec: validation errors") {
  CHECK_THROWS_AS(parse_model_spec(json{{"dim", 1}}), ConfigError);
  json bad = small_double_well(1.0)["model"];
  bad["boundary"] = "moebius";
  CHECK_THROWS_AS(parse_model_spec(bad), ConfigError);
  json badpot = small_double_well(1.0)["model"];
  badpot["potential"]["kind"] = "volcano";
  CHECK_THROWS_AS(parse_model_spec(badpot), ConfigError);
}

TEST_CASE("model spec: table potential from CSV") {
  TempDir tmp("table");
  fs::path csv = tmp.path / "pot.csv";
  {
    std::ofstream out(csv);
    out << "# site,value\n";
    for (int i = 0; i < 8; ++i) out << i << "," << 0.1 * i << "\n";
  }
  json j{{"dim", 1},
         {"shape", {8}},
         {"spacing", 0.5},
         {"boundary", "dirichlet_box"},
         {"potential", {{"kind", "table"}, {"table", csv.string()}}}};
  GridModel m = build_model(parse_model_spec(j));
  for (int i = 0; i < 8; ++i)
    CHECK(m.potential[i] == doctest::Approx(0.1 * i).epsilon(1e-12));

  // Missing sites are rejected.
  {
    std::ofstream out(csv);
    out << "0,0.5\n";
  }
  CHECK_THROWS_AS(build_model(parse_model_spec(j)), ConfigError);
}

TEST_CASE("parse_sweep_config: defaults and validation") {
  SweepConfig c = parse_sweep_config(small_double_well(200.0));
  CHECK(c.E2 == doctest::Approx(0.5 + 0.2 * 0.4));
  CHECK(c.E3 == doctest::Approx(0.5 + 0.6 * 0.4));
  CHECK(c.eta == doctest::Approx(0.1));
  CHECK(c.mu_list == std::vector<double>{200.0});
  CHECK(c.experiments == known_experiments());

  json bad_mu = small_double_well(0.0);
  bad_mu.erase("mu");
  bad_mu["mu_list"] = {100.0, 100.0};
  CHECK_THROWS_AS(parse_sweep_config(bad_mu), ConfigError);

  json bad_exp = small_double_well(100.0);
  bad_exp["experiments"] = {"thmD", "alchemy"};
  CHECK_THROWS_AS(parse_sweep_config(bad_exp), ConfigError);

  json bad_thresh = small_double_well(100.0);
  bad_thresh["E1"] = 2.0;
  CHECK_THROWS_AS(parse_sweep_config(bad_thresh), ConfigError);
}

TEST_CASE("default_benchmark_config: four identical wells") {
  SweepConfig c = default_benchmark_config();
  CHECK(c.model.shape == std::vector<int>{2048});
  CHECK(c.mu_list == std::vector<double>{100, 200, 400, 800});
  GridModel m = build_model(c.model);
  WellDecomposition d = find_wells(m, c.E0);
  CHECK(d.num_wells() == 4);
}

TEST_CASE("run_sweep: empty mu list and a single-mu spectral comparison") {
  SweepConfig empty = parse_sweep_config(small_double_well(100.0));
  empty.mu_list.clear();
  CHECK(run_sweep(empty).rows.empty());

  json j = small_double_well(200.0);
  j["experiments"] = {"thmD", "weyl"};
  SweepConfig c = parse_sweep_config(j);
  SweepResult r = run_sweep(c);
  REQUIRE(r.rows.size() == 1);
  const SweepRow& row = r.rows[0];
  CHECK(row.ok);
  CHECK(row.error.empty());
  CHECK(row.gap_found);
  REQUIRE(row.metrics.count("thmD_max_dist"));
  CHECK(row.metrics.at("thmD_max_dist") >= 0);
  CHECK(row.metrics.at("thmD_max_dist") < 1.0);  // tunnelling splitting scale
  CHECK(row.metrics.at("weyl_total") ==
        row.metrics.at("weyl_h0") + row.metrics.at("weyl_h1"));
  CHECK(row.metrics.at("weyl_total") >= 2);

  // Output serialization includes the metrics.
  json out = r.to_json();
  CHECK(out[0]["thmD_max_dist"] == row.metrics.at("thmD_max_dist"));
  std::string csv = r.to_csv();
  CHECK(csv.find("thmD_max_dist") != std::string::npos);
}

TEST_CASE("run_sweep: failed experiments are recorded, the run continues") {
  // E1 so low that no well state exists below E1*mu: spectral comparison
  // cannot run, but the Weyl count still produces a row.
  json j = small_double_well(100.0);
  j["E1"] = 0.05;
  j["experiments"] = {"thmD", "weyl"};
  SweepConfig c = parse_sweep_config(j);
  SweepResult r = run_sweep(c);
  REQUIRE(r.rows.size() == 1);
  CHECK_FALSE(r.rows[0].ok);
  CHECK(r.rows[0].error.find("thmD") != std::string::npos);
  CHECK(r.rows[0].metrics.count("weyl_total") == 1);
}

TEST_CASE("run_sweep: cached reruns are bit-identical") {
  TempDir tmp("cache");
  json j = small_double_well(200.0);
  j["experiments"] = {"thmD"};
  j["cache"] = tmp.path.string();
  SweepConfig c = parse_sweep_config(j);

  SweepResult first = run_sweep(c);
  bool have_cache_file = false;
  for (const auto& e : fs::directory_iterator(tmp.path))
    have_cache_file = have_cache_file || e.path().extension() == ".json";
  CHECK(have_cache_file);

  SweepResult second = run_sweep(c);
  REQUIRE(first.rows.size() == second.rows.size());
  for (size_t i = 0; i < first.rows.size(); ++i) {
    CHECK(first.rows[i].lambda == second.rows[i].lambda);
    CHECK(first.rows[i].metrics == second.rows[i].metrics);
  }
  CHECK(first.to_csv() == second.to_csv());
}

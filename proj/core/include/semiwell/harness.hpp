#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semiwell/agmon.hpp"
#include "semiwell/grid.hpp"
#include "semiwell/wells.hpp"

namespace semiwell {

// Declarative model description (what the config file carries).
struct PotentialSpec {
  std::string kind = "cosine_wells";  // cosine_wells | gaussian_wells | table
  double amplitude = 1.0;
  double period = 1.0;                          // cosine_wells
  double width = 1.0;                           // gaussian_wells
  std::vector<std::vector<double>> centers;     // gaussian_wells
  std::string table_path;                       // table (CSV)
};

struct FieldSpec {
  std::string kind = "zero";  // uniform_b | zero | table
  double b = 0.0;
  std::string table_path;
};

struct ModelSpec {
  int dim = 1;
  std::vector<int> shape;
  double spacing = 1.0;
  std::string boundary = "periodic_torus";
  PotentialSpec potential;
  FieldSpec field;
};

ModelSpec parse_model_spec(const nlohmann::json& j);
nlohmann::json model_spec_to_json(const ModelSpec& spec);  // canonical form
GridModel build_model(const ModelSpec& spec);

struct SweepConfig {
  ModelSpec model;
  double E0 = 0.9;
  double E1 = 0.5;
  double E2 = 0.6;
  double E3 = 0.75;
  double eta = 0.1;
  std::vector<double> mu_list;
  std::vector<std::string> experiments;  // subset of the known experiment names
  unsigned seed = 1;
  std::string cache_dir;  // empty disables caching
};

// Parses the full config file: model spec plus thresholds / mu list /
// experiment selection.
SweepConfig parse_sweep_config(const nlohmann::json& j);
SweepConfig load_sweep_config(const std::string& path);

// The default 4-identical-well benchmark configuration.
SweepConfig default_benchmark_config();

struct SweepRow {
  double mu = 0;
  bool ok = false;
  std::string error;          // "<experiment>: <message>" when not ok
  double gap_lo = 0, gap_hi = 0, lambda = 0;
  bool gap_found = false;
  std::map<std::string, double> metrics;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

SweepResult run_sweep(const SweepConfig& config);

struct DecayFit {
  double slope = 0;      // in (sqrt(mu), log value) coordinates; c = -slope
  double intercept = 0;  // C = e^{intercept}
  double r_squared = 0;
  int used_points = 0;
};

// Least-squares line of log(value) against sqrt(mu), ignoring values at or
// below the 1e-14 round-off floor.
DecayFit fit_exponential_rate(
    const std::vector<std::pair<double, double>>& points);

// Gap/lambda selection shared by the sweep and the CLI: interior gaps of the
// merged well spectrum in [sup_min, E1*mu] plus the trailing clipped gap up
// to E1*mu; returns (gap_lo, gap_hi) of the widest candidate, lambda = mid.
struct GapChoice {
  bool found = false;
  double lo = 0, hi = 0, lambda = 0;
};
GapChoice choose_lambda(const std::vector<double>& merged, double sup_min,
                        double level);

const std::vector<std::string>& known_experiments();

}  // namespace semiwell

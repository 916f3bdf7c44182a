#pragma once

// Config-driven scenario runner. Each scenario computes its tables, checks
// its assertions and writes report.json, the tables (CSV or JSON) and a
// run.log sidecar into the output directory.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nhreal/laser.hpp"
#include "nhreal/model.hpp"
#include "nhreal/tolerances.hpp"

namespace nhreal::scenario {

using nlohmann::json;

const std::vector<std::string>& scenario_names();

struct OutputSpec {
  std::string path = "out";
  std::string format = "csv";  // csv | json, applies to tables
};

struct ScenarioConfig {
  std::string scenario;
  std::optional<model::LatticeSpec> lattice;
  std::optional<laser::PumpSpec> pump;
  std::map<std::string, double> tolerance_overrides;
  OutputSpec output;
  std::uint64_t seed = 1;
  int trials = 0;                           // 0 picks the scenario default
  double anchor = 2.38;                     // calibrate_s target, units of t
  std::optional<std::string> calibration;   // calibration.json written by calibrate_s
  std::optional<std::string> replay;        // properties: instance file to re-evaluate

  Tolerances tolerances() const;
};

/// Validates scenario-specific requirements; throws Error(Config) with the
/// offending field path.
ScenarioConfig config_from_json(const json& j);
json to_json(const ScenarioConfig& c);  // omits output.path

struct Assertion {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string relation;  // abs_diff, rel_diff, le, ge, true
  bool passed = false;
};

struct ScenarioResult {
  std::string scenario;
  std::vector<Assertion> assertions;
  std::vector<std::string> files;
  json summary = json::object();

  bool passed() const;
  json report() const;
};

/// Runs the scenario and writes its outputs.
ScenarioResult run(const ScenarioConfig& config);

struct Calibration {
  double s = 0.0;
  double achieved = 0.0;  // next-to-zero |w| of H at s, units of t
  double residual = 0.0;  // |achieved - anchor|
  bool matched = false;
};

/// Smallest |w| of h after discarding the zero-mode cluster (eigenvalues
/// within tol.cluster ||h|| of zero).
double next_to_zero(const ComplexMatrix& h, const Tolerances& tol = {});

/// Log-grid scan of s over [1.01, 4] followed by bisection on the first sign
/// change of next_to_zero(H(s)) - anchor t. Without a sign change the best
/// grid point is returned with matched = false.
Calibration calibrate_s(double anchor = 2.38, int n = 9, double t = 1.0,
                        const Tolerances& tol = {});

/// Randomised property instances, reproducible from (suite, seed, trial).
/// Suites: psd_reality, indefinite_closure, mass_reality.
const std::vector<std::string>& property_suites();
json generate_instance(const std::string& suite, std::uint64_t seed, std::size_t trial);

/// Checks one instance; returns {"passed": bool, "checks": {...}}.
json evaluate_instance(const json& instance, const Tolerances& tol = {});

}  // namespace nhreal::scenario

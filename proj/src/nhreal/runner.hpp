#pragma once

// Shared plumbing for the scenario implementations.

#include <string>

#include "nhreal/scenario.hpp"
#include "nhreal/serialize.hpp"

namespace nhreal::scenario::detail {

class Context {
 public:
  explicit Context(const ScenarioConfig& cfg);

  const ScenarioConfig& config;
  Tolerances tol;
  ScenarioResult result;

  void close(const std::string& name, double measured, double expected, double tolerance);
  void rel(const std::string& name, double measured, double expected, double tolerance);
  void le(const std::string& name, double measured, double bound);
  void ge(const std::string& name, double measured, double bound);
  void check(const std::string& name, bool ok);

  /// Writes name.csv or name.json depending on the configured format.
  void table(const std::string& name, const io::Table& t);
  void write_json(const std::string& name, const json& j);

 private:
  void add(Assertion a);
  void write_file(const std::string& file, const std::string& body);
};

/// Unit norm with the largest component real and positive.
ComplexVector canonical(const ComplexVector& v);

void run_properties(Context& ctx);
void run_oscillators(Context& ctx);

}  // namespace nhreal::scenario::detail

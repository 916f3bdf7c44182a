// Command-line front end: one subcommand per scenario.
//
//   nhreal fig2 --out results/fig2
//   nhreal properties --seed 7 --tol reality=1e-9 --format json
//
// Exit status: 0 when every assertion passed, 1 when some assertion failed,
// 2 on configuration or runtime errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "nhreal/nhreal.h"

using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string format;
  std::string seed;
  std::vector<std::string> tols;
  bool quiet = false;
};

std::vector<std::string> scenario_names() {
  char* raw = nullptr;
  if (nhr_scenario_names(&raw) != NHR_OK) return {};
  const auto names = json::parse(raw).get<std::vector<std::string>>();
  nhr_string_free(raw);
  return names;
}

json build_config(const std::string& scenario, const Options& opt) {
  json cfg = json::object();
  if (!opt.config.empty()) {
    std::ifstream in(opt.config);
    if (!in) throw std::runtime_error("cannot read config " + opt.config);
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      throw std::runtime_error("config " + opt.config + ": " + e.what());
    }
    if (!cfg.is_object()) throw std::runtime_error("config must be a JSON object");
    if (cfg.contains("scenario") && cfg["scenario"] != scenario) {
      throw std::runtime_error("config names scenario " + cfg["scenario"].dump() +
                               " but the command is " + scenario);
    }
  }
  cfg["scenario"] = scenario;
  if (!opt.out.empty()) cfg["output"]["path"] = opt.out;
  if (!opt.format.empty()) cfg["output"]["format"] = opt.format;
  if (!opt.seed.empty()) {
    std::size_t used = 0;
    unsigned long long seed = 0;
    try {
      seed = std::stoull(opt.seed, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != opt.seed.size() || opt.seed[0] == '-') {
      throw std::runtime_error("--seed expects an unsigned 64-bit integer, got " + opt.seed);
    }
    cfg["seed"] = static_cast<std::uint64_t>(seed);
  }
  for (const auto& kv : opt.tols) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw std::runtime_error("--tol expects key=value, got " + kv);
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) throw std::runtime_error("--tol " + key + ": not a number: " + value);
    cfg["tolerances"][key] = x;
  }
  return cfg;
}

int run(const std::string& scenario, const Options& opt) {
  json cfg;
  try {
    cfg = build_config(scenario, opt);
  } catch (const std::exception& e) {
    std::cerr << "nhreal: " << e.what() << "\n";
    return 2;
  }
  char* report = nullptr;
  int passed = 0;
  const nhr_status st = nhr_run_scenario(cfg.dump().c_str(), &report, &passed);
  if (st != NHR_OK) {
    std::cerr << "nhreal: " << nhr_status_string(st) << ": " << nhr_last_error() << "\n";
    return 2;
  }
  const json r = json::parse(report);
  nhr_string_free(report);
  if (!opt.quiet) {
    for (const auto& a : r["assertions"]) {
      std::printf("%s  %-58s measured=%-14.8g expected=%-12.8g %s tol=%g\n",
                  a["passed"].get<bool>() ? "PASS" : "FAIL", a["name"].get<std::string>().c_str(),
                  a["measured"].is_number() ? a["measured"].get<double>() : 0.0,
                  a["expected"].is_number() ? a["expected"].get<double>() : 0.0,
                  a["relation"].get<std::string>().c_str(),
                  a["tolerance"].is_number() ? a["tolerance"].get<double>() : 0.0);
    }
    std::printf("%s: %zu assertions, %zu failed\n", scenario.c_str(),
                r["assertion_count"].get<std::size_t>(), r["failed_count"].get<std::size_t>());
  }
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nhreal: non-Hermitian Hamiltonians with real spectra"};
  app.set_version_flag("--version", std::string(nhr_version()));
  app.require_subcommand(1);
  Options opt;
  std::string chosen;

  for (const auto& name : scenario_names()) {
    auto* sub = app.add_subcommand(name, "run scenario " + name);
    sub->add_option("--config", opt.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (default: out)");
    sub->add_option("--format", opt.format, "table format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", opt.seed, "RNG seed (unsigned 64-bit)");
    sub->add_option("--tol", opt.tols, "tolerance override key=value (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_flag("-q,--quiet", opt.quiet, "print nothing on success");
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run(chosen, opt);
}

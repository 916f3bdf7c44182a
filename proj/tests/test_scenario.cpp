#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "nhreal/scenario.hpp"
#include "support.hpp"

using namespace nhreal;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nhreal_test_" + name);
  fs::remove_all(p);
  return p;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "run.log") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

scenario::ScenarioResult run(const std::string& name, const fs::path& out, json extra = json::object()) {
  extra["scenario"] = name;
  extra["output"]["path"] = out.string();
  return scenario::run(scenario::config_from_json(extra));
}

}  // namespace

TEST(Scenario, NamesCoverEveryFigure) {
  const auto& names = scenario::scenario_names();
  for (const char* s : {"fig1", "fig2", "fig3", "fig4", "fig5", "oscillators", "properties",
                        "calibrate_s", "custom"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), s), names.end()) << s;
  }
}

TEST(Scenario, OutputsAreByteIdenticalAcrossRuns) {
  const fs::path a = fresh_dir("fig2_a"), b = fresh_dir("fig2_b");
  EXPECT_TRUE(run("fig2", a).passed());
  EXPECT_TRUE(run("fig2", b).passed());
  const auto sa = snapshot(a), sb = snapshot(b);
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, sb);
  EXPECT_TRUE(fs::exists(a / "run.log"));
}

TEST(Scenario, CsvTablesUseOneBasedSitesAndHeader) {
  const fs::path dir = fresh_dir("fig2_csv");
  const auto r = run("fig2", dir);
  bool found = false;
  for (const auto& f : r.files) {
    if (f.size() < 4 || f.substr(f.size() - 4) != ".csv") continue;
    std::ifstream in(dir / f);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    if (header.find("site") != std::string::npos) {
      found = true;
      std::stringstream hs(header), fs_(first);
      std::string col, val;
      while (std::getline(hs, col, ',') && std::getline(fs_, val, ',')) {
        if (col == "site") {
          EXPECT_EQ(val, "1") << f;
        }
      }
    }
    EXPECT_EQ(first.find(';'), std::string::npos);
  }
  EXPECT_TRUE(found);
}

TEST(Scenario, CustomLatticeAnalysis) {
  const fs::path dir = fresh_dir("custom");
  json cfg;
  cfg["lattice"] = {{"n", 7}, {"scaling", {{"type", "geometric"}, {"s", 1.3}}}};
  cfg["pump"] = {{"kappa0", 0.1}};
  cfg["output"]["format"] = "json";
  const auto r = run("custom", dir, cfg);
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(fs::exists(dir / "analysis.json"));
  EXPECT_TRUE(fs::exists(dir / "report.json"));
}

TEST(Scenario, CalibrationRecoversAnchor) {
  const auto cal = scenario::calibrate_s(2.38);
  EXPECT_TRUE(cal.matched);
  EXPECT_NEAR(cal.achieved, 2.38, 1e-3);
  // Independent check: next-to-zero |w| of chain(9) diag(s^(j-1)).
  const ComplexMatrix h = nhreal::testing::chain(9) * nhreal::testing::diag(nhreal::testing::geometric(9, cal.s));
  double next = 1e300;
  for (const cd& w : nhreal::testing::reference_eigenvalues(h)) {
    if (std::abs(w) > 1e-6) next = std::min(next, std::abs(w));
  }
  EXPECT_NEAR(next, 2.38, 1e-3);
  EXPECT_NEAR(scenario::next_to_zero(h), next, 1e-12);
}

TEST(Scenario, ImpossibleToleranceFailsAssertions) {
  const fs::path dir = fresh_dir("fig1_fail");
  json cfg;
  cfg["tolerances"] = {{"harmonic", 1e-9}};
  const auto r = run("fig1", dir, cfg);
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.report()["passed"].get<bool>());
}

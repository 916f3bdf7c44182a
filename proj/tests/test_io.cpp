#include <gtest/gtest.h>

#include <string>

#include "nhreal/scenario.hpp"
#include "nhreal/serialize.hpp"
#include "nhreal/tolerances.hpp"
#include "support.hpp"

using namespace nhreal;
using namespace nhreal::testing;
using nlohmann::json;

namespace {

std::string config_message(const json& j) {
  try {
    scenario::config_from_json(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Config);
    return e.what();
  }
  ADD_FAILURE() << "accepted " << j.dump();
  return {};
}

}  // namespace

TEST(Io, FormatDoubleIsShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(-0.0), "0");
  EXPECT_EQ(io::format_double(2.0), "2");
  EXPECT_EQ(io::format_double(-1.5e-300), "-1.5e-300");
  for (double x : {1.0 / 3.0, 2.38, 1.7976929597762639, -6.02e23}) {
    EXPECT_EQ(std::stod(io::format_double(x)), x);
  }
}

TEST(Io, TableCsvAndJson) {
  io::Table t{{"site", "re", "im", "label"}, {}};
  t.add({1LL, 0.5, -0.0, std::string("a")});
  t.add({2LL, 1e-20, 3.0, std::string("b")});
  EXPECT_EQ(t.to_csv(), "site,re,im,label\n1,0.5,0,a\n2,1e-20,3,b\n");
  const json j = t.to_json();
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[1]["site"], 2);
  EXPECT_EQ(j[0]["label"], "a");
}

TEST(Io, ComplexAndMatrixRoundTrip) {
  EXPECT_EQ(io::complex_json(cd(1.5, -2.0)), json::parse("[1.5, -2.0]"));
  ComplexMatrix m(2, 3);
  m << cd(1, 2), cd(3, 4), cd(5, 6), cd(-1, 0), cd(0, -1), cd(0.25, 0.5);
  EXPECT_EQ(io::matrix_from_json(io::matrix_json(m), "m"), m);
  EXPECT_EQ(error_code([] { io::matrix_from_json(json::parse("[[1, 2], [3]]"), "m"); }), ErrorCode::Config);
}

TEST(Io, LatticeRoundTrip) {
  const json j = json::parse(R"({"n": 9, "t": 0.5, "onsite": {"type": "harmonic", "omega2": 0.001},
                                 "scaling": {"type": "geometric", "s": 1.8}, "zeroed_sites": [4]})");
  const auto spec = io::lattice_from_json(j);
  EXPECT_EQ(spec.n, 9);
  EXPECT_EQ(spec.zeroed_sites, std::vector<int>{4});
  const auto again = io::lattice_from_json(io::to_json(spec));
  EXPECT_EQ(model::build_h0(again), model::build_h0(spec));
  EXPECT_EQ(model::scaling_values(again), model::scaling_values(spec));
}

TEST(Io, LatticeErrorsNameTheField) {
  auto message = [](const char* text) -> std::string {
    try {
      io::lattice_from_json(json::parse(text));
    } catch (const Error& e) {
      return e.what();
    }
    return "accepted";
  };
  EXPECT_NE(message(R"({"n": 3, "colour": 1})").find("colour"), std::string::npos);
  EXPECT_NE(message(R"({"n": 3, "scaling": {"type": "geometric"}})").find("lattice.scaling.s"),
            std::string::npos);
  EXPECT_NE(message(R"({"n": 3, "scaling": {"type": "geometric", "s": 2, "extra": 0}})").find("extra"),
            std::string::npos);
  EXPECT_NE(message(R"({"t": 1})").find("lattice.n"), std::string::npos);
  EXPECT_NE(message(R"({"n": 3, "onsite": {"type": "cubic"}})").find("cubic"), std::string::npos);
}

TEST(Io, PumpDefaultsToFirstSite) {
  const auto p = io::pump_from_json(json::parse(R"({"kappa0": 0.02})"));
  EXPECT_EQ(p.pumped_sites, std::vector<int>{1});
  EXPECT_EQ(p.gamma, 0.0);
  EXPECT_EQ(error_code([] { io::pump_from_json(json::parse(R"({"kappa0": -1})")); }), ErrorCode::Config);
  EXPECT_EQ(error_code([] { io::pump_from_json(json::parse(R"({"kappa0": 1, "loss": 2})")); }),
            ErrorCode::Config);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_NE(config_message({{"scenario", "fig2"}, {"sead", 3}}).find("sead"), std::string::npos);
  EXPECT_NE(config_message({{"scenario", "fig2"}, {"output", {{"dir", "x"}}}}).find("dir"),
            std::string::npos);
  EXPECT_NE(config_message({{"scenario", "fig9"}}).find("fig9"), std::string::npos);
  config_message({{"scenario", "fig2"}, {"tolerances", {{"realty", 1e-8}}}});
  config_message({{"scenario", "fig2"}, {"tolerances", {{"reality", -1.0}}}});
  config_message({{"scenario", "fig2"}, {"output", {{"format", "xml"}}}});
  config_message({{"scenario", "custom"}});
  config_message({{"scenario", "fig2"}, {"seed", -4}});
}

TEST(Config, ParsesAndSerializes) {
  const json j = json::parse(R"({"scenario": "fig3", "seed": 7, "tolerances": {"threshold_rel": 0.02},
                                 "pump": {"kappa0": 0.02}, "output": {"path": "x", "format": "json"}})");
  const auto c = scenario::config_from_json(j);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.tolerances().threshold_rel, 0.02);
  EXPECT_EQ(c.tolerances().reality, Tolerances{}.reality);
  EXPECT_EQ(c.output.format, "json");
  const json out = scenario::to_json(c);
  EXPECT_FALSE(out["output"].contains("path"));
  EXPECT_EQ(scenario::to_json(scenario::config_from_json(out)), out);
}

TEST(Tolerances, SetGetAndErrors) {
  Tolerances t;
  t.set("harmonic", 0.05);
  EXPECT_EQ(t.get("harmonic"), 0.05);
  EXPECT_EQ(t.as_map().at("harmonic"), 0.05);
  EXPECT_EQ(error_code([&] { t.set("nope", 1.0); }), ErrorCode::Config);
  EXPECT_EQ(error_code([&] { t.set("reality", 0.0); }), ErrorCode::Config);
  EXPECT_EQ(t.as_map().size(), 28u);
}

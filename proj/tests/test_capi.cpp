#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nhreal/nhreal.h"

using nlohmann::json;

namespace {

json take_json(char* s) {
  const json j = json::parse(s);
  nhr_string_free(s);
  return j;
}

}  // namespace

TEST(CApi, LatticeProductAndEigensystem) {
  nhr_matrix *h0 = nullptr, *a = nullptr, *h = nullptr;
  ASSERT_EQ(nhr_lattice_build(R"({"n": 9, "scaling": {"type": "geometric", "s": 2}})", &h0, &a), NHR_OK);
  ASSERT_EQ(nhr_construct_product(h0, a, &h), NHR_OK);
  size_t rows = 0, cols = 0;
  ASSERT_EQ(nhr_matrix_shape(h, &rows, &cols), NHR_OK);
  EXPECT_EQ(rows, 9u);
  EXPECT_EQ(cols, 9u);
  std::vector<double> re(81), im(81);
  ASSERT_EQ(nhr_matrix_data(h, re.data(), im.data()), NHR_OK);
  EXPECT_EQ(re[0 * 9 + 1], 2.0);  // H_12 = t a_2
  EXPECT_EQ(re[1 * 9 + 0], 1.0);  // H_21 = t a_1

  nhr_eigensystem* es = nullptr;
  ASSERT_EQ(nhr_eig(h, &es), NHR_OK);
  ASSERT_EQ(nhr_eigensystem_dim(es), 9u);
  std::vector<double> wr(9), wi(9);
  ASSERT_EQ(nhr_eigensystem_eigenvalues(es, wr.data(), wi.data()), NHR_OK);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_LT(std::abs(wi[i]), 1e-10);
  for (std::size_t i = 1; i < 9; ++i) EXPECT_LE(wr[i - 1], wr[i]);
  std::vector<double> lr(81), li(81), rr(81), ri(81);
  ASSERT_EQ(nhr_eigensystem_vectors(es, 1, lr.data(), li.data()), NHR_OK);
  ASSERT_EQ(nhr_eigensystem_vectors(es, 0, rr.data(), ri.data()), NHR_OK);
  // Biorthonormality: sum_site L(site,u) R(site,v) = delta_uv.
  for (std::size_t u = 0; u < 9; ++u) {
    for (std::size_t v = 0; v < 9; ++v) {
      double sr = 0.0, si = 0.0;
      for (std::size_t k = 0; k < 9; ++k) {
        sr += lr[k * 9 + u] * rr[k * 9 + v] - li[k * 9 + u] * ri[k * 9 + v];
        si += lr[k * 9 + u] * ri[k * 9 + v] + li[k * 9 + u] * rr[k * 9 + v];
      }
      EXPECT_NEAR(sr, u == v ? 1.0 : 0.0, 1e-9);
      EXPECT_NEAR(si, 0.0, 1e-9);
    }
  }
  char* text = nullptr;
  ASSERT_EQ(nhr_eigensystem_json(es, &text), NHR_OK);
  EXPECT_TRUE(take_json(text).is_object());
  ASSERT_EQ(nhr_certify_json(h, h0, &text), NHR_OK);
  EXPECT_TRUE(take_json(text)["is_real"].get<bool>());
  nhr_eigensystem_free(es);
  nhr_matrix_free(h);
  nhr_matrix_free(a);
  nhr_matrix_free(h0);
}

TEST(CApi, GaugeAndEpAndThreshold) {
  nhr_matrix *h0 = nullptr, *a = nullptr, *hpp = nullptr, *h = nullptr;
  ASSERT_EQ(nhr_lattice_build(R"({"n": 9, "scaling": {"type": "geometric", "s": 2}, "zeroed_sites": [4]})",
                              &h0, &a),
            NHR_OK);
  EXPECT_EQ(nhr_construct_gauge(h0, a, &hpp), NHR_ERR_SINGULAR);
  EXPECT_NE(std::string(nhr_last_error()).find("singular"), std::string::npos);
  ASSERT_EQ(nhr_construct_product(h0, a, &h), NHR_OK);
  char* text = nullptr;
  ASSERT_EQ(nhr_ep_json(h, 0.0, 0.0, &text), NHR_OK);
  const json ep = take_json(text);
  EXPECT_EQ(ep["algebraic_multiplicity"], 3);
  EXPECT_EQ(ep["geometric_multiplicity"], 2);
  nhr_matrix_free(h);
  nhr_matrix_free(a);
  nhr_matrix_free(h0);

  const double one = 0.0;
  nhr_matrix* single = nullptr;
  ASSERT_EQ(nhr_matrix_create(1, 1, &one, nullptr, &single), NHR_OK);
  double threshold = 0.0;
  ASSERT_EQ(nhr_find_threshold(single, R"({"kappa0": 0.3})", &threshold, nullptr), NHR_OK);
  EXPECT_NEAR(threshold, 0.3, 1e-9);
  EXPECT_EQ(nhr_find_threshold(single, R"({"kappa0": 0.3, "pumped_sites": [2]})", &threshold, nullptr),
            NHR_ERR_INVALID_ARGUMENT);
  nhr_matrix_free(single);
}

TEST(CApi, ErrorCodesAndMessages) {
  nhr_matrix* m = nullptr;
  EXPECT_EQ(nhr_matrix_create(0, 2, nullptr, nullptr, &m), NHR_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(nhr_last_error()), "");
  EXPECT_EQ(nhr_lattice_build("{not json", &m, &m), NHR_ERR_CONFIG);
  nhr_matrix *h0 = nullptr, *a = nullptr;
  EXPECT_EQ(nhr_lattice_build(R"({"n": 3, "bogus": 1})", &h0, &a), NHR_ERR_CONFIG);
  EXPECT_NE(std::string(nhr_last_error()).find("bogus"), std::string::npos);
  char* report = nullptr;
  int passed = -1;
  EXPECT_EQ(nhr_run_scenario(R"({"scenario": "fig7"})", &report, &passed), NHR_ERR_CONFIG);
  EXPECT_EQ(passed, -1);
  EXPECT_STREQ(nhr_status_string(NHR_ERR_NOT_PSD), "not positive semi-definite");
  EXPECT_EQ(nhr_lattice_build(R"({"n": 3})", &h0, &a), NHR_OK);
  EXPECT_STREQ(nhr_last_error(), "");
  nhr_matrix_free(h0);
  nhr_matrix_free(a);
}

TEST(CApi, ScenarioNamesTolerancesAndRun) {
  char* text = nullptr;
  ASSERT_EQ(nhr_scenario_names(&text), NHR_OK);
  EXPECT_EQ(take_json(text).size(), 9u);
  ASSERT_EQ(nhr_default_tolerances(&text), NHR_OK);
  EXPECT_EQ(take_json(text)["reality"], 1e-8);

  const auto dir = std::filesystem::temp_directory_path() / "nhreal_capi_fig4";
  std::filesystem::remove_all(dir);
  const json cfg = {{"scenario", "fig4"}, {"output", {{"path", dir.string()}}}};
  int passed = 0;
  ASSERT_EQ(nhr_run_scenario(cfg.dump().c_str(), &text, &passed), NHR_OK);
  EXPECT_EQ(passed, 1);
  const json report = take_json(text);
  EXPECT_EQ(report["scenario"], "fig4");
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
}

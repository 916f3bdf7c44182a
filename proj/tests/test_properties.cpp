#include <gtest/gtest.h>

#include "nhreal/scenario.hpp"
#include "nhreal/serialize.hpp"
#include "support.hpp"

using namespace nhreal;
using namespace nhreal::testing;
using nlohmann::json;

TEST(Properties, InstancesAreDeterministicPerSeedAndTrial) {
  for (const auto& suite : scenario::property_suites()) {
    EXPECT_EQ(scenario::generate_instance(suite, 5, 3), scenario::generate_instance(suite, 5, 3));
    EXPECT_NE(scenario::generate_instance(suite, 5, 3), scenario::generate_instance(suite, 5, 4));
    EXPECT_NE(scenario::generate_instance(suite, 5, 3), scenario::generate_instance(suite, 6, 3));
  }
  EXPECT_EQ(error_code([] { scenario::generate_instance("nope", 1, 0); }), ErrorCode::InvalidArgument);
}

TEST(Properties, PsdInstancesPassWithIndependentOracle) {
  for (std::size_t k = 0; k < 40; ++k) {
    const json inst = scenario::generate_instance("psd_reality", 2, k);
    EXPECT_TRUE(scenario::evaluate_instance(inst)["passed"].get<bool>()) << "trial " << k;
    const ComplexMatrix h = io::matrix_from_json(inst["h0"], "h0") * io::matrix_from_json(inst["a"], "a");
    const double norm = h.norm();
    for (const cd& w : reference_eigenvalues(h)) EXPECT_LE(std::abs(w.imag()), 1e-8 * norm);
  }
}

TEST(Properties, IndefiniteSuiteProducesComplexPairs) {
  // The closure property is vacuous unless some instances leave the real axis.
  int complex_instances = 0;
  for (std::size_t k = 0; k < 40; ++k) {
    const json inst = scenario::generate_instance("indefinite_closure", 2, k);
    EXPECT_TRUE(scenario::evaluate_instance(inst)["passed"].get<bool>()) << "trial " << k;
    const ComplexMatrix h = io::matrix_from_json(inst["h0"], "h0") * io::matrix_from_json(inst["a"], "a");
    double max_imag = 0.0;
    for (const cd& w : reference_eigenvalues(h)) max_imag = std::max(max_imag, std::abs(w.imag()));
    if (max_imag > 1e-3 * h.norm()) ++complex_instances;
  }
  EXPECT_GE(complex_instances, 10);
}

TEST(Properties, NonPsdScalingFailsRealityCheck) {
  json inst = scenario::generate_instance("psd_reality", 2, 2);
  ComplexMatrix a = io::matrix_from_json(inst["a"], "a");
  a(0, 0) = -5.0 * a.cwiseAbs().maxCoeff();
  inst["a"] = io::matrix_json(a);
  EXPECT_FALSE(scenario::evaluate_instance(inst)["passed"].get<bool>());
}

TEST(Properties, MassInstancesPass) {
  for (std::size_t k = 0; k < 40; ++k) {
    const json inst = scenario::generate_instance("mass_reality", 2, k);
    EXPECT_TRUE(scenario::evaluate_instance(inst)["passed"].get<bool>()) << "trial " << k;
  }
}

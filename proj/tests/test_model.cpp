#include <gtest/gtest.h>

#include "nhreal/linalg.hpp"
#include "nhreal/model.hpp"
#include "support.hpp"

using namespace nhreal;
using namespace nhreal::testing;

TEST(Model, ChainIsTridiagonalWithUniformCoupling) {
  model::LatticeSpec spec;
  spec.n = 5;
  spec.t = 0.7;
  const ComplexMatrix h = model::build_h0(spec);
  EXPECT_TRUE(h.isApprox(chain(5, 0.7)));
}

TEST(Model, HarmonicDiagonalFollowsQuadraticPotential) {
  model::LatticeSpec spec;
  spec.n = 100;
  spec.onsite = model::HarmonicOnsite{1e-3};
  const ComplexMatrix h = model::build_h0(spec);
  for (int j = 1; j <= 100; ++j) {
    const double d = j - 99.0 / 2.0;
    EXPECT_DOUBLE_EQ(h(j - 1, j - 1).real(), d * d * 1e-3 / 2.0);
  }
}

TEST(Model, GeometricScalingAndZeroedSites) {
  model::LatticeSpec spec;
  spec.n = 4;
  spec.scaling = model::GeometricScaling{2.0};
  spec.zeroed_sites = {3};
  EXPECT_EQ(model::scaling_values(spec), (std::vector<double>{1.0, 2.0, 0.0, 8.0}));
}

TEST(Model, RandomScalingIsSeededAndInRange) {
  model::LatticeSpec spec;
  spec.n = 200;
  spec.scaling = model::RandomScaling{42};
  const auto a = model::scaling_values(spec);
  EXPECT_EQ(a, model::scaling_values(spec));
  for (double v : a) {
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 2.0);
  }
  spec.scaling = model::RandomScaling{43};
  EXPECT_NE(a, model::scaling_values(spec));
}

TEST(Model, SplitMix64MatchesReferenceStream) {
  // First outputs of the reference SplitMix64 generator for seed 0.
  model::SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(rng.next(), 0x6E789E6AA1B965F4ULL);
}

TEST(Model, ValidationErrors) {
  auto code = [](model::LatticeSpec s) { return error_code([&] { s.validate(); }); };
  model::LatticeSpec s;
  s.n = 0;
  EXPECT_EQ(code(s), ErrorCode::InvalidArgument);
  s = {};
  s.t = 0.0;
  EXPECT_EQ(code(s), ErrorCode::InvalidArgument);
  s = {};
  s.scaling = model::GeometricScaling{-1.0};
  EXPECT_EQ(code(s), ErrorCode::InvalidArgument);
  s = {};
  s.n = 3;
  s.scaling = model::ExplicitScaling{{1.0, 2.0}};
  EXPECT_EQ(code(s), ErrorCode::InvalidArgument);
  s.scaling = model::ExplicitScaling{{1.0, -2.0, 1.0}};
  EXPECT_EQ(code(s), ErrorCode::NotPsd);
  s.allow_indefinite = true;
  EXPECT_NO_THROW(s.validate());
  s = {};
  s.n = 3;
  s.zeroed_sites = {4};
  EXPECT_EQ(code(s), ErrorCode::InvalidArgument);
}

TEST(Model, ProductRejectsNonHermitianAndMismatchedInputs) {
  ComplexMatrix h0 = chain(3);
  h0(0, 1) = 2.0;
  EXPECT_EQ(error_code([&] { model::construct_product(h0, ComplexMatrix::Identity(3, 3)); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code([&] { model::construct_product(chain(3), ComplexMatrix::Identity(4, 4)); }),
            ErrorCode::DimensionMismatch);
}

TEST(Model, GaugeHasReciprocalAsymmetricCouplings) {
  const double s = 1.5;
  const ComplexMatrix hpp = model::construct_gauge(chain(5), diag(geometric(5, s)));
  for (int j = 0; j + 1 < 5; ++j) {
    EXPECT_NEAR(hpp(j, j + 1).real(), s, 1e-14);
    EXPECT_NEAR(hpp(j + 1, j).real(), 1.0 / s, 1e-14);
  }
}

TEST(Model, GaugeRejectsSingularScaling) {
  EXPECT_EQ(error_code([&] { model::construct_gauge(chain(3), diag({1.0, 0.0, 1.0})); }),
            ErrorCode::Singular);
}

TEST(Model, PsdFactorReproducesMatrix) {
  model::SplitMix64 rng(5);
  for (int rank : {1, 3, 6}) {
    const ComplexMatrix a = random_psd(rng, 6, rank);
    const ComplexMatrix b = model::factor_psd(a);
    EXPECT_LT((b.adjoint() * b - a).norm(), 1e-12 * a.norm());
  }
  const ComplexMatrix d = diag({4.0, 0.0, 9.0});
  EXPECT_TRUE(model::factor_psd(d).isApprox(diag({2.0, 0.0, 3.0})));
  EXPECT_EQ(error_code([&] { model::factor_psd(diag({1.0, -1.0})); }), ErrorCode::NotPsd);
}

TEST(Model, HermitianEquivalentSharesSpectrumWithProduct) {
  model::SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 12);
    const ComplexMatrix h0 = random_hermitian(rng, n);
    const ComplexMatrix a = random_psd(rng, n, n);
    const ComplexMatrix he = model::hermitian_equivalent(h0, model::factor_psd(a));
    const auto ref = reference_eigenvalues(h0 * a);
    const auto got = reference_eigenvalues(he);
    EXPECT_LT(linalg::sorted_spectrum_distance(ref, got), 1e-10 * linalg::spectral_norm(h0 * a));
  }
}

TEST(Model, ShiftMovesEveryEigenvalue) {
  const ComplexMatrix h = model::shift_spectrum(chain(4), 2.0);
  const auto ev = reference_eigenvalues(h);
  const auto ev0 = reference_eigenvalues(chain(4));
  for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(std::abs(ev[i] - ev0[i] - 2.0), 0.0, 1e-12);
}

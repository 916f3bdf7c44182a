#include <gtest/gtest.h>

#include <cmath>

#include "nhreal/eig.hpp"
#include "nhreal/linalg.hpp"
#include "nhreal/perturb.hpp"
#include "nhreal/skin.hpp"
#include "support.hpp"

using namespace nhreal;
using namespace nhreal::testing;

namespace {

ComplexMatrix selective(int n = 9, double s = 1.8) { return chain(n) * diag(geometric(n, s)); }

ComplexMatrix pump_indicator(int n, const std::vector<int>& sites) {
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  for (int j : sites) p(j - 1, j - 1) = 1.0;
  return p;
}

}  // namespace

TEST(Perturb, MatrixElementsAreRankOneForSingleSite) {
  const auto es = eig::eig_full(selective());
  const ComplexMatrix hg = perturb::matrix_elements(es, {1});
  const ComplexMatrix oracle = es.left.row(0).transpose() * es.right.row(0);
  EXPECT_LT((hg - oracle).norm(), 1e-14 * oracle.norm());
}

TEST(Perturb, HermitianDiagonalElementsAreSiteWeights) {
  const auto es = eig::eig_full(chain(6));
  const ComplexMatrix hg = perturb::matrix_elements(es, {1});
  for (std::size_t u = 0; u < es.dim; ++u) {
    const auto i = static_cast<Eigen::Index>(u);
    const double weight = std::norm(es.right(0, i)) / es.right.col(i).squaredNorm();
    EXPECT_NEAR(hg(i, i).real(), weight, 1e-12);
    EXPECT_NEAR(hg(i, i).imag(), 0.0, 1e-12);
  }
}

TEST(Perturb, SelfOrthogonalModeRefused) {
  ComplexMatrix j = ComplexMatrix::Zero(3, 3);
  j(0, 1) = 1.0;
  j(2, 2) = 1.0;
  const auto es = eig::eig_full(j);
  EXPECT_EQ(error_code([&] { perturb::matrix_elements(es, {1}); }), ErrorCode::Degenerate);
}

TEST(Perturb, NearDegenerateDenominatorRefused) {
  const auto es = eig::eig_full(diag({1.0, 1.0, 2.0}));
  EXPECT_EQ(error_code([&] { perturb::first_order(es, {1}, 0.1, 0); }), ErrorCode::Degenerate);
}

TEST(Perturb, ZeroPumpGivesZeroCorrections) {
  const auto es = eig::eig_full(selective());
  const auto p = perturb::first_order(es, {1}, 0.0, skin::zero_mode_index(es));
  EXPECT_EQ(p.energy_correction, cd(0.0));
  EXPECT_EQ(p.state_correction.norm(), 0.0);
}

TEST(Perturb, EnergyCorrectionMatchesFiniteDifference) {
  const ComplexMatrix h = selective();
  const auto es = eig::eig_full(h);
  const ComplexMatrix p = pump_indicator(9, {1});
  for (std::size_t mode = 0; mode < es.dim; ++mode) {
    const double g = 1e-6;
    const auto pred = perturb::first_order(es, {1}, g, mode);
    // Exact eigenvalue of H + i g P closest to the unperturbed one.
    const auto shifted = reference_eigenvalues(h + cd(0.0, g) * p);
    cd best = shifted[0];
    for (const cd& w : shifted) {
      if (std::abs(w - es.eigenvalues[mode]) < std::abs(best - es.eigenvalues[mode])) best = w;
    }
    EXPECT_LT(std::abs(best - es.eigenvalues[mode] - pred.energy_correction), 1e-9)
        << "mode " << mode;
  }
}

TEST(Perturb, StateCorrectionResidualIsSecondOrder) {
  const ComplexMatrix h = selective();
  const auto es = eig::eig_full(h);
  const std::size_t mode = 2;
  const auto i = static_cast<Eigen::Index>(mode);
  const ComplexMatrix p = pump_indicator(9, {1});
  auto residual = [&](double g) {
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(h + cd(0.0, g) * p);
    Eigen::Index k = 0;
    (solver.eigenvalues().array() - es.eigenvalues[mode]).abs().minCoeff(&k);
    ComplexVector exact = solver.eigenvectors().col(k);
    exact /= es.left.col(i).transpose() * exact;  // gauge: left overlap one
    const auto pred = perturb::first_order(es, {1}, g, mode);
    return (exact - es.right.col(i) - pred.state_correction).norm();
  };
  const double r1 = residual(1e-3), r2 = residual(2e-3);
  EXPECT_NEAR(std::log2(r2 / r1), 2.0, 0.05);
}

TEST(Perturb, NhphPairingOfSelectiveChain) {
  const auto es = eig::eig_full(selective());
  const auto rep = perturb::nhph_pairs(es);
  EXPECT_TRUE(rep.all_matched());
  EXPECT_EQ(rep.pairs.size(), 4u);
  ASSERT_EQ(rep.self_paired.size(), 1u);
  EXPECT_EQ(rep.self_paired[0], skin::zero_mode_index(es));
  for (const auto& pr : rep.pairs) {
    EXPECT_LT(pr.eigenvalue_residual, 1e-10);
    EXPECT_LT(pr.vector_residual, 1e-8);
  }
}

TEST(Perturb, HarmonicPotentialBreaksNhph) {
  ComplexMatrix h0 = chain(9);
  for (int j = 0; j < 9; ++j) h0(j, j) = 0.1 * (j - 4) * (j - 4);
  const auto es = eig::eig_full(h0 * diag(geometric(9, 1.3)));
  const auto rep = perturb::nhph_pairs(es);
  EXPECT_TRUE(rep.pairs.empty());
  EXPECT_EQ(rep.unmatched.size(), 9u);
}

TEST(Perturb, ZeroModeCorrectionLivesOnEvenSitesAndIsImaginary) {
  const auto es = eig::eig_full(selective());
  const double g = 0.01;
  const auto full = perturb::first_order(es, {1}, g, skin::zero_mode_index(es));
  const auto paired = perturb::paired_zero_mode_correction(es, {1}, g);
  EXPECT_LE(std::abs(full.energy_correction.real()), 1e-10 * std::abs(full.energy_correction));
  const double norm = full.state_correction.norm();
  ASSERT_GT(norm, 0.0);
  for (int j = 0; j < 9; j += 2) EXPECT_LE(std::abs(full.state_correction(j)), 1e-10 * norm);
  for (int j = 1; j < 9; j += 2) EXPECT_GT(std::abs(full.state_correction(j)), 1e-6 * norm);
  EXPECT_LT((paired.state_correction - full.state_correction).norm(), 1e-12 * norm);
}

TEST(Perturb, CorrectedModeAddsCorrection) {
  const auto es = eig::eig_full(selective());
  const auto z = skin::zero_mode_index(es);
  const auto p = perturb::first_order(es, {1}, 0.01, z);
  const ComplexVector v = perturb::corrected_mode(es, p);
  const ComplexVector expected = es.right.col(static_cast<Eigen::Index>(z)) + p.state_correction;
  EXPECT_LT(linalg::collinearity_residual(v, expected), 1e-12);
}

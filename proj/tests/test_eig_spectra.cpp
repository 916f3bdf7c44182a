#include <gtest/gtest.h>

#include <cmath>

#include "nhreal/eig.hpp"
#include "nhreal/linalg.hpp"
#include "nhreal/spectra.hpp"
#include "support.hpp"

using namespace nhreal;
using namespace nhreal::testing;

namespace {

ComplexMatrix jordan(int n) {
  ComplexMatrix j = ComplexMatrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) j(i, i + 1) = 1.0;
  return j;
}

}  // namespace

TEST(Eig, DimerProductHasRealPairAndBiorthonormalVectors) {
  // H0 = [[0,1],[1,0]], A = diag(1,4): H = [[0,4],[1,0]] with eigenvalues -2, 2.
  const ComplexMatrix h = chain(2) * diag({1.0, 4.0});
  const auto es = eig::eig_full(h);
  ASSERT_EQ(es.dim, 2u);
  EXPECT_NEAR(std::abs(es.eigenvalues[0] - cd(-2.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(es.eigenvalues[1] - cd(2.0)), 0.0, 1e-12);
  EXPECT_TRUE(es.all_biorthonormal());
  const ComplexMatrix overlap = es.left.transpose() * es.right;
  EXPECT_LT((overlap - ComplexMatrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LT(es.max_residual(), 1e-12);
}

TEST(Eig, HermitianLeftVectorsAreConjugates) {
  const auto es = eig::eig_full(chain(5));
  for (std::size_t u = 0; u < es.dim; ++u) {
    const auto i = static_cast<Eigen::Index>(u);
    EXPECT_LT(linalg::collinearity_residual(es.left.col(i), es.right.col(i).conjugate()), 1e-10);
  }
}

TEST(Eig, JordanBlockIsSelfOrthogonal) {
  const auto es = eig::eig_full(jordan(2));
  EXPECT_FALSE(es.all_biorthonormal());
  bool self_orthogonal = false;
  for (auto s : es.status) self_orthogonal |= s == eig::NormStatus::SelfOrthogonal;
  EXPECT_TRUE(self_orthogonal);
}

TEST(Eig, BiorthonormalityHoldsOnRandomRealSpectra) {
  model::SplitMix64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 15);
    const ComplexMatrix h0 = random_hermitian(rng, n);
    const ComplexMatrix h = h0 * random_psd(rng, n, n);
    const auto es = eig::eig_full(h);
    EXPECT_TRUE(es.all_biorthonormal()) << "trial " << trial;
    EXPECT_LT(es.biorthogonality_error(), 1e-8);
    const auto ref = reference_eigenvalues(h);
    EXPECT_LT(linalg::sorted_spectrum_distance(ref, es.eigenvalues), 1e-9 * es.matrix_norm);
  }
}

TEST(Eig, MetricPairingIsDiagonalForRealSpectrum) {
  const ComplexMatrix a = diag(geometric(7, 1.3));
  const auto es = eig::eig_full(chain(7) * a);
  const auto rep = eig::apply_metric_pairing(es, a);
  EXPECT_TRUE(rep.all_same_index);
  EXPECT_LT(rep.max_collinearity, 1e-8);
}

TEST(Spectra, CertifiesPsdProductAsRealAndPseudoHermitian) {
  model::SplitMix64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 20);
    const int rank = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
    const ComplexMatrix h0 = random_hermitian(rng, n);
    const ComplexMatrix h = h0 * random_psd(rng, n, rank);
    const auto cert = spectra::certify(h, h0);
    EXPECT_TRUE(cert.is_real) << "trial " << trial << " max_imag " << cert.max_imag;
    ASSERT_TRUE(cert.pseudo_hermitian_residual.has_value());
    EXPECT_LE(*cert.pseudo_hermitian_residual, 1e-8);
    // Independent check of H0^-1 H H0 = H^dag.
    const ComplexMatrix lhs = h0.partialPivLu().solve(h * h0);
    EXPECT_LE((lhs - h.adjoint()).norm(), 1e-8 * h.norm());
  }
}

TEST(Spectra, IndefiniteScalingGivesConjugatePair) {
  // H = [[0,1],[1,0]] diag(1,-1) = [[0,-1],[1,0]], eigenvalues +-i.
  const ComplexMatrix h0 = chain(2);
  const ComplexMatrix h = h0 * diag({1.0, -1.0});
  const auto cert = spectra::certify(h, h0);
  EXPECT_FALSE(cert.is_real);
  EXPECT_TRUE(cert.conjugation_closed());
  ASSERT_EQ(cert.conjugate_pairs.size(), 1u);
  EXPECT_NEAR(cert.max_imag, 1.0, 1e-12);
}

TEST(Spectra, SingularMetricSkipsPseudoHermitianCheck) {
  const ComplexMatrix h0 = chain(3);  // odd chain: zero eigenvalue
  const auto cert = spectra::certify(h0 * diag({1.0, 2.0, 3.0}), h0);
  EXPECT_FALSE(cert.pseudo_hermitian_residual.has_value());
  EXPECT_TRUE(cert.is_real);
}

TEST(Spectra, JordanBlockStructure) {
  const auto ep3 = spectra::ep_analyze(jordan(3), cd(0.0));
  EXPECT_EQ(ep3.algebraic_multiplicity, 3);
  EXPECT_EQ(ep3.geometric_multiplicity, 1);
  EXPECT_EQ(ep3.ep_order(), 3);
  EXPECT_TRUE(ep3.consistent);

  ComplexMatrix mixed = ComplexMatrix::Zero(4, 4);
  mixed(1, 2) = 1.0;
  mixed(3, 3) = 5.0;
  const auto ep2 = spectra::ep_analyze(mixed, cd(0.0));
  EXPECT_EQ(ep2.algebraic_multiplicity, 3);
  EXPECT_EQ(ep2.geometric_multiplicity, 2);
  EXPECT_EQ(ep2.block_sizes, (std::vector<int>{2, 1}));
  EXPECT_LT(ep2.chain_residual, 1e-10);
}

TEST(Spectra, SimpleEigenvalueIsNotEp) {
  const auto ep = spectra::ep_analyze(chain(9) * diag(geometric(9, 2.0)), cd(0.0));
  EXPECT_EQ(ep.algebraic_multiplicity, 1);
  EXPECT_FALSE(ep.is_ep());
}

TEST(Spectra, ZeroedScalingSiteCreatesEp) {
  // a_4 = 0 on n = 9: the kernel of A adds a second zero mode and a length-two chain.
  auto a = geometric(9, 2.0);
  a[3] = 0.0;
  const ComplexMatrix h = chain(9) * diag(a);
  const auto ep = spectra::ep_analyze(h, cd(0.0));
  EXPECT_EQ(ep.algebraic_multiplicity, 3);
  EXPECT_EQ(ep.geometric_multiplicity, 2);
  EXPECT_EQ(ep.ep_order(), 2);
  // e4 is a right zero eigenvector since column 4 of H vanishes.
  ComplexVector e4 = ComplexVector::Zero(9);
  e4(3) = 1.0;
  EXPECT_LT((h * e4).norm(), 1e-14);
}

TEST(Spectra, EvenChainWithZeroedFirstSiteIsEp2) {
  auto a = geometric(8, 2.0);
  a[0] = 0.0;
  const auto ep = spectra::ep_analyze(chain(8) * diag(a), cd(0.0));
  EXPECT_EQ(ep.algebraic_multiplicity, 2);
  EXPECT_EQ(ep.geometric_multiplicity, 1);
  EXPECT_EQ(ep.ep_order(), 2);
}

TEST(Spectra, BMapSpectraAgree) {
  model::SplitMix64 rng(23);
  const ComplexMatrix h0 = random_hermitian(rng, 8);
  const ComplexMatrix b = model::factor_psd(random_psd(rng, 8, 8));
  const auto rep = spectra::bmap_correspondence(h0, b);
  EXPECT_TRUE(rep.spectra_agree);
  EXPECT_TRUE(rep.invertible);
  EXPECT_EQ(rep.unmapped_nonzero, 0u);
}

TEST(Linalg, NormsAndNullSpace) {
  EXPECT_NEAR(linalg::spectral_norm(chain(2)), 1.0, 1e-14);
  EXPECT_NEAR(linalg::min_singular_value(diag({3.0, 0.5})), 0.5, 1e-14);
  const ComplexMatrix ns = linalg::null_space(chain(3), 1e-10);
  ASSERT_EQ(ns.cols(), 1);
  EXPECT_LT((chain(3) * ns).norm(), 1e-12);
  EXPECT_TRUE(linalg::is_psd(diag({1.0, 0.0})));
  EXPECT_FALSE(linalg::is_psd(diag({1.0, -0.1})));
}

TEST(Spectra, ZeroedSiteParityDecidesEpStructure) {
  // Odd chains: a_j = 0 on an even site adds a kernel vector and a length-two chain,
  // on an odd site the zero eigenvalue stays simple. Even chains: always an EP2.
  for (int n : {5, 7, 9, 11, 13, 6, 8, 10, 12}) {
    for (int j = 1; j <= n; ++j) {
      auto a = geometric(n, 1.8);
      a[static_cast<std::size_t>(j - 1)] = 0.0;
      const auto ep = spectra::ep_analyze(chain(n) * diag(a), cd(0.0));
      const bool odd_chain = n % 2 == 1;
      const int algebraic = odd_chain ? (j % 2 == 0 ? 3 : 1) : 2;
      const int geometric_mult = odd_chain ? (j % 2 == 0 ? 2 : 1) : 1;
      EXPECT_EQ(ep.algebraic_multiplicity, algebraic) << "n " << n << " j " << j;
      EXPECT_EQ(ep.geometric_multiplicity, geometric_mult) << "n " << n << " j " << j;
      EXPECT_EQ(ep.ep_order(), algebraic == 1 ? 1 : 2) << "n " << n << " j " << j;
      EXPECT_LT(ep.chain_residual, 1e-8);
    }
  }
}

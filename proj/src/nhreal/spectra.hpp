#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nhreal/eig.hpp"
#include "nhreal/tolerances.hpp"
#include "nhreal/types.hpp"

namespace nhreal::spectra {

struct SpectralCertificate {
  std::vector<cd> eigenvalues;  // (Re, Im) ascending
  double matrix_norm = 0.0;
  double max_imag = 0.0;
  bool is_real = false;
  /// ||H0^-1 H H0 - H^dag|| / ||H||; empty when H0 is numerically singular.
  std::optional<double> pseudo_hermitian_residual;
  /// (u, v) with w_u ~ conj(w_v); real eigenvalues appear as (u, u).
  std::vector<std::pair<std::size_t, std::size_t>> conjugate_pairs;
  std::vector<std::size_t> unmatched;
  /// psi~_u^T psi_u with both vectors at unit 2-norm.
  std::vector<cd> inner_products;

  bool conjugation_closed() const { return unmatched.empty(); }
};

/// Reality and pseudo-Hermiticity certificate for h against the metric h0^-1.
SpectralCertificate certify(const ComplexMatrix& h, const ComplexMatrix& h0,
                            const Tolerances& tol = {});

struct InnerProductEntry {
  std::size_t mode = 0;
  cd value;                 // psi~^T psi with psi~* scaled to A psi
  double b_norm2 = 0.0;     // ||B psi||^2 for unit psi
  double collinearity = 0.0;
  bool agrees = false;
  bool ep_candidate = false;  // B psi vanishes
};

/// Biorthogonal inner products of H = H0 B^dag B against ||B psi||^2.
std::vector<InnerProductEntry> inner_product_audit(const eig::EigenSystem& es,
                                                   const ComplexMatrix& b,
                                                   const Tolerances& tol = {});

struct JordanChain {
  /// v1 (eigenvector, unit norm) ... vk with (H - w)v1 = 0 and (H - w)v_{i+1} = v_i.
  std::vector<ComplexVector> vectors;
  double residual = 0.0;  // worst relative chain equation residual
};

struct EPReport {
  cd target;
  int algebraic_multiplicity = 0;
  int geometric_multiplicity = 0;
  std::vector<int> block_sizes;  // descending
  std::vector<int> kernel_dims;  // dim ker (H - w)^k restricted, k = 1, 2, ...
  std::vector<JordanChain> chains;
  double chain_residual = 0.0;
  bool boundary_warning = false;
  bool consistent = false;  // block sizes sum to the algebraic multiplicity

  int ep_order() const;
  bool is_ep() const { return ep_order() > 1; }
};

/// Cluster-local Jordan structure of h at `target`.
///
/// Algebraic multiplicity counts eigenvalues within tol.cluster ||H|| of the
/// target. The kernels K_k of (H - w)^k are grown one power at a time by
/// solving (H - w) x in K_{k-1}, which avoids forming matrix powers. Block
/// sizes follow from the dimension jumps; chains are seeded top-down and then
/// rebuilt by minimum-norm least squares inside the generalised eigenspace.
EPReport ep_analyze(const ComplexMatrix& h, cd target, const Tolerances& tol = {});

struct BMapReport {
  double spectrum_distance = 0.0;  // sorted spectra of H and H_e, / ||H||
  bool spectra_agree = false;
  bool invertible = false;
  std::size_t mapped_modes = 0;     // modes checked through the B map
  std::size_t kernel_modes = 0;     // modes with B psi = 0 (singular B only)
  std::size_t unmapped_nonzero = 0; // nonzero-eigenvalue modes with B psi = 0
  double max_mapping_residual = 0.0;
};

/// Checks H = H0 B^dag B against H_e = B H0 B^dag.
BMapReport bmap_correspondence(const ComplexMatrix& h0, const ComplexMatrix& b,
                               const Tolerances& tol = {});

}  // namespace nhreal::spectra

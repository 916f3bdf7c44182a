#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "nhreal/tolerances.hpp"
#include "nhreal/types.hpp"

namespace nhreal::eig {

enum class NormStatus { Biorthonormal, SelfOrthogonal, Unpaired };

std::string to_string(NormStatus status);

inline constexpr std::size_t kNoPartner = std::numeric_limits<std::size_t>::max();

/// Paired right/left eigenvectors of a general complex matrix.
///
/// Columns of `right` satisfy M psi = w psi; columns of `left` satisfy
/// psi~^T M = w psi~^T (no conjugation). Column u of `left` is the partner of
/// column u of `right`. Eigenvalues are ordered by (Re, Im) ascending.
/// Biorthonormal pairs have psi~^T psi = 1 with the scale split evenly
/// between the two vectors; other pairs keep unit 2-norm vectors.
struct EigenSystem {
  std::size_t dim = 0;
  std::vector<cd> eigenvalues;
  std::vector<cd> left_eigenvalues;   // eigenvalue of the paired left solve
  ComplexMatrix right;
  ComplexMatrix left;
  std::vector<std::size_t> pairing;   // index into the sorted left solve
  std::vector<NormStatus> status;
  std::vector<double> residuals;      // max of right/left residual, unit vectors
  double matrix_norm = 0.0;

  bool all_biorthonormal() const;
  /// |psi~_v^T psi_u - delta_vu| maximised over biorthonormal pairs.
  double biorthogonality_error() const;
  double max_residual() const;
};

/// Dense eigensolve of m and of m^T, followed by left/right pairing.
/// Degenerate clusters (radius tol.cluster ||m||) with a well-conditioned
/// overlap matrix are biorthonormalised as a block; clusters containing a
/// coalesced (self-orthogonal) direction are paired greedily by overlap.
EigenSystem eig_full(const ComplexMatrix& m, const Tolerances& tol = {});

struct MetricPair {
  std::size_t right_index = 0;
  std::size_t left_index = kNoPartner;  // kNoPartner for kernel vectors
  bool kernel = false;                   // A psi = 0, the w = 0 branch
  bool same_index = false;               // u == v (or same degenerate cluster)
  double collinearity = 0.0;             // ||(A psi)* - c psi~|| / ||A psi||
};

struct MetricPairingReport {
  std::vector<MetricPair> pairs;
  bool all_same_index = false;  // real-spectrum signature
  double max_collinearity = 0.0;
};

/// For each right vector psi_u, locates the left vector proportional to
/// (A psi_u)*. `es` must come from H = H0 A with the same A.
MetricPairingReport apply_metric_pairing(const EigenSystem& es, const ComplexMatrix& a,
                                         const Tolerances& tol = {});

}  // namespace nhreal::eig

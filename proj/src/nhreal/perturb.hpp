#pragma once

// First-order perturbation theory in the pump strength, and the
// particle-hole partner bookkeeping that collapses its mode sum.

#include <vector>

#include "nhreal/eig.hpp"
#include "nhreal/tolerances.hpp"
#include "nhreal/types.hpp"

namespace nhreal::perturb {

/// H_gamma(v, u) = psi~_v^T P psi_u with P the indicator of the pumped sites.
/// Refuses (Error(Degenerate)) when any pair is not biorthonormal, since the
/// expansion does not exist at an exceptional point.
ComplexMatrix matrix_elements(const eig::EigenSystem& es, const std::vector<int>& pumped_sites);

struct NhphPair {
  std::size_t mode = 0;
  std::size_t partner = 0;
  double eigenvalue_residual = 0.0;  // |w_v' + conj(w_v)| / ||H||
  double vector_residual = 0.0;      // psi_v' vs S conj(psi_v), phase-free
};

struct NhphReport {
  std::vector<NhphPair> pairs;           // mode < partner
  std::vector<std::size_t> self_paired;  // w on the imaginary axis, psi = S conj(psi)
  std::vector<std::size_t> unmatched;
  bool all_matched() const { return unmatched.empty(); }
};

/// Matches every mode v with v' such that w_v' = -conj(w_v) and
/// psi_v',j ~ (-1)^(j-1) conj(psi_v,j).
NhphReport nhph_pairs(const eig::EigenSystem& es, const Tolerances& tol = {});

struct PerturbationPrediction {
  std::size_t base_mode_index = 0;
  double gamma1 = 0.0;
  cd energy_correction;            // w^(1)
  ComplexVector state_correction;  // psi^(1)
  std::vector<std::pair<std::size_t, std::size_t>> nhph_pairs;
};

/// w^(1) = i gamma1 H_gamma(u, u) and
/// psi^(1) = i gamma1 sum_{v != u} H_gamma(v, u) / (w_u - w_v) psi_v.
/// Throws Error(Degenerate) when |w_u - w_v| < tol.degenerate_denominator ||H||.
PerturbationPrediction first_order(const eig::EigenSystem& es, const std::vector<int>& pumped_sites,
                                   double gamma1, std::size_t mode, const Tolerances& tol = {});

/// The zero-mode correction with partner terms combined:
/// psi^(1)_j = -2 i gamma1 sum_pairs H_gamma(v, 0) / Re w_v psi_v,j on even j
/// and 0 on odd j, one term per pair using the member with Re w > 0.
/// Requires a complete pairing of the nonzero modes.
PerturbationPrediction paired_zero_mode_correction(const eig::EigenSystem& es,
                                                   const std::vector<int>& pumped_sites,
                                                   double gamma1, const Tolerances& tol = {});

/// psi_u + psi^(1), rescaled so the first component is 1.
ComplexVector corrected_mode(const eig::EigenSystem& es, const PerturbationPrediction& p);

}  // namespace nhreal::perturb

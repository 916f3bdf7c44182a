#pragma once

// Non-interacting lasing thresholds of a chain of lossy cavities with a
// localized pump, and the power flows at the coupling junctions.

#include <vector>

#include "nhreal/tolerances.hpp"
#include "nhreal/types.hpp"

namespace nhreal::laser {

struct PumpSpec {
  double kappa0 = 0.0;            // uniform cavity loss
  std::vector<int> pumped_sites;  // 1-based
  double gamma = 0.0;             // pump strength on pumped sites

  void validate(std::size_t n) const;
};

/// H_a = H - i kappa0 I + i gamma P, P the indicator of the pumped sites.
ComplexMatrix pumped_hamiltonian(const ComplexMatrix& h, const PumpSpec& pump);

struct Trajectory {
  std::vector<double> gammas;
  /// values[mode][step]; modes indexed by the sorted order at gammas[0].
  std::vector<std::vector<cd>> values;
  /// vectors[mode] at the last grid point (unit norm).
  std::vector<ComplexVector> final_vectors;
  /// Mode whose |Re w| stays below tol.pairing ||H|| along the grid, or npos.
  std::size_t zero_mode = static_cast<std::size_t>(-1);
};

/// Follows every eigenvalue along an ascending gamma grid, matching steps by
/// maximal eigenvector overlap. Throws Error(AmbiguousTracking) when two
/// overlaps are within tol.tracking_ambiguity of each other.
Trajectory track_mode(const ComplexMatrix& h, const PumpSpec& pump,
                      const std::vector<double>& gamma_grid, const Tolerances& tol = {});

struct ThresholdResult {
  double threshold = 0.0;                // pump strength D
  double threshold_over_kappa0 = 0.0;
  std::size_t crossing_mode_index = 0;   // index in the passive sorted spectrum
  cd crossing_eigenvalue;                // at threshold
  ComplexVector threshold_mode;          // normalised to psi_1 = 1
  std::vector<std::pair<double, cd>> trajectory;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// Smallest gamma with max_u Im w_u(gamma) = 0. Brackets by doubling from
/// gamma = kappa0, scans the final bracket for the first sign change, then
/// bisects to floating-point resolution. Throws Error(NoThreshold) above
/// tol.gamma_max * kappa0.
ThresholdResult find_threshold(const ComplexMatrix& h, const PumpSpec& pump,
                               const Tolerances& tol = {});

struct PowerFlowReport {
  std::vector<double> junction_gains;  // G_{j,j+1}, junction centered at j + 1/2
  std::vector<double> flow_forward;    // P_{j,j+1}: from cavity j+1 into j
  std::vector<double> flow_backward;   // P_{j+1,j}: from cavity j into j+1
  std::vector<double> site_terms;      // 2 Im(H_a)_jj |psi_j|^2
  double balance_residual = 0.0;       // |sum site + sum G|
  double max_term = 0.0;
};

/// Intensity balance of `mode` under the pumped Hamiltonian h_a. Couplings
/// are the off-diagonal entries of h_a, which equal those of the construction
/// matrix because loss and pump are diagonal.
PowerFlowReport power_flows(const ComplexVector& mode, const ComplexMatrix& h_a);

/// Normalises so that the first component is 1 (falls back to the largest
/// component when the first one vanishes).
ComplexVector normalize_first(const ComplexVector& v);

}  // namespace nhreal::laser

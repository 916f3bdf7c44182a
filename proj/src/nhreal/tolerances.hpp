#pragma once

#include <map>
#include <string>

namespace nhreal {

/// Every numerical threshold used by the analyses, with its default.
/// Relative tolerances scale with the spectral norm of the matrix under study.
struct Tolerances {
  double reality = 1e-8;            // max |Im w| / ||H|| for a real spectrum
  double pseudo_hermitian = 1e-8;   // ||H0^-1 H H0 - H^dag|| / ||H||
  double residual = 1e-10;          // eigenpair residual / ||H||
  double pairing = 1e-8;            // left/right eigenvalue agreement / ||H||
  double cluster = 1e-7;            // degenerate-cluster radius / ||H||
  double self_orthogonal = 1e-6;    // |psi~^T psi| for unit vectors
  double biorthogonal = 1e-8;       // |psi~_v^T psi_u - delta|
  double nullity = 1e-8;            // singular-value cutoff / ||H||
  double singular_metric = 1e-10;   // smallest singular value of H0 / ||H0||
  double kernel = 1e-10;            // ||A psi|| / (||A|| ||psi||) kernel cutoff
  double collinearity = 1e-8;       // mode-shape agreement
  double psd = 1e-10;               // lowest eigenvalue >= -psd * ||A||
  double support = 1e-8;            // relative amplitude treated as zero (parity)
  double envelope_ipr = 1.5;        // max normalised IPR of a de-trended skin mode
  double threshold_imag = 1e-9;     // |Im w| at threshold / kappa0
  double gamma_max = 1e4;           // threshold search ceiling / kappa0
  double tracking_ambiguity = 0.01; // relative overlap gap refused by tracking
  double degenerate_denominator = 1e-6;  // |w_u - w_v| / ||H|| in perturbation theory
  double balance = 1e-8;            // power balance / max term
  double spectral_match = 1e-8;     // sorted-spectrum agreement / ||H||

  // Acceptance-level gates.
  double anchor_gauge = 1e-3;       // +-0.618 t anchor (absolute, units of t)
  double anchor_selective = 1e-2;   // +-2.38 t anchor (absolute, units of t)
  double calibration = 1e-3;        // calibration target accuracy (units of t)
  double threshold_rel = 0.01;      // relative error of D, D''
  double junction_ratio = 5.0;      // min max|G''| / max|G|
  double harmonic = 0.03;           // |E_q + 2|t| - (q-1/2) w~| / w~
  double frequency_rel = 1e-3;      // oscillator frequency agreement
  double energy_drift = 1e-6;       // relative mechanical-energy drift

  /// Sets a field by key; throws Error(Config) on an unknown key.
  void set(const std::string& key, double value);
  double get(const std::string& key) const;
  std::map<std::string, double> as_map() const;
};

}  // namespace nhreal

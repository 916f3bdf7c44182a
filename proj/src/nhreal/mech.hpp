#pragma once

// Frictionless mass-spring chain between fixed walls: x'' = M x with
// M = A M0, A = diag(1/m).

#include <vector>

#include "nhreal/tolerances.hpp"
#include "nhreal/types.hpp"

namespace nhreal::mech {

struct OscillatorChain {
  std::vector<double> masses;
  double spring_k = 1.0;

  std::size_t n() const { return masses.size(); }
  void validate() const;
};

/// M = A M0 with M0 tridiagonal (-2k diagonal, k off-diagonal).
ComplexMatrix dynamical_matrix(const OscillatorChain& chain);

/// w = sqrt(-lambda), ascending. Throws Error(NotPsd) if any eigenvalue has
/// an imaginary or positive real part beyond 1e-8 ||M|| (tol.reality).
std::vector<double> eigenfrequencies(const ComplexMatrix& m, const Tolerances& tol = {});

struct Trajectory {
  double dt = 0.0;
  std::size_t stride = 1;
  std::vector<double> times;
  std::vector<RealVector> positions;
  std::vector<RealVector> velocities;
};

/// Position Verlet on x'' = M x, sampling every `stride` steps (the initial
/// state is sample 0). Throws Error(InvalidArgument) unless dt * w_max < 0.1.
Trajectory integrate(const OscillatorChain& chain, const RealVector& x0, const RealVector& v0,
                     double dt, std::size_t steps, std::size_t stride = 1);

double mechanical_energy(const OscillatorChain& chain, const RealVector& x, const RealVector& v);

struct SpectralPeak {
  double frequency = 0.0;  // angular
  double amplitude = 0.0;
};

/// Local maxima of the Hann-windowed, zero-padded power spectrum of a
/// uniformly sampled real signal, refined by quadratic interpolation of the
/// log magnitude. Peaks below `rel_floor` times the largest one are dropped;
/// the result is sorted by frequency.
std::vector<SpectralPeak> spectral_peaks(const std::vector<double>& signal, double dt,
                                         double rel_floor = 0.05, std::size_t pad_factor = 8);

/// Angular frequency of the strongest peak.
double dominant_frequency(const std::vector<double>& signal, double dt);

}  // namespace nhreal::mech

#pragma once

// Builders for the tight-binding Hamiltonian H0, the scaling matrix A and the
// matrices derived from them (H = H0 A, the gauge-transformed A^-1 H0 A, the
// Hermitian equivalent B H0 B^dag).

#include <cstdint>
#include <variant>
#include <vector>

#include "nhreal/types.hpp"

namespace nhreal::model {

struct ZeroOnsite {};

/// w_j = [j - (N-1)/2]^2 * omega2 / 2 for 1-based j.
struct HarmonicOnsite {
  double omega2 = 0.0;
};

using Onsite = std::variant<ZeroOnsite, HarmonicOnsite>;

struct IdentityScaling {};

/// a_j = s^(j-1).
struct GeometricScaling {
  double s = 1.0;
};

/// a_j = 2 (1 - u_j) with u_j drawn from SplitMix64(seed).
struct RandomScaling {
  std::uint64_t seed = 0;
};

struct ExplicitScaling {
  std::vector<double> values;
};

using Scaling = std::variant<IdentityScaling, GeometricScaling, RandomScaling, ExplicitScaling>;

struct LatticeSpec {
  int n = 1;
  double t = 1.0;
  Onsite onsite = ZeroOnsite{};
  Scaling scaling = IdentityScaling{};
  std::vector<int> zeroed_sites;  // 1-based
  bool allow_indefinite = false;  // permits negative explicit a_j

  /// Throws Error(InvalidArgument) on the first violated invariant.
  void validate() const;
};

/// SplitMix64 stream. next_unit() keeps the top 53 bits, giving u in [0, 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double next_unit();

 private:
  std::uint64_t state_;
};

/// Open tridiagonal chain with on-site potential on the diagonal.
ComplexMatrix build_h0(const LatticeSpec& spec);

/// The diagonal a_j of A, after zeroed_sites are applied.
std::vector<double> scaling_values(const LatticeSpec& spec);

/// Diagonal A. Negative explicit values are rejected unless
/// spec.allow_indefinite is set.
ComplexMatrix build_scaling(const LatticeSpec& spec);

/// H = H0 A. Both inputs must be Hermitian.
ComplexMatrix construct_product(const ComplexMatrix& h0, const ComplexMatrix& a);

/// H'' = A^-1 H0 A. Throws Error(Singular) naming the zero diagonal entries
/// (1-based) when A is diagonal and singular.
ComplexMatrix construct_gauge(const ComplexMatrix& h0, const ComplexMatrix& a);

/// B with B^dag B = A. Diagonal A gives B = diag(sqrt(a_j)); otherwise
/// B = Lambda^(1/2) U^dag from the Hermitian eigendecomposition.
ComplexMatrix factor_psd(const ComplexMatrix& a, double psd_tol = 1e-10);

/// H_e = B H0 B^dag, Hermitian to rounding and symmetrised on return.
ComplexMatrix hermitian_equivalent(const ComplexMatrix& h0, const ComplexMatrix& b);

/// H + c I.
ComplexMatrix shift_spectrum(const ComplexMatrix& h, double c);

}  // namespace nhreal::model

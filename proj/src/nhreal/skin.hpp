#pragma once

#include <string>
#include <vector>

#include "nhreal/eig.hpp"
#include "nhreal/tolerances.hpp"
#include "nhreal/types.hpp"

namespace nhreal::skin {

enum class SupportParity { OddSites, EvenSites, Mixed };
enum class Localization { SkinLeft, SkinRight, Bulk };

std::string to_string(SupportParity p);
std::string to_string(Localization c);

struct ModeReport {
  std::size_t mode_index = 0;
  std::size_t sites = 0;
  cd eigenvalue;
  double ipr = 0.0;           // sum |psi|^4 / (sum |psi|^2)^2
  double com = 0.0;           // 1-based center of mass of |psi|^2
  double decay_rate = 0.0;    // slope of ln|psi_j| against j on the support
  double envelope_ipr = 0.0;  // support-normalised IPR after removing exp(decay * j)
  SupportParity support_parity = SupportParity::Mixed;
  Localization classification = Localization::Bulk;
};

/// Scale-free localisation metrics of a single vector. Classification is left
/// as Bulk; use classify() with a reference rate.
ModeReport profile(const ComplexVector& mode, const Tolerances& tol = {});

/// A skin mode is an exponential envelope over an extended standing wave:
/// |decay_rate| >= min_rate, envelope_ipr <= tol.envelope_ipr (an open-chain
/// standing wave has normalised IPR below 3/2), and its center of mass sits
/// in the half of the chain the envelope points to.
Localization classify(const ModeReport& report, double min_rate, const Tolerances& tol = {});

/// Half the gauge rate |ln s| / 2, floored so that s = 1 still separates
/// extended modes from rounding noise.
double reference_rate(double s);

/// Reports for every mode of es, classified against reference_rate(s).
std::vector<ModeReport> mode_reports(const eig::EigenSystem& es, double s,
                                     const Tolerances& tol = {});

struct SelectiveSkinReport {
  std::size_t zero_index = 0;
  double zero_profile_residual = 0.0;   // vs psi0_j s^-(j-1)
  double left_extended_residual = 0.0;  // left zero vector vs H0 zero mode
  ModeReport zero_mode;
  std::vector<ModeReport> reports;
  bool all_nonzero_bulk = false;
  bool passed = false;
};

/// Selective skin effect of H = H0 A with geometric A. Throws
/// Error(NoZeroMode) when either system lacks an isolated zero mode.
SelectiveSkinReport verify_selective_skin(const eig::EigenSystem& h_system,
                                          const eig::EigenSystem& h0_system, double s,
                                          const Tolerances& tol = {});

struct StandardSkinReport {
  double max_profile_residual = 0.0;   // psi''_u vs psi0_u s^-(j-1), all modes
  double spectrum_distance = 0.0;      // vs H0, absolute
  double left_zero_com = 0.0;
  std::vector<ModeReport> reports;
  bool all_skin = false;               // skin_left for s > 1, skin_right for s < 1
  bool left_zero_on_far_edge = false;  // com beyond the far quartile
  bool passed = false;
};

/// Standard skin effect of H'' = A^-1 H0 A with geometric A.
StandardSkinReport verify_standard_skin(const eig::EigenSystem& hpp_system,
                                        const eig::EigenSystem& h0_system, double s,
                                        const Tolerances& tol = {});

/// ||psi0 - c psi0''|| / ||psi0|| minimised over c.
double zero_mode_equality(const eig::EigenSystem& h_system, const eig::EigenSystem& hpp_system,
                          const Tolerances& tol = {});

/// Index of the isolated zero mode; throws Error(NoZeroMode).
std::size_t zero_mode_index(const eig::EigenSystem& es, const Tolerances& tol = {});

}  // namespace nhreal::skin

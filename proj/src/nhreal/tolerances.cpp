#include "nhreal/tolerances.hpp"

#include <array>
#include <utility>

#include "nhreal/types.hpp"

namespace nhreal {

namespace {

using Field = std::pair<const char*, double Tolerances::*>;

constexpr std::array kFields = {
    Field{"reality", &Tolerances::reality},
    Field{"pseudo_hermitian", &Tolerances::pseudo_hermitian},
    Field{"residual", &Tolerances::residual},
    Field{"pairing", &Tolerances::pairing},
    Field{"cluster", &Tolerances::cluster},
    Field{"self_orthogonal", &Tolerances::self_orthogonal},
    Field{"biorthogonal", &Tolerances::biorthogonal},
    Field{"nullity", &Tolerances::nullity},
    Field{"singular_metric", &Tolerances::singular_metric},
    Field{"kernel", &Tolerances::kernel},
    Field{"collinearity", &Tolerances::collinearity},
    Field{"psd", &Tolerances::psd},
    Field{"support", &Tolerances::support},
    Field{"envelope_ipr", &Tolerances::envelope_ipr},
    Field{"threshold_imag", &Tolerances::threshold_imag},
    Field{"gamma_max", &Tolerances::gamma_max},
    Field{"tracking_ambiguity", &Tolerances::tracking_ambiguity},
    Field{"degenerate_denominator", &Tolerances::degenerate_denominator},
    Field{"balance", &Tolerances::balance},
    Field{"spectral_match", &Tolerances::spectral_match},
    Field{"anchor_gauge", &Tolerances::anchor_gauge},
    Field{"anchor_selective", &Tolerances::anchor_selective},
    Field{"calibration", &Tolerances::calibration},
    Field{"threshold_rel", &Tolerances::threshold_rel},
    Field{"junction_ratio", &Tolerances::junction_ratio},
    Field{"harmonic", &Tolerances::harmonic},
    Field{"frequency_rel", &Tolerances::frequency_rel},
    Field{"energy_drift", &Tolerances::energy_drift},
};

}  // namespace

void Tolerances::set(const std::string& key, double value) {
  for (const auto& [name, member] : kFields) {
    if (key == name) {
      if (!(value > 0.0)) {
        throw Error(ErrorCode::Config, "tolerance '" + key + "' must be positive");
      }
      this->*member = value;
      return;
    }
  }
  throw Error(ErrorCode::Config, "unknown tolerance key '" + key + "'");
}

double Tolerances::get(const std::string& key) const {
  for (const auto& [name, member] : kFields) {
    if (key == name) return this->*member;
  }
  throw Error(ErrorCode::Config, "unknown tolerance key '" + key + "'");
}

std::map<std::string, double> Tolerances::as_map() const {
  std::map<std::string, double> out;
  for (const auto& [name, member] : kFields) out[name] = this->*member;
  return out;
}

}  // namespace nhreal

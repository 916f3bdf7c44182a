#pragma once

// JSON encoding of inputs and reports, and the small table type written as
// CSV or JSON by the scenario runner.

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "nhreal/eig.hpp"
#include "nhreal/laser.hpp"
#include "nhreal/model.hpp"
#include "nhreal/skin.hpp"
#include "nhreal/spectra.hpp"
#include "nhreal/types.hpp"

namespace nhreal::io {

using nlohmann::json;

/// Throws Error(Config) naming `where` if `obj` has a key outside `allowed`.
void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                    const std::string& where);

/// Schema:
///   {"n": int, "t": real,
///    "onsite": {"type": "zero"} | {"type": "harmonic", "omega2": real},
///    "scaling": {"type": "identity"} | {"type": "geometric", "s": real}
///             | {"type": "random", "seed": u64} | {"type": "explicit", "values": [real]},
///    "zeroed_sites": [int], "allow_indefinite": bool}
/// Every key except "n" is optional.
model::LatticeSpec lattice_from_json(const json& j, const std::string& where = "lattice");
json to_json(const model::LatticeSpec& spec);

/// {"kappa0": real, "pumped_sites": [int], "gamma": real}; gamma optional.
laser::PumpSpec pump_from_json(const json& j, const std::string& where = "pump");
json to_json(const laser::PumpSpec& pump);

json complex_json(const cd& z);  // [re, im]
json complex_list(const std::vector<cd>& zs);
json vector_json(const ComplexVector& v);
json matrix_json(const ComplexMatrix& m);  // row-major [[ [re, im], ... ], ...]
ComplexMatrix matrix_from_json(const json& j, const std::string& where);

json to_json(const eig::EigenSystem& es);
json to_json(const spectra::SpectralCertificate& cert);
json to_json(const spectra::EPReport& ep);
json to_json(const spectra::BMapReport& rep);
json to_json(const skin::ModeReport& r);
json to_json(const laser::ThresholdResult& r);
json to_json(const laser::PowerFlowReport& r);

using Cell = std::variant<long long, double, std::string>;

/// Column-named rows. Complex quantities take two columns (x_re, x_im) and
/// sites are 1-based.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  std::string to_csv() const;
  json to_json() const;  // array of objects
};

/// Shortest round-trip decimal form, '.' separator, locale independent.
std::string format_double(double x);

}  // namespace nhreal::io

#include "nhreal/serialize.hpp"

#include <charconv>
#include <cmath>
#include <set>

namespace nhreal::io {

namespace {

[[noreturn]] void config_error(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::Config, where + ": " + msg);
}

double get_real(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) config_error(where + "." + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) config_error(where + "." + key, "must be finite");
  return x;
}

long long get_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) config_error(where, "expected an integer");
  return v.get<long long>();
}

std::vector<int> get_sites(const json& j, const std::string& where) {
  if (!j.is_array()) config_error(where, "expected an array of 1-based site indices");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(static_cast<int>(get_int(j[i], where + "[" + std::to_string(i) + "]")));
  }
  return out;
}

std::string get_type(const json& j, const std::string& where) {
  if (!j.is_object()) config_error(where, "expected an object");
  if (!j.contains("type") || !j["type"].is_string()) config_error(where + ".type", "missing string");
  return j["type"].get<std::string>();
}

}  // namespace

void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) config_error(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!ok.count(item.key())) config_error(where, "unknown key \"" + item.key() + "\"");
  }
}

model::LatticeSpec lattice_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"n", "t", "onsite", "scaling", "zeroed_sites", "allow_indefinite"}, where);
  model::LatticeSpec spec;
  if (!j.contains("n")) config_error(where + ".n", "required");
  spec.n = static_cast<int>(get_int(j["n"], where + ".n"));
  if (j.contains("t")) spec.t = get_real(j, "t", where);

  if (j.contains("onsite")) {
    const std::string w = where + ".onsite";
    const std::string type = get_type(j["onsite"], w);
    if (type == "zero") {
      reject_unknown(j["onsite"], {"type"}, w);
      spec.onsite = model::ZeroOnsite{};
    } else if (type == "harmonic") {
      reject_unknown(j["onsite"], {"type", "omega2"}, w);
      if (!j["onsite"].contains("omega2")) config_error(w + ".omega2", "required");
      spec.onsite = model::HarmonicOnsite{get_real(j["onsite"], "omega2", w)};
    } else {
      config_error(w + ".type", "expected \"zero\" or \"harmonic\", got \"" + type + "\"");
    }
  }

  if (j.contains("scaling")) {
    const std::string w = where + ".scaling";
    const json& s = j["scaling"];
    const std::string type = get_type(s, w);
    if (type == "identity") {
      reject_unknown(s, {"type"}, w);
      spec.scaling = model::IdentityScaling{};
    } else if (type == "geometric") {
      reject_unknown(s, {"type", "s"}, w);
      if (!s.contains("s")) config_error(w + ".s", "required");
      spec.scaling = model::GeometricScaling{get_real(s, "s", w)};
    } else if (type == "random") {
      reject_unknown(s, {"type", "seed"}, w);
      if (!s.contains("seed") || !s["seed"].is_number_unsigned()) {
        config_error(w + ".seed", "required nonnegative integer");
      }
      spec.scaling = model::RandomScaling{s["seed"].get<std::uint64_t>()};
    } else if (type == "explicit") {
      reject_unknown(s, {"type", "values"}, w);
      if (!s.contains("values") || !s["values"].is_array()) config_error(w + ".values", "required array");
      model::ExplicitScaling e;
      for (std::size_t i = 0; i < s["values"].size(); ++i) {
        const json& v = s["values"][i];
        if (!v.is_number()) config_error(w + ".values[" + std::to_string(i) + "]", "expected a number");
        e.values.push_back(v.get<double>());
      }
      spec.scaling = e;
    } else {
      config_error(w + ".type", "expected identity, geometric, random or explicit, got \"" + type + "\"");
    }
  }

  if (j.contains("zeroed_sites")) spec.zeroed_sites = get_sites(j["zeroed_sites"], where + ".zeroed_sites");
  if (j.contains("allow_indefinite")) {
    if (!j["allow_indefinite"].is_boolean()) config_error(where + ".allow_indefinite", "expected a boolean");
    spec.allow_indefinite = j["allow_indefinite"].get<bool>();
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    config_error(where, e.what());
  }
  return spec;
}

json to_json(const model::LatticeSpec& spec) {
  json j;
  j["n"] = spec.n;
  j["t"] = spec.t;
  if (const auto* h = std::get_if<model::HarmonicOnsite>(&spec.onsite)) {
    j["onsite"] = {{"type", "harmonic"}, {"omega2", h->omega2}};
  } else {
    j["onsite"] = {{"type", "zero"}};
  }
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, model::IdentityScaling>) {
          j["scaling"] = {{"type", "identity"}};
        } else if constexpr (std::is_same_v<T, model::GeometricScaling>) {
          j["scaling"] = {{"type", "geometric"}, {"s", s.s}};
        } else if constexpr (std::is_same_v<T, model::RandomScaling>) {
          j["scaling"] = {{"type", "random"}, {"seed", s.seed}};
        } else {
          j["scaling"] = {{"type", "explicit"}, {"values", s.values}};
        }
      },
      spec.scaling);
  j["zeroed_sites"] = spec.zeroed_sites;
  j["allow_indefinite"] = spec.allow_indefinite;
  return j;
}

laser::PumpSpec pump_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"kappa0", "pumped_sites", "gamma"}, where);
  laser::PumpSpec p;
  if (!j.contains("kappa0")) config_error(where + ".kappa0", "required");
  p.kappa0 = get_real(j, "kappa0", where);
  if (!(p.kappa0 > 0.0)) config_error(where + ".kappa0", "must be positive");
  p.pumped_sites = j.contains("pumped_sites") ? get_sites(j["pumped_sites"], where + ".pumped_sites")
                                              : std::vector<int>{1};
  if (p.pumped_sites.empty()) config_error(where + ".pumped_sites", "must not be empty");
  if (j.contains("gamma")) p.gamma = get_real(j, "gamma", where);
  if (p.gamma < 0.0) config_error(where + ".gamma", "must be nonnegative");
  return p;
}

json to_json(const laser::PumpSpec& pump) {
  return {{"kappa0", pump.kappa0}, {"pumped_sites", pump.pumped_sites}, {"gamma", pump.gamma}};
}

json complex_json(const cd& z) { return json::array({z.real(), z.imag()}); }

json complex_list(const std::vector<cd>& zs) {
  json out = json::array();
  for (const cd& z : zs) out.push_back(complex_json(z));
  return out;
}

json vector_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

json matrix_json(const ComplexMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) config_error(where, "expected a nonempty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  const auto m = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix out(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
      config_error(where, "ragged row " + std::to_string(r));
    }
    for (Eigen::Index c = 0; c < m; ++c) {
      const json& z = row[static_cast<std::size_t>(c)];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        config_error(where, "entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                ") must be [re, im]");
      }
      out(r, c) = cd(z[0].get<double>(), z[1].get<double>());
    }
  }
  return out;
}

json to_json(const eig::EigenSystem& es) {
  json status = json::array();
  for (auto s : es.status) status.push_back(eig::to_string(s));
  return {{"dim", es.dim},
          {"eigenvalues", complex_list(es.eigenvalues)},
          {"status", status},
          {"residuals", es.residuals},
          {"matrix_norm", es.matrix_norm},
          {"max_residual", es.max_residual()},
          {"biorthogonality_error", es.biorthogonality_error()}};
}

json to_json(const spectra::SpectralCertificate& cert) {
  json pairs = json::array();
  for (const auto& [u, v] : cert.conjugate_pairs) pairs.push_back({u, v});
  json j = {{"eigenvalues", complex_list(cert.eigenvalues)},
            {"matrix_norm", cert.matrix_norm},
            {"max_imag", cert.max_imag},
            {"is_real", cert.is_real},
            {"conjugate_pairs", pairs},
            {"unmatched", cert.unmatched},
            {"conjugation_closed", cert.conjugation_closed()},
            {"inner_products", complex_list(cert.inner_products)}};
  j["pseudo_hermitian_residual"] =
      cert.pseudo_hermitian_residual ? json(*cert.pseudo_hermitian_residual) : json(nullptr);
  return j;
}

json to_json(const spectra::EPReport& ep) {
  json chains = json::array();
  for (const auto& c : ep.chains) {
    json vs = json::array();
    for (const auto& v : c.vectors) vs.push_back(vector_json(v));
    chains.push_back({{"vectors", vs}, {"residual", c.residual}});
  }
  return {{"target", complex_json(ep.target)},
          {"algebraic_multiplicity", ep.algebraic_multiplicity},
          {"geometric_multiplicity", ep.geometric_multiplicity},
          {"block_sizes", ep.block_sizes},
          {"kernel_dims", ep.kernel_dims},
          {"ep_order", ep.ep_order()},
          {"is_ep", ep.is_ep()},
          {"chains", chains},
          {"chain_residual", ep.chain_residual},
          {"boundary_warning", ep.boundary_warning},
          {"consistent", ep.consistent}};
}

json to_json(const spectra::BMapReport& rep) {
  return {{"spectrum_distance", rep.spectrum_distance},
          {"spectra_agree", rep.spectra_agree},
          {"invertible", rep.invertible},
          {"mapped_modes", rep.mapped_modes},
          {"kernel_modes", rep.kernel_modes},
          {"unmapped_nonzero", rep.unmapped_nonzero},
          {"max_mapping_residual", rep.max_mapping_residual}};
}

json to_json(const skin::ModeReport& r) {
  return {{"mode", r.mode_index},
          {"eigenvalue", complex_json(r.eigenvalue)},
          {"ipr", r.ipr},
          {"com", r.com},
          {"decay_rate", r.decay_rate},
          {"envelope_ipr", r.envelope_ipr},
          {"support_parity", skin::to_string(r.support_parity)},
          {"classification", skin::to_string(r.classification)}};
}

json to_json(const laser::ThresholdResult& r) {
  json traj = json::array();
  for (const auto& [g, w] : r.trajectory) traj.push_back({g, w.real(), w.imag()});
  return {{"threshold", r.threshold},
          {"threshold_over_kappa0", r.threshold_over_kappa0},
          {"crossing_mode_index", r.crossing_mode_index},
          {"crossing_eigenvalue", complex_json(r.crossing_eigenvalue)},
          {"threshold_mode", vector_json(r.threshold_mode)},
          {"bracket", {r.bracket_lo, r.bracket_hi}},
          {"trajectory", traj}};
}

json to_json(const laser::PowerFlowReport& r) {
  return {{"junction_gains", r.junction_gains},
          {"flow_forward", r.flow_forward},
          {"flow_backward", r.flow_backward},
          {"site_terms", r.site_terms},
          {"balance_residual", r.balance_residual},
          {"max_term", r.max_term}};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorCode::InvalidArgument, "table row has " + std::to_string(row.size()) +
                                                " cells, expected " + std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      if (const auto* i = std::get_if<long long>(&row[c])) out += std::to_string(*i);
      else if (const auto* d = std::get_if<double>(&row[c])) out += format_double(*d);
      else out += std::get<std::string>(row[c]);
    }
    out += "\n";
  }
  return out;
}

json Table::to_json() const {
  json out = json::array();
  for (const auto& row : rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit([&](const auto& v) { obj[columns[c]] = v; }, row[c]);
    }
    out.push_back(obj);
  }
  return out;
}

}  // namespace nhreal::io

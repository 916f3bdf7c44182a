#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "nhreal/linalg.hpp"
#include "nhreal/mech.hpp"
#include "nhreal/model.hpp"
#include "nhreal/runner.hpp"
#include "nhreal/spectra.hpp"

namespace nhreal::scenario {

namespace {

// Gaussian draws by Box-Muller on top of SplitMix64, so instances are the
// same on every platform.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return rng_.next_unit(); }
  std::uint64_t below(std::uint64_t n) { return rng_.next() % n; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  ComplexMatrix gaussian(Eigen::Index rows, Eigen::Index cols) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cd(normal(), normal());
    return m;
  }

  ComplexMatrix hermitian(Eigen::Index n) {
    const ComplexMatrix g = gaussian(n, n);
    return (g + g.adjoint()) / 2.0;
  }

 private:
  model::SplitMix64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t suite_salt(const std::string& suite) {
  // FNV-1a; stable across platforms unlike std::hash.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : suite) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t instance_seed(const std::string& suite, std::uint64_t seed, std::size_t trial) {
  model::SplitMix64 mix(seed ^ suite_salt(suite));
  std::uint64_t s = mix.next();
  for (std::size_t i = 0; i <= trial % 4; ++i) s ^= mix.next();
  return s + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1);
}

ComplexMatrix symmetrize(const ComplexMatrix& m) { return (m + m.adjoint()) / 2.0; }

json psd_instance(Sampler& r, std::size_t trial) {
  const auto n = static_cast<Eigen::Index>(2 + r.below(49));
  ComplexMatrix h0, a;
  std::string family;
  switch (trial % 4) {
    case 0: {
      family = "dense_full_rank";
      h0 = r.hermitian(n);
      const ComplexMatrix b = r.gaussian(n, n);
      a = symmetrize(b.adjoint() * b);
      break;
    }
    case 1: {
      family = "dense_rank_deficient";
      h0 = r.hermitian(n);
      const auto rank = static_cast<Eigen::Index>(1 + r.below(static_cast<std::uint64_t>(n - 1)));
      const ComplexMatrix b = r.gaussian(rank, n);
      a = symmetrize(b.adjoint() * b);
      break;
    }
    case 2: {
      family = "dense_diagonal";
      h0 = r.hermitian(n);
      a = ComplexMatrix::Zero(n, n);
      for (Eigen::Index j = 0; j < n; ++j) a(j, j) = 2.0 * (1.0 - r.uniform());
      break;
    }
    default: {
      family = "chain_diagonal";
      h0 = ComplexMatrix::Zero(n, n);
      for (Eigen::Index j = 0; j < n; ++j) h0(j, j) = r.normal();
      for (Eigen::Index j = 0; j + 1 < n; ++j) {
        const double t = 0.5 + r.uniform();
        h0(j, j + 1) = h0(j + 1, j) = t;
      }
      a = ComplexMatrix::Zero(n, n);
      for (Eigen::Index j = 0; j < n; ++j) a(j, j) = 2.0 * (1.0 - r.uniform());
      break;
    }
  }
  return {{"family", family}, {"h0", io::matrix_json(h0)}, {"a", io::matrix_json(a)}};
}

json indefinite_instance(Sampler& r) {
  const auto n = static_cast<Eigen::Index>(2 + r.below(29));
  const ComplexMatrix h0 = r.hermitian(n);
  const ComplexMatrix b = r.gaussian(n, n);
  RealVector d(n);
  for (Eigen::Index j = 0; j < n; ++j) d(j) = r.uniform() < 0.5 ? -1.0 : 1.0;
  d(static_cast<Eigen::Index>(r.below(static_cast<std::uint64_t>(n)))) = -1.0;
  const ComplexMatrix a = symmetrize(b.adjoint() * d.cast<cd>().asDiagonal() * b);
  return {{"family", "dense_indefinite"}, {"h0", io::matrix_json(h0)}, {"a", io::matrix_json(a)}};
}

json mass_instance(Sampler& r) {
  const std::size_t n = 1 + r.below(40);
  std::vector<double> masses(n);
  for (double& m : masses) m = std::pow(10.0, 2.0 * r.uniform() - 1.0);  // [0.1, 10)
  return {{"masses", masses}, {"k", 0.5 + r.uniform()}};
}

}  // namespace

const std::vector<std::string>& property_suites() {
  static const std::vector<std::string> s = {"psd_reality", "indefinite_closure", "mass_reality"};
  return s;
}

json generate_instance(const std::string& suite, std::uint64_t seed, std::size_t trial) {
  Sampler r(instance_seed(suite, seed, trial));
  json inst;
  if (suite == "psd_reality") inst = psd_instance(r, trial);
  else if (suite == "indefinite_closure") inst = indefinite_instance(r);
  else if (suite == "mass_reality") inst = mass_instance(r);
  else throw Error(ErrorCode::InvalidArgument, "unknown property suite \"" + suite + "\"");
  inst["suite"] = suite;
  inst["seed"] = seed;
  inst["trial"] = trial;
  return inst;
}

json evaluate_instance(const json& inst, const Tolerances& tol) {
  if (!inst.contains("suite") || !inst["suite"].is_string()) {
    throw Error(ErrorCode::Config, "instance: missing suite");
  }
  const std::string suite = inst["suite"].get<std::string>();
  json checks = json::object();
  bool ok = true;

  if (suite == "psd_reality" || suite == "indefinite_closure") {
    const ComplexMatrix h0 = io::matrix_from_json(inst.at("h0"), "instance.h0");
    const ComplexMatrix a = io::matrix_from_json(inst.at("a"), "instance.a");
    const ComplexMatrix h = h0 * a;
    const auto cert = spectra::certify(h, h0, tol);
    const double rel_imag = cert.max_imag / std::max(cert.matrix_norm, 1e-300);
    checks["n"] = h.rows();
    checks["max_imag_over_norm"] = rel_imag;
    checks["conjugation_closed"] = cert.conjugation_closed();
    checks["pseudo_hermitian_residual"] =
        cert.pseudo_hermitian_residual ? json(*cert.pseudo_hermitian_residual) : json(nullptr);
    if (cert.pseudo_hermitian_residual) ok &= *cert.pseudo_hermitian_residual <= tol.pseudo_hermitian;
    if (suite == "psd_reality") {
      checks["a_is_psd"] = linalg::is_psd(a, tol.psd);
      ok &= rel_imag <= tol.reality && checks["a_is_psd"].get<bool>();
    } else {
      ok &= cert.conjugation_closed();
    }
  } else if (suite == "mass_reality") {
    mech::OscillatorChain chain{inst.at("masses").get<std::vector<double>>(), inst.at("k").get<double>()};
    const ComplexMatrix m = mech::dynamical_matrix(chain);
    const double scale = linalg::spectral_norm(m);
    double max_im = 0.0, max_re = -std::numeric_limits<double>::infinity();
    const auto lambda = linalg::eigenvalues(m);
    for (const cd& z : lambda) {
      max_im = std::max(max_im, std::abs(z.imag()));
      max_re = std::max(max_re, z.real());
    }
    // B map with B = diag(m^-1/2): a Hermitian matrix with the same spectrum.
    const auto n = static_cast<Eigen::Index>(chain.n());
    ComplexMatrix m0 = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m0(i, i) = -2.0 * chain.spring_k;
      if (i + 1 < n) m0(i, i + 1) = m0(i + 1, i) = chain.spring_k;
    }
    RealVector b(n);
    for (Eigen::Index i = 0; i < n; ++i) b(i) = 1.0 / std::sqrt(chain.masses[static_cast<std::size_t>(i)]);
    const ComplexMatrix he = b.cast<cd>().asDiagonal() * m0 * b.cast<cd>().asDiagonal();
    const RealVector eh = linalg::hermitian_eigenvalues(he);
    std::vector<cd> ehc(eh.data(), eh.data() + eh.size());
    const double bmap = linalg::sorted_spectrum_distance(lambda, ehc) / scale;
    checks["n"] = n;
    checks["max_imag_over_norm"] = max_im / scale;
    checks["max_real_over_norm"] = max_re / scale;
    checks["bmap_distance_over_norm"] = bmap;
    ok &= max_im <= tol.reality * scale && max_re <= tol.reality * scale && bmap <= tol.spectral_match;
  } else {
    throw Error(ErrorCode::Config, "instance: unknown suite \"" + suite + "\"");
  }
  return {{"suite", suite}, {"passed", ok}, {"checks", checks}};
}

namespace detail {

void run_properties(Context& ctx) {
  const auto& cfg = ctx.config;
  if (cfg.replay) {
    std::ifstream in(*cfg.replay);
    if (!in) throw Error(ErrorCode::Io, "cannot read replay instance " + *cfg.replay);
    json inst;
    try {
      in >> inst;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Config, "replay: " + std::string(e.what()));
    }
    const json res = evaluate_instance(inst, ctx.tol);
    ctx.check("replay_" + inst["suite"].get<std::string>() + "_passed", res["passed"].get<bool>());
    ctx.write_json("replay_result", res);
    ctx.result.summary = res;
    return;
  }

  const std::size_t trials = cfg.trials > 0 ? static_cast<std::size_t>(cfg.trials) : 200;
  io::Table table{{"suite", "trial", "n", "passed", "metric", "pseudo_hermitian_residual"}, {}};
  json counts = json::object();
  for (const auto& suite : property_suites()) {
    std::size_t passed = 0;
    double worst = 0.0, worst_ph = 0.0;
    for (std::size_t k = 0; k < trials; ++k) {
      const json inst = generate_instance(suite, cfg.seed, k);
      const json res = evaluate_instance(inst, ctx.tol);
      const bool ok = res["passed"].get<bool>();
      passed += ok;
      const json& c = res["checks"];
      const double metric = c["max_imag_over_norm"].get<double>();
      const double ph = c.contains("pseudo_hermitian_residual") && c["pseudo_hermitian_residual"].is_number()
                            ? c["pseudo_hermitian_residual"].get<double>()
                            : std::nan("");
      if (suite != "indefinite_closure") worst = std::max(worst, metric);
      if (!std::isnan(ph)) worst_ph = std::max(worst_ph, ph);
      table.add({suite, static_cast<long long>(k), c["n"].get<long long>(),
                 static_cast<long long>(ok), metric, ph});
      if (!ok) {
        ctx.write_json("failures/" + suite + "_" + std::to_string(k), inst);
      }
    }
    counts[suite] = {{"trials", trials}, {"passed", passed}, {"worst_metric", worst},
                     {"worst_pseudo_hermitian", worst_ph}};
    ctx.close(suite + "_passes", static_cast<double>(passed), static_cast<double>(trials), 0.0);
  }
  ctx.table("property_trials", table);
  ctx.result.summary = counts;
}

// ---------------------------------------------------------------------------

namespace {

struct ModeRun {
  double omega_eig;
  double omega_fft;
  double shape_residual;
};

/// Integrates ~100 periods of the slowest requested frequency with
/// dt = 0.002 / w_max and returns the sampled trajectory.
mech::Trajectory long_run(const mech::OscillatorChain& c, const RealVector& x0, const RealVector& v0,
                          double w_min, double w_max) {
  const double dt = 0.002 / w_max;
  const double span = 100.0 * 2.0 * std::numbers::pi / w_min;
  const auto steps = static_cast<std::size_t>(std::ceil(span / dt));
  const std::size_t stride = std::max<std::size_t>(1, steps / 32768);
  return mech::integrate(c, x0, v0, dt, steps, stride);
}

std::vector<double> site_signal(const mech::Trajectory& tr, Eigen::Index site) {
  std::vector<double> s;
  s.reserve(tr.positions.size());
  for (const auto& x : tr.positions) s.push_back(x(site));
  return s;
}

}  // namespace

void run_oscillators(Context& ctx) {
  const auto& cfg = ctx.config;
  const std::size_t trials = cfg.trials > 0 ? static_cast<std::size_t>(cfg.trials) : 100;
  io::Table spectra_table{{"trial", "n", "mode", "lambda_re", "lambda_im", "omega"}, {}};

  std::size_t passed = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    const json inst = generate_instance("mass_reality", cfg.seed, k);
    const json res = evaluate_instance(inst, ctx.tol);
    passed += res["passed"].get<bool>();
    worst = std::max(worst, res["checks"]["max_imag_over_norm"].get<double>());
    mech::OscillatorChain c{inst["masses"].get<std::vector<double>>(), inst["k"].get<double>()};
    const ComplexMatrix m = mech::dynamical_matrix(c);
    auto lambda = linalg::eigenvalues(m);
    std::sort(lambda.begin(), lambda.end(), [](const cd& a, const cd& b) { return a.real() > b.real(); });
    for (std::size_t u = 0; u < lambda.size(); ++u) {
      spectra_table.add({static_cast<long long>(k), static_cast<long long>(c.n()),
                         static_cast<long long>(u), lambda[u].real(), lambda[u].imag(),
                         std::sqrt(std::max(-lambda[u].real(), 0.0))});
    }
  }
  ctx.close("random_mass_spectra_real_nonpositive", static_cast<double>(passed),
            static_cast<double>(trials), 0.0);

  // Two masses: M = [[-2, 1], [1/2, -1]], eigenvalues (-3 -+ sqrt 3) / 2.
  {
    const mech::OscillatorChain two{{1.0, 2.0}, 1.0};
    auto lambda = linalg::eigenvalues(mech::dynamical_matrix(two));
    std::sort(lambda.begin(), lambda.end(), linalg::complex_less);
    ctx.close("two_mass_lambda_low", lambda[0].real(), (-3.0 - std::sqrt(3.0)) / 2.0, 1e-10);
    ctx.close("two_mass_lambda_high", lambda[1].real(), (-3.0 + std::sqrt(3.0)) / 2.0, 1e-10);
    ctx.le("two_mass_lambda_imag", std::max(std::abs(lambda[0].imag()), std::abs(lambda[1].imag())), 1e-10);
  }
  // Equal masses: -4 (k/m) sin^2(q pi / (2 (n + 1))).
  {
    const std::size_t n = 12;
    const double mass = 2.0, k = 1.5;
    const mech::OscillatorChain eq{std::vector<double>(n, mass), k};
    const auto w = mech::eigenfrequencies(mech::dynamical_matrix(eq), ctx.tol);
    double err = 0.0;
    for (std::size_t q = 1; q <= n; ++q) {
      const double exact = 2.0 * std::sqrt(k / mass) *
                           std::sin(static_cast<double>(q) * std::numbers::pi / (2.0 * (n + 1.0)));
      err = std::max(err, std::abs(w[q - 1] - exact));
    }
    ctx.le("equal_mass_closed_form", err, 1e-10);
  }

  // Time-domain oracle: single-mode runs on a few chains.
  io::Table runs{{"chain", "mode", "omega_eig", "omega_fft", "rel_error", "shape_residual"}, {}};
  std::vector<mech::OscillatorChain> chains = {{{1.0, 2.0}, 1.0}};
  {
    const json inst = generate_instance("mass_reality", cfg.seed ^ 0xA5A5ULL, 0);
    std::vector<double> masses = inst["masses"].get<std::vector<double>>();
    masses.resize(4, 1.0);
    chains.push_back({masses, inst["k"].get<double>()});
  }
  double worst_rel = 0.0, worst_shape = 0.0;
  for (std::size_t ci = 0; ci < chains.size(); ++ci) {
    const auto& c = chains[ci];
    const ComplexMatrix m = dynamical_matrix(c);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m.real());
    const auto w = mech::eigenfrequencies(m, ctx.tol);
    for (Eigen::Index u = 0; u < solver.eigenvalues().size(); ++u) {
      const double lambda = solver.eigenvalues()(u).real();
      const double omega = std::sqrt(-lambda);
      const RealVector mode = solver.eigenvectors().col(u).real().normalized();
      const auto tr = long_run(c, mode, RealVector::Zero(mode.size()), omega, w.back());
      Eigen::Index site = 0;
      mode.cwiseAbs().maxCoeff(&site);
      const double f = mech::dominant_frequency(site_signal(tr, site), tr.dt * tr.stride);
      double shape = 0.0;
      for (const auto& x : tr.positions) {
        const double proj = x.dot(mode);
        shape = std::max(shape, (x - proj * mode).norm());
      }
      const double relerr = std::abs(f - omega) / omega;
      worst_rel = std::max(worst_rel, relerr);
      worst_shape = std::max(worst_shape, shape);
      runs.add({static_cast<long long>(ci), static_cast<long long>(u), omega, f, relerr, shape});
    }
  }
  ctx.le("single_mode_frequency_rel_error", worst_rel, ctx.tol.frequency_rel);
  ctx.le("single_mode_shape_preserved", worst_shape, ctx.tol.collinearity);

  // Mixed start on three masses: every eigenfrequency shows up in x_1.
  {
    const mech::OscillatorChain c{{1.0, 1.7, 0.6}, 1.0};
    const ComplexMatrix m = dynamical_matrix(c);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m.real());
    RealVector x0 = RealVector::Zero(3);
    for (Eigen::Index u = 0; u < 3; ++u) {
      const RealVector v = solver.eigenvectors().col(u).real();
      x0 += v / v(0);
    }
    const auto w = mech::eigenfrequencies(m, ctx.tol);
    const auto tr = long_run(c, x0, RealVector::Zero(3), w.front(), w.back());
    const auto peaks = mech::spectral_peaks(site_signal(tr, 0), tr.dt * tr.stride);
    double worst_mix = 0.0;
    for (double omega : w) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : peaks) best = std::min(best, std::abs(p.frequency - omega) / omega);
      worst_mix = std::max(worst_mix, best);
    }
    ctx.le("mixed_start_all_frequencies_recovered", worst_mix, ctx.tol.frequency_rel);
    ctx.result.summary["mixed_start_peaks"] = peaks.size();
  }

  // Energy conservation from a random start.
  {
    Sampler r(cfg.seed ^ 0x5EEDULL);
    std::vector<double> masses(10);
    for (double& m : masses) m = std::pow(10.0, 2.0 * r.uniform() - 1.0);
    const mech::OscillatorChain c{masses, 1.0};
    RealVector x0(10), v0(10);
    for (Eigen::Index i = 0; i < 10; ++i) {
      x0(i) = r.normal();
      v0(i) = r.normal();
    }
    const auto w = mech::eigenfrequencies(dynamical_matrix(c), ctx.tol);
    const auto tr = long_run(c, x0, v0, w.front(), w.back());
    const double e0 = mech::mechanical_energy(c, x0, v0);
    double drift = 0.0;
    for (std::size_t i = 0; i < tr.positions.size(); ++i) {
      drift = std::max(drift, std::abs(mech::mechanical_energy(c, tr.positions[i], tr.velocities[i]) - e0) / e0);
    }
    ctx.le("energy_drift", drift, ctx.tol.energy_drift);
    ctx.result.summary["energy_drift"] = drift;
  }

  ctx.table("spectra", spectra_table);
  ctx.table("integration", runs);
  ctx.result.summary["random_trials"] = trials;
  ctx.result.summary["worst_imag_over_norm"] = worst;
  ctx.result.summary["worst_frequency_rel_error"] = worst_rel;
}

}  // namespace detail

}  // namespace nhreal::scenario

#include "nhreal/laser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "nhreal/linalg.hpp"

namespace nhreal::laser {

void PumpSpec::validate(std::size_t n) const {
  if (!(kappa0 > 0.0) || !std::isfinite(kappa0)) {
    throw Error(ErrorCode::InvalidArgument, "pump.kappa0 must be positive");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidArgument, "pump.gamma must be nonnegative");
  }
  if (pumped_sites.empty()) {
    throw Error(ErrorCode::InvalidArgument, "pump.pumped_sites must not be empty");
  }
  for (int s : pumped_sites) {
    if (s < 1 || static_cast<std::size_t>(s) > n) {
      throw Error(ErrorCode::InvalidArgument,
                  "pump.pumped_sites: site " + std::to_string(s) + " outside [1, " +
                      std::to_string(n) + "]");
    }
  }
}

ComplexMatrix pumped_hamiltonian(const ComplexMatrix& h, const PumpSpec& pump) {
  if (h.rows() != h.cols()) throw Error(ErrorCode::DimensionMismatch, "H must be square");
  pump.validate(static_cast<std::size_t>(h.rows()));
  ComplexMatrix out = h;
  for (Eigen::Index j = 0; j < h.rows(); ++j) out(j, j) -= cd(0.0, pump.kappa0);
  std::vector<bool> seen(static_cast<std::size_t>(h.rows()), false);
  for (int s : pump.pumped_sites) {
    const auto j = static_cast<std::size_t>(s - 1);
    if (seen[j]) continue;  // a repeated site is pumped once
    seen[j] = true;
    out(s - 1, s - 1) += cd(0.0, pump.gamma);
  }
  return out;
}

namespace {

struct Snapshot {
  std::vector<cd> values;
  std::vector<ComplexVector> vectors;  // unit norm
};

Snapshot solve(const ComplexMatrix& h_a) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(h_a, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "pumped eigensolve did not converge");
  }
  std::vector<cd> raw(solver.eigenvalues().data(),
                      solver.eigenvalues().data() + solver.eigenvalues().size());
  const auto order = linalg::sorted_order(raw);
  Snapshot s;
  for (std::size_t k : order) {
    s.values.push_back(raw[k]);
    s.vectors.push_back(solver.eigenvectors().col(static_cast<Eigen::Index>(k)).normalized());
  }
  return s;
}

double max_imag(const ComplexMatrix& h, PumpSpec pump, double gamma) {
  pump.gamma = gamma;
  const auto values = linalg::eigenvalues(pumped_hamiltonian(h, pump));
  double m = -std::numeric_limits<double>::infinity();
  for (const cd& w : values) m = std::max(m, w.imag());
  return m;
}

}  // namespace

Trajectory track_mode(const ComplexMatrix& h, const PumpSpec& pump,
                      const std::vector<double>& gamma_grid, const Tolerances& tol) {
  if (gamma_grid.empty()) throw Error(ErrorCode::InvalidArgument, "track_mode: empty grid");
  for (std::size_t i = 1; i < gamma_grid.size(); ++i) {
    if (!(gamma_grid[i] > gamma_grid[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "track_mode: grid must be strictly ascending");
    }
  }
  const auto n = static_cast<std::size_t>(h.rows());
  PumpSpec p = pump;
  p.gamma = gamma_grid.front();
  Snapshot prev = solve(pumped_hamiltonian(h, p));

  Trajectory tr;
  tr.gammas = gamma_grid;
  tr.values.assign(n, {});
  for (std::size_t m = 0; m < n; ++m) tr.values[m].push_back(prev.values[m]);

  for (std::size_t step = 1; step < gamma_grid.size(); ++step) {
    p.gamma = gamma_grid[step];
    Snapshot next = solve(pumped_hamiltonian(h, p));
    Snapshot ordered;
    ordered.values.resize(n);
    ordered.vectors.resize(n);
    std::vector<bool> taken(n, false);
    for (std::size_t m = 0; m < n; ++m) {
      std::size_t best = 0;
      double o1 = -1.0, o2 = -1.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double o = std::abs(prev.vectors[m].dot(next.vectors[k]));
        if (o > o1) {
          o2 = o1;
          o1 = o;
          best = k;
        } else if (o > o2) {
          o2 = o;
        }
      }
      if (n > 1 && o2 >= (1.0 - tol.tracking_ambiguity) * o1) {
        throw Error(ErrorCode::AmbiguousTracking,
                    "track_mode: ambiguous overlap at gamma = " +
                        std::to_string(gamma_grid[step]) + "; refine the grid");
      }
      if (taken[best]) {
        throw Error(ErrorCode::AmbiguousTracking,
                    "track_mode: two modes map to one at gamma = " +
                        std::to_string(gamma_grid[step]) + "; refine the grid");
      }
      taken[best] = true;
      ordered.values[m] = next.values[best];
      ordered.vectors[m] = next.vectors[best];
      tr.values[m].push_back(next.values[best]);
    }
    prev = std::move(ordered);
  }
  tr.final_vectors = prev.vectors;

  const double scale = std::max(linalg::spectral_norm(h), 1.0);
  for (std::size_t m = 0; m < n; ++m) {
    const bool pinned = std::all_of(tr.values[m].begin(), tr.values[m].end(), [&](const cd& w) {
      return std::abs(w.real()) <= tol.pairing * scale;
    });
    if (pinned) {
      tr.zero_mode = m;
      break;
    }
  }
  return tr;
}

ComplexVector normalize_first(const ComplexVector& v) {
  if (v.size() == 0) return v;
  Eigen::Index k = 0;
  const double peak = v.cwiseAbs().maxCoeff();
  if (std::abs(v(0)) <= 1e-12 * peak) v.cwiseAbs().maxCoeff(&k);
  if (std::abs(v(k)) == 0.0) throw Error(ErrorCode::InvalidArgument, "normalize_first: zero vector");
  return v / v(k);
}

ThresholdResult find_threshold(const ComplexMatrix& h, const PumpSpec& pump,
                               const Tolerances& tol) {
  if (h.rows() != h.cols()) throw Error(ErrorCode::DimensionMismatch, "H must be square");
  pump.validate(static_cast<std::size_t>(h.rows()));
  const double k0 = pump.kappa0;
  const double ceiling = tol.gamma_max * k0;

  // Geometric expansion until max Im w becomes nonnegative.
  double lo = 0.0, hi = std::min(k0, ceiling);
  while (max_imag(h, pump, hi) < 0.0) {
    if (hi >= ceiling) {
      throw Error(ErrorCode::NoThreshold, "no lasing threshold below gamma_max = " +
                                              std::to_string(ceiling));
    }
    lo = hi;
    hi = std::min(2.0 * hi, ceiling);
  }

  // A mode may cross and recross inside one doubling; the first sign change
  // on a fine scan is the first crossing.
  constexpr int kScan = 64;
  const double start = lo, step = (hi - lo) / kScan;
  for (int i = 1; i <= kScan; ++i) {
    const double g = i == kScan ? hi : start + step * i;
    if (max_imag(h, pump, g) >= 0.0) {
      lo = start + step * (i - 1);
      hi = g;
      break;
    }
  }

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (max_imag(h, pump, mid) < 0.0 ? lo : hi) = mid;
  }

  ThresholdResult r;
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  r.threshold = 0.5 * (lo + hi);
  r.threshold_over_kappa0 = r.threshold / k0;

  PumpSpec at = pump;
  at.gamma = r.threshold;
  const Snapshot snap = solve(pumped_hamiltonian(h, at));
  std::size_t crossing = 0;
  for (std::size_t m = 1; m < snap.values.size(); ++m) {
    if (snap.values[m].imag() > snap.values[crossing].imag()) crossing = m;
  }
  r.crossing_eigenvalue = snap.values[crossing];
  if (std::abs(r.crossing_eigenvalue.imag()) > tol.threshold_imag * k0) {
    throw Error(ErrorCode::NoConvergence,
                "threshold bisection left |Im w| = " +
                    std::to_string(std::abs(r.crossing_eigenvalue.imag())));
  }
  r.threshold_mode = normalize_first(snap.vectors[crossing]);

  // Identify the crossing mode in the passive spectrum by continuation.
  for (int points : {200, 800, 3200}) {
    std::vector<double> grid(static_cast<std::size_t>(points) + 1);
    for (int i = 0; i <= points; ++i) grid[static_cast<std::size_t>(i)] = r.threshold * i / points;
    try {
      const Trajectory tr = track_mode(h, pump, grid, tol);
      std::size_t best = 0;
      for (std::size_t m = 1; m < tr.values.size(); ++m) {
        if (tr.values[m].back().imag() > tr.values[best].back().imag()) best = m;
      }
      r.crossing_mode_index = best;
      r.trajectory.clear();
      for (std::size_t i = 0; i < grid.size(); ++i) r.trajectory.emplace_back(grid[i], tr.values[best][i]);
      return r;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AmbiguousTracking || points == 3200) throw;
    }
  }
  return r;
}

PowerFlowReport power_flows(const ComplexVector& mode, const ComplexMatrix& h_a) {
  const Eigen::Index n = mode.size();
  if (h_a.rows() != n || h_a.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "power_flows: mode and H_a sizes differ");
  }
  const cd i(0.0, 1.0);
  PowerFlowReport r;
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double term = 2.0 * h_a(j, j).imag() * std::norm(mode(j));
    r.site_terms.push_back(term);
    total += term;
    r.max_term = std::max(r.max_term, std::abs(term));
  }
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    const cd cross = std::conj(mode(j + 1)) * mode(j);
    const double fwd = 2.0 * (i * std::conj(h_a(j, j + 1)) * cross).real();
    const double bwd = 2.0 * (-i * h_a(j + 1, j) * cross).real();
    r.flow_forward.push_back(fwd);
    r.flow_backward.push_back(bwd);
    r.junction_gains.push_back(fwd + bwd);
    total += fwd + bwd;
    r.max_term = std::max({r.max_term, std::abs(fwd), std::abs(bwd)});
  }
  r.balance_residual = std::abs(total);
  return r;
}

}  // namespace nhreal::laser

#include "nhreal/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "nhreal/laser.hpp"
#include "nhreal/linalg.hpp"

namespace nhreal::perturb {

namespace {

void check_sites(const eig::EigenSystem& es, const std::vector<int>& sites) {
  if (sites.empty()) throw Error(ErrorCode::InvalidArgument, "pumped_sites must not be empty");
  for (int s : sites) {
    if (s < 1 || static_cast<std::size_t>(s) > es.dim) {
      throw Error(ErrorCode::InvalidArgument, "pumped site " + std::to_string(s) + " out of range");
    }
  }
}

ComplexVector alternate(const ComplexVector& v) {
  ComplexVector out = v;
  for (Eigen::Index j = 1; j < out.size(); j += 2) out(j) = -out(j);
  return out;
}

double scale_of(const eig::EigenSystem& es) { return es.matrix_norm > 0.0 ? es.matrix_norm : 1.0; }

}  // namespace

ComplexMatrix matrix_elements(const eig::EigenSystem& es, const std::vector<int>& pumped_sites) {
  check_sites(es, pumped_sites);
  for (std::size_t u = 0; u < es.dim; ++u) {
    if (es.status[u] != eig::NormStatus::Biorthonormal) {
      throw Error(ErrorCode::Degenerate, "mode " + std::to_string(u) + " is " +
                                             eig::to_string(es.status[u]) +
                                             "; perturbation theory needs a biorthonormal basis");
    }
  }
  std::vector<int> sites = pumped_sites;
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  ComplexMatrix rows(static_cast<Eigen::Index>(sites.size()), es.left.cols());
  ComplexMatrix cols(static_cast<Eigen::Index>(sites.size()), es.right.cols());
  for (std::size_t k = 0; k < sites.size(); ++k) {
    rows.row(static_cast<Eigen::Index>(k)) = es.left.row(sites[k] - 1);
    cols.row(static_cast<Eigen::Index>(k)) = es.right.row(sites[k] - 1);
  }
  return rows.transpose() * cols;
}

NhphReport nhph_pairs(const eig::EigenSystem& es, const Tolerances& tol) {
  NhphReport rep;
  const double scale = scale_of(es);
  std::vector<bool> done(es.dim, false);
  for (std::size_t v = 0; v < es.dim; ++v) {
    if (done[v]) continue;
    const cd target = -std::conj(es.eigenvalues[v]);
    std::size_t best = v;
    double gap = std::abs(es.eigenvalues[v] - target);
    for (std::size_t w = 0; w < es.dim; ++w) {
      if (done[w]) continue;
      const double d = std::abs(es.eigenvalues[w] - target);
      if (d < gap) {
        gap = d;
        best = w;
      }
    }
    const ComplexVector mirrored =
        alternate(es.right.col(static_cast<Eigen::Index>(v)).conjugate());
    const double vres =
        linalg::collinearity_residual(es.right.col(static_cast<Eigen::Index>(best)), mirrored);
    const double eres = gap / scale;
    if (eres > tol.pairing || vres > tol.collinearity) {
      rep.unmatched.push_back(v);
      done[v] = true;
      continue;
    }
    done[v] = done[best] = true;
    if (best == v) {
      rep.self_paired.push_back(v);
    } else {
      rep.pairs.push_back({std::min(v, best), std::max(v, best), eres, vres});
    }
  }
  std::sort(rep.unmatched.begin(), rep.unmatched.end());
  return rep;
}

PerturbationPrediction first_order(const eig::EigenSystem& es, const std::vector<int>& pumped_sites,
                                   double gamma1, std::size_t mode, const Tolerances& tol) {
  if (mode >= es.dim) throw Error(ErrorCode::InvalidArgument, "first_order: mode out of range");
  const ComplexMatrix hg = matrix_elements(es, pumped_sites);
  const cd i(0.0, 1.0);
  const double scale = scale_of(es);
  const auto mu = static_cast<Eigen::Index>(mode);

  PerturbationPrediction p;
  p.base_mode_index = mode;
  p.gamma1 = gamma1;
  p.energy_correction = i * gamma1 * hg(mu, mu);
  p.state_correction = ComplexVector::Zero(static_cast<Eigen::Index>(es.dim));
  for (std::size_t v = 0; v < es.dim; ++v) {
    if (v == mode) continue;
    const cd denom = es.eigenvalues[mode] - es.eigenvalues[v];
    if (std::abs(denom) < tol.degenerate_denominator * scale) {
      throw Error(ErrorCode::Degenerate, "first_order: |w_u - w_v| below " +
                                             std::to_string(tol.degenerate_denominator) +
                                             " ||H|| for modes " + std::to_string(mode) + ", " +
                                             std::to_string(v));
    }
    const auto nu = static_cast<Eigen::Index>(v);
    p.state_correction += (i * gamma1 * hg(nu, mu) / denom) * es.right.col(nu);
  }
  const NhphReport pairs = nhph_pairs(es, tol);
  for (const auto& pr : pairs.pairs) p.nhph_pairs.emplace_back(pr.mode, pr.partner);
  return p;
}

PerturbationPrediction paired_zero_mode_correction(const eig::EigenSystem& es,
                                                   const std::vector<int>& pumped_sites,
                                                   double gamma1, const Tolerances& tol) {
  const NhphReport pairs = nhph_pairs(es, tol);
  if (!pairs.all_matched() || pairs.self_paired.size() != 1) {
    throw Error(ErrorCode::InvalidArgument,
                "paired correction needs one self-paired zero mode and complete pairing");
  }
  const std::size_t zero = pairs.self_paired.front();
  const ComplexMatrix hg = matrix_elements(es, pumped_sites);
  const cd i(0.0, 1.0);
  const double scale = scale_of(es);
  const auto z = static_cast<Eigen::Index>(zero);

  PerturbationPrediction p;
  p.base_mode_index = zero;
  p.gamma1 = gamma1;
  p.energy_correction = i * gamma1 * hg(z, z);
  p.state_correction = ComplexVector::Zero(static_cast<Eigen::Index>(es.dim));
  for (const auto& pr : pairs.pairs) {
    const std::size_t v = es.eigenvalues[pr.mode].real() > 0.0 ? pr.mode : pr.partner;
    const double re = es.eigenvalues[v].real();
    if (std::abs(re) < tol.degenerate_denominator * scale) {
      throw Error(ErrorCode::Degenerate, "paired correction: pair too close to zero");
    }
    const auto nu = static_cast<Eigen::Index>(v);
    const cd coeff = -2.0 * i * gamma1 * hg(nu, z) / re;
    for (Eigen::Index j = 1; j < p.state_correction.size(); j += 2) {
      p.state_correction(j) += coeff * es.right(j, nu);
    }
    p.nhph_pairs.emplace_back(pr.mode, pr.partner);
  }
  return p;
}

ComplexVector corrected_mode(const eig::EigenSystem& es, const PerturbationPrediction& p) {
  return laser::normalize_first(es.right.col(static_cast<Eigen::Index>(p.base_mode_index)) +
                                p.state_correction);
}

}  // namespace nhreal::perturb

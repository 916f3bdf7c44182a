#include "nhreal/spectra.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "nhreal/linalg.hpp"
#include "nhreal/model.hpp"

namespace nhreal::spectra {

namespace {

cd bilinear(const ComplexVector& a, const ComplexVector& b) {
  return (a.transpose() * b)(0, 0);
}

double scale_of(double norm) { return norm > 0.0 ? norm : 1.0; }

}  // namespace

SpectralCertificate certify(const ComplexMatrix& h, const ComplexMatrix& h0,
                            const Tolerances& tol) {
  if (h.rows() != h.cols() || h0.rows() != h.rows() || h0.cols() != h.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "certify: H and H0 differ in size");
  }
  const eig::EigenSystem es = eig::eig_full(h, tol);
  SpectralCertificate cert;
  cert.eigenvalues = es.eigenvalues;
  cert.matrix_norm = es.matrix_norm;
  const double scale = scale_of(es.matrix_norm);

  for (const cd& w : cert.eigenvalues) cert.max_imag = std::max(cert.max_imag, std::abs(w.imag()));
  cert.is_real = cert.max_imag <= tol.reality * scale;

  const double h0_norm = linalg::spectral_norm(h0);
  if (h0_norm > 0.0 && linalg::min_singular_value(h0) > tol.singular_metric * h0_norm) {
    const ComplexMatrix conj = h0.partialPivLu().solve(h * h0);
    cert.pseudo_hermitian_residual = linalg::spectral_norm(conj - h.adjoint()) / scale;
  }

  // Greedy conjugate pairing on (Re, |Im|) order.
  const std::size_t n = cert.eigenvalues.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const cd& x = cert.eigenvalues[a];
    const cd& y = cert.eigenvalues[b];
    if (x.real() != y.real()) return x.real() < y.real();
    return std::abs(x.imag()) < std::abs(y.imag());
  });
  std::vector<bool> used(n, false);
  const double real_cut = tol.reality * scale;
  const double pair_cut = tol.pairing * scale;
  for (std::size_t idx : order) {
    if (used[idx]) continue;
    const cd w = cert.eigenvalues[idx];
    if (std::abs(w.imag()) <= real_cut) {
      used[idx] = true;
      cert.conjugate_pairs.emplace_back(idx, idx);
      continue;
    }
    std::size_t best = n;
    double best_d = pair_cut;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || j == idx) continue;
      const double d = std::abs(cert.eigenvalues[j] - std::conj(w));
      if (d <= best_d) {
        best_d = d;
        best = j;
      }
    }
    used[idx] = true;
    if (best == n) {
      cert.unmatched.push_back(idx);
    } else {
      used[best] = true;
      cert.conjugate_pairs.emplace_back(std::min(idx, best), std::max(idx, best));
    }
  }

  for (std::size_t u = 0; u < n; ++u) {
    const ComplexVector r = es.right.col(static_cast<Eigen::Index>(u));
    const ComplexVector l = es.left.col(static_cast<Eigen::Index>(u));
    cert.inner_products.push_back(bilinear(l, r) / (l.norm() * r.norm()));
  }
  return cert;
}

std::vector<InnerProductEntry> inner_product_audit(const eig::EigenSystem& es,
                                                   const ComplexMatrix& b,
                                                   const Tolerances& tol) {
  if (static_cast<std::size_t>(b.rows()) != es.dim || b.rows() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "inner_product_audit: B has the wrong size");
  }
  const ComplexMatrix a = b.adjoint() * b;
  const double a_scale = scale_of(linalg::spectral_norm(a));
  const double b_scale = scale_of(linalg::spectral_norm(b));
  std::vector<InnerProductEntry> out;
  for (std::size_t u = 0; u < es.dim; ++u) {
    InnerProductEntry entry;
    entry.mode = u;
    ComplexVector psi = es.right.col(static_cast<Eigen::Index>(u));
    psi /= psi.norm();
    const ComplexVector l = es.left.col(static_cast<Eigen::Index>(u));
    const ComplexVector target = (a * psi).conjugate();
    const cd c = linalg::best_scalar(target, l);
    entry.collinearity = linalg::collinearity_residual(target, l);
    entry.value = c * bilinear(l, psi);
    entry.b_norm2 = (b * psi).squaredNorm();
    entry.ep_candidate = std::sqrt(entry.b_norm2) < tol.self_orthogonal * b_scale;
    entry.agrees = std::abs(entry.value - entry.b_norm2) <= tol.collinearity * a_scale;
    out.push_back(entry);
  }
  return out;
}

int EPReport::ep_order() const {
  return block_sizes.empty() ? 0 : *std::max_element(block_sizes.begin(), block_sizes.end());
}

EPReport ep_analyze(const ComplexMatrix& h, cd target, const Tolerances& tol) {
  if (h.rows() != h.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "ep_analyze: matrix is not square");
  }
  const Eigen::Index n = h.rows();
  EPReport report;
  report.target = target;
  const double scale = scale_of(linalg::spectral_norm(h));
  const ComplexMatrix shifted = h - target * ComplexMatrix::Identity(n, n);

  const double radius = tol.cluster * scale;
  for (const cd& w : linalg::eigenvalues(h)) {
    const double d = std::abs(w - target);
    if (d <= radius) ++report.algebraic_multiplicity;
    if (d >= 0.5 * radius && d <= 2.0 * radius) report.boundary_warning = true;
  }

  const double cut = tol.nullity * scale;
  std::vector<ComplexMatrix> kernels;
  kernels.push_back(linalg::null_space(shifted, cut));
  report.geometric_multiplicity = static_cast<int>(kernels.back().cols());
  report.kernel_dims.push_back(report.geometric_multiplicity);
  while (kernels.back().cols() > 0 && static_cast<Eigen::Index>(kernels.size()) < n) {
    const ComplexMatrix& q = kernels.back();
    ComplexMatrix stacked(n, n + q.cols());
    stacked << shifted, -q;
    const ComplexMatrix z = linalg::null_space(stacked, cut);
    const ComplexMatrix next = linalg::orthonormal_span(z.topRows(n), tol.nullity);
    if (next.cols() <= q.cols()) break;
    kernels.push_back(next);
    report.kernel_dims.push_back(static_cast<int>(next.cols()));
  }

  // at_least[k-1] = number of blocks of size >= k
  const std::size_t levels = report.kernel_dims.size();
  std::vector<int> at_least(levels + 1, 0);
  for (std::size_t k = 0; k < levels; ++k) {
    at_least[k] = report.kernel_dims[k] - (k == 0 ? 0 : report.kernel_dims[k - 1]);
  }

  struct Seed {
    int length;
    ComplexVector top;
  };
  std::vector<Seed> seeds;
  auto power_apply = [&](ComplexVector v, int times) {
    for (int i = 0; i < times; ++i) v = shifted * v;
    return v;
  };
  for (std::size_t level = levels; level >= 1; --level) {
    const int need = at_least[level - 1] - at_least[level];
    if (need <= 0) continue;
    const ComplexMatrix& qk = kernels[level - 1];
    std::vector<ComplexVector> wcols;
    if (level > 1) {
      const ComplexMatrix& below = kernels[level - 2];
      for (Eigen::Index c = 0; c < below.cols(); ++c) wcols.push_back(below.col(c));
    }
    for (const auto& s : seeds) {
      wcols.push_back(power_apply(s.top, s.length - static_cast<int>(level)));
    }
    ComplexMatrix residual = qk;
    if (!wcols.empty()) {
      ComplexMatrix w(n, static_cast<Eigen::Index>(wcols.size()));
      for (std::size_t c = 0; c < wcols.size(); ++c) w.col(static_cast<Eigen::Index>(c)) = wcols[c];
      const ComplexMatrix wo = linalg::orthonormal_span(w, tol.nullity);
      residual = qk - wo * (wo.adjoint() * qk);
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(residual, Eigen::ComputeThinU);
    for (int c = 0; c < need && c < svd.matrixU().cols(); ++c) {
      seeds.push_back({static_cast<int>(level), svd.matrixU().col(c)});
    }
  }

  const ComplexMatrix& generalized = kernels.back();
  const ComplexMatrix projected = shifted * generalized;
  const auto solver = projected.completeOrthogonalDecomposition();
  auto chain_residual = [&](const std::vector<ComplexVector>& v) {
    double worst = v[0].norm() > 0.0 ? (shifted * v[0]).norm() / v[0].norm() : 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      worst = std::max(worst, (shifted * v[i] - v[i - 1]).norm() / v[i - 1].norm());
    }
    return worst;
  };

  for (const auto& s : seeds) {
    std::vector<ComplexVector> down(static_cast<std::size_t>(s.length));
    down[static_cast<std::size_t>(s.length - 1)] = s.top;
    for (int i = s.length - 2; i >= 0; --i) {
      down[static_cast<std::size_t>(i)] = shifted * down[static_cast<std::size_t>(i + 1)];
    }
    const double norm1 = down[0].norm();
    for (auto& v : down) v /= norm1;

    std::vector<ComplexVector> up{down[0]};
    for (int i = 1; i < s.length; ++i) {
      up.push_back(generalized * solver.solve(up.back()));
    }
    JordanChain chain;
    const double r_up = chain_residual(up);
    const double r_down = chain_residual(down);
    chain.vectors = r_up <= r_down ? up : down;
    chain.residual = std::min(r_up, r_down);
    report.chain_residual = std::max(report.chain_residual, chain.residual);
    report.block_sizes.push_back(s.length);
    report.chains.push_back(std::move(chain));
  }
  int total = 0;
  for (int b : report.block_sizes) total += b;
  report.consistent = total == report.algebraic_multiplicity &&
                      static_cast<int>(report.block_sizes.size()) == report.geometric_multiplicity;
  return report;
}

BMapReport bmap_correspondence(const ComplexMatrix& h0, const ComplexMatrix& b,
                               const Tolerances& tol) {
  if (h0.rows() != b.rows() || h0.cols() != b.cols() || h0.rows() != h0.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "bmap_correspondence: size mismatch");
  }
  BMapReport report;
  const ComplexMatrix h = h0 * (b.adjoint() * b);
  const ComplexMatrix he = model::hermitian_equivalent(h0, b);
  const double scale = scale_of(linalg::spectral_norm(h));

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> herm(he);
  if (herm.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "bmap_correspondence: Hermitian eigensolve failed");
  }
  std::vector<cd> he_values;
  for (Eigen::Index i = 0; i < herm.eigenvalues().size(); ++i) he_values.emplace_back(herm.eigenvalues()(i));
  report.spectrum_distance = linalg::sorted_spectrum_distance(linalg::eigenvalues(h), he_values) / scale;
  report.spectra_agree = report.spectrum_distance <= tol.spectral_match;

  const double b_norm = scale_of(linalg::spectral_norm(b));
  report.invertible = linalg::min_singular_value(b) > 1e-12 * b_norm;
  if (report.invertible) {
    const auto lu = b.partialPivLu();
    for (Eigen::Index mu = 0; mu < he.rows(); ++mu) {
      const ComplexVector psi = lu.solve(herm.eigenvectors().col(mu));
      const double lambda = herm.eigenvalues()(mu);
      const double res = (h * psi - lambda * psi).norm() / (psi.norm() * scale);
      report.max_mapping_residual = std::max(report.max_mapping_residual, res);
      ++report.mapped_modes;
    }
    return report;
  }

  const eig::EigenSystem es = eig::eig_full(h, tol);
  for (std::size_t u = 0; u < es.dim; ++u) {
    ComplexVector psi = es.right.col(static_cast<Eigen::Index>(u));
    psi /= psi.norm();
    const ComplexVector phi = b * psi;
    const cd w = es.eigenvalues[u];
    if (phi.norm() <= tol.self_orthogonal * b_norm) {
      ++report.kernel_modes;
      if (std::abs(w) > tol.cluster * scale) ++report.unmapped_nonzero;
      continue;
    }
    const double res = (he * phi - w * phi).norm() / (phi.norm() * scale);
    report.max_mapping_residual = std::max(report.max_mapping_residual, res);
    ++report.mapped_modes;
  }
  return report;
}

}  // namespace nhreal::spectra

#include "nhreal/skin.hpp"

#include <algorithm>
#include <cmath>

#include "nhreal/linalg.hpp"

namespace nhreal::skin {

std::string to_string(SupportParity p) {
  switch (p) {
    case SupportParity::OddSites:
      return "odd_sites";
    case SupportParity::EvenSites:
      return "even_sites";
    case SupportParity::Mixed:
      return "mixed";
  }
  return "mixed";
}

std::string to_string(Localization c) {
  switch (c) {
    case Localization::SkinLeft:
      return "skin_left";
    case Localization::SkinRight:
      return "skin_right";
    case Localization::Bulk:
      return "bulk";
  }
  return "bulk";
}

ModeReport profile(const ComplexVector& mode, const Tolerances& tol) {
  const Eigen::Index n = mode.size();
  const RealVector amp = mode.cwiseAbs();
  const double peak = n > 0 ? amp.maxCoeff() : 0.0;
  if (!(peak > 0.0)) throw Error(ErrorCode::InvalidArgument, "profile: zero vector");

  ModeReport r;
  r.sites = static_cast<std::size_t>(n);
  const RealVector w = amp.cwiseAbs2();
  const double total = w.sum();
  r.ipr = w.cwiseAbs2().sum() / (total * total);
  for (Eigen::Index j = 0; j < n; ++j) r.com += static_cast<double>(j + 1) * w(j);
  r.com /= total;

  bool odd_only = true, even_only = true;
  for (Eigen::Index j = 0; j < n; ++j) {
    const bool dark = amp(j) <= tol.support * peak;
    if ((j + 1) % 2 == 0 && !dark) odd_only = false;
    if ((j + 1) % 2 == 1 && !dark) even_only = false;
  }
  if (odd_only && !even_only) r.support_parity = SupportParity::OddSites;
  else if (even_only && !odd_only) r.support_parity = SupportParity::EvenSites;

  std::vector<double> xs, ys;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int site = static_cast<int>(j + 1);
    if (amp(j) <= 1e-12 * peak) continue;
    if (r.support_parity == SupportParity::OddSites && site % 2 == 0) continue;
    if (r.support_parity == SupportParity::EvenSites && site % 2 == 1) continue;
    xs.push_back(site);
    ys.push_back(std::log(amp(j)));
  }
  if (xs.size() >= 2) {
    const double m = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    r.decay_rate = sxy / sxx;
  }

  // Normalised so that a flat profile on the support gives 1.
  double s2 = 0, s4 = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = std::exp(ys[i] - r.decay_rate * (xs[i] - 1.0));
    s2 += d * d;
    s4 += d * d * d * d;
  }
  r.envelope_ipr = s2 > 0.0 ? static_cast<double>(xs.size()) * s4 / (s2 * s2) : 1.0;
  return r;
}

double reference_rate(double s) { return std::max(std::abs(std::log(s)) / 2.0, 1e-6); }

Localization classify(const ModeReport& report, double min_rate, const Tolerances& tol) {
  if (report.envelope_ipr > tol.envelope_ipr) return Localization::Bulk;
  const double center = (static_cast<double>(report.sites) + 1.0) / 2.0;
  if (report.decay_rate <= -min_rate && report.com < center) return Localization::SkinLeft;
  if (report.decay_rate >= min_rate && report.com > center) return Localization::SkinRight;
  return Localization::Bulk;
}

std::vector<ModeReport> mode_reports(const eig::EigenSystem& es, double s, const Tolerances& tol) {
  std::vector<ModeReport> out;
  const double rate = reference_rate(s);
  for (std::size_t u = 0; u < es.dim; ++u) {
    ModeReport r = profile(es.right.col(static_cast<Eigen::Index>(u)), tol);
    r.mode_index = u;
    r.eigenvalue = es.eigenvalues[u];
    r.classification = classify(r, rate, tol);
    out.push_back(r);
  }
  return out;
}

std::size_t zero_mode_index(const eig::EigenSystem& es, const Tolerances& tol) {
  if (es.dim == 0) throw Error(ErrorCode::NoZeroMode, "no zero mode: empty system");
  const double scale = es.matrix_norm > 0.0 ? es.matrix_norm : 1.0;
  std::size_t best = 0;
  for (std::size_t u = 1; u < es.dim; ++u) {
    if (std::abs(es.eigenvalues[u]) < std::abs(es.eigenvalues[best])) best = u;
  }
  if (std::abs(es.eigenvalues[best]) > tol.cluster * scale) {
    throw Error(ErrorCode::NoZeroMode, "no zero mode: smallest |w| = " +
                                           std::to_string(std::abs(es.eigenvalues[best])));
  }
  for (std::size_t u = 0; u < es.dim; ++u) {
    if (u != best && std::abs(es.eigenvalues[u]) <= tol.cluster * scale) {
      throw Error(ErrorCode::NoZeroMode, "no isolated zero mode: zero eigenvalue is degenerate");
    }
  }
  return best;
}

namespace {

ComplexVector gauge_profile(const ComplexVector& base, double s) {
  ComplexVector out = base;
  double factor = 1.0;
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    out(j) *= factor;
    factor /= s;
  }
  return out;
}

}  // namespace

SelectiveSkinReport verify_selective_skin(const eig::EigenSystem& h_system,
                                          const eig::EigenSystem& h0_system, double s,
                                          const Tolerances& tol) {
  if (h_system.dim != h0_system.dim) {
    throw Error(ErrorCode::DimensionMismatch, "verify_selective_skin: size mismatch");
  }
  if (h_system.dim % 2 == 0) {
    throw Error(ErrorCode::NoZeroMode, "verify_selective_skin: even n has no zero mode");
  }
  SelectiveSkinReport rep;
  rep.zero_index = zero_mode_index(h_system, tol);
  const std::size_t z0 = zero_mode_index(h0_system, tol);
  const ComplexVector psi0 = h_system.right.col(static_cast<Eigen::Index>(rep.zero_index));
  const ComplexVector base = h0_system.right.col(static_cast<Eigen::Index>(z0));
  rep.zero_profile_residual = linalg::collinearity_residual(psi0, gauge_profile(base, s));
  rep.left_extended_residual = linalg::collinearity_residual(
      h_system.left.col(static_cast<Eigen::Index>(rep.zero_index)), base);
  rep.reports = mode_reports(h_system, s, tol);
  rep.zero_mode = rep.reports[rep.zero_index];
  rep.all_nonzero_bulk = true;
  for (const auto& r : rep.reports) {
    if (r.mode_index != rep.zero_index && r.classification != Localization::Bulk) {
      rep.all_nonzero_bulk = false;
    }
  }
  rep.passed = rep.zero_profile_residual <= tol.collinearity &&
               rep.left_extended_residual <= tol.collinearity && rep.all_nonzero_bulk;
  return rep;
}

StandardSkinReport verify_standard_skin(const eig::EigenSystem& hpp_system,
                                        const eig::EigenSystem& h0_system, double s,
                                        const Tolerances& tol) {
  if (hpp_system.dim != h0_system.dim) {
    throw Error(ErrorCode::DimensionMismatch, "verify_standard_skin: size mismatch");
  }
  StandardSkinReport rep;
  const std::size_t n = hpp_system.dim;
  // Both spectra are sorted, and the gauge transform preserves them.
  for (std::size_t u = 0; u < n; ++u) {
    const auto col = static_cast<Eigen::Index>(u);
    rep.spectrum_distance = std::max(
        rep.spectrum_distance, std::abs(hpp_system.eigenvalues[u] - h0_system.eigenvalues[u]));
    rep.max_profile_residual =
        std::max(rep.max_profile_residual,
                 linalg::collinearity_residual(hpp_system.right.col(col),
                                               gauge_profile(h0_system.right.col(col), s)));
  }
  rep.reports = mode_reports(hpp_system, s, tol);
  const Localization expected = s > 1.0   ? Localization::SkinLeft
                                : s < 1.0 ? Localization::SkinRight
                                          : Localization::Bulk;
  rep.all_skin = std::all_of(rep.reports.begin(), rep.reports.end(),
                             [&](const ModeReport& r) { return r.classification == expected; });

  const std::size_t z = zero_mode_index(hpp_system, tol);
  const ModeReport left = profile(hpp_system.left.col(static_cast<Eigen::Index>(z)), tol);
  rep.left_zero_com = left.com;
  const double nn = static_cast<double>(n);
  rep.left_zero_on_far_edge = s > 1.0 ? left.com > 0.75 * nn : s < 1.0 ? left.com < 0.25 * nn + 1.0 : false;
  const double scale = h0_system.matrix_norm > 0.0 ? h0_system.matrix_norm : 1.0;
  rep.passed = rep.max_profile_residual <= tol.collinearity && rep.all_skin &&
               rep.spectrum_distance <= tol.spectral_match * scale &&
               (s == 1.0 || rep.left_zero_on_far_edge);
  return rep;
}

double zero_mode_equality(const eig::EigenSystem& h_system, const eig::EigenSystem& hpp_system,
                          const Tolerances& tol) {
  const std::size_t a = zero_mode_index(h_system, tol);
  const std::size_t b = zero_mode_index(hpp_system, tol);
  return linalg::collinearity_residual(h_system.right.col(static_cast<Eigen::Index>(a)),
                                       hpp_system.right.col(static_cast<Eigen::Index>(b)));
}

}  // namespace nhreal::skin

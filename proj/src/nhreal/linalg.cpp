#include "nhreal/linalg.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace nhreal::linalg {

double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double max_abs(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double min_singular_value(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = max_abs(m);
  return max_abs(m - m.adjoint()) <= rel_tol * scale;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "Hermitian eigensolve did not converge");
  }
  return solver.eigenvalues();
}

bool is_psd(const ComplexMatrix& m, double rel_tol) {
  if (!is_hermitian(m)) return false;
  if (m.size() == 0) return true;
  const RealVector ev = hermitian_eigenvalues(m);
  const double scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return ev(0) >= -rel_tol * scale;
}

bool is_diagonal(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != cd(0.0)) return false;
    }
  }
  return true;
}

ComplexMatrix null_space(const ComplexMatrix& m, double abs_tol) {
  const Eigen::Index cols = m.cols();
  if (m.rows() == 0) return ComplexMatrix::Identity(cols, cols);
  // Pad to square so that V is complete even when rows < cols.
  ComplexMatrix work = m;
  if (m.rows() < cols) {
    work = ComplexMatrix::Zero(cols, cols);
    work.topRows(m.rows()) = m;
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(work, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > abs_tol) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

ComplexMatrix orthonormal_span(const ComplexMatrix& columns, double abs_tol) {
  if (columns.cols() == 0) return ComplexMatrix(columns.rows(), 0);
  Eigen::JacobiSVD<ComplexMatrix> svd(columns, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > abs_tol) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

bool complex_less(const cd& a, const cd& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<std::size_t> sorted_order(const std::vector<cd>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return complex_less(values[a], values[b]);
  });
  return order;
}

cd best_scalar(const ComplexVector& a, const ComplexVector& b) {
  const double bb = b.squaredNorm();
  if (bb == 0.0) return cd(0.0);
  return b.dot(a) / bb;  // Eigen's dot conjugates the first argument
}

double collinearity_residual(const ComplexVector& a, const ComplexVector& b) {
  const double na = a.norm();
  if (na == 0.0) return 0.0;
  return (a - best_scalar(a, b) * b).norm() / na;
}

double sorted_spectrum_distance(std::vector<cd> a, std::vector<cd> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "spectra have different sizes");
  }
  std::sort(a.begin(), a.end(), complex_less);
  std::sort(b.begin(), b.end(), complex_less);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

std::vector<cd> eigenvalues(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "eigenvalue iteration did not converge");
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace nhreal::linalg

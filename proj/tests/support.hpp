#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "nhreal/model.hpp"
#include "nhreal/types.hpp"

namespace nhreal::testing {

// Uniform chain H0 with coupling t.
inline ComplexMatrix chain(int n, double t = 1.0) {
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int j = 0; j + 1 < n; ++j) h(j, j + 1) = h(j + 1, j) = t;
  return h;
}

inline ComplexMatrix diag(const std::vector<double>& a) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(a.size()),
                                        static_cast<Eigen::Index>(a.size()));
  for (std::size_t j = 0; j < a.size(); ++j) m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = a[j];
  return m;
}

inline std::vector<double> geometric(int n, double s) {
  std::vector<double> a(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(j)] = std::pow(s, j);
  return a;
}

// Eigenvalues from Eigen's generic complex solver, sorted by (Re, Im).
inline std::vector<cd> reference_eigenvalues(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
  std::vector<cd> out(solver.eigenvalues().data(),
                      solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(out.begin(), out.end(), [](const cd& a, const cd& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

// Deterministic Hermitian and PSD samples for property tests.
inline ComplexMatrix random_hermitian(model::SplitMix64& rng, int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = cd(2.0 * rng.next_unit() - 1.0, 2.0 * rng.next_unit() - 1.0);
  }
  return 0.5 * (m + m.adjoint());
}

inline ComplexMatrix random_psd(model::SplitMix64& rng, int n, int rank) {
  ComplexMatrix b(rank, n);
  for (int i = 0; i < rank; ++i) {
    for (int j = 0; j < n; ++j) b(i, j) = cd(2.0 * rng.next_unit() - 1.0, 2.0 * rng.next_unit() - 1.0);
  }
  ComplexMatrix a = b.adjoint() * b;
  return 0.5 * (a + a.adjoint());
}

template <class F>
ErrorCode error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

}  // namespace nhreal::testing

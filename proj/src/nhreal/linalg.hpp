#pragma once

#include <vector>

#include "nhreal/types.hpp"

namespace nhreal::linalg {

/// Largest singular value. Returns 0 for an empty or zero matrix.
double spectral_norm(const ComplexMatrix& m);

/// Largest entry modulus.
double max_abs(const ComplexMatrix& m);

/// Smallest singular value.
double min_singular_value(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-12);

/// Hermitian eigensolve; eigenvalues ascending.
RealVector hermitian_eigenvalues(const ComplexMatrix& m);

/// PSD check against -rel_tol * ||m||. Requires Hermitian input.
bool is_psd(const ComplexMatrix& m, double rel_tol = 1e-10);

bool is_diagonal(const ComplexMatrix& m);

/// Orthonormal basis (columns) of the null space, using singular values
/// <= abs_tol.
ComplexMatrix null_space(const ComplexMatrix& m, double abs_tol);

/// Orthonormal basis of the column span, dropping directions with singular
/// value <= abs_tol.
ComplexMatrix orthonormal_span(const ComplexMatrix& columns, double abs_tol);

/// Orders complex numbers by (Re, Im) ascending.
bool complex_less(const cd& a, const cd& b);

/// Indices that sort values by (Re, Im).
std::vector<std::size_t> sorted_order(const std::vector<cd>& values);

/// ||a - c b|| / ||a|| minimised over complex c. 0 if a is zero.
double collinearity_residual(const ComplexVector& a, const ComplexVector& b);

/// Best complex c minimising ||a - c b||.
cd best_scalar(const ComplexVector& a, const ComplexVector& b);

/// Sort complex values by (Re, Im) and return the largest elementwise gap.
double sorted_spectrum_distance(std::vector<cd> a, std::vector<cd> b);

/// Plain eigenvalues of a general complex matrix (no vectors).
std::vector<cd> eigenvalues(const ComplexMatrix& m);

}  // namespace nhreal::linalg

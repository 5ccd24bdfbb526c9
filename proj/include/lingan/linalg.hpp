#pragma once

#include "lingan/rng.hpp"
#include "lingan/types.hpp"

namespace lingan::linalg {

struct SymmetricEigen {
    Vector eigenvalues;  // descending
    Matrix eigenvectors; // columns, orthonormal, aligned with eigenvalues
};

// Eigendecomposition of a symmetric matrix. The input may deviate from exact
// symmetry by at most 1e-9 relative asymmetry; it is symmetrized before the
// solve. Throws InvalidInput for non-square, non-finite or asymmetric input.
SymmetricEigen sym_eigen(const Matrix& a);

// Symmetric PSD square root. Eigenvalues in [-1e-10 * max|lambda|, 0) are
// clamped to zero; anything below that window throws NotPsd.
Matrix psd_sqrt(const Matrix& a);

// Moore-Penrose pseudoinverse via SVD. Singular values at or below
// max(rows, cols) * eps * sigma_max are treated as zero.
Matrix pinv(const Matrix& a);

// Sylvester-construction Hadamard matrix with entries +-1, H^T H = d I
// exactly. d must be a power of two; anything else throws
// UnsupportedDimension.
Matrix hadamard(Index d);

// d x m matrix with orthonormal columns, drawn uniformly via QR of a Gaussian
// matrix (signs fixed so the factorization is canonical). Requires 1 <= m <= d.
Matrix random_orthonormal_cols(Index d, Index m, Rng& rng);

} // namespace lingan::linalg

#include "lingan/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <string>

namespace lingan::linalg {

namespace {

void check_symmetric(const Matrix& a, const char* what) {
    detail::require(a.rows() == a.cols(), std::string(what) + ": matrix must be square");
    detail::require_finite(a, what);
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return;
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * scale)
        throw InvalidInput(std::string(what) + ": matrix is not symmetric (relative asymmetry " +
                           std::to_string(asym / scale) + ")");
}

} // namespace

SymmetricEigen sym_eigen(const Matrix& a) {
    check_symmetric(a, "sym_eigen");
    if (a.rows() == 0) return {Vector(0), Matrix(0, 0)};
    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("sym_eigen: eigensolver did not converge");
    // Eigen returns ascending order; flip to descending.
    SymmetricEigen out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

Matrix psd_sqrt(const Matrix& a) {
    SymmetricEigen eig = sym_eigen(a);
    if (a.rows() == 0) return Matrix(0, 0);
    const double max_abs = eig.eigenvalues.size() ? eig.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    const double window = 1e-10 * max_abs;
    Vector roots(eig.eigenvalues.size());
    for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
        double lam = eig.eigenvalues[i];
        if (lam < -window)
            throw NotPsd("psd_sqrt: eigenvalue " + std::to_string(lam) +
                         " below tolerance window " + std::to_string(-window));
        // Magnitudes inside the window are numerically zero; zeroing the
        // positive side too keeps sqrt from inflating pure roundoff (sqrt has
        // infinite slope at 0).
        roots[i] = lam <= window ? 0.0 : std::sqrt(lam);
    }
    Matrix s = eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.transpose();
    return 0.5 * (s + s.transpose());
}

Matrix pinv(const Matrix& a) {
    detail::require_finite(a, "pinv");
    if (a.rows() == 0 || a.cols() == 0) return Matrix(a.cols(), a.rows());
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double cutoff = static_cast<double>(std::max(a.rows(), a.cols())) *
                          std::numeric_limits<double>::epsilon() * sv[0];
    Vector inv(sv.size());
    for (Index i = 0; i < sv.size(); ++i) inv[i] = sv[i] > cutoff ? 1.0 / sv[i] : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix hadamard(Index d) {
    if (d < 1 || (d & (d - 1)) != 0)
        throw UnsupportedDimension("hadamard: size " + std::to_string(d) +
                                   " is not a power of two");
    Matrix h(1, 1);
    h(0, 0) = 1.0;
    while (h.rows() < d) {
        const Index s = h.rows();
        Matrix next(2 * s, 2 * s);
        next.topLeftCorner(s, s) = h;
        next.topRightCorner(s, s) = h;
        next.bottomLeftCorner(s, s) = h;
        next.bottomRightCorner(s, s) = -h;
        h = std::move(next);
    }
    return h;
}

Matrix random_orthonormal_cols(Index d, Index m, Rng& rng) {
    detail::require(m >= 1 && m <= d, "random_orthonormal_cols: need 1 <= m <= d");
    const Matrix g = rng.normal_matrix(d, m);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, m);
    // Fix the sign ambiguity of QR: make diag(R) positive so the result is a
    // canonical function of the Gaussian draw.
    const Matrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    for (Index j = 0; j < m; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

} // namespace lingan::linalg

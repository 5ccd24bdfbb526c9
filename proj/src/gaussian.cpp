#include "lingan/gaussian.hpp"

#include "lingan/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lingan::metrics {

namespace {

void check_same_dim(const Gaussian& a, const Gaussian& b, const char* what) {
    if (a.dim() != b.dim())
        throw InvalidInput(std::string(what) + ": dimension mismatch (" +
                           std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

// tr(M^1/2) for symmetric M with the psd_sqrt clamp policy.
double trace_sqrt_psd(const Matrix& m) {
    linalg::SymmetricEigen eig = linalg::sym_eigen(m);
    if (eig.eigenvalues.size() == 0) return 0.0;
    const double max_abs = eig.eigenvalues.cwiseAbs().maxCoeff();
    const double window = 1e-10 * max_abs;
    double total = 0.0;
    for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
        const double lam = eig.eigenvalues[i];
        if (lam < -window)
            throw NotPsd("w2: cross-covariance eigenvalue " + std::to_string(lam) +
                         " below tolerance");
        // Same zero window on both sides: sqrt of roundoff-sized eigenvalues
        // would otherwise bias the trace upward and push the squared distance
        // below its clamp window for rank-deficient covariances.
        if (lam > window) total += std::sqrt(lam);
    }
    return total;
}

double w2_squared_impl(const Gaussian& a, const Gaussian& b) {
    check_same_dim(a, b, "w2");
    if (a.dim() == 0) return 0.0;
    const double mean_term = (a.mean - b.mean).squaredNorm();
    const double tr_a = a.covariance.trace();
    const double tr_b = b.covariance.trace();
    const Matrix root_a = linalg::psd_sqrt(a.covariance);
    const Matrix cross = root_a * b.covariance * root_a;
    const double cross_term = trace_sqrt_psd(0.5 * (cross + cross.transpose()));
    double sq = mean_term + tr_a + tr_b - 2.0 * cross_term;
    if (sq < 0.0) {
        const double window = 1e-9 * (tr_a + tr_b + 1.0);
        if (sq < -window)
            throw NumericalFailure("w2: squared distance " + std::to_string(sq) +
                                   " below clamp window " + std::to_string(-window));
        sq = 0.0;
    }
    return sq;
}

} // namespace

Gaussian::Gaussian(Vector mu, Matrix cov) {
    detail::require(cov.rows() == cov.cols(), "Gaussian: covariance must be square");
    detail::require(mu.size() == cov.rows(), "Gaussian: mean/covariance size mismatch");
    detail::require_finite(mu, "Gaussian mean");
    detail::require_finite(cov, "Gaussian covariance");
    const double scale = cov.size() ? cov.cwiseAbs().maxCoeff() : 0.0;
    if (scale > 0.0) {
        const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-9 * scale)
            throw InvalidInput("Gaussian: covariance is not symmetric");
    }
    mean = std::move(mu);
    covariance = 0.5 * (cov + cov.transpose());
}

CoordinateSet::CoordinateSet(std::initializer_list<Index> indices)
    : CoordinateSet(std::vector<Index>(indices)) {}

CoordinateSet::CoordinateSet(std::vector<Index> indices) : indices_(std::move(indices)) {
    for (Index i : indices_)
        detail::require(i >= 0, "CoordinateSet: negative index");
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

bool CoordinateSet::contains(Index i) const {
    return std::binary_search(indices_.begin(), indices_.end(), i);
}

void CoordinateSet::check_bounds(Index dim, const char* what) const {
    if (!indices_.empty() && indices_.back() >= dim)
        throw InvalidInput(std::string(what) + ": coordinate " +
                           std::to_string(indices_.back()) + " out of range for dimension " +
                           std::to_string(dim));
}

double w2(const Gaussian& a, const Gaussian& b) { return std::sqrt(w2_squared_impl(a, b)); }

double w2_squared(const Gaussian& a, const Gaussian& b) { return w2_squared_impl(a, b); }

double gaussian_kl(const Gaussian& a, const Gaussian& b) {
    check_same_dim(a, b, "gaussian_kl");
    const Index d = a.dim();
    if (d == 0) return 0.0;

    auto strict_pd = [](const Matrix& cov, const char* which) {
        linalg::SymmetricEigen eig = linalg::sym_eigen(cov);
        const double max_lam = eig.eigenvalues[0];
        const double min_lam = eig.eigenvalues[eig.eigenvalues.size() - 1];
        if (max_lam <= 0.0 ||
            min_lam <= static_cast<double>(cov.rows()) *
                           std::numeric_limits<double>::epsilon() * max_lam)
            throw SingularCovariance(std::string("gaussian_kl: ") + which +
                                     " covariance is singular");
        return eig;
    };

    const linalg::SymmetricEigen ea = strict_pd(a.covariance, "first");
    const linalg::SymmetricEigen eb = strict_pd(b.covariance, "second");

    // Work in the eigenbasis of b's covariance: inv = Vb diag(1/lam) Vb^T.
    const Vector inv_lam_b = eb.eigenvalues.cwiseInverse();
    const Matrix vb_t_a_vb = eb.eigenvectors.transpose() * a.covariance * eb.eigenvectors;
    const double trace_term = (inv_lam_b.asDiagonal() * vb_t_a_vb).trace();
    const Vector diff = eb.eigenvectors.transpose() * (b.mean - a.mean);
    const double quad_term = diff.cwiseAbs2().dot(inv_lam_b);
    const double log_det = eb.eigenvalues.array().log().sum() -
                           ea.eigenvalues.array().log().sum();
    return 0.5 * (trace_term + quad_term - static_cast<double>(d) + log_det);
}

Gaussian marginalize(const Gaussian& g, const CoordinateSet& drop) {
    drop.check_bounds(g.dim(), "marginalize");
    std::vector<Index> keep;
    keep.reserve(static_cast<std::size_t>(g.dim()));
    for (Index i = 0; i < g.dim(); ++i)
        if (!drop.contains(i)) keep.push_back(i);
    const Index r = static_cast<Index>(keep.size());
    Gaussian out;
    out.mean.resize(r);
    out.covariance.resize(r, r);
    for (Index i = 0; i < r; ++i) {
        out.mean[i] = g.mean[keep[static_cast<std::size_t>(i)]];
        for (Index j = 0; j < r; ++j)
            out.covariance(i, j) = g.covariance(keep[static_cast<std::size_t>(i)],
                                                keep[static_cast<std::size_t>(j)]);
    }
    return out;
}

Gaussian zero_pad_coords(const Gaussian& g, const CoordinateSet& zeroed) {
    zeroed.check_bounds(g.dim(), "zero_pad_coords");
    Gaussian out = g;
    for (Index i : zeroed.indices()) {
        out.mean[i] = 0.0;
        out.covariance.row(i).setZero();
        out.covariance.col(i).setZero();
    }
    return out;
}

double pseudo_w2(const Gaussian& a, const Gaussian& b, const CoordinateSet& ignored) {
    check_same_dim(a, b, "pseudo_w2");
    ignored.check_bounds(a.dim(), "pseudo_w2");
    return w2(marginalize(a, ignored), marginalize(b, ignored));
}

Matrix subspace_pseudo_basis(const Matrix& v_basis, const Matrix& complement) {
    detail::require(v_basis.rows() == complement.rows(),
                    "subspace_pseudo_basis: row count mismatch");
    const Index d = v_basis.rows();
    detail::require(v_basis.cols() + complement.cols() == d,
                    "subspace_pseudo_basis: columns must total the ambient dimension");
    detail::require_finite(v_basis, "subspace_pseudo_basis");
    detail::require_finite(complement, "subspace_pseudo_basis");
    Matrix u(d, d);
    u.leftCols(v_basis.cols()) = v_basis;
    u.rightCols(complement.cols()) = complement;
    const double dev = (u.transpose() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (dev > 1e-10)
        throw InvalidInput("subspace_pseudo_basis: combined basis deviates from orthonormal by " +
                           std::to_string(dev));
    return u;
}

NormConcentration norm_concentration(Index m, Index samples, Rng& rng) {
    detail::require(m >= 1, "norm_concentration: m must be >= 1");
    detail::require(samples >= 2, "norm_concentration: need at least 2 samples");
    const double root_m = std::sqrt(static_cast<double>(m));
    std::vector<double> ratios(static_cast<std::size_t>(samples));
    for (Index s = 0; s < samples; ++s) {
        double sq = 0.0;
        for (Index i = 0; i < m; ++i) {
            const double z = rng.normal();
            sq += z * z;
        }
        ratios[static_cast<std::size_t>(s)] = std::sqrt(sq) / root_m;
    }
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(samples);
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    var /= static_cast<double>(samples);
    return {mean, std::sqrt(var)};
}

} // namespace lingan::metrics

#pragma once

#include "lingan/rng.hpp"
#include "lingan/types.hpp"

#include <vector>

namespace lingan::metrics {

// Multivariate Gaussian. The covariance must be symmetric (1e-9 relative
// asymmetry, symmetrized on construction); eigenvalues down to
// -1e-10 * max|lambda| are tolerated and treated as zero by the operations
// below.
struct Gaussian {
    Vector mean;
    Matrix covariance;

    Gaussian() = default;
    Gaussian(Vector mu, Matrix cov);

    Index dim() const { return mean.size(); }
};

// Sorted duplicate-free set of coordinate indices.
class CoordinateSet {
public:
    CoordinateSet() = default;
    CoordinateSet(std::initializer_list<Index> indices);
    explicit CoordinateSet(std::vector<Index> indices);

    const std::vector<Index>& indices() const { return indices_; }
    Index size() const { return static_cast<Index>(indices_.size()); }
    bool contains(Index i) const;

    // All indices must be < dim; throws InvalidInput otherwise.
    void check_bounds(Index dim, const char* what) const;

private:
    std::vector<Index> indices_;
};

// 2-Wasserstein distance between Gaussians:
//   W2^2 = |mu1 - mu2|^2 + tr S1 + tr S2 - 2 tr((S1^1/2 S2 S1^1/2)^1/2).
// A slightly negative squared distance (down to -1e-9 * (tr S1 + tr S2 + 1))
// is clamped to zero; anything below throws NumericalFailure.
double w2(const Gaussian& a, const Gaussian& b);

// Same quantity without the final square root, with the same clamp window.
double w2_squared(const Gaussian& a, const Gaussian& b);

// KL(a || b) in closed form. Both covariances must be strictly positive
// definite; throws SingularCovariance otherwise.
double gaussian_kl(const Gaussian& a, const Gaussian& b);

// Marginal over the coordinates NOT in `drop`.
Gaussian marginalize(const Gaussian& g, const CoordinateSet& drop);

// Copy with the mean entries and covariance rows/columns at `zeroed` set to 0.
Gaussian zero_pad_coords(const Gaussian& g, const CoordinateSet& zeroed);

// Pseudometric that ignores the listed coordinates: the W2 distance between
// the marginals over the remaining ones. Ignoring every coordinate gives 0.
double pseudo_w2(const Gaussian& a, const Gaussian& b, const CoordinateSet& ignored);

// Concatenates an orthonormal basis of a subspace with an orthonormal basis
// of its complement into one square orthonormal matrix; used to express
// "equal outside a subspace" comparisons in rotated coordinates. Throws
// InvalidInput if the combined matrix is not orthonormal within 1e-10.
Matrix subspace_pseudo_basis(const Matrix& v_basis, const Matrix& complement);

struct NormConcentration {
    double mean_ratio; // mean of |z| / sqrt(m)
    double std_ratio;  // population std of the same ratio
};

// Monte Carlo summary of how sharply the norm of a standard Gaussian in R^m
// concentrates around sqrt(m).
NormConcentration norm_concentration(Index m, Index samples, Rng& rng);

} // namespace lingan::metrics

#pragma once

#include "lingan/gaussian.hpp"
#include "lingan/rng.hpp"
#include "lingan/types.hpp"

#include <optional>

namespace lingan::datagen {

enum class GammaKind { hadamard, random_orthonormal };

// Spiked-covariance ground truth: x = Gamma z + eps with z ~ N(0, I_m),
// eps ~ N(0, sigma^2 I_d) and Gamma a d x m matrix with orthonormal columns.
struct DataModel {
    Matrix gamma; // d x m, orthonormal columns
    Index d = 0;
    Index m = 0;
    double sigma = 0.0;

    // N(0, Gamma Gamma^T): the distribution of the signal part.
    metrics::Gaussian clean_distribution() const;
    // N(0, Gamma Gamma^T + sigma^2 I): the distribution of observed samples.
    metrics::Gaussian noisy_distribution() const;
};

struct Dataset {
    Matrix x;                     // d x n observations
    std::optional<Matrix> z_true; // m x n latents that generated x
    Index n = 0;
};

// Split of a dataset for pseudo-supervised training. x_full caches
// [x_ps | x_unsup] so loss evaluations never re-concatenate.
struct Partition {
    Matrix x_ps;    // d x n_ps
    Matrix z_ps;    // k x n_ps latent codes paired with x_ps
    Matrix x_unsup; // d x n_unsup
    Matrix x_full;  // d x (n_ps + n_unsup)
    Index n_ps = 0;
    Index n_unsup = 0;

    Index n() const { return n_ps + n_unsup; }
    Index d() const { return x_full.rows(); }
    Index k() const { return z_ps.rows(); }
};

// hadamard: Gamma = first m columns of the d x d Hadamard matrix / sqrt(d)
// (requires d a power of two). random_orthonormal: seeded uniform draw.
DataModel build_model(Index d, Index m, double sigma, GammaKind kind, Rng& rng);

// Draws n samples column by column (z first, then noise, per sample), so a
// longer dataset from the same generator state extends a shorter one.
Dataset sample(const DataModel& model, Index n, Rng& rng);

// Pseudo-supervision: the first n_ps samples are paired with fresh latent
// codes z ~ N(0, I_k) that did NOT generate them. Codes are drawn column by
// column so the pairs for a smaller n_ps are a prefix of those for a larger
// one, and changing k changes only the codes, never the sample split.
Partition make_pseudo_partition(const Dataset& data, Index n_ps, Index k, Rng& rng);

// True supervision: the first n_sup samples are paired with the rows of their
// generating latents selected by `subsample` (k = |subsample| <= m).
// Requires the dataset to carry z_true.
Partition make_supervised_partition(const Dataset& data, Index n_sup,
                                    const metrics::CoordinateSet& subsample);

} // namespace lingan::datagen

#pragma once

#include "lingan/datagen.hpp"
#include "lingan/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lingan::losses {

// pca_proj        |(I - G G^T) X|^2 on the full dataset, unnormalized.
// supervised      (1/n_ps)|G Z - X_ps|^2 + (1/n_unsup)|(I - G G^T) X_unsup|^2
//                 (Z holds true latent codes; empty terms are dropped).
// ps_plain        same functional form with pseudo latent codes.
// ps_regularized  (1/n_ps)|G Z - X_ps|^2 + (1/n)|(I - G G^T) X_full|^2.
// ps_weighted     alpha (1/n_ps)|G Z - X_ps|^2
//                   + (1 - alpha)(1/n)|(I - G G^T) X_full|^2; with n_ps = 0
//                 the first term is absent but the (1 - alpha) factor stays.
// ps_pinv         (1/n_ps)|G Z - X_ps|^2 + (1/n)|(I - G G^+) X_full|^2.
enum class Variant { pca_proj, supervised, ps_plain, ps_regularized, ps_weighted, ps_pinv };

std::string variant_name(Variant v);

// Loss selector. `alpha` is meaningful only for ps_weighted (required there,
// rejected elsewhere).
struct LossSpec {
    Variant variant = Variant::ps_plain;
    std::optional<double> alpha;

    static LossSpec plain(Variant v) { return {v, std::nullopt}; }
    static LossSpec weighted(double alpha) { return {Variant::ps_weighted, alpha}; }
};

// Loss at generator G (d x k). Throws InvalidInput on dimension mismatch or
// an empty partition, DegenerateOperand for ps_pinv with an all-zero G.
double loss_value(const LossSpec& spec, const Matrix& g, const datagen::Partition& part);

// Analytic gradient dL/dG, same shape as G.
Matrix loss_gradient(const LossSpec& spec, const Matrix& g, const datagen::Partition& part);

// Central-difference gradient, the reference the analytic one is checked
// against: (L(G + h E_ij) - L(G - h E_ij)) / (2h) entry by entry.
Matrix finite_diff_gradient(const LossSpec& spec, const Matrix& g,
                            const datagen::Partition& part, double h = 1e-5);

struct GradientCheckReport {
    // Worst relative error per variant, metric
    //   max_ij |analytic - fd| / max(1, max_ij |fd|),
    // over random instances cycling the shape classes k < n, k = n,
    // n < k < d and k > d, with n_ps sweeping the full [0, n] range.
    std::vector<std::pair<Variant, double>> worst_by_variant;
    double worst = 0.0;
    double median = 0.0;
    // Near-rank-deficient ps_pinv probe; informational only (the cutoff makes
    // the loss genuinely non-smooth there), never gated.
    double pinv_stress = 0.0;
    bool pass = false; // worst < 1e-4
    std::vector<std::string> lines;
};

// Finite-difference validation suite over all variants.
GradientCheckReport check_gradients(std::uint64_t seed, int cases_per_variant, double h = 1e-5);

} // namespace lingan::losses

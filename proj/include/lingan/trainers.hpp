#pragma once

#include "lingan/losses.hpp"
#include "lingan/rng.hpp"
#include "lingan/types.hpp"

#include <vector>

namespace lingan::trainers {

struct GDOptions {
    int max_iters = 500;
    double init_std = 0.03;   // entries of G0 ~ N(0, init_std^2)
    double step_init = 1e-4;
    // Candidate factors tried each iteration; the winning factor multiplies
    // the running step size. Ties go to the first entry in this order.
    std::vector<double> step_multipliers = {1e-7, 5e-6, 1e-6, 1e-5, 1e-4,
                                            1e-3, 1e-2, 0.1,  1.0,  10.0, 100.0};
    double grad_stop = 0.05;  // stop when |grad|_F drops below this
    double move_tol = 1e-5;   // |delta G|_F below this counts as a stall
    int stall_limit = 5;      // stop after more than this many consecutive stalls
    // Default: adopt the lowest-loss candidate even if it does not improve on
    // the current loss. When true, such iterations take no step instead (and
    // count toward the stall counter).
    bool require_decrease = false;
    bool record_trace = false;
};

enum class StopReason { max_iters, grad_small, stalled };

const char* stop_reason_name(StopReason r);

struct TrainResult {
    Matrix g;
    long iterations = 0;
    StopReason stop_reason = StopReason::max_iters;
    double final_train_loss = 0.0;
    std::vector<double> loss_trace; // filled only when record_trace is set
};

struct PcaResult {
    Matrix components;  // d x k, orthonormal columns, leading directions first
    Vector eigenvalues; // matching sample-covariance eigenvalues (clamped >= 0)
};

// Principal directions of the sample covariance (1/n) X X^T. Requires
// 1 <= k <= d. Component signs are canonicalized (largest-magnitude entry
// positive) so results are deterministic functions of the input.
PcaResult pca_fit(const Matrix& x, Index k);

// Closed-form generator G = V_k diag(sqrt(lambda_k)): N(0, G G^T) is the best
// rank-k Gaussian fit to the sample covariance. Any k >= 1 is accepted;
// columns beyond the data dimension (or rank) are zero, leaving G G^T
// unchanged.
Matrix pca_generator(const Matrix& x, Index k);

// Adaptive-step gradient descent on the given loss from a random init
// G0 ~ N(0, init_std^2), drawn from `init_rng`. Each iteration evaluates the
// loss at G - step * m * grad for every multiplier m and adopts the best.
// Stops on a small gradient (checked before stepping), a stalled step
// sequence, or the iteration cap.
TrainResult gd_train(const losses::LossSpec& spec, const datagen::Partition& part, Index k,
                     const GDOptions& opts, Rng& init_rng);

} // namespace lingan::trainers

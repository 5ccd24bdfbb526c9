#include "lingan/trainers.hpp"

#include "lingan/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace lingan::trainers {

namespace {

struct CovEigen {
    linalg::SymmetricEigen eig;
    Index d = 0;
};

CovEigen sample_cov_eigen(const Matrix& x) {
    detail::require(x.rows() >= 1 && x.cols() >= 1, "pca: data must be non-empty");
    detail::require_finite(x, "pca data");
    const Matrix cov = (x * x.transpose()) / static_cast<double>(x.cols());
    CovEigen out;
    out.eig = linalg::sym_eigen(cov);
    out.d = x.rows();
    // Sample covariances are PSD by construction; tiny negative eigenvalues
    // are roundoff.
    for (Index i = 0; i < out.eig.eigenvalues.size(); ++i)
        out.eig.eigenvalues[i] = std::max(out.eig.eigenvalues[i], 0.0);
    return out;
}

void canonicalize_sign(Matrix& v) {
    for (Index j = 0; j < v.cols(); ++j) {
        Index arg = 0;
        v.col(j).cwiseAbs().maxCoeff(&arg);
        if (v(arg, j) < 0.0) v.col(j) = -v.col(j);
    }
}

} // namespace

const char* stop_reason_name(StopReason r) {
    switch (r) {
    case StopReason::max_iters: return "max_iters";
    case StopReason::grad_small: return "grad_small";
    case StopReason::stalled: return "stalled";
    }
    return "unknown";
}

PcaResult pca_fit(const Matrix& x, Index k) {
    CovEigen cov = sample_cov_eigen(x);
    detail::require(k >= 1 && k <= cov.d, "pca_fit: need 1 <= k <= d");
    PcaResult out;
    out.components = cov.eig.eigenvectors.leftCols(k);
    canonicalize_sign(out.components);
    out.eigenvalues = cov.eig.eigenvalues.head(k);
    return out;
}

Matrix pca_generator(const Matrix& x, Index k) {
    detail::require(k >= 1, "pca_generator: k must be >= 1");
    CovEigen cov = sample_cov_eigen(x);
    const Index cols = std::min(k, cov.d);
    Matrix g = Matrix::Zero(cov.d, k);
    Matrix v = cov.eig.eigenvectors.leftCols(cols);
    canonicalize_sign(v);
    g.leftCols(cols) = v * cov.eig.eigenvalues.head(cols).cwiseSqrt().asDiagonal();
    return g;
}

TrainResult gd_train(const losses::LossSpec& spec, const datagen::Partition& part, Index k,
                     const GDOptions& opts, Rng& init_rng) {
    detail::require(k >= 1, "gd_train: k must be >= 1");
    detail::require(opts.max_iters >= 0, "gd_train: max_iters must be >= 0");
    detail::require(opts.init_std > 0.0, "gd_train: init_std must be positive");
    detail::require(opts.step_init > 0.0, "gd_train: step_init must be positive");
    detail::require(!opts.step_multipliers.empty(), "gd_train: need at least one multiplier");
    for (double m : opts.step_multipliers)
        detail::require(m > 0.0, "gd_train: multipliers must be positive");
    detail::require(opts.grad_stop >= 0.0 && opts.move_tol >= 0.0 && opts.stall_limit >= 0,
                    "gd_train: tolerances must be non-negative");

    TrainResult result;
    Matrix g = init_rng.normal_matrix(part.d(), k, opts.init_std);
    double loss = losses::loss_value(spec, g, part);
    if (opts.record_trace) result.loss_trace.push_back(loss);

    double step = opts.step_init;
    int stall = 0;
    long iter = 0;
    StopReason reason = StopReason::max_iters;

    while (iter < opts.max_iters) {
        const Matrix grad = losses::loss_gradient(spec, g, part);
        if (grad.norm() < opts.grad_stop) {
            reason = StopReason::grad_small;
            break;
        }
        double best_loss = std::numeric_limits<double>::infinity();
        double best_mult = opts.step_multipliers.front();
        Matrix best_g;
        for (double m : opts.step_multipliers) {
            Matrix candidate = g - (step * m) * grad;
            const double cand_loss = losses::loss_value(spec, candidate, part);
            if (cand_loss < best_loss) {
                best_loss = cand_loss;
                best_mult = m;
                best_g = std::move(candidate);
            }
        }
        ++iter;
        double move = 0.0;
        if (!opts.require_decrease || best_loss < loss) {
            move = (g - best_g).norm();
            g = std::move(best_g);
            loss = best_loss;
            step *= best_mult;
        }
        if (opts.record_trace) result.loss_trace.push_back(loss);
        if (move < opts.move_tol) {
            if (++stall > opts.stall_limit) {
                reason = StopReason::stalled;
                break;
            }
        } else {
            stall = 0;
        }
    }

    result.g = std::move(g);
    result.iterations = iter;
    result.stop_reason = reason;
    result.final_train_loss = loss;
    return result;
}

} // namespace lingan::trainers

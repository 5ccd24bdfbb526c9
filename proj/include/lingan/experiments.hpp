#pragma once

#include "lingan/datagen.hpp"
#include "lingan/trainers.hpp"
#include "lingan/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lingan::experiments {

// pca is the closed-form spectral fit; the rest train by gradient descent on
// the corresponding loss.
enum class SweepVariant {
    pca,
    pca_proj,
    supervised,
    ps_plain,
    ps_regularized,
    ps_weighted,
    ps_pinv,
};

std::string sweep_variant_name(SweepVariant v);
SweepVariant sweep_variant_from_name(const std::string& name);

enum class TestConvention { w2, w2_squared };
enum class TestTarget { clean, noisy };

std::string convention_name(TestConvention c);
std::string target_name(TestTarget t);

struct ExperimentConfig {
    Index d = 64;
    Index m = 10;
    Index n = 20;
    double sigma = 0.15;
    datagen::GammaKind gamma_kind = datagen::GammaKind::hadamard;
    long trials = 200;
    std::uint64_t base_seed = 1;
    std::vector<Index> k_grid;                       // empty = variant default
    std::vector<Index> n_ps_list = {0, 2, 4, 12, 18, 20};
    SweepVariant variant = SweepVariant::ps_plain;
    double alpha = 0.98;                             // ps_weighted only
    TestConvention test_convention = TestConvention::w2;
    TestTarget test_target = TestTarget::clean;
    trainers::GDOptions gd;
    int workers = 0;                                 // 0 = OpenMP default
    // The standard regime is m < n < d. Violations are rejected unless this
    // flag (programmatic only, not a config-file key) is set, in which case a
    // warning goes to stderr.
    bool allow_nonstandard_dims = false;
    // Supervised runs use the first k latent coordinates by default; set this
    // to draw a seeded random subset instead.
    bool supervised_random_subset = false;

    // k_grid if set; otherwise {1..40} for pca/pca_proj/supervised and the
    // odd grid {1,3,...,127} for the pseudo-supervised variants. Sorted,
    // duplicate-free.
    std::vector<Index> resolved_k_grid() const;
    std::vector<Index> resolved_n_ps_list() const;
    void validate() const;
};

struct TrialResult {
    double test_error = 0.0;
    double train_error = 0.0;
    long iterations = 0;
};

// One aggregated sweep cell. Stds are population (divide by trial count).
struct SweepRecord {
    std::string variant;
    Index k = 0;
    Index n_ps = 0;
    long trials = 0;
    double test_mean = 0.0;
    double test_std = 0.0;
    double train_mean = 0.0;
    double train_std = 0.0;
    double iters_mean = 0.0;
    double iters_std = 0.0;
};

// Distance from N(0, G G^T) to the model's signal (clean) or observation
// (noisy) distribution under the chosen convention.
double test_error(const Matrix& g, const datagen::DataModel& model, TestConvention convention,
                  TestTarget target);

// One fully seeded trial: trial seed = base_seed + trial_index, with fixed
// sub-streams for data, pseudo-latents and trainer init, so changing k
// regenerates only the k-dependent pseudo-latents. n_ps doubles as n_sup for
// the supervised variant.
TrialResult run_trial(const ExperimentConfig& cfg, Index k, Index n_ps, long trial_index);

// Full grid sweep, trials run on an OpenMP worker pool (cfg.workers threads,
// 0 = default). Results are aggregated in fixed index order with compensated
// summation, so the output is byte-identical for any worker count. Records
// are sorted by (variant, n_ps, k). A failed trial aborts with TrialError
// carrying the trial coordinates.
std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg);

// Serial reference implementation with the same contract; kept independent
// of the parallel path so the two can be checked against each other.
std::vector<SweepRecord> run_sweep_serial(const ExperimentConfig& cfg);

struct VerifyReport {
    bool pass = false;
    double max_deviation = 0.0;
    std::vector<std::string> lines;
};

// Interpolation constancy: for k >= n the closed-form spectral generator
// reproduces the full sample covariance, so per-trial test error is constant
// across k under every convention. Also reports the closed-form
// null-generator anchors for calibrating curves.
VerifyReport verify_theorem1(const ExperimentConfig& cfg, const std::vector<Index>& k_values,
                             long trials);

// Distribution (and hence test error) invariance under G -> G U for
// orthonormal U.
VerifyReport verify_orthonormal_invariance(std::uint64_t seed, int cases);

// Pseudometric checks: marginal path vs zero-padded cross-check, axioms, and
// insensitivity to ignored coordinates.
VerifyReport verify_pseudometric(std::uint64_t seed, int cases);

// Norm-of-Gaussian concentration: mean ratio near 1, spread shrinking with
// dimension.
VerifyReport verify_concentration(std::uint64_t seed);

// CSV schema:
//   variant,k,n_ps,trials,test_mean,test_std,train_mean,train_std,iters_mean,iters_std
// LF line endings, UTF-8, doubles as shortest round-trip decimal. Writing the
// same records always produces identical bytes.
void write_csv(const std::vector<SweepRecord>& records, std::ostream& out);
void write_csv(const std::vector<SweepRecord>& records, const std::string& path);
std::vector<SweepRecord> read_csv(std::istream& in);
std::vector<SweepRecord> read_csv(const std::string& path);

} // namespace lingan::experiments

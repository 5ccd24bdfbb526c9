#include "lingan/experiments.hpp"

#include "lingan/gaussian.hpp"
#include "lingan/linalg.hpp"
#include "lingan/losses.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

namespace lingan::experiments {

namespace {

struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

std::vector<Index> sorted_unique(std::vector<Index> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

struct Cell {
    Index n_ps = 0;
    Index k = 0;
};

std::vector<Cell> make_cells(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    for (Index n_ps : cfg.resolved_n_ps_list())
        for (Index k : cfg.resolved_k_grid()) cells.push_back({n_ps, k});
    return cells;
}

bool standard_regime(const ExperimentConfig& cfg) {
    return cfg.m < cfg.n && cfg.n < cfg.d;
}

void warn_if_nonstandard(const ExperimentConfig& cfg) {
    if (!standard_regime(cfg))
        std::cerr << "warning: nonstandard dimension regime (m < n < d violated): d=" << cfg.d
                  << " m=" << cfg.m << " n=" << cfg.n << "\n";
}

std::string trial_coordinates(const ExperimentConfig& cfg, Index k, Index n_ps, long trial) {
    std::ostringstream os;
    os << "variant=" << sweep_variant_name(cfg.variant) << " k=" << k << " n_ps=" << n_ps
       << " trial=" << trial << " seed=" << cfg.base_seed + static_cast<std::uint64_t>(trial);
    return os.str();
}

// Mean and population std over slots[first..first+count), read in index order
// with compensated summation so results do not depend on how trials were
// scheduled.
void mean_std(const std::vector<TrialResult>& slots, long first, long count,
              double (*field)(const TrialResult&), double& mean, double& stdev) {
    Kahan acc;
    for (long i = 0; i < count; ++i) acc.add(field(slots[static_cast<std::size_t>(first + i)]));
    mean = acc.sum / static_cast<double>(count);
    Kahan var;
    for (long i = 0; i < count; ++i) {
        const double dev = field(slots[static_cast<std::size_t>(first + i)]) - mean;
        var.add(dev * dev);
    }
    stdev = std::sqrt(var.sum / static_cast<double>(count));
}

std::vector<SweepRecord> aggregate(const ExperimentConfig& cfg, const std::vector<Cell>& cells,
                                   const std::vector<TrialResult>& slots) {
    std::vector<SweepRecord> records;
    records.reserve(cells.size());
    const long trials = cfg.trials;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        SweepRecord rec;
        rec.variant = sweep_variant_name(cfg.variant);
        rec.k = cells[c].k;
        rec.n_ps = cells[c].n_ps;
        rec.trials = trials;
        const long first = static_cast<long>(c) * trials;
        mean_std(slots, first, trials, [](const TrialResult& t) { return t.test_error; },
                 rec.test_mean, rec.test_std);
        mean_std(slots, first, trials, [](const TrialResult& t) { return t.train_error; },
                 rec.train_mean, rec.train_std);
        mean_std(slots, first, trials,
                 [](const TrialResult& t) { return static_cast<double>(t.iterations); },
                 rec.iters_mean, rec.iters_std);
        records.push_back(std::move(rec));
    }
    return records;
}

metrics::CoordinateSet supervised_subset(const ExperimentConfig& cfg, Index k,
                                         std::uint64_t seed) {
    std::vector<Index> idx;
    idx.reserve(static_cast<std::size_t>(k));
    if (!cfg.supervised_random_subset) {
        for (Index i = 0; i < k; ++i) idx.push_back(i);
    } else {
        std::vector<Index> pool(static_cast<std::size_t>(cfg.m));
        for (Index i = 0; i < cfg.m; ++i) pool[static_cast<std::size_t>(i)] = i;
        Rng rng(seed, streams::subset);
        for (Index i = 0; i < k; ++i) {
            const std::size_t remaining = pool.size() - static_cast<std::size_t>(i);
            const std::size_t j = static_cast<std::size_t>(i) + rng.raw() % remaining;
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
            idx.push_back(pool[static_cast<std::size_t>(i)]);
        }
    }
    return metrics::CoordinateSet(std::move(idx));
}

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double_field(const std::string& s, const char* what) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw IoError(std::string("read_csv: malformed ") + what + " value '" + s + "'");
    return v;
}

long parse_long_field(const std::string& s, const char* what) {
    long v = 0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw IoError(std::string("read_csv: malformed ") + what + " value '" + s + "'");
    return v;
}

constexpr const char* kCsvHeader =
    "variant,k,n_ps,trials,test_mean,test_std,train_mean,train_std,iters_mean,iters_std";

} // namespace

std::string sweep_variant_name(SweepVariant v) {
    switch (v) {
    case SweepVariant::pca: return "pca";
    case SweepVariant::pca_proj: return "pca_proj";
    case SweepVariant::supervised: return "supervised";
    case SweepVariant::ps_plain: return "ps_plain";
    case SweepVariant::ps_regularized: return "ps_regularized";
    case SweepVariant::ps_weighted: return "ps_weighted";
    case SweepVariant::ps_pinv: return "ps_pinv";
    }
    throw InvalidInput("sweep_variant_name: unknown variant");
}

SweepVariant sweep_variant_from_name(const std::string& name) {
    if (name == "pca") return SweepVariant::pca;
    if (name == "pca_proj") return SweepVariant::pca_proj;
    if (name == "supervised") return SweepVariant::supervised;
    if (name == "ps_plain") return SweepVariant::ps_plain;
    if (name == "ps_regularized") return SweepVariant::ps_regularized;
    if (name == "ps_weighted") return SweepVariant::ps_weighted;
    if (name == "ps_pinv") return SweepVariant::ps_pinv;
    throw InvalidInput("unknown variant '" + name + "'");
}

std::string convention_name(TestConvention c) {
    return c == TestConvention::w2 ? "w2" : "w2_squared";
}

std::string target_name(TestTarget t) { return t == TestTarget::clean ? "clean" : "noisy"; }

std::vector<Index> ExperimentConfig::resolved_k_grid() const {
    if (!k_grid.empty()) return sorted_unique(k_grid);
    std::vector<Index> ks;
    switch (variant) {
    case SweepVariant::pca:
    case SweepVariant::pca_proj:
    case SweepVariant::supervised:
        for (Index k = 1; k <= 40; ++k) ks.push_back(k);
        break;
    default:
        for (Index k = 1; k <= 127; k += 2) ks.push_back(k);
        break;
    }
    return ks;
}

std::vector<Index> ExperimentConfig::resolved_n_ps_list() const {
    return sorted_unique(n_ps_list);
}

void ExperimentConfig::validate() const {
    detail::require(d >= 1, "config: d must be >= 1");
    detail::require(m >= 1 && m <= d, "config: need 1 <= m <= d");
    detail::require(n >= 1, "config: n must be >= 1");
    detail::require(sigma >= 0.0, "config: sigma must be >= 0");
    detail::require(trials >= 1, "config: trials must be >= 1");
    detail::require(workers >= 0, "config: workers must be >= 0");
    if (gamma_kind == datagen::GammaKind::hadamard && (d & (d - 1)) != 0)
        throw InvalidInput("config: gamma_kind=hadamard requires d to be a power of two");
    if (!standard_regime(*this) && !allow_nonstandard_dims)
        throw InvalidInput("config: standard regime requires m < n < d (got d=" +
                           std::to_string(d) + " m=" + std::to_string(m) + " n=" +
                           std::to_string(n) + "); set allow_nonstandard_dims to run anyway");
    detail::require(!n_ps_list.empty(), "config: n_ps_list must be non-empty");
    for (Index np : n_ps_list)
        detail::require(np >= 0 && np <= n, "config: n_ps values must lie in [0, n]");
    const std::vector<Index> ks = resolved_k_grid();
    detail::require(!ks.empty(), "config: k_grid must be non-empty");
    for (Index k : ks) detail::require(k >= 1, "config: k values must be >= 1");
    if (variant == SweepVariant::supervised)
        detail::require(ks.back() <= m, "config: supervised variant requires k <= m");
    if (variant == SweepVariant::ps_weighted)
        detail::require(alpha >= 0.0 && alpha <= 1.0, "config: alpha must lie in [0, 1]");
}

double test_error(const Matrix& g, const datagen::DataModel& model, TestConvention convention,
                  TestTarget target) {
    detail::require(g.rows() == model.d, "test_error: generator rows must match model dimension");
    detail::require_finite(g, "test_error generator");
    const metrics::Gaussian generated(Vector::Zero(model.d), g * g.transpose());
    const metrics::Gaussian tgt = target == TestTarget::clean ? model.clean_distribution()
                                                              : model.noisy_distribution();
    return convention == TestConvention::w2 ? metrics::w2(generated, tgt)
                                            : metrics::w2_squared(generated, tgt);
}

TrialResult run_trial(const ExperimentConfig& cfg, Index k, Index n_ps, long trial_index) {
    cfg.validate();
    detail::require(k >= 1, "run_trial: k must be >= 1");
    detail::require(n_ps >= 0 && n_ps <= cfg.n, "run_trial: need 0 <= n_ps <= n");
    detail::require(trial_index >= 0, "run_trial: trial_index must be >= 0");

    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(trial_index);
    Rng data_rng(seed, streams::data);
    const datagen::DataModel model =
        datagen::build_model(cfg.d, cfg.m, cfg.sigma, cfg.gamma_kind, data_rng);
    const datagen::Dataset data = datagen::sample(model, cfg.n, data_rng);

    TrialResult out;
    if (cfg.variant == SweepVariant::pca) {
        const Matrix g = trainers::pca_generator(data.x, k);
        out.test_error = test_error(g, model, cfg.test_convention, cfg.test_target);
        const trainers::PcaResult fit = trainers::pca_fit(data.x, std::min(k, cfg.d));
        out.train_error =
            (data.x - fit.components * (fit.components.transpose() * data.x)).squaredNorm();
        out.iterations = 0;
        return out;
    }

    datagen::Partition part;
    losses::LossSpec spec;
    switch (cfg.variant) {
    case SweepVariant::supervised: {
        if (k > cfg.m)
            throw InvalidInput("run_trial: supervised variant requires k <= m");
        part = datagen::make_supervised_partition(data, n_ps, supervised_subset(cfg, k, seed));
        spec = losses::LossSpec::plain(losses::Variant::supervised);
        break;
    }
    case SweepVariant::pca_proj: {
        Rng ps_rng(seed, streams::pseudo);
        part = datagen::make_pseudo_partition(data, n_ps, k, ps_rng);
        spec = losses::LossSpec::plain(losses::Variant::pca_proj);
        break;
    }
    case SweepVariant::ps_plain:
    case SweepVariant::ps_regularized:
    case SweepVariant::ps_pinv: {
        Rng ps_rng(seed, streams::pseudo);
        part = datagen::make_pseudo_partition(data, n_ps, k, ps_rng);
        const losses::Variant v = cfg.variant == SweepVariant::ps_plain
                                      ? losses::Variant::ps_plain
                                      : (cfg.variant == SweepVariant::ps_regularized
                                             ? losses::Variant::ps_regularized
                                             : losses::Variant::ps_pinv);
        spec = losses::LossSpec::plain(v);
        break;
    }
    case SweepVariant::ps_weighted: {
        Rng ps_rng(seed, streams::pseudo);
        part = datagen::make_pseudo_partition(data, n_ps, k, ps_rng);
        spec = losses::LossSpec::weighted(cfg.alpha);
        break;
    }
    case SweepVariant::pca:
        break; // handled above
    }

    Rng init_rng(seed, streams::init);
    const trainers::TrainResult res = trainers::gd_train(spec, part, k, cfg.gd, init_rng);
    out.test_error = test_error(res.g, model, cfg.test_convention, cfg.test_target);
    out.train_error = res.final_train_loss;
    out.iterations = res.iterations;
    return out;
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    warn_if_nonstandard(cfg);
    const std::vector<Cell> cells = make_cells(cfg);
    const long trials = cfg.trials;
    const long total = static_cast<long>(cells.size()) * trials;
    std::vector<TrialResult> slots(static_cast<std::size_t>(total));

    constexpr long kNoFailure = std::numeric_limits<long>::max();
    std::atomic<long> first_failure{kNoFailure};
    std::mutex failure_mutex;
    std::string failure_msg;

    const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long flat = 0; flat < total; ++flat) {
        if (first_failure.load(std::memory_order_relaxed) != kNoFailure) continue;
        const Cell& cell = cells[static_cast<std::size_t>(flat / trials)];
        const long t = flat % trials;
        try {
            slots[static_cast<std::size_t>(flat)] = run_trial(cfg, cell.k, cell.n_ps, t);
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (flat < first_failure.load()) {
                first_failure.store(flat);
                failure_msg = "trial failed: " + trial_coordinates(cfg, cell.k, cell.n_ps, t) +
                              ": " + e.what();
            }
        }
    }
    if (first_failure.load() != kNoFailure) throw TrialError(failure_msg);
    return aggregate(cfg, cells, slots);
}

std::vector<SweepRecord> run_sweep_serial(const ExperimentConfig& cfg) {
    cfg.validate();
    warn_if_nonstandard(cfg);
    const std::vector<Cell> cells = make_cells(cfg);
    const long trials = cfg.trials;
    std::vector<TrialResult> slots(cells.size() * static_cast<std::size_t>(trials));
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (long t = 0; t < trials; ++t) {
            try {
                slots[c * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)] =
                    run_trial(cfg, cells[c].k, cells[c].n_ps, t);
            } catch (const TrialError&) {
                throw;
            } catch (const std::exception& e) {
                throw TrialError("trial failed: " +
                                 trial_coordinates(cfg, cells[c].k, cells[c].n_ps, t) + ": " +
                                 e.what());
            }
        }
    }
    return aggregate(cfg, cells, slots);
}

VerifyReport verify_theorem1(const ExperimentConfig& cfg, const std::vector<Index>& k_values,
                             long trials) {
    cfg.validate();
    detail::require(!k_values.empty(), "verify_theorem1: k list must be non-empty");
    detail::require(trials >= 1, "verify_theorem1: trials must be >= 1");
    for (Index k : k_values)
        detail::require(k >= cfg.n, "verify_theorem1: interpolation regime requires k >= n");

    VerifyReport report;
    std::ostringstream head;
    head << "theorem1: pca closed form, trials=" << trials << ", k={";
    for (std::size_t i = 0; i < k_values.size(); ++i)
        head << (i ? "," : "") << k_values[i];
    head << "}";
    report.lines.push_back(head.str());

    const std::array<std::pair<TestConvention, TestTarget>, 4> combos = {
        {{TestConvention::w2, TestTarget::clean},
         {TestConvention::w2_squared, TestTarget::clean},
         {TestConvention::w2, TestTarget::noisy},
         {TestConvention::w2_squared, TestTarget::noisy}}};

    double max_spread = 0.0;
    std::array<double, 4> combo_spread{};
    double kl_spread = 0.0;
    std::array<double, 4> first_value{};

    for (long t = 0; t < trials; ++t) {
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(t);
        Rng data_rng(seed, streams::data);
        const datagen::DataModel model =
            datagen::build_model(cfg.d, cfg.m, cfg.sigma, cfg.gamma_kind, data_rng);
        const datagen::Dataset data = datagen::sample(model, cfg.n, data_rng);
        std::vector<Matrix> gens;
        gens.reserve(k_values.size());
        for (Index k : k_values) gens.push_back(trainers::pca_generator(data.x, k));

        for (std::size_t ci = 0; ci < combos.size(); ++ci) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const Matrix& g : gens) {
                const double v = test_error(g, model, combos[ci].first, combos[ci].second);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (t == 0) first_value[ci] = lo;
            combo_spread[ci] = std::max(combo_spread[ci], hi - lo);
            max_spread = std::max(max_spread, hi - lo);
        }

        if (cfg.sigma > 0.0) {
            const metrics::Gaussian tgt = model.noisy_distribution();
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const Matrix& g : gens) {
                Matrix cov = g * g.transpose();
                cov.diagonal().array() += cfg.sigma * cfg.sigma;
                const double v =
                    metrics::gaussian_kl(metrics::Gaussian(Vector::Zero(cfg.d), cov), tgt);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            kl_spread = std::max(kl_spread, hi - lo);
            max_spread = std::max(max_spread, hi - lo);
        }
    }

    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
        std::ostringstream line;
        line << "  " << convention_name(combos[ci].first) << " x "
             << target_name(combos[ci].second) << ": trial-0 value=" << first_value[ci]
             << ", max per-trial spread across k=" << combo_spread[ci];
        report.lines.push_back(line.str());
    }
    if (cfg.sigma > 0.0) {
        std::ostringstream line;
        line << "  kl (sigma^2-padded generator vs noisy target): max spread=" << kl_spread;
        report.lines.push_back(line.str());
    }

    {
        Rng anchor_rng(cfg.base_seed, streams::data);
        const datagen::DataModel model =
            datagen::build_model(cfg.d, cfg.m, cfg.sigma, cfg.gamma_kind, anchor_rng);
        const Matrix zero = Matrix::Zero(cfg.d, 1);
        std::ostringstream line;
        line << "  null-generator anchors:";
        for (const auto& [conv, tgt] : combos)
            line << " " << convention_name(conv) << "x" << target_name(tgt) << "="
                 << test_error(zero, model, conv, tgt);
        report.lines.push_back(line.str());
    }

    report.max_deviation = max_spread;
    report.pass = max_spread <= 1e-9;
    report.lines.push_back(std::string("  status: ") + (report.pass ? "PASS" : "FAIL") +
                           " (max spread " + fmt_double(max_spread) + ", tolerance 1e-9)");
    return report;
}

VerifyReport verify_orthonormal_invariance(std::uint64_t seed, int cases) {
    detail::require(cases >= 1, "verify_orthonormal_invariance: cases must be >= 1");
    Rng rng(seed);
    double max_dev = 0.0;
    for (int c = 0; c < cases; ++c) {
        const Index d = 2 + static_cast<Index>(rng.raw() % 9);
        const Index k = 1 + static_cast<Index>(rng.raw() % static_cast<std::uint64_t>(d + 3));
        const Matrix g = rng.normal_matrix(d, k);
        const Matrix u = linalg::random_orthonormal_cols(k, k, rng);
        const Matrix gu = g * u;

        const double cov_dev = (g * g.transpose() - gu * gu.transpose()).cwiseAbs().maxCoeff();
        const metrics::Gaussian first(Vector::Zero(d), g * g.transpose());
        const metrics::Gaussian second(Vector::Zero(d), gu * gu.transpose());
        const double self_sq = metrics::w2_squared(first, second);

        const Matrix b = rng.normal_matrix(d, d);
        const metrics::Gaussian probe(rng.normal_vector(d), b * b.transpose());
        const double dist_dev = std::abs(metrics::w2(first, probe) - metrics::w2(second, probe));

        max_dev = std::max({max_dev, cov_dev, self_sq, dist_dev});
    }
    VerifyReport report;
    report.max_deviation = max_dev;
    report.pass = max_dev <= 1e-9;
    report.lines.push_back("orthonormal invariance: " + std::to_string(cases) +
                           " random cases, max deviation " + fmt_double(max_dev));
    report.lines.push_back(std::string("  status: ") + (report.pass ? "PASS" : "FAIL") +
                           " (tolerance 1e-9)");
    return report;
}

VerifyReport verify_pseudometric(std::uint64_t seed, int cases) {
    detail::require(cases >= 1, "verify_pseudometric: cases must be >= 1");
    const Index d = 8;
    Rng rng(seed);

    auto random_gaussian = [&](Index rank) {
        const Matrix b = rng.normal_matrix(d, rank);
        return metrics::Gaussian(rng.normal_vector(d), b * b.transpose());
    };
    auto random_ignored = [&](int c) {
        std::vector<Index> idx;
        if (c == 1) {
            for (Index i = 0; i < d; ++i) idx.push_back(i); // degenerate: ignore everything
        } else if (c != 0) {
            for (Index i = 0; i < d; ++i)
                if (rng.raw() % 2 == 0) idx.push_back(i);
        }
        return metrics::CoordinateSet(std::move(idx));
    };

    double max_dev = 0.0;
    for (int c = 0; c < cases; ++c) {
        const Index rank = 4 + static_cast<Index>(rng.raw() % 5);
        const metrics::Gaussian a = random_gaussian(rank);
        const metrics::Gaussian b = random_gaussian(rank);
        const metrics::Gaussian mid = random_gaussian(rank);
        const metrics::CoordinateSet ignored = random_ignored(c);

        // Marginal path vs zero-padded cross-check.
        const double primary = metrics::pseudo_w2(a, b, ignored);
        const double padded = metrics::w2(metrics::zero_pad_coords(a, ignored),
                                          metrics::zero_pad_coords(b, ignored));
        max_dev = std::max(max_dev, std::abs(primary - padded));

        // Symmetry.
        max_dev = std::max(max_dev, std::abs(primary - metrics::pseudo_w2(b, a, ignored)));

        // Identity at a point, in squared form (the identity is exact for the
        // squared distance; the square root would amplify pure roundoff).
        if (ignored.size() < d) {
            const metrics::Gaussian am = metrics::marginalize(a, ignored);
            max_dev = std::max(max_dev, metrics::w2_squared(am, am));
        }

        // Distributions differing only on ignored coordinates are at 0.
        metrics::Gaussian shifted = a;
        for (Index i : ignored.indices()) shifted.mean[i] += 1.0 + static_cast<double>(i);
        const double ignored_only = metrics::pseudo_w2(a, shifted, ignored);
        max_dev = std::max(max_dev, ignored_only * ignored_only);

        // Triangle inequality violation (0 when satisfied).
        const double ab = primary;
        const double ac = metrics::pseudo_w2(a, mid, ignored);
        const double cb = metrics::pseudo_w2(mid, b, ignored);
        max_dev = std::max(max_dev, std::max(0.0, ab - ac - cb));
    }

    VerifyReport report;
    report.max_deviation = max_dev;
    report.pass = max_dev <= 1e-8;
    report.lines.push_back("pseudometric: " + std::to_string(cases) +
                           " random cases at d=8, max deviation " + fmt_double(max_dev));
    report.lines.push_back(std::string("  status: ") + (report.pass ? "PASS" : "FAIL") +
                           " (tolerance 1e-8)");
    return report;
}

VerifyReport verify_concentration(std::uint64_t seed) {
    const std::array<Index, 4> dims = {1, 10, 100, 1000};
    const Index samples = 10000;
    VerifyReport report;
    std::array<metrics::NormConcentration, 4> stats;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        Rng rng(seed, 100 + static_cast<std::uint64_t>(i));
        stats[i] = metrics::norm_concentration(dims[i], samples, rng);
        std::ostringstream line;
        line << "  m=" << dims[i] << ": mean ratio=" << stats[i].mean_ratio
             << ", std=" << stats[i].std_ratio;
        report.lines.push_back(line.str());
    }
    const double expected_m1 = std::sqrt(2.0 / std::numbers::pi);
    const bool m1_ok = std::abs(stats[0].mean_ratio - expected_m1) <= 0.02;
    const bool m1000_ok = stats[3].mean_ratio >= 0.995 && stats[3].mean_ratio <= 1.005;
    bool shrinking = true;
    for (std::size_t i = 1; i < stats.size(); ++i)
        shrinking = shrinking && stats[i].std_ratio < stats[i - 1].std_ratio;

    report.max_deviation = std::abs(stats[3].mean_ratio - 1.0);
    report.pass = m1_ok && m1000_ok && shrinking;
    report.lines.insert(report.lines.begin(),
                        "norm concentration: " + std::to_string(samples) + " samples per m");
    std::ostringstream tail;
    tail << "  m=1 mean vs sqrt(2/pi)=" << expected_m1 << ": " << (m1_ok ? "ok" : "off") << "; "
         << "m=1000 mean in [0.995, 1.005]: " << (m1000_ok ? "ok" : "off") << "; "
         << "std shrinking with m: " << (shrinking ? "ok" : "off");
    report.lines.push_back(tail.str());
    report.lines.push_back(std::string("  status: ") + (report.pass ? "PASS" : "FAIL"));
    return report;
}

void write_csv(const std::vector<SweepRecord>& records, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const SweepRecord& r : records) {
        out << r.variant << ',' << r.k << ',' << r.n_ps << ',' << r.trials << ','
            << fmt_double(r.test_mean) << ',' << fmt_double(r.test_std) << ','
            << fmt_double(r.train_mean) << ',' << fmt_double(r.train_std) << ','
            << fmt_double(r.iters_mean) << ',' << fmt_double(r.iters_std) << '\n';
    }
    if (!out) throw IoError("write_csv: stream write failed");
}

void write_csv(const std::vector<SweepRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_csv: cannot open '" + path + "' for writing");
    write_csv(records, out);
    out.flush();
    if (!out) throw IoError("write_csv: write to '" + path + "' failed");
}

std::vector<SweepRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("read_csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw IoError("read_csv: unexpected header '" + line + "'");
    std::vector<SweepRecord> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (fields.size() != 10)
            throw IoError("read_csv: expected 10 fields, got " + std::to_string(fields.size()));
        SweepRecord r;
        r.variant = fields[0];
        try {
            sweep_variant_from_name(r.variant);
        } catch (const InvalidInput&) {
            throw IoError("read_csv: unknown variant '" + r.variant + "'");
        }
        r.k = parse_long_field(fields[1], "k");
        r.n_ps = parse_long_field(fields[2], "n_ps");
        r.trials = parse_long_field(fields[3], "trials");
        r.test_mean = parse_double_field(fields[4], "test_mean");
        r.test_std = parse_double_field(fields[5], "test_std");
        r.train_mean = parse_double_field(fields[6], "train_mean");
        r.train_std = parse_double_field(fields[7], "train_std");
        r.iters_mean = parse_double_field(fields[8], "iters_mean");
        r.iters_std = parse_double_field(fields[9], "iters_std");
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<SweepRecord> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_csv: cannot open '" + path + "'");
    return read_csv(in);
}

} // namespace lingan::experiments

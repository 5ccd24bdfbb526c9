// Benchmarks the OpenMP sweep against the serial reference implementation on
// the same workload and checks that their outputs agree exactly.

#include "lingan/experiments.hpp"

#include <CLI11.hpp>

#include <omp.h>

#include <chrono>
#include <iostream>
#include <string>

namespace {

using namespace lingan;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool records_equal(const std::vector<experiments::SweepRecord>& a,
                   const std::vector<experiments::SweepRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& x = a[i];
        const auto& y = b[i];
        if (x.variant != y.variant || x.k != y.k || x.n_ps != y.n_ps || x.trials != y.trials ||
            x.test_mean != y.test_mean || x.test_std != y.test_std ||
            x.train_mean != y.train_mean || x.train_std != y.train_std ||
            x.iters_mean != y.iters_mean || x.iters_std != y.iters_std)
            return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP sweep benchmark"};
    long trials = 4;
    int workers = 0;
    std::uint64_t seed = 7;
    app.add_option("--trials", trials, "trials per cell")->check(CLI::PositiveNumber);
    app.add_option("--workers", workers, "OpenMP workers (0 = default)");
    app.add_option("--seed", seed, "base seed");
    CLI11_PARSE(app, argc, argv);

    experiments::ExperimentConfig cfg;
    cfg.variant = experiments::SweepVariant::ps_plain;
    cfg.k_grid = {1, 9, 17, 25, 33};
    cfg.n_ps_list = {0, 20};
    cfg.trials = trials;
    cfg.base_seed = seed;

    const int used = workers > 0 ? workers : omp_get_max_threads();
    std::cout << "workload: variant=ps_plain, " << cfg.k_grid.size() * cfg.n_ps_list.size()
              << " cells x " << trials << " trials\n";

    const auto t0 = Clock::now();
    const auto serial = experiments::run_sweep_serial(cfg);
    const double serial_s = seconds_since(t0);
    std::cout << "serial reference: " << serial_s << " s\n";

    cfg.workers = workers;
    const auto t1 = Clock::now();
    const auto parallel = experiments::run_sweep(cfg);
    const double parallel_s = seconds_since(t1);
    std::cout << "openmp (" << used << " workers): " << parallel_s << " s\n";
    std::cout << "speedup: " << serial_s / parallel_s << "x\n";

    const bool match = records_equal(serial, parallel);
    std::cout << "outputs identical: " << (match ? "yes" : "NO") << "\n";
    return match ? 0 : 1;
}

#include "lingan/experiments.hpp"

#include "lingan/config.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

using namespace lingan;
using namespace lingan::experiments;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.d = 16;
    cfg.m = 3;
    cfg.n = 8;
    cfg.sigma = 0.1;
    cfg.trials = 3;
    cfg.base_seed = 11;
    cfg.k_grid = {1, 4, 9};
    cfg.n_ps_list = {0, 8};
    cfg.variant = SweepVariant::ps_plain;
    return cfg;
}

} // namespace

TEST_CASE("sweep variant names round-trip") {
    for (SweepVariant v : {SweepVariant::pca, SweepVariant::pca_proj, SweepVariant::supervised,
                           SweepVariant::ps_plain, SweepVariant::ps_regularized,
                           SweepVariant::ps_weighted, SweepVariant::ps_pinv})
        CHECK(sweep_variant_from_name(sweep_variant_name(v)) == v);
    CHECK_THROWS_AS(sweep_variant_from_name("nope"), InvalidInput);
}

TEST_CASE("test_error anchors at the null generator") {
    Rng rng(5);
    const auto model = datagen::build_model(64, 10, 0.15, datagen::GammaKind::hadamard, rng);
    const Matrix zero = Matrix::Zero(64, 1);

    CHECK(test_error(zero, model, TestConvention::w2, TestTarget::clean) ==
          doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
    CHECK(test_error(zero, model, TestConvention::w2_squared, TestTarget::clean) ==
          doctest::Approx(10.0).epsilon(1e-12));
    CHECK(test_error(zero, model, TestConvention::w2_squared, TestTarget::noisy) ==
          doctest::Approx(10.0 + 64 * 0.15 * 0.15).epsilon(1e-12));

    // A generator matching the signal exactly zeroes the clean error.
    CHECK(test_error(model.gamma, model, TestConvention::w2, TestTarget::clean) ==
          doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("run_trial is deterministic and seed-sensitive") {
    const ExperimentConfig cfg = small_config();
    const auto a = run_trial(cfg, 4, 8, 2);
    const auto b = run_trial(cfg, 4, 8, 2);
    CHECK(a.test_error == b.test_error);
    CHECK(a.train_error == b.train_error);
    CHECK(a.iterations == b.iterations);

    const auto c = run_trial(cfg, 4, 8, 3);
    CHECK(a.test_error != c.test_error);

    ExperimentConfig shifted = cfg;
    shifted.base_seed = cfg.base_seed + 1;
    const auto d = run_trial(shifted, 4, 8, 2);
    CHECK(d.test_error == c.test_error); // trial seed = base_seed + index
}

TEST_CASE("closed-form pca trials are constant for k >= n") {
    ExperimentConfig cfg = small_config();
    cfg.variant = SweepVariant::pca;
    const auto at_n = run_trial(cfg, 8, 0, 0);
    const auto wider = run_trial(cfg, 13, 0, 0);
    CHECK(std::abs(at_n.test_error - wider.test_error) < 1e-12);
    CHECK(at_n.iterations == 0);
}

TEST_CASE("run_sweep aggregates every cell in sorted order") {
    ExperimentConfig cfg = small_config();
    const auto records = run_sweep(cfg);
    REQUIRE(records.size() == 6); // 2 n_ps values x 3 k values

    size_t idx = 0;
    for (Index n_ps : {0, 8}) {
        for (Index k : {1, 4, 9}) {
            CHECK(records[idx].variant == "ps_plain");
            CHECK(records[idx].n_ps == n_ps);
            CHECK(records[idx].k == k);
            CHECK(records[idx].trials == 3);
            CHECK(records[idx].test_std >= 0.0);
            ++idx;
        }
    }
}

TEST_CASE("sweep means match per-trial results") {
    ExperimentConfig cfg = small_config();
    cfg.k_grid = {4};
    cfg.n_ps_list = {8};
    const auto records = run_sweep(cfg);
    REQUIRE(records.size() == 1);

    double acc = 0.0;
    for (long t = 0; t < cfg.trials; ++t) acc += run_trial(cfg, 4, 8, t).test_error;
    CHECK(records[0].test_mean == doctest::Approx(acc / cfg.trials).epsilon(1e-12));
}

TEST_CASE("single-trial cells report zero spread") {
    ExperimentConfig cfg = small_config();
    cfg.trials = 1;
    cfg.k_grid = {4};
    const auto records = run_sweep(cfg);
    for (const auto& r : records) {
        CHECK(r.test_std == 0.0);
        CHECK(r.train_std == 0.0);
        CHECK(r.iters_std == 0.0);
    }
}

TEST_CASE("parallel and serial sweeps agree bitwise") {
    ExperimentConfig cfg = small_config();
    cfg.workers = 4; // oversubscribes the host; ordering must not matter
    const auto par = run_sweep(cfg);
    cfg.workers = 1;
    const auto ser = run_sweep_serial(cfg);
    REQUIRE(par.size() == ser.size());
    for (size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].variant == ser[i].variant);
        CHECK(par[i].k == ser[i].k);
        CHECK(par[i].n_ps == ser[i].n_ps);
        CHECK(par[i].trials == ser[i].trials);
        CHECK(par[i].test_mean == ser[i].test_mean);
        CHECK(par[i].test_std == ser[i].test_std);
        CHECK(par[i].train_mean == ser[i].train_mean);
        CHECK(par[i].train_std == ser[i].train_std);
        CHECK(par[i].iters_mean == ser[i].iters_mean);
        CHECK(par[i].iters_std == ser[i].iters_std);
    }
}

TEST_CASE("config validation rejects out-of-contract setups") {
    ExperimentConfig cfg = small_config();

    ExperimentConfig bad = cfg;
    bad.m = 8; // m < n violated
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad.allow_nonstandard_dims = true;
    CHECK_NOTHROW(bad.validate());

    bad = cfg;
    bad.d = 48; // not a power of two for the structured orthonormal frame
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad.gamma_kind = datagen::GammaKind::random_orthonormal;
    bad.m = 3;
    CHECK_NOTHROW(bad.validate());

    bad = cfg;
    bad.n_ps_list = {0, 9}; // exceeds n
    CHECK_THROWS_AS(bad.validate(), InvalidInput);

    bad = cfg;
    bad.variant = SweepVariant::supervised;
    bad.k_grid = {1, 4}; // within m = 3? no: 4 > m
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad.k_grid = {1, 3};
    CHECK_NOTHROW(bad.validate());

    bad = cfg;
    bad.variant = SweepVariant::ps_weighted;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);

    bad = cfg;
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("default grids depend on the variant") {
    ExperimentConfig cfg;
    cfg.variant = SweepVariant::ps_plain;
    const auto odd = cfg.resolved_k_grid();
    REQUIRE(odd.size() == 64);
    CHECK(odd.front() == 1);
    CHECK(odd.back() == 127);
    for (size_t i = 1; i < odd.size(); ++i) CHECK(odd[i] - odd[i - 1] == 2);

    cfg.variant = SweepVariant::pca;
    const auto dense = cfg.resolved_k_grid();
    REQUIRE(dense.size() == 40);
    CHECK(dense.front() == 1);
    CHECK(dense.back() == 40);

    cfg.k_grid = {9, 3, 3, 1};
    CHECK(cfg.resolved_k_grid() == std::vector<Index>{1, 3, 9});

    cfg.n_ps_list = {20, 0, 0};
    CHECK(cfg.resolved_n_ps_list() == std::vector<Index>{0, 20});
}

TEST_CASE("csv writing is canonical and round-trips") {
    std::vector<SweepRecord> records(2);
    records[0] = {"ps_plain", 3, 0, 5, 1.5, 0.25, 0.125, 0.0625, 12.0, 1.5};
    records[1] = {"pca", 7, 2, 4, 3.141592653589793, 0.1, 2.0, 0.5, 0.0, 0.0};

    std::ostringstream out;
    write_csv(records, out);
    const std::string text = out.str();
    CHECK(text.find("variant,k,n_ps,trials,test_mean,test_std,train_mean,"
                     "train_std,iters_mean,iters_std\n") == 0);
    CHECK(text.find("3.141592653589793") != std::string::npos);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.back() == '\n');

    std::istringstream in(text);
    const auto back = read_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[1].test_mean == records[1].test_mean);
    CHECK(back[0].k == 3);
    CHECK(back[0].trials == 5);

    std::ostringstream again;
    write_csv(back, again);
    CHECK(again.str() == text);
}

TEST_CASE("csv reader rejects malformed input") {
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return read_csv(in);
    };
    CHECK_THROWS_AS(parse("wrong,header\n"), IoError);
    CHECK_THROWS_AS(parse("variant,k,n_ps,trials,test_mean,test_std,train_mean,"
                          "train_std,iters_mean,iters_std\nps_plain,1,0,5,1.0\n"),
                    IoError);
    CHECK_THROWS_AS(parse("variant,k,n_ps,trials,test_mean,test_std,train_mean,"
                          "train_std,iters_mean,iters_std\nps_plain,x,0,5,1,0,1,0,1,0\n"),
                    IoError);
    CHECK_THROWS_AS(parse("variant,k,n_ps,trials,test_mean,test_std,train_mean,"
                          "train_std,iters_mean,iters_std\nmystery,1,0,5,1,0,1,0,1,0\n"),
                    IoError);
}

TEST_CASE("config files parse into experiment configs") {
    std::istringstream in(
        "# comment\n"
        "d = 16\n"
        "m = 3\n"
        "n = 8\n"
        "sigma = 0.1\n"
        "gamma_kind = hadamard\n"
        "trials = 7\n"
        "base_seed = 99\n"
        "k_grid = 1:2:9\n"
        "n_ps_list = 0,8\n"
        "variant = ps_weighted\n"
        "alpha = 0.5\n"
        "test_convention = w2_squared\n"
        "test_target = noisy\n"
        "max_iters = 100\n"
        "workers = 2\n");
    const auto cfg = config::parse_stream(in, "test");
    CHECK(cfg.d == 16);
    CHECK(cfg.trials == 7);
    CHECK(cfg.base_seed == 99);
    CHECK(cfg.k_grid == std::vector<Index>{1, 3, 5, 7, 9});
    CHECK(cfg.n_ps_list == std::vector<Index>{0, 8});
    CHECK(cfg.variant == SweepVariant::ps_weighted);
    CHECK(cfg.alpha == 0.5);
    CHECK(cfg.test_convention == TestConvention::w2_squared);
    CHECK(cfg.test_target == TestTarget::noisy);
    CHECK(cfg.gd.max_iters == 100);
    CHECK(cfg.workers == 2);
}

TEST_CASE("config parser error reporting") {
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return config::parse_stream(in, "bad.cfg");
    };
    CHECK_THROWS_WITH_AS(parse("mystery = 1\n"),
                         doctest::Contains("bad.cfg:1"), ConfigError);
    CHECK_THROWS_AS(parse("d = 16\nd = 32\n"), ConfigError);
    CHECK_THROWS_AS(parse("d\n"), ConfigError);
    CHECK_THROWS_AS(parse("d = potato\n"), ConfigError);
    CHECK_THROWS_AS(parse("variant = mystery\n"), ConfigError);
    CHECK_THROWS_AS(parse("k_grid = 5:0:9\n"), ConfigError);
    CHECK_THROWS_AS(parse("k_grid = 9:1:5\n"), ConfigError);
}

TEST_CASE("parse_index_list forms") {
    CHECK(config::parse_index_list("4") == std::vector<Index>{4});
    CHECK(config::parse_index_list("1,3,5") == std::vector<Index>{1, 3, 5});
    CHECK(config::parse_index_list("2:3:11") == std::vector<Index>{2, 5, 8, 11});
    CHECK(config::parse_index_list("2:3:10") == std::vector<Index>{2, 5, 8});
    CHECK_THROWS_AS(config::parse_index_list(""), ConfigError);
    CHECK_THROWS_AS(config::parse_index_list("1,,3"), ConfigError);
}

TEST_CASE("environment override for workers") {
    ExperimentConfig cfg = small_config();
    cfg.workers = 1;

    setenv("WORKERS", "3", 1);
    config::apply_env_overrides(cfg);
    CHECK(cfg.workers == 3);

    setenv("WORKERS", "-2", 1);
    CHECK_THROWS_AS(config::apply_env_overrides(cfg), ConfigError);

    unsetenv("WORKERS");
    cfg.workers = 1;
    config::apply_env_overrides(cfg);
    CHECK(cfg.workers == 1);
}

TEST_CASE("render emits a reparseable fixed point") {
    ExperimentConfig cfg = small_config();
    cfg.variant = SweepVariant::ps_weighted;
    cfg.alpha = 0.75;
    const std::string text = config::render(cfg);

    std::istringstream in(text);
    const auto back = config::parse_stream(in, "render");
    CHECK(back.d == cfg.d);
    CHECK(back.variant == cfg.variant);
    CHECK(back.alpha == cfg.alpha);
    CHECK(back.resolved_k_grid() == cfg.resolved_k_grid());
    CHECK(config::render(back) == text);
}

TEST_CASE("verification suites pass on small instances") {
    ExperimentConfig cfg = small_config();
    cfg.variant = SweepVariant::pca;
    const auto t1 = verify_theorem1(cfg, {8, 9, 12}, 2);
    CHECK(t1.pass);
    CHECK(t1.max_deviation <= 1e-9);
    CHECK_FALSE(t1.lines.empty());

    const auto inv = verify_orthonormal_invariance(17, 10);
    CHECK(inv.pass);

    const auto pseudo = verify_pseudometric(18, 20);
    CHECK(pseudo.pass);
}

#include "lingan/trainers.hpp"

#include "lingan/datagen.hpp"

#include <doctest.h>

#include <cmath>

using namespace lingan;
using namespace lingan::trainers;

namespace {

datagen::Partition pseudo_partition(Index d, Index n, Index n_ps, Index k,
                                    std::uint64_t seed, double sigma = 0.1) {
    Rng model_rng(seed);
    const auto model = datagen::build_model(
        d, std::min<Index>(d, 4), sigma, datagen::GammaKind::random_orthonormal, model_rng);
    Rng draw(seed + 1);
    const auto data = datagen::sample(model, n, draw);
    Rng codes(seed + 2);
    return datagen::make_pseudo_partition(data, n_ps, k, codes);
}

datagen::Partition zero_partition(Index d, Index n, Index n_ps, Index k) {
    datagen::Partition part;
    part.n_ps = n_ps;
    part.n_unsup = n - n_ps;
    part.x_ps = Matrix::Zero(d, n_ps);
    part.z_ps = Matrix::Zero(k, n_ps);
    part.x_unsup = Matrix::Zero(d, part.n_unsup);
    part.x_full = Matrix::Zero(d, n);
    return part;
}

} // namespace

TEST_CASE("pca_fit recovers a dominant direction") {
    // 30 copies of one column: the single component is that column normalized
    // up to sign, with the largest-magnitude entry made positive.
    Vector c(3);
    c << -1.0, 2.0, -2.0;
    Matrix x(3, 30);
    for (Index j = 0; j < 30; ++j) x.col(j) = c;

    const auto res = pca_fit(x, 1);
    const Vector unit = c / c.norm();
    const double dev = std::min((res.components.col(0) - unit).cwiseAbs().maxCoeff(),
                                (res.components.col(0) + unit).cwiseAbs().maxCoeff());
    CHECK(dev < 1e-12);
    Index arg = 0;
    res.components.col(0).cwiseAbs().maxCoeff(&arg);
    CHECK(res.components(arg, 0) > 0.0);
    CHECK(res.eigenvalues[0] == doctest::Approx(c.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("pca_fit orders components and stays orthonormal") {
    Rng rng(70);
    const Matrix x = rng.normal_matrix(6, 40);
    const auto res = pca_fit(x, 6);

    CHECK((res.components.transpose() * res.components - Matrix::Identity(6, 6))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    for (Index i = 1; i < 6; ++i) CHECK(res.eigenvalues[i - 1] >= res.eigenvalues[i]);

    const Matrix cov = x * x.transpose() / 40.0;
    const Matrix recon = res.components * res.eigenvalues.asDiagonal() *
                         res.components.transpose();
    CHECK((recon - cov).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pca_fit residual matches the tail eigenvalue mass") {
    Rng rng(71);
    const Matrix x = rng.normal_matrix(5, 30);
    const auto full = pca_fit(x, 5);

    for (Index k = 1; k <= 5; ++k) {
        const auto res = pca_fit(x, k);
        const Matrix proj = res.components * (res.components.transpose() * x);
        const double residual = (x - proj).squaredNorm();
        const double tail = full.eigenvalues.tail(5 - k).sum() * 30.0;
        CHECK(residual == doctest::Approx(tail).epsilon(1e-9));
    }

    CHECK_THROWS_AS(pca_fit(x, 0), InvalidInput);
    CHECK_THROWS_AS(pca_fit(x, 6), InvalidInput);
}

TEST_CASE("pca_fit is deterministic") {
    Rng rng(72);
    const Matrix x = rng.normal_matrix(7, 25);
    const auto a = pca_fit(x, 4);
    const auto b = pca_fit(x, 4);
    CHECK(a.components == b.components);
    CHECK(a.eigenvalues == b.eigenvalues);
}

TEST_CASE("pca_generator reproduces the sample covariance at full rank") {
    Rng rng(73);
    const Matrix x = rng.normal_matrix(5, 12);
    const Matrix cov = x * x.transpose() / 12.0;

    for (Index k : {5, 8, 20}) {
        const Matrix g = pca_generator(x, k);
        CHECK(g.cols() == k);
        CHECK((g * g.transpose() - cov).cwiseAbs().maxCoeff() < 1e-10);
    }

    // Columns past the data dimension are exactly zero, so widening the
    // generator never changes the induced model.
    const Matrix g8 = pca_generator(x, 8);
    CHECK(g8.rightCols(3).isZero(0.0));
    const Matrix g20 = pca_generator(x, 20);
    CHECK(g20.leftCols(8) == g8);

    CHECK_THROWS_AS(pca_generator(x, 0), InvalidInput);
}

TEST_CASE("pca_generator truncation only drops tail variance") {
    Rng rng(74);
    const Matrix x = rng.normal_matrix(5, 12);
    const auto full = pca_fit(x, 5);
    const Matrix g2 = pca_generator(x, 2);
    const Matrix model = g2 * g2.transpose();
    CHECK(model.trace() ==
          doctest::Approx(full.eigenvalues.head(2).sum()).epsilon(1e-10));
}

TEST_CASE("gd_train is a pure function of its inputs") {
    const auto part = pseudo_partition(8, 10, 4, 6, 80);
    GDOptions opts;
    opts.max_iters = 40;

    Rng i1(81), i2(81);
    const auto a = gd_train(losses::LossSpec::plain(losses::Variant::ps_plain), part, 6,
                            opts, i1);
    const auto b = gd_train(losses::LossSpec::plain(losses::Variant::ps_plain), part, 6,
                            opts, i2);
    CHECK(a.g == b.g);
    CHECK(a.iterations == b.iterations);
    CHECK(a.final_train_loss == b.final_train_loss);
    CHECK(a.stop_reason == b.stop_reason);
}

TEST_CASE("gd_train reduces the loss and reports its final value") {
    const auto part = pseudo_partition(8, 10, 4, 6, 82);
    const auto spec = losses::LossSpec::plain(losses::Variant::ps_plain);
    GDOptions opts;
    opts.record_trace = true;

    Rng init(83);
    const auto res = gd_train(spec, part, 6, opts, init);
    CHECK(res.g.rows() == 8);
    CHECK(res.g.cols() == 6);
    CHECK(res.final_train_loss ==
          doctest::Approx(losses::loss_value(spec, res.g, part)).epsilon(1e-12));
    REQUIRE(res.loss_trace.size() == static_cast<size_t>(res.iterations) + 1);
    CHECK(res.loss_trace.back() < 0.5 * res.loss_trace.front());
}

TEST_CASE("gd_train stops immediately when the gradient starts small") {
    const auto part = zero_partition(4, 6, 2, 3);
    GDOptions opts;
    Rng init(84);
    const auto res =
        gd_train(losses::LossSpec::plain(losses::Variant::ps_plain), part, 3, opts, init);
    CHECK(res.stop_reason == StopReason::grad_small);
    CHECK(res.iterations == 0);
    CHECK(res.final_train_loss == 0.0);
}

TEST_CASE("gd_train reports a stall when steps stop moving") {
    // Zero data with the gradient stop disabled: every candidate step is a
    // no-op, so the stall counter runs out after stall_limit + 1 iterations.
    const auto part = zero_partition(4, 6, 2, 3);
    GDOptions opts;
    opts.grad_stop = 0.0;
    Rng init(85);
    const auto res =
        gd_train(losses::LossSpec::plain(losses::Variant::ps_plain), part, 3, opts, init);
    CHECK(res.stop_reason == StopReason::stalled);
    CHECK(res.iterations == opts.stall_limit + 1);
}

TEST_CASE("gd_train honors the iteration cap") {
    const auto part = pseudo_partition(8, 10, 4, 6, 86);
    GDOptions opts;
    opts.max_iters = 3;
    opts.grad_stop = 0.0;
    Rng init(87);
    const auto res =
        gd_train(losses::LossSpec::plain(losses::Variant::ps_plain), part, 6, opts, init);
    CHECK(res.stop_reason == StopReason::max_iters);
    CHECK(res.iterations == 3);
}

TEST_CASE("require_decrease yields a monotone loss trace") {
    const auto part = pseudo_partition(8, 10, 4, 6, 88);
    GDOptions opts;
    opts.require_decrease = true;
    opts.record_trace = true;
    opts.max_iters = 60;
    Rng init(89);
    const auto res =
        gd_train(losses::LossSpec::plain(losses::Variant::ps_plain), part, 6, opts, init);
    for (size_t i = 1; i < res.loss_trace.size(); ++i)
        CHECK(res.loss_trace[i] <= res.loss_trace[i - 1]);
}

TEST_CASE("gd_train option validation") {
    const auto part = pseudo_partition(8, 10, 4, 6, 90);
    const auto spec = losses::LossSpec::plain(losses::Variant::ps_plain);
    Rng init(91);

    GDOptions bad;
    bad.max_iters = -1;
    CHECK_THROWS_AS(gd_train(spec, part, 6, bad, init), InvalidInput);

    // max_iters = 0 is a valid evaluate-only run.
    bad.max_iters = 0;
    const auto res = gd_train(spec, part, 6, bad, init);
    CHECK(res.iterations == 0);
    CHECK(res.stop_reason == StopReason::max_iters);

    bad = GDOptions{};
    bad.step_multipliers.clear();
    CHECK_THROWS_AS(gd_train(spec, part, 6, bad, init), InvalidInput);

    bad = GDOptions{};
    bad.init_std = -1.0;
    CHECK_THROWS_AS(gd_train(spec, part, 6, bad, init), InvalidInput);

    CHECK_THROWS_AS(gd_train(spec, part, 0, GDOptions{}, init), InvalidInput);
}

TEST_CASE("stop reason names") {
    CHECK(std::string(stop_reason_name(StopReason::max_iters)) == "max_iters");
    CHECK(std::string(stop_reason_name(StopReason::grad_small)) == "grad_small");
    CHECK(std::string(stop_reason_name(StopReason::stalled)) == "stalled");
}

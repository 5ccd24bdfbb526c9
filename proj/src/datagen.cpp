#include "lingan/datagen.hpp"

#include "lingan/linalg.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace lingan::datagen {

metrics::Gaussian DataModel::clean_distribution() const {
    return metrics::Gaussian(Vector::Zero(d), gamma * gamma.transpose());
}

metrics::Gaussian DataModel::noisy_distribution() const {
    Matrix cov = gamma * gamma.transpose();
    cov.diagonal().array() += sigma * sigma;
    return metrics::Gaussian(Vector::Zero(d), std::move(cov));
}

DataModel build_model(Index d, Index m, double sigma, GammaKind kind, Rng& rng) {
    detail::require(d >= 1, "build_model: d must be >= 1");
    detail::require(m >= 1 && m <= d, "build_model: need 1 <= m <= d");
    detail::require(sigma >= 0.0, "build_model: sigma must be >= 0");
    DataModel model;
    model.d = d;
    model.m = m;
    model.sigma = sigma;
    switch (kind) {
    case GammaKind::hadamard:
        model.gamma = linalg::hadamard(d).leftCols(m) / std::sqrt(static_cast<double>(d));
        break;
    case GammaKind::random_orthonormal:
        model.gamma = linalg::random_orthonormal_cols(d, m, rng);
        break;
    }
    return model;
}

Dataset sample(const DataModel& model, Index n, Rng& rng) {
    detail::require(n >= 1, "sample: n must be >= 1");
    detail::require(model.gamma.rows() == model.d && model.gamma.cols() == model.m,
                    "sample: model is not initialized");
    Dataset data;
    data.n = n;
    Matrix z(model.m, n);
    Matrix x(model.d, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < model.m; ++i) z(i, j) = rng.normal();
        x.col(j) = model.gamma * z.col(j);
        for (Index i = 0; i < model.d; ++i) x(i, j) += model.sigma * rng.normal();
    }
    data.x = std::move(x);
    data.z_true = std::move(z);
    return data;
}

Partition make_pseudo_partition(const Dataset& data, Index n_ps, Index k, Rng& rng) {
    detail::require(data.x.cols() == data.n, "make_pseudo_partition: inconsistent dataset");
    detail::require(n_ps >= 0 && n_ps <= data.n,
                    "make_pseudo_partition: need 0 <= n_ps <= n");
    detail::require(k >= 1, "make_pseudo_partition: k must be >= 1");
    Partition part;
    part.n_ps = n_ps;
    part.n_unsup = data.n - n_ps;
    part.x_full = data.x;
    part.x_ps = data.x.leftCols(n_ps);
    part.x_unsup = data.x.rightCols(part.n_unsup);
    part.z_ps = rng.normal_matrix(k, n_ps);
    return part;
}

Partition make_supervised_partition(const Dataset& data, Index n_sup,
                                    const metrics::CoordinateSet& subsample) {
    detail::require(data.x.cols() == data.n, "make_supervised_partition: inconsistent dataset");
    detail::require(n_sup >= 0 && n_sup <= data.n,
                    "make_supervised_partition: need 0 <= n_sup <= n");
    if (!data.z_true)
        throw InvalidInput("make_supervised_partition: dataset carries no true latents");
    detail::require(subsample.size() >= 1,
                    "make_supervised_partition: subsample must be non-empty");
    subsample.check_bounds(data.z_true->rows(), "make_supervised_partition");

    Partition part;
    part.n_ps = n_sup;
    part.n_unsup = data.n - n_sup;
    part.x_full = data.x;
    part.x_ps = data.x.leftCols(n_sup);
    part.x_unsup = data.x.rightCols(part.n_unsup);
    const Index k = subsample.size();
    part.z_ps.resize(k, n_sup);
    for (Index i = 0; i < k; ++i)
        part.z_ps.row(i) = data.z_true->row(subsample.indices()[static_cast<std::size_t>(i)])
                               .head(n_sup);
    return part;
}

} // namespace lingan::datagen

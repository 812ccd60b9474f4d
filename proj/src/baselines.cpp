// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include "avf/baselines.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace avf {

namespace {

using EigMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;
using MapMat = Eigen::Map<EigMat>;
using ConstMapMat = Eigen::Map<const EigMat>;

ComplexMatrix from_eigen(const EigMat& m) {
    ComplexMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    MapMat(out.data(), m.rows(), m.cols()) = m;
    return out;
}

} // namespace

ComplexMatrix ls_estimate(const ComplexMatrix& h_hat) { return h_hat; }

ComplexMatrix LmmseModel::covariance() const {
    const int64_t n = dim();
    ConstMapMat u(eigvecs.data(), n, n);
    Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(eigvals.data(),
                                                            static_cast<Eigen::Index>(n));
    EigMat c = u * lam.asDiagonal() * u.adjoint();
    return from_eigen(c);
}

LmmseModel fit_lmmse(const std::vector<ComplexMatrix>& training) {
    if (training.empty()) throw ConfigError("fit_lmmse: empty training set");
    const int n_rx = training.front().rows();
    const int n_tx = training.front().cols();
    const int64_t n = static_cast<int64_t>(n_rx) * n_tx;

    // Accumulate C = (1/M)·Σ v·vᴴ in chunks so the work runs as matrix-matrix
    // products instead of M rank-1 updates.
    const int64_t chunk = 512;
    EigMat c = EigMat::Zero(n, n);
    EigMat block(n, chunk);
    int64_t filled = 0;
    for (const ComplexMatrix& h : training) {
        if (h.rows() != n_rx || h.cols() != n_tx)
            throw ShapeError("fit_lmmse: inconsistent sample dims");
        block.col(filled++) = Eigen::Map<const Eigen::VectorXcd>(h.data(),
                                                                 static_cast<Eigen::Index>(n));
        if (filled == chunk) {
            c.noalias() += block * block.adjoint();
            filled = 0;
        }
    }
    if (filled > 0) c.noalias() += block.leftCols(filled) * block.leftCols(filled).adjoint();
    c /= static_cast<double>(training.size());
    c = ((c + c.adjoint()) / 2.0).eval();

    Eigen::SelfAdjointEigenSolver<EigMat> es(c);
    if (es.info() != Eigen::Success) throw NumericError("fit_lmmse: eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    const double lam_max = std::max(lam.maxCoeff(), 0.0);
    const double tol = 1e-10 * std::max(lam_max, 1.0);
    if (lam.minCoeff() < -tol)
        throw NumericError("fit_lmmse: covariance not PSD after symmetrization (min eigenvalue " +
                           std::to_string(lam.minCoeff()) + ")");

    LmmseModel model;
    model.n_rx = n_rx;
    model.n_tx = n_tx;
    model.source = LmmseModel::Source::Sample;
    model.eigvecs = from_eigen(es.eigenvectors());
    model.eigvals.resize(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i)
        model.eigvals[static_cast<size_t>(i)] = std::max(lam(static_cast<Eigen::Index>(i)), 0.0);
    return model;
}

LmmseModel analytic_identity_lmmse(int n_rx, int n_tx) {
    if (n_rx < 1 || n_tx < 1) throw ConfigError("analytic_identity_lmmse: dims must be >= 1");
    LmmseModel model;
    model.n_rx = n_rx;
    model.n_tx = n_tx;
    model.source = LmmseModel::Source::AnalyticIdentity;
    model.eigvecs = ComplexMatrix::identity(static_cast<int>(model.dim()));
    model.eigvals.assign(static_cast<size_t>(model.dim()), 1.0);
    return model;
}

LmmseFilter make_lmmse_filter(const LmmseModel& model, double noise_variance) {
    if (!(noise_variance >= 0.0))
        throw ConfigError("make_lmmse_filter: noise variance must be >= 0");
    const int64_t n = model.dim();
    if (model.eigvecs.rows() != n || model.eigvecs.cols() != n ||
        static_cast<int64_t>(model.eigvals.size()) != n)
        throw ShapeError("make_lmmse_filter: inconsistent model");

    ConstMapMat u(model.eigvecs.data(), n, n);
    Eigen::VectorXd gain(static_cast<Eigen::Index>(n));
    for (int64_t i = 0; i < n; ++i) {
        const double lam = model.eigvals[static_cast<size_t>(i)];
        const double denom = lam + noise_variance;
        gain(static_cast<Eigen::Index>(i)) = denom > 0.0 ? lam / denom : 0.0;
    }
    LmmseFilter f;
    f.n_rx = model.n_rx;
    f.n_tx = model.n_tx;
    EigMat w = u * gain.asDiagonal() * u.adjoint();
    f.w = from_eigen(w);
    return f;
}

ComplexMatrix apply_lmmse_filter(const LmmseFilter& filter, const ComplexMatrix& h_hat) {
    if (h_hat.rows() != filter.n_rx || h_hat.cols() != filter.n_tx)
        throw ShapeError("apply_lmmse_filter: observation dims mismatch");
    const int64_t n = static_cast<int64_t>(filter.n_rx) * filter.n_tx;
    ConstMapMat w(filter.w.data(), n, n);
    Eigen::Map<const Eigen::VectorXcd> v(h_hat.data(), static_cast<Eigen::Index>(n));
    ComplexMatrix out(filter.n_rx, filter.n_tx);
    Eigen::Map<Eigen::VectorXcd>(out.data(), static_cast<Eigen::Index>(n)) = w * v;
    return out;
}

ComplexMatrix apply_lmmse(const LmmseModel& model, const ComplexMatrix& h_hat,
                          double noise_variance) {
    return apply_lmmse_filter(make_lmmse_filter(model, noise_variance), h_hat);
}

} // namespace avf

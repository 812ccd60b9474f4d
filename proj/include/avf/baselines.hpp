// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "avf/complexmat.hpp"

namespace avf {

/// LS estimate: identity on the decorrelated observation.
ComplexMatrix ls_estimate(const ComplexMatrix& h_hat);

/// Global LMMSE model over vec(H) (row-major flatten), N = Nrx·Ntx. Stored
/// as the eigendecomposition of the Hermitian covariance C = U·diag(λ)·Uᴴ so
/// filters for any noise variance are cheap to form and exactly PSD.
struct LmmseModel {
    enum class Source { Sample, AnalyticIdentity };

    int n_rx = 0;
    int n_tx = 0;
    Source source = Source::Sample;
    ComplexMatrix eigvecs;       // N×N unitary U
    std::vector<double> eigvals; // λ ≥ 0, ascending

    int64_t dim() const { return static_cast<int64_t>(n_rx) * n_tx; }
    /// Reconstructed covariance U·diag(λ)·Uᴴ.
    ComplexMatrix covariance() const;
};

/// Sample-covariance fit: C = (1/M)·Σ vec(H)vec(H)ᴴ (zero-mean model),
/// Hermitian-symmetrized, eigenvalues clipped at 0. Throws NumericError if
/// the symmetrized covariance is materially non-PSD (eigenvalue < −1e-10
/// relative to the largest).
LmmseModel fit_lmmse(const std::vector<ComplexMatrix>& training);

/// Analytic model for i.i.d. unit-variance Gaussian channels: C = I, under
/// which the filter is the per-entry shrinkage ĥ/(1+σ²).
LmmseModel analytic_identity_lmmse(int n_rx, int n_tx);

/// Precomputed Wiener filter W = C(C+σ²I)^{-1} for one noise variance.
struct LmmseFilter {
    int n_rx = 0;
    int n_tx = 0;
    ComplexMatrix w; // N×N
};

LmmseFilter make_lmmse_filter(const LmmseModel& model, double noise_variance);
ComplexMatrix apply_lmmse_filter(const LmmseFilter& filter, const ComplexMatrix& h_hat);

/// vec(H_est) = C(C+σ²I)^{-1}·vec(Ĥ). Convenience wrapper; for many
/// applications at one σ², build the filter once instead.
ComplexMatrix apply_lmmse(const LmmseModel& model, const ComplexMatrix& h_hat,
                          double noise_variance);

} // namespace avf

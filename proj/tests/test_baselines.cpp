// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "avf/baselines.hpp"
#include "avf/channel.hpp"
#include "avf/metrics.hpp"
#include "avf/signal.hpp"
#include "oracles.hpp"

using namespace avf;

namespace {

/// Noisy observations + truths for an NMSE measurement at one σ².
struct EvalSet {
    std::vector<ComplexMatrix> truths;
    std::vector<ComplexMatrix> observations;
};

EvalSet make_eval_set(const std::vector<ComplexMatrix>& channels, double noise_variance,
                      uint64_t seed) {
    SnrSpec snr;
    snr.snr_linear = noise_variance > 0.0 ? 1.0 / noise_variance : 0.0;
    snr.noise_variance = noise_variance;
    EvalSet set;
    CounterRng root(seed);
    for (size_t i = 0; i < channels.size(); ++i) {
        CounterRng rng = root.derive(i);
        set.truths.push_back(channels[i]);
        set.observations.push_back(noisy_observation(channels[i], snr, rng));
    }
    return set;
}

double filtered_nmse(const LmmseModel& model, const EvalSet& set, double noise_variance) {
    LmmseFilter f = make_lmmse_filter(model, noise_variance);
    std::vector<ComplexMatrix> est;
    est.reserve(set.observations.size());
    for (const ComplexMatrix& o : set.observations) est.push_back(apply_lmmse_filter(f, o));
    return nmse_db(est, set.truths);
}

double ls_nmse(const EvalSet& set) {
    std::vector<ComplexMatrix> est;
    est.reserve(set.observations.size());
    for (const ComplexMatrix& o : set.observations) est.push_back(ls_estimate(o));
    return nmse_db(est, set.truths);
}

} // namespace

TEST_CASE("ls estimate is the observation itself") {
    CounterRng rng(110);
    ComplexMatrix h = gen_gaussian(4, 6, rng);
    ComplexMatrix est = ls_estimate(h);
    for (int64_t i = 0; i < h.size(); ++i) CHECK(est.data()[i] == h.data()[i]);
}

TEST_CASE("identity model shrinks entries by 1/(1+noise)") {
    LmmseModel model = analytic_identity_lmmse(3, 4);
    CHECK(model.dim() == 12);
    LmmseFilter f = make_lmmse_filter(model, 0.1);
    ComplexMatrix want = scale(ComplexMatrix::identity(12), 1.0 / 1.1);
    CHECK(oracle::max_abs_diff(f.w, want) < 1e-12);

    CounterRng rng(111);
    ComplexMatrix h_hat = gen_gaussian(3, 4, rng);
    ComplexMatrix est = apply_lmmse_filter(f, h_hat);
    CHECK(oracle::max_abs_diff(est, scale(h_hat, 1.0 / 1.1)) < 1e-12);
}

TEST_CASE("identity model hits its closed-form nmse at snr 10") {
    // For C = I and σ² = 0.1 the Wiener filter error is σ²/(1+σ²), i.e.
    // 10·log10(0.1/1.1) ≈ −10.414 dB.
    Dataset ds = make_gaussian_dataset(8, 8, 400, 112, /*normalize=*/false);
    EvalSet set = make_eval_set(ds.samples, 0.1, 113);
    LmmseModel model = analytic_identity_lmmse(8, 8);
    const double got = filtered_nmse(model, set, 0.1);
    CHECK(std::abs(got - (-10.4139)) < 0.15);
}

TEST_CASE("zero noise variance degenerates to a pass-through") {
    LmmseModel model = analytic_identity_lmmse(4, 4);
    CounterRng rng(114);
    ComplexMatrix h_hat = gen_gaussian(4, 4, rng);
    ComplexMatrix est = apply_lmmse(model, h_hat, 0.0);
    CHECK(oracle::max_abs_diff(est, h_hat) < 1e-12);
}

TEST_CASE("sample covariance on gaussian data approaches the identity model") {
    Dataset fit = make_gaussian_dataset(8, 8, 4000, 115, /*normalize=*/false);
    LmmseModel sample = fit_lmmse(fit.samples);
    CHECK(sample.source == LmmseModel::Source::Sample);

    Dataset ev = make_gaussian_dataset(8, 8, 400, 116, /*normalize=*/false);
    EvalSet set = make_eval_set(ev.samples, 0.1, 117);
    const double got_sample = filtered_nmse(sample, set, 0.1);
    const double got_analytic = filtered_nmse(analytic_identity_lmmse(8, 8), set, 0.1);
    CHECK(std::abs(got_sample - got_analytic) < 0.1);

    // The reconstructed covariance sits near I entry-wise at this M.
    ComplexMatrix c = sample.covariance();
    CHECK(oracle::max_abs_diff(c, ComplexMatrix::identity(64)) < 0.15);
}

TEST_CASE("lmmse dominates ls on correlated channels") {
    ClusterConfig cfg;
    cfg.n_rx = 8;
    cfg.n_tx = 16;
    Dataset fit = make_clustered_dataset(cfg, 2000, 118);
    LmmseModel model = fit_lmmse(fit.samples);

    Dataset ev = make_clustered_dataset(cfg, 300, 119);
    for (double noise_variance : {10.0, 1.0, 0.1, 0.01}) {
        EvalSet set = make_eval_set(ev.samples, noise_variance, 120);
        const double lmmse = filtered_nmse(model, set, noise_variance);
        const double ls = ls_nmse(set);
        CHECK(lmmse < ls);
    }
}

TEST_CASE("wiener filtering never amplifies the observation") {
    ClusterConfig cfg;
    cfg.n_rx = 4;
    cfg.n_tx = 8;
    Dataset fit = make_clustered_dataset(cfg, 600, 121);
    LmmseModel model = fit_lmmse(fit.samples);
    LmmseFilter f = make_lmmse_filter(model, 0.5);
    CounterRng rng(122);
    for (int i = 0; i < 20; ++i) {
        ComplexMatrix x = gen_gaussian(4, 8, rng);
        ComplexMatrix y = apply_lmmse_filter(f, x);
        CHECK(fro_norm2(y) <= fro_norm2(x) * (1.0 + 1e-12));
    }
}

TEST_CASE("rank-deficient fits stay psd with clipped spectra") {
    // Fewer samples than dimensions: the sample covariance is singular and
    // roundoff pushes eigenvalues slightly negative; they must come out
    // clipped at zero, ascending.
    Dataset fit = make_gaussian_dataset(4, 4, 5, 123, /*normalize=*/false);
    LmmseModel model = fit_lmmse(fit.samples);
    REQUIRE(model.eigvals.size() == 16);
    int positive = 0;
    for (size_t i = 0; i < model.eigvals.size(); ++i) {
        CHECK(model.eigvals[i] >= 0.0);
        if (i > 0) CHECK(model.eigvals[i] >= model.eigvals[i - 1]);
        if (model.eigvals[i] > 1e-12) ++positive;
    }
    CHECK(positive <= 5);

    // A singular model still yields a usable (non-amplifying) filter.
    LmmseFilter f = make_lmmse_filter(model, 0.1);
    CounterRng rng(124);
    ComplexMatrix x = gen_gaussian(4, 4, rng);
    ComplexMatrix y = apply_lmmse_filter(f, x);
    CHECK(fro_norm2(y) <= fro_norm2(x) * (1.0 + 1e-12));
}

TEST_CASE("baseline argument validation") {
    CHECK_THROWS_AS(fit_lmmse({}), ConfigError);
    CHECK_THROWS_AS(analytic_identity_lmmse(0, 4), ConfigError);
    LmmseModel model = analytic_identity_lmmse(2, 2);
    CHECK_THROWS_AS(make_lmmse_filter(model, -0.5), ConfigError);

    std::vector<ComplexMatrix> bad = {ComplexMatrix(2, 2), ComplexMatrix(2, 3)};
    CHECK_THROWS_AS(fit_lmmse(bad), ShapeError);

    LmmseFilter f = make_lmmse_filter(model, 0.1);
    CHECK_THROWS_AS(apply_lmmse_filter(f, ComplexMatrix(3, 3)), ShapeError);
}

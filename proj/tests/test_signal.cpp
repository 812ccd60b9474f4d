// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "avf/channel.hpp"
#include "avf/signal.hpp"
#include "oracles.hpp"

using namespace avf;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

ComplexMatrix random_channel(int rows, int cols, uint64_t seed) {
    CounterRng rng(seed);
    return gen_gaussian(rows, cols, rng);
}
} // namespace

TEST_CASE("pilot matrices are unitary rows") {
    for (int n : {1, 4, 16, 64}) {
        PilotMatrix pi = PilotMatrix::identity(n);
        PilotMatrix pd = PilotMatrix::dft(n);
        CHECK_NOTHROW(pi.validate());
        CHECK_NOTHROW(pd.validate());
        ComplexMatrix g = matmul(pd.p, adjoint(pd.p));
        CHECK(max_abs(sub(g, ComplexMatrix::identity(n))) < 1e-10);
    }

    PilotMatrix bad = PilotMatrix::identity(4);
    bad.p(0, 0) = 2.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    PilotMatrix tall; // more rows than columns: an under-determined pilot
    tall.p = ComplexMatrix(4, 2);
    CHECK_THROWS_AS(tall.validate(), ConfigError);
}

TEST_CASE("snr bookkeeping") {
    SnrSpec s10 = SnrSpec::from_db(10.0);
    CHECK(s10.snr_linear == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(s10.noise_variance == doctest::Approx(0.1).epsilon(1e-12));

    SnrSpec s0 = SnrSpec::from_db(0.0);
    CHECK(s0.snr_linear == 1.0);
    CHECK(s0.noise_variance == 1.0);

    SnrSpec sm10 = SnrSpec::from_db(-10.0);
    CHECK(sm10.noise_variance == doctest::Approx(10.0).epsilon(1e-12));

    SnrSpec sinf = SnrSpec::from_db(kInf);
    CHECK(std::isinf(sinf.snr_linear));
    CHECK(sinf.noise_variance == 0.0);
}

TEST_CASE("noise-free transmit is exact") {
    ComplexMatrix h = random_channel(4, 8, 50);
    CounterRng rng(51);
    ComplexMatrix y = transmit(h, PilotMatrix::identity(8), SnrSpec::from_db(kInf), rng);
    CHECK(oracle::max_abs_diff(y, h) == 0.0);

    // A noise-free DFT transmit then decorrelate recovers H.
    ComplexMatrix y2 = transmit(h, PilotMatrix::dft(8), SnrSpec::from_db(kInf), rng);
    ComplexMatrix est = ls_decorrelate(y2, PilotMatrix::dft(8));
    CHECK(oracle::max_abs_diff(est, h) < 1e-10);
}

TEST_CASE("transmit validates shapes") {
    ComplexMatrix h = random_channel(4, 8, 52);
    CounterRng rng(53);
    CHECK_THROWS_AS(transmit(h, PilotMatrix::identity(4), SnrSpec::from_db(10.0), rng),
                    ShapeError);
}

TEST_CASE("observation noise hits the requested variance") {
    const SnrSpec snr = SnrSpec::from_db(3.0); // σ² ≈ 0.501
    ComplexMatrix zero(64, 64);
    CounterRng rng(54);
    double e2 = 0.0, e_re = 0.0;
    const int reps = 40;
    for (int r = 0; r < reps; ++r) {
        ComplexMatrix obs = noisy_observation(zero, snr, rng);
        e2 += fro_norm2(obs);
        for (int64_t i = 0; i < obs.size(); ++i) e_re += obs.data()[i].real();
    }
    const double n = static_cast<double>(reps) * 64 * 64;
    CHECK(e2 / n == doctest::Approx(snr.noise_variance).epsilon(0.02));
    CHECK(std::abs(e_re / n) < 0.01);
}

TEST_CASE("decorrelated noise stays white under a DFT pilot") {
    const SnrSpec snr = SnrSpec::from_db(0.0);
    ComplexMatrix zero(16, 64);
    PilotMatrix pilot = PilotMatrix::dft(64);
    CounterRng rng(55);
    double e2 = 0.0;
    const int reps = 60;
    for (int r = 0; r < reps; ++r) {
        ComplexMatrix y = transmit(zero, pilot, snr, rng);
        e2 += fro_norm2(ls_decorrelate(y, pilot));
    }
    const double n = static_cast<double>(reps) * 16 * 64;
    CHECK(e2 / n == doctest::Approx(snr.noise_variance).epsilon(0.03));
}

TEST_CASE("noisy_observation with zero variance is the identity") {
    ComplexMatrix h = random_channel(3, 5, 56);
    CounterRng rng(57);
    ComplexMatrix obs = noisy_observation(h, SnrSpec::from_db(kInf), rng);
    for (int64_t i = 0; i < h.size(); ++i) CHECK(obs.data()[i] == h.data()[i]);
}

TEST_CASE("deterministic observation scales by 1 + 1/sqrt(snr)") {
    ComplexMatrix h = random_channel(3, 5, 58);
    SnrSpec snr;
    snr.snr_db = 10.0 * std::log10(4.0);
    snr.snr_linear = 4.0;
    snr.noise_variance = 0.25;
    ComplexMatrix obs = deterministic_observation(h, snr);
    CHECK(oracle::max_abs_diff(obs, scale(h, 1.5)) < 1e-14);
    ComplexMatrix clean = deterministic_observation(h, SnrSpec::from_db(kInf));
    CHECK(oracle::max_abs_diff(clean, h) == 0.0);
}

TEST_CASE("dft matrix matches the textbook transform") {
    for (int n : {1, 2, 5, 16, 64}) {
        const ComplexMatrix& f = dft_matrix(n);
        CHECK(max_abs(sub(matmul(f, adjoint(f)), ComplexMatrix::identity(n))) < 1e-12);
        for (int k = 0; k < n; ++k)
            for (int m = 0; m < n; ++m) CHECK(f(k, m) == f(m, k));

        CounterRng rng(static_cast<uint64_t>(600 + n));
        std::vector<cplx> x(static_cast<size_t>(n));
        ComplexMatrix xc(n, 1);
        for (int i = 0; i < n; ++i) {
            x[static_cast<size_t>(i)] = rng.cnormal(1.0);
            xc(i, 0) = x[static_cast<size_t>(i)];
        }
        std::vector<cplx> want = oracle::dft_naive(x);
        ComplexMatrix got = matmul(f, xc);
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(got(i, 0) - want[static_cast<size_t>(i)]) < 1e-12);
    }
}

TEST_CASE("angular transform is unitary") {
    ComplexMatrix h = random_channel(16, 64, 59);
    ComplexMatrix ang = to_angular(h);
    CHECK(std::abs(fro_norm2(ang) - fro_norm2(h)) < 1e-10 * fro_norm2(h));
    ComplexMatrix back = from_angular(ang);
    CHECK(oracle::max_abs_diff(back, h) < 1e-10);
}

TEST_CASE("on-grid steering outer product maps to one angular coefficient") {
    const int n_rx = 16, n_tx = 64;
    for (auto [p, q] : {std::pair{0, 0}, std::pair{3, 10}, std::pair{-5, 31}, std::pair{7, -20}}) {
        ComplexMatrix h = outer(steering_vector(n_rx, std::asin(2.0 * p / n_rx)),
                                steering_vector(n_tx, std::asin(2.0 * q / n_tx)));
        ComplexMatrix ang = to_angular(h);
        const int pr = (p % n_rx + n_rx) % n_rx;
        const int qc = (q % n_tx + n_tx) % n_tx;
        const double peak = std::sqrt(static_cast<double>(n_rx) * n_tx);
        CHECK(std::abs(std::abs(ang(pr, qc)) - peak) < 1e-9);
        for (int r = 0; r < n_rx; ++r)
            for (int c = 0; c < n_tx; ++c)
                if (r != pr || c != qc) CHECK(std::abs(ang(r, c)) < 1e-9);
    }
}

TEST_CASE("plane packing round-trips") {
    ComplexMatrix h = random_channel(5, 7, 60);
    Tensor t = pack_planes(h);
    REQUIRE(t.shape() == std::vector<int>{2, 5, 7});
    CHECK(t[0] == h(0, 0).real());
    CHECK(t[5 * 7] == h(0, 0).imag());
    ComplexMatrix back = unpack_planes(t);
    for (int64_t i = 0; i < h.size(); ++i) CHECK(back.data()[i] == h.data()[i]);
    CHECK_THROWS_AS(unpack_planes(Tensor::zeros({3, 2, 2})), ShapeError);
}

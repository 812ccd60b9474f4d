// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "avf/channel.hpp"
#include "oracles.hpp"

using namespace avf;

namespace {

cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

std::string file_bytes(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

bool bitwise_equal(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.same_shape(b)) return false;
    for (int64_t i = 0; i < a.size(); ++i)
        if (a.data()[i] != b.data()[i]) return false;
    return true;
}

} // namespace

TEST_CASE("steering vector basics") {
    std::vector<cplx> a0 = steering_vector(8, 0.0);
    for (const cplx& v : a0) CHECK(std::abs(v - cplx{1.0, 0.0}) == 0.0);

    for (double ang : {-1.2, -0.3, 0.0, 0.7, 1.4}) {
        std::vector<cplx> a = steering_vector(16, ang);
        CHECK(std::abs(inner(a, a).real() - 16.0) < 1e-12);
        for (const cplx& v : a) CHECK(std::abs(std::abs(v) - 1.0) < 1e-14);
    }
}

TEST_CASE("steering vectors on the DFT grid are orthogonal") {
    const int n = 16;
    std::vector<std::vector<cplx>> grid;
    for (int p = -n / 2 + 1; p <= n / 2 - 1; ++p)
        grid.push_back(steering_vector(n, std::asin(2.0 * p / n)));
    for (size_t i = 0; i < grid.size(); ++i)
        for (size_t j = 0; j < grid.size(); ++j) {
            const double want = (i == j) ? static_cast<double>(n) : 0.0;
            CHECK(std::abs(inner(grid[i], grid[j]) - want) < 1e-10);
        }
}

TEST_CASE("outer product structure") {
    std::vector<cplx> a = {{1.0, 1.0}, {0.0, -2.0}};
    std::vector<cplx> b = {{2.0, 0.0}, {0.0, 1.0}, {1.0, -1.0}};
    ComplexMatrix m = outer(a, b);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(m(i, j) - a[size_t(i)] * std::conj(b[size_t(j)])) == 0.0);

    // Steering outer products carry exactly Nrx·Ntx energy.
    ComplexMatrix h = outer(steering_vector(16, 0.4), steering_vector(64, -0.2));
    CHECK(std::abs(fro_norm2(h) - 16.0 * 64.0) < 1e-8);
}

TEST_CASE("clustered_from_paths composes weighted outer products") {
    std::vector<double> rx = {0.3};
    std::vector<double> tx = {-0.5};
    std::vector<cplx> g = {{0.0, 2.0}};
    ComplexMatrix h = clustered_from_paths(8, 4, rx, tx, g);
    ComplexMatrix want = scale(outer(steering_vector(8, 0.3), steering_vector(4, -0.5)), g[0]);
    CHECK(oracle::max_abs_diff(h, want) < 1e-14);

    CHECK_THROWS_AS(clustered_from_paths(8, 4, rx, tx, {}), ConfigError);
}

TEST_CASE("clustered channel mean energy is Nrx*Ntx") {
    ClusterConfig cfg;
    cfg.n_rx = 16;
    cfg.n_tx = 64;
    CounterRng rng(404);
    double total = 0.0;
    const int n_samples = 2000;
    for (int i = 0; i < n_samples; ++i) {
        CounterRng r = rng.derive(static_cast<uint64_t>(i));
        total += fro_norm2(gen_clustered(cfg, r));
    }
    const double ratio = total / (n_samples * 16.0 * 64.0);
    CHECK(ratio > 0.98);
    CHECK(ratio < 1.02);
}

TEST_CASE("gaussian channel moments") {
    CounterRng rng(405);
    double e2 = 0.0, mean_re = 0.0;
    const int n_samples = 60;
    const int64_t entries = 16 * 64;
    for (int i = 0; i < n_samples; ++i) {
        CounterRng r = rng.derive(static_cast<uint64_t>(i));
        ComplexMatrix h = gen_gaussian(16, 64, r);
        e2 += fro_norm2(h);
        for (int64_t k = 0; k < entries; ++k) mean_re += h.data()[k].real();
    }
    CHECK(e2 / (n_samples * entries) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(mean_re / (n_samples * entries)) < 0.02);
}

TEST_CASE("dataset normalization pins the empirical mean energy") {
    ClusterConfig cfg;
    cfg.n_rx = 8;
    cfg.n_tx = 8;
    Dataset ds = make_clustered_dataset(cfg, 128, 7);
    double total = 0.0;
    for (const ComplexMatrix& h : ds.samples) total += fro_norm2(h);
    const double ratio = total / (128.0 * 8.0 * 8.0);
    CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ratio > 0.99);
    CHECK(ratio < 1.01);
}

TEST_CASE("datasets are seed-deterministic and per-sample stable") {
    ClusterConfig cfg;
    cfg.n_rx = 4;
    cfg.n_tx = 6;
    Dataset a = make_clustered_dataset(cfg, 10, 99);
    Dataset b = make_clustered_dataset(cfg, 10, 99);
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) CHECK(bitwise_equal(a.samples[i], b.samples[i]));

    Dataset c = make_clustered_dataset(cfg, 10, 100);
    CHECK_FALSE(bitwise_equal(a.samples[0], c.samples[0]));

    // Without global normalization sample i does not depend on the count.
    Dataset small = make_clustered_dataset(cfg, 3, 99, /*normalize=*/false);
    Dataset large = make_clustered_dataset(cfg, 10, 99, /*normalize=*/false);
    for (size_t i = 0; i < small.samples.size(); ++i)
        CHECK(bitwise_equal(small.samples[i], large.samples[i]));
}

TEST_CASE("dataset file round-trip is byte-exact") {
    ClusterConfig cfg;
    cfg.n_rx = 4;
    cfg.n_tx = 6;
    Dataset ds = make_clustered_dataset(cfg, 5, 1234);
    const std::string p1 = "chds_rt_a.bin";
    const std::string p2 = "chds_rt_b.bin";
    save_dataset(ds, p1);
    Dataset back = load_dataset(p1);
    CHECK(back.n_rx == ds.n_rx);
    CHECK(back.n_tx == ds.n_tx);
    CHECK(back.seed == ds.seed);
    REQUIRE(back.samples.size() == ds.samples.size());
    for (size_t i = 0; i < ds.samples.size(); ++i)
        CHECK(bitwise_equal(ds.samples[i], back.samples[i]));

    save_dataset(back, p2);
    CHECK(file_bytes(p1) == file_bytes(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("empty dataset round-trips") {
    Dataset ds;
    ds.n_rx = 2;
    ds.n_tx = 3;
    ds.seed = 1;
    const std::string p = "chds_empty.bin";
    save_dataset(ds, p);
    Dataset back = load_dataset(p);
    CHECK(back.samples.empty());
    CHECK(back.n_rx == 2);
    CHECK(back.n_tx == 3);
    std::remove(p.c_str());
}

TEST_CASE("dataset loader rejects malformed files") {
    const std::string p = "chds_bad.bin";
    {
        std::ofstream os(p, std::ios::binary);
        os << "NOPE";
    }
    CHECK_THROWS_AS(load_dataset(p), IoError);

    ClusterConfig cfg;
    cfg.n_rx = 4;
    cfg.n_tx = 4;
    Dataset ds = make_clustered_dataset(cfg, 2, 5);
    save_dataset(ds, p);
    std::string bytes = file_bytes(p);
    {
        std::ofstream os(p, std::ios::binary);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 9));
    }
    CHECK_THROWS_AS(load_dataset(p), IoError);
    CHECK_THROWS_AS(load_dataset("does_not_exist_chds.bin"), IoError);
    std::remove(p.c_str());
}

TEST_CASE("cluster config validation") {
    ClusterConfig cfg;
    cfg.n_paths = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ClusterConfig{};
    cfg.center_range_deg = 90.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ClusterConfig{};
    cfg.angle_spread_deg = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_NOTHROW(ClusterConfig{}.validate());
}

// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include "avf/channel.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

namespace avf {

namespace {
constexpr double kPi = std::numbers::pi;

double deg2rad(double d) { return d * kPi / 180.0; }

/// Snap sinθ to the DFT grid sinθ = 2p/n (p integer), staying inside (−1, 1).
double snap_to_grid(double angle, int n) {
    double s = std::sin(angle);
    long p = std::lround(s * n / 2.0);
    long lim = n / 2 - 1;
    if (p > lim) p = lim;
    if (p < -lim) p = -lim;
    return std::asin(2.0 * static_cast<double>(p) / n);
}
} // namespace

void ClusterConfig::validate() const {
    if (n_paths < 1) throw ConfigError("ClusterConfig: n_paths must be >= 1");
    if (n_rx < 1 || n_tx < 1) throw ConfigError("ClusterConfig: antenna counts must be >= 1");
    if (angle_spread_deg < 0.0) throw ConfigError("ClusterConfig: angle_spread_deg must be >= 0");
    if (center_range_deg < 0.0 || center_range_deg >= 90.0)
        throw ConfigError("ClusterConfig: center_range_deg must be in [0, 90)");
}

std::vector<cplx> steering_vector(int n_antennas, double angle) {
    std::vector<cplx> a(static_cast<size_t>(n_antennas));
    const double w = kPi * std::sin(angle);
    for (int m = 0; m < n_antennas; ++m) a[static_cast<size_t>(m)] = std::polar(1.0, w * m);
    return a;
}

ComplexMatrix outer(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    ComplexMatrix m(static_cast<int>(a.size()), static_cast<int>(b.size()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = a[i] * std::conj(b[j]);
    return m;
}

ComplexMatrix clustered_from_paths(int n_rx, int n_tx, const std::vector<double>& rx_angles,
                                   const std::vector<double>& tx_angles,
                                   const std::vector<cplx>& gains) {
    if (rx_angles.size() != gains.size() || tx_angles.size() != gains.size())
        throw ConfigError("clustered_from_paths: angle/gain lists must have equal length");
    ComplexMatrix h(n_rx, n_tx);
    for (size_t l = 0; l < gains.size(); ++l) {
        std::vector<cplx> ar = steering_vector(n_rx, rx_angles[l]);
        std::vector<cplx> at = steering_vector(n_tx, tx_angles[l]);
        axpy_inplace(gains[l], outer(ar, at), h);
    }
    return h;
}

ComplexMatrix gen_clustered(const ClusterConfig& cfg, CounterRng& rng) {
    cfg.validate();
    const double center_rx = (2.0 * rng.uniform() - 1.0) * deg2rad(cfg.center_range_deg);
    const double center_tx = (2.0 * rng.uniform() - 1.0) * deg2rad(cfg.center_range_deg);
    const double half_spread = deg2rad(cfg.angle_spread_deg) / 2.0;

    std::vector<double> rx_angles, tx_angles;
    std::vector<cplx> gains;
    rx_angles.reserve(static_cast<size_t>(cfg.n_paths));
    tx_angles.reserve(static_cast<size_t>(cfg.n_paths));
    gains.reserve(static_cast<size_t>(cfg.n_paths));
    for (int l = 0; l < cfg.n_paths; ++l) {
        gains.push_back(rng.cnormal(1.0 / cfg.n_paths));
        double th = center_rx + (2.0 * rng.uniform() - 1.0) * half_spread;
        double ph = center_tx + (2.0 * rng.uniform() - 1.0) * half_spread;
        if (cfg.on_grid) {
            th = snap_to_grid(th, cfg.n_rx);
            ph = snap_to_grid(ph, cfg.n_tx);
        }
        rx_angles.push_back(th);
        tx_angles.push_back(ph);
    }
    return clustered_from_paths(cfg.n_rx, cfg.n_tx, rx_angles, tx_angles, gains);
}

ComplexMatrix gen_gaussian(int n_rx, int n_tx, CounterRng& rng) {
    ComplexMatrix h(n_rx, n_tx);
    cplx* p = h.data();
    for (int64_t i = 0, n = h.size(); i < n; ++i) p[i] = rng.cnormal(1.0);
    return h;
}

namespace {

void normalize_dataset(Dataset& ds) {
    if (ds.samples.empty()) return;
    double total = 0.0;
    for (const ComplexMatrix& h : ds.samples) total += fro_norm2(h);
    const double target =
        static_cast<double>(ds.samples.size()) * ds.n_rx * static_cast<double>(ds.n_tx);
    if (total <= 0.0) throw NumericError("normalize_dataset: zero total energy");
    const double c = std::sqrt(target / total);
    for (ComplexMatrix& h : ds.samples) h = scale(h, c);
}

} // namespace

Dataset make_clustered_dataset(const ClusterConfig& cfg, int count, uint64_t seed,
                               bool normalize) {
    cfg.validate();
    Dataset ds;
    ds.n_rx = cfg.n_rx;
    ds.n_tx = cfg.n_tx;
    ds.seed = seed;
    ds.samples.reserve(static_cast<size_t>(count));
    CounterRng root(seed);
    for (int i = 0; i < count; ++i) {
        CounterRng r = root.derive(static_cast<uint64_t>(i));
        ds.samples.push_back(gen_clustered(cfg, r));
    }
    if (normalize) normalize_dataset(ds);
    return ds;
}

Dataset make_gaussian_dataset(int n_rx, int n_tx, int count, uint64_t seed, bool normalize) {
    Dataset ds;
    ds.n_rx = n_rx;
    ds.n_tx = n_tx;
    ds.seed = seed;
    ds.samples.reserve(static_cast<size_t>(count));
    CounterRng root(seed);
    for (int i = 0; i < count; ++i) {
        CounterRng r = root.derive(static_cast<uint64_t>(i));
        ds.samples.push_back(gen_gaussian(n_rx, n_tx, r));
    }
    if (normalize) normalize_dataset(ds);
    return ds;
}

// ---- binary dataset format ----------------------------------------------

namespace {
constexpr char kMagic[4] = {'C', 'H', 'D', 'S'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is, const std::string& path) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("truncated dataset file: " + path);
    return v;
}
} // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for write: " + path);
    os.write(kMagic, 4);
    write_pod<uint32_t>(os, kVersion);
    write_pod<uint32_t>(os, static_cast<uint32_t>(ds.n_rx));
    write_pod<uint32_t>(os, static_cast<uint32_t>(ds.n_tx));
    write_pod<uint64_t>(os, static_cast<uint64_t>(ds.samples.size()));
    write_pod<uint64_t>(os, ds.seed);
    for (const ComplexMatrix& h : ds.samples) {
        if (h.rows() != ds.n_rx || h.cols() != ds.n_tx)
            throw IoError("save_dataset: sample dims disagree with header");
        for (int64_t i = 0; i < h.size(); ++i) {
            write_pod<double>(os, h.data()[i].real());
            write_pod<double>(os, h.data()[i].imag());
        }
    }
    if (!os) throw IoError("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for read: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("not a dataset file (bad magic): " + path);
    const uint32_t version = read_pod<uint32_t>(is, path);
    if (version != kVersion)
        throw IoError("unsupported dataset version " + std::to_string(version) + ": " + path);
    Dataset ds;
    ds.n_rx = static_cast<int>(read_pod<uint32_t>(is, path));
    ds.n_tx = static_cast<int>(read_pod<uint32_t>(is, path));
    const uint64_t count = read_pod<uint64_t>(is, path);
    ds.seed = read_pod<uint64_t>(is, path);
    if (ds.n_rx <= 0 || ds.n_tx <= 0 || count > (1ull << 32))
        throw IoError("implausible dataset header: " + path);
    ds.samples.reserve(count);
    for (uint64_t s = 0; s < count; ++s) {
        ComplexMatrix h(ds.n_rx, ds.n_tx);
        for (int64_t i = 0; i < h.size(); ++i) {
            double re = read_pod<double>(is, path);
            double im = read_pod<double>(is, path);
            h.data()[i] = {re, im};
        }
        ds.samples.push_back(std::move(h));
    }
    return ds;
}

} // namespace avf

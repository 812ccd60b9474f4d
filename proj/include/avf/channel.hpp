// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avf/complexmat.hpp"
#include "avf/rng.hpp"

namespace avf {

/// Clustered sparse multipath channel family: a sum of n_paths outer products
/// of uniform-linear-array steering vectors whose angles share a cluster
/// center, giving controllable angular-domain sparsity.
struct ClusterConfig {
    int n_paths = 3;
    double angle_spread_deg = 10.0;
    double center_range_deg = 60.0;
    int n_rx = 16;
    int n_tx = 64;
    bool on_grid = false;

    void validate() const;
};

/// Half-wavelength ULA response a(θ)ₘ = exp(jπ·m·sinθ), m = 0..n−1.
/// angle in radians, required inside (−π/2, π/2); ‖a‖² = n.
std::vector<cplx> steering_vector(int n_antennas, double angle);

/// a·bᴴ as a rows(a)×rows(b) matrix.
ComplexMatrix outer(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Deterministic clustered channel from explicit path parameters:
/// H = Σ_l gains[l]·a_rx(rx_angles[l])·a_tx(tx_angles[l])ᴴ.
ComplexMatrix clustered_from_paths(int n_rx, int n_tx, const std::vector<double>& rx_angles,
                                   const std::vector<double>& tx_angles,
                                   const std::vector<cplx>& gains);

/// Random clustered channel; gains are CN(0, 1/n_paths) so E‖H‖²_F = Nrx·Ntx.
ComplexMatrix gen_clustered(const ClusterConfig& cfg, CounterRng& rng);

/// i.i.d. CN(0,1) entries.
ComplexMatrix gen_gaussian(int n_rx, int n_tx, CounterRng& rng);

/// A materialized evaluation set. `normalize` rescales all samples by one
/// global scalar so the empirical mean of ‖H‖²_F is exactly Nrx·Ntx.
struct Dataset {
    int n_rx = 0;
    int n_tx = 0;
    uint64_t seed = 0;
    std::vector<ComplexMatrix> samples;
};

Dataset make_clustered_dataset(const ClusterConfig& cfg, int count, uint64_t seed,
                               bool normalize = true);
Dataset make_gaussian_dataset(int n_rx, int n_tx, int count, uint64_t seed,
                              bool normalize = true);

/// Binary dataset file: magic "CHDS", version u32, Nrx u32, Ntx u32,
/// count u64, seed u64, then count×Nrx×Ntx complex entries as interleaved
/// little-endian f64 (re, im). I/O failures throw IoError.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

} // namespace avf

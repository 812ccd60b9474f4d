// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avf/config.hpp"
#include "avf/net.hpp"

namespace avf {

/// Trained-model container: full run config, raw and EMA parameter arrays by
/// name, trained-iteration count and seed. The binary layout is fixed so
/// save→load→save round-trips byte-identically.
struct Checkpoint {
    RunConfig config;
    uint64_t seed = 0;
    uint64_t iterations = 0;
    std::vector<std::string> names;
    std::vector<Tensor> raw;
    std::vector<Tensor> ema;

    /// Network carrying either the raw or the EMA weights.
    VelocityNet make_net(bool use_ema = true) const;
};

Checkpoint make_checkpoint(const RunConfig& cfg, const VelocityNet& net, const EmaState& ema,
                           uint64_t iterations);

/// Binary file: magic "AVFC", version u32, config JSON blob (u64 length +
/// bytes), seed u64, iteration count u64, then the raw and EMA parameter
/// lists; each entry is name (u32 length + bytes), rank u32, dims u32×rank,
/// values little-endian f64. Loading rejects bad magic/version and
/// parameter-count or shape mismatches with named diagnostics.
void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

} // namespace avf

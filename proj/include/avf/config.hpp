// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "avf/channel.hpp"
#include "avf/flow.hpp"
#include "avf/net.hpp"

#include <json.hpp>

namespace avf {

/// Training-data source description.
struct DataConfig {
    std::string kind = "clustered"; // "clustered" or "gaussian"
    ClusterConfig cluster;          // carries n_rx/n_tx for both kinds

    void validate() const;
    /// Fresh-sample generator for training (pure function of the rng).
    ChannelSampler sampler() const;
};

/// One experiment: everything needed to reproduce a training run.
struct RunConfig {
    BackboneConfig backbone;
    FlowConfig flow;
    TrainConfig train;
    DataConfig data;

    void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Parse with unknown-key rejection; missing keys keep their defaults.
/// Throws ConfigError naming the offending section/key.
RunConfig run_config_from_json(const nlohmann::json& j);

/// Load and parse a JSON config file (IoError on read failure, ConfigError
/// on malformed content).
RunConfig load_run_config(const std::string& path);

} // namespace avf

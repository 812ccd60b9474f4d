// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include "avf/config.hpp"

#include <fstream>
#include <set>

namespace avf {

void DataConfig::validate() const {
    if (kind != "clustered" && kind != "gaussian")
        throw ConfigError("data.kind must be \"clustered\" or \"gaussian\", got \"" + kind +
                          "\"");
    cluster.validate();
}

ChannelSampler DataConfig::sampler() const {
    validate();
    if (kind == "gaussian") {
        const int n_rx = cluster.n_rx, n_tx = cluster.n_tx;
        return [n_rx, n_tx](CounterRng& rng) { return gen_gaussian(n_rx, n_tx, rng); };
    }
    const ClusterConfig cfg = cluster;
    return [cfg](CounterRng& rng) { return gen_clustered(cfg, rng); };
}

void RunConfig::validate() const {
    backbone.validate();
    flow.validate();
    train.validate();
    data.validate();
}

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& section, const std::string& key) {
    throw ConfigError("unknown config key \"" + section + "." + key + "\"");
}

void check_keys(const json& j, const std::string& section, const std::set<std::string>& known) {
    if (!j.is_object()) throw ConfigError("config section \"" + section + "\" must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (known.find(it.key()) == known.end()) bad_key(section, it.key());
}

template <typename T>
void get_to(const json& j, const char* key, T& out, const std::string& section) {
    if (!j.contains(key)) return;
    try {
        j.at(key).get_to(out);
    } catch (const json::exception& e) {
        throw ConfigError("config key \"" + section + "." + key + "\": " + e.what());
    }
}

} // namespace

nlohmann::json to_json(const RunConfig& cfg) {
    json j;
    j["backbone"] = {{"in_planes", cfg.backbone.in_planes},
                     {"hidden_planes", cfg.backbone.hidden_planes},
                     {"depth", cfg.backbone.depth},
                     {"kernel", cfg.backbone.kernel}};
    j["flow"] = {{"time_mean", cfg.flow.time_mean},
                 {"time_std", cfg.flow.time_std},
                 {"mix_ratio", cfg.flow.mix_ratio}};
    j["train"] = {{"iterations", cfg.train.iterations},
                  {"batch_size", cfg.train.batch_size},
                  {"lr", cfg.train.lr},
                  {"warmup_steps", cfg.train.warmup_steps},
                  {"adam_beta1", cfg.train.adam_beta1},
                  {"adam_beta2", cfg.train.adam_beta2},
                  {"adam_eps", cfg.train.adam_eps},
                  {"ema_decay", cfg.train.ema_decay},
                  {"snr_grid_db", cfg.train.snr_grid_db},
                  {"seed", cfg.train.seed},
                  {"deterministic_noise", cfg.train.deterministic_noise},
                  {"spatial_domain", cfg.train.spatial_domain}};
    j["data"] = {{"kind", cfg.data.kind},
                 {"n_rx", cfg.data.cluster.n_rx},
                 {"n_tx", cfg.data.cluster.n_tx},
                 {"n_paths", cfg.data.cluster.n_paths},
                 {"angle_spread_deg", cfg.data.cluster.angle_spread_deg},
                 {"center_range_deg", cfg.data.cluster.center_range_deg},
                 {"on_grid", cfg.data.cluster.on_grid}};
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k != "backbone" && k != "flow" && k != "train" && k != "data")
            throw ConfigError("unknown config section \"" + k + "\"");
    }

    RunConfig cfg;
    if (j.contains("backbone")) {
        const json& b = j.at("backbone");
        check_keys(b, "backbone", {"in_planes", "hidden_planes", "depth", "kernel"});
        get_to(b, "in_planes", cfg.backbone.in_planes, "backbone");
        get_to(b, "hidden_planes", cfg.backbone.hidden_planes, "backbone");
        get_to(b, "depth", cfg.backbone.depth, "backbone");
        get_to(b, "kernel", cfg.backbone.kernel, "backbone");
    }
    if (j.contains("flow")) {
        const json& f = j.at("flow");
        check_keys(f, "flow", {"time_mean", "time_std", "mix_ratio"});
        get_to(f, "time_mean", cfg.flow.time_mean, "flow");
        get_to(f, "time_std", cfg.flow.time_std, "flow");
        get_to(f, "mix_ratio", cfg.flow.mix_ratio, "flow");
    }
    if (j.contains("train")) {
        const json& t = j.at("train");
        check_keys(t, "train",
                   {"iterations", "batch_size", "lr", "warmup_steps", "adam_beta1", "adam_beta2",
                    "adam_eps", "ema_decay", "snr_grid_db", "seed", "deterministic_noise",
                    "spatial_domain"});
        get_to(t, "iterations", cfg.train.iterations, "train");
        get_to(t, "batch_size", cfg.train.batch_size, "train");
        get_to(t, "lr", cfg.train.lr, "train");
        get_to(t, "warmup_steps", cfg.train.warmup_steps, "train");
        get_to(t, "adam_beta1", cfg.train.adam_beta1, "train");
        get_to(t, "adam_beta2", cfg.train.adam_beta2, "train");
        get_to(t, "adam_eps", cfg.train.adam_eps, "train");
        get_to(t, "ema_decay", cfg.train.ema_decay, "train");
        get_to(t, "snr_grid_db", cfg.train.snr_grid_db, "train");
        get_to(t, "seed", cfg.train.seed, "train");
        get_to(t, "deterministic_noise", cfg.train.deterministic_noise, "train");
        get_to(t, "spatial_domain", cfg.train.spatial_domain, "train");
    }
    if (j.contains("data")) {
        const json& d = j.at("data");
        check_keys(d, "data",
                   {"kind", "n_rx", "n_tx", "n_paths", "angle_spread_deg", "center_range_deg",
                    "on_grid"});
        get_to(d, "kind", cfg.data.kind, "data");
        get_to(d, "n_rx", cfg.data.cluster.n_rx, "data");
        get_to(d, "n_tx", cfg.data.cluster.n_tx, "data");
        get_to(d, "n_paths", cfg.data.cluster.n_paths, "data");
        get_to(d, "angle_spread_deg", cfg.data.cluster.angle_spread_deg, "data");
        get_to(d, "center_range_deg", cfg.data.cluster.center_range_deg, "data");
        get_to(d, "on_grid", cfg.data.cluster.on_grid, "data");
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
    return run_config_from_json(j);
}

} // namespace avf

// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include "avf/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace avf {

namespace {
constexpr char kMagic[4] = {'A', 'V', 'F', 'C'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is, const std::string& path) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("truncated checkpoint file: " + path);
    return v;
}

void write_string(std::ostream& os, const std::string& s) {
    write_pod<uint32_t>(os, static_cast<uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is, const std::string& path, uint32_t max_len) {
    const uint32_t len = read_pod<uint32_t>(is, path);
    if (len > max_len) throw IoError("implausible string length in checkpoint: " + path);
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw IoError("truncated checkpoint file: " + path);
    return s;
}

void write_tensor_list(std::ostream& os, const std::vector<std::string>& names,
                       const std::vector<Tensor>& tensors) {
    write_pod<uint32_t>(os, static_cast<uint32_t>(tensors.size()));
    for (size_t i = 0; i < tensors.size(); ++i) {
        write_string(os, names[i]);
        const auto& shape = tensors[i].shape();
        write_pod<uint32_t>(os, static_cast<uint32_t>(shape.size()));
        for (int d : shape) write_pod<uint32_t>(os, static_cast<uint32_t>(d));
        os.write(reinterpret_cast<const char*>(tensors[i].data()),
                 static_cast<std::streamsize>(tensors[i].numel() * sizeof(double)));
    }
}

std::vector<Tensor> read_tensor_list(std::istream& is, const std::string& path,
                                     std::vector<std::string>& names) {
    const uint32_t count = read_pod<uint32_t>(is, path);
    if (count > 4096) throw IoError("implausible parameter count in checkpoint: " + path);
    std::vector<Tensor> tensors;
    names.clear();
    for (uint32_t i = 0; i < count; ++i) {
        names.push_back(read_string(is, path, 256));
        const uint32_t rank = read_pod<uint32_t>(is, path);
        if (rank > 8) throw IoError("implausible tensor rank in checkpoint: " + path);
        std::vector<int> shape;
        for (uint32_t d = 0; d < rank; ++d)
            shape.push_back(static_cast<int>(read_pod<uint32_t>(is, path)));
        const int64_t numel = shape_numel(shape);
        if (numel > (1 << 28)) throw IoError("implausible tensor size in checkpoint: " + path);
        std::vector<double> data(static_cast<size_t>(numel));
        is.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(data.size() * sizeof(double)));
        if (!is) throw IoError("truncated checkpoint file: " + path);
        tensors.push_back(Tensor::from_data(std::move(shape), std::move(data)));
    }
    return tensors;
}

} // namespace

VelocityNet Checkpoint::make_net(bool use_ema) const {
    VelocityNet net(config.backbone);
    const std::vector<Tensor>& src = use_ema ? ema : raw;
    if (src.size() != net.params().size())
        throw ConfigError("checkpoint: expected " + std::to_string(net.params().size()) +
                          " parameter arrays for the configured backbone, found " +
                          std::to_string(src.size()));
    for (size_t i = 0; i < src.size(); ++i) {
        if (!src[i].same_shape(net.params()[i]))
            throw ConfigError("checkpoint: parameter \"" + names[i] + "\" has shape " +
                              src[i].shape_str() + ", backbone expects " +
                              net.params()[i].shape_str());
        net.params()[i] = src[i];
    }
    return net;
}

Checkpoint make_checkpoint(const RunConfig& cfg, const VelocityNet& net, const EmaState& ema,
                           uint64_t iterations) {
    Checkpoint ck;
    ck.config = cfg;
    ck.seed = cfg.train.seed;
    ck.iterations = iterations;
    ck.names = net.param_names();
    ck.raw = net.params();
    ck.ema = ema.shadow;
    if (ck.ema.size() != ck.raw.size())
        throw ConfigError("make_checkpoint: EMA/raw parameter list mismatch");
    return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    if (ck.names.size() != ck.raw.size() || ck.names.size() != ck.ema.size())
        throw ConfigError("save_checkpoint: name/parameter list mismatch");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for write: " + path);
    os.write(kMagic, 4);
    write_pod<uint32_t>(os, kVersion);
    const std::string cfg_blob = to_json(ck.config).dump();
    write_pod<uint64_t>(os, cfg_blob.size());
    os.write(cfg_blob.data(), static_cast<std::streamsize>(cfg_blob.size()));
    write_pod<uint64_t>(os, ck.seed);
    write_pod<uint64_t>(os, ck.iterations);
    write_tensor_list(os, ck.names, ck.raw);
    std::vector<std::string> ema_names;
    ema_names.reserve(ck.names.size());
    for (const std::string& n : ck.names) ema_names.push_back("ema." + n);
    write_tensor_list(os, ema_names, ck.ema);
    if (!os) throw IoError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for read: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("not a checkpoint file (bad magic): " + path);
    const uint32_t version = read_pod<uint32_t>(is, path);
    if (version != kVersion)
        throw IoError("unsupported checkpoint version " + std::to_string(version) + ": " + path);

    const uint64_t cfg_len = read_pod<uint64_t>(is, path);
    if (cfg_len > (1 << 20)) throw IoError("implausible config blob size: " + path);
    std::string cfg_blob(static_cast<size_t>(cfg_len), '\0');
    is.read(cfg_blob.data(), static_cast<std::streamsize>(cfg_len));
    if (!is) throw IoError("truncated checkpoint file: " + path);

    Checkpoint ck;
    try {
        ck.config = run_config_from_json(nlohmann::json::parse(cfg_blob));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed config blob in checkpoint " + path + ": " + e.what());
    }
    ck.seed = read_pod<uint64_t>(is, path);
    ck.iterations = read_pod<uint64_t>(is, path);
    ck.raw = read_tensor_list(is, path, ck.names);
    std::vector<std::string> ema_names;
    ck.ema = read_tensor_list(is, path, ema_names);

    if (ck.raw.size() != ck.ema.size())
        throw IoError("checkpoint raw/EMA parameter counts differ (" +
                      std::to_string(ck.raw.size()) + " vs " + std::to_string(ck.ema.size()) +
                      "): " + path);
    for (size_t i = 0; i < ema_names.size(); ++i)
        if (ema_names[i] != "ema." + ck.names[i])
            throw IoError("checkpoint EMA parameter name mismatch at index " +
                          std::to_string(i) + " (\"" + ema_names[i] + "\"): " + path);
    // Validate against the configured backbone so shape problems surface here
    // with parameter names rather than later at forward time.
    (void)ck.make_net(false);
    (void)ck.make_net(true);
    return ck;
}

} // namespace avf

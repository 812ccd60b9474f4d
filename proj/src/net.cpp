// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include "avf/net.hpp"

#include <cmath>

namespace avf {

void BackboneConfig::validate() const {
    if (kernel < 1 || kernel % 2 == 0)
        throw ConfigError("BackboneConfig: kernel must be odd and >= 1, got " +
                          std::to_string(kernel));
    if (depth < 2) throw ConfigError("BackboneConfig: depth must be >= 2");
    if (in_planes < 1 || hidden_planes < 1)
        throw ConfigError("BackboneConfig: plane counts must be >= 1");
}

int64_t BackboneConfig::param_count() const {
    const int64_t k2 = static_cast<int64_t>(kernel) * kernel;
    int64_t count = 0;
    int in = in_planes;
    for (int layer = 0; layer < depth; ++layer) {
        const int out = (layer == depth - 1) ? 2 : hidden_planes;
        count += static_cast<int64_t>(out) * in * k2 + out;
        in = out;
    }
    return count;
}

VelocityNet::VelocityNet(BackboneConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    int in = cfg_.in_planes;
    for (int layer = 0; layer < cfg_.depth; ++layer) {
        const int out = (layer == cfg_.depth - 1) ? 2 : cfg_.hidden_planes;
        params_.push_back(Tensor::zeros({out, in, cfg_.kernel, cfg_.kernel}));
        params_.push_back(Tensor::zeros({out}));
        names_.push_back("conv" + std::to_string(layer) + ".weight");
        names_.push_back("conv" + std::to_string(layer) + ".bias");
        in = out;
    }
}

void VelocityNet::init_params(CounterRng& rng) {
    for (int layer = 0; layer < cfg_.depth; ++layer) {
        Tensor& w = params_[static_cast<size_t>(2 * layer)];
        Tensor& b = params_[static_cast<size_t>(2 * layer + 1)];
        if (layer == cfg_.depth - 1) {
            w = Tensor::zeros(w.shape());
            b = Tensor::zeros(b.shape());
            continue;
        }
        const auto& ws = w.shape();
        const double fan_in = static_cast<double>(ws[1]) * ws[2] * ws[3];
        const double bound = std::sqrt(6.0 / fan_in);
        for (int64_t i = 0; i < w.numel(); ++i) w[i] = (2.0 * rng.uniform() - 1.0) * bound;
        b = Tensor::zeros(b.shape());
    }
}

void VelocityNet::check_time_pair(double s, double t) const {
    if (!(s >= 0.0 && t <= 1.0 && s <= t))
        throw ConfigError("VelocityNet: need 0 <= s <= t <= 1, got s=" + std::to_string(s) +
                          " t=" + std::to_string(t));
}

Tensor VelocityNet::pack_input(const Tensor& h2, double s, double t) {
    const auto& sh = h2.shape();
    if (sh.size() != 3 || sh[0] != 2)
        throw ShapeError("pack_input: expected [2,H,W], got " + h2.shape_str());
    const int h = sh[1], w = sh[2];
    const int64_t plane = static_cast<int64_t>(h) * w;
    Tensor x = Tensor::zeros({4, h, w});
    double* p = x.data();
    const double* q = h2.data();
    for (int64_t i = 0; i < 2 * plane; ++i) p[i] = q[i];
    for (int64_t i = 0; i < plane; ++i) p[2 * plane + i] = s;
    for (int64_t i = 0; i < plane; ++i) p[3 * plane + i] = t;
    return x;
}

Tensor VelocityNet::forward(const Tensor& h2, double s, double t) const {
    check_time_pair(s, t);
    const int pad = (cfg_.kernel - 1) / 2;
    Tensor x = pack_input(h2, s, t);
    for (int layer = 0; layer < cfg_.depth; ++layer) {
        x = conv2d(x, params_[static_cast<size_t>(2 * layer)],
                   params_[static_cast<size_t>(2 * layer + 1)], pad);
        if (layer != cfg_.depth - 1) x = silu(x);
    }
    return x;
}

DualTensor VelocityNet::forward_dual(const DualTensor& x4) const {
    const int pad = (cfg_.kernel - 1) / 2;
    DualTensor x = x4;
    for (int layer = 0; layer < cfg_.depth; ++layer) {
        x = dual::conv2d_const(x, params_[static_cast<size_t>(2 * layer)],
                               params_[static_cast<size_t>(2 * layer + 1)], pad);
        if (layer != cfg_.depth - 1) x = dual::silu(x);
    }
    return x;
}

std::vector<Tape::Var> VelocityNet::declare_params(Tape& tape) const {
    std::vector<Tape::Var> vars;
    vars.reserve(params_.size());
    for (const Tensor& p : params_) vars.push_back(tape.param(p));
    return vars;
}

Tape::Var VelocityNet::forward_tape(Tape& tape, const std::vector<Tape::Var>& param_vars,
                                    Tape::Var x4) const {
    if (param_vars.size() != params_.size())
        throw ConfigError("forward_tape: expected " + std::to_string(params_.size()) +
                          " param vars, got " + std::to_string(param_vars.size()));
    const int pad = (cfg_.kernel - 1) / 2;
    Tape::Var x = x4;
    for (int layer = 0; layer < cfg_.depth; ++layer) {
        x = tape.conv2d(x, param_vars[static_cast<size_t>(2 * layer)],
                        param_vars[static_cast<size_t>(2 * layer + 1)], pad);
        if (layer != cfg_.depth - 1) x = tape.silu(x);
    }
    return x;
}

// ---- Adam ----------------------------------------------------------------

AdamState::AdamState(const std::vector<Tensor>& params, AdamConfig cfg) : cfg_(cfg) {
    if (!(cfg_.lr > 0.0)) throw ConfigError("Adam: lr must be > 0");
    if (!(cfg_.beta1 >= 0.0 && cfg_.beta1 < 1.0 && cfg_.beta2 >= 0.0 && cfg_.beta2 < 1.0))
        throw ConfigError("Adam: betas must lie in [0, 1)");
    if (cfg_.warmup_steps < 0) throw ConfigError("Adam: warmup_steps must be >= 0");
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Tensor& p : params) {
        m_.push_back(Tensor::zeros(p.shape()));
        v_.push_back(Tensor::zeros(p.shape()));
    }
}

double AdamState::lr_at(int64_t step) const {
    if (cfg_.warmup_steps <= 0) return cfg_.lr;
    const double f = static_cast<double>(step) / cfg_.warmup_steps;
    return cfg_.lr * std::min(1.0, f);
}

void AdamState::step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
                     const std::vector<std::string>& names) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw ConfigError("Adam: param/grad list size mismatch");
    ++step_;
    const double lr = lr_at(step_);
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (size_t i = 0; i < params.size(); ++i) {
        require_same_shape(params[i], grads[i], "Adam");
        if (!grads[i].all_finite()) {
            const std::string name = i < names.size() ? names[i] : std::to_string(i);
            throw NumericError("Adam: non-finite gradient for parameter " + name);
        }
        double* p = params[i].data();
        double* m = m_[i].data();
        double* v = v_[i].data();
        const double* g = grads[i].data();
        for (int64_t j = 0, n = params[i].numel(); j < n; ++j) {
            m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
            v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            p[j] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

// ---- EMA -----------------------------------------------------------------

EmaState EmaState::init(const std::vector<Tensor>& params, double decay) {
    if (!(decay >= 0.0 && decay <= 1.0))
        throw ConfigError("EMA: decay must lie in [0, 1], got " + std::to_string(decay));
    EmaState e;
    e.decay = decay;
    e.shadow = params;
    return e;
}

void EmaState::update(const std::vector<Tensor>& params) {
    if (params.size() != shadow.size()) throw ConfigError("EMA: param list size mismatch");
    for (size_t i = 0; i < params.size(); ++i) {
        require_same_shape(shadow[i], params[i], "EMA");
        double* s = shadow[i].data();
        const double* p = params[i].data();
        for (int64_t j = 0, n = shadow[i].numel(); j < n; ++j)
            s[j] = decay * s[j] + (1.0 - decay) * p[j];
    }
}

} // namespace avf

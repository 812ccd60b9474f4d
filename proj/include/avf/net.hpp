// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avf/autodiff.hpp"
#include "avf/rng.hpp"
#include "avf/tensor.hpp"

namespace avf {

/// Shape of the fixed conv backbone: `depth` shape-preserving conv layers
/// in_planes → hidden → … → hidden → 2, SiLU between layers, no
/// normalization. Default depth 8 puts the parameter count at 57,250.
struct BackboneConfig {
    int in_planes = 4; // 2 real/imag planes + 2 conditioning planes (s, t)
    int hidden_planes = 32;
    int depth = 8;
    int kernel = 3;

    void validate() const;
    int64_t param_count() const;
};

/// The average-velocity network U_θ(H_t, s, t): a plain conv stack over
/// [re, im, s, t] input planes producing the 2-plane velocity estimate.
class VelocityNet {
  public:
    explicit VelocityNet(BackboneConfig cfg);

    /// He-uniform fan-in init for all layers except the last, which is
    /// zero-initialized so the untrained network outputs exactly zero.
    void init_params(CounterRng& rng);

    const BackboneConfig& config() const { return cfg_; }
    int64_t param_count() const { return cfg_.param_count(); }

    std::vector<Tensor>& params() { return params_; }
    const std::vector<Tensor>& params() const { return params_; }
    const std::vector<std::string>& param_names() const { return names_; }

    /// [re, im, s·1, t·1] stacked to [in_planes, H, W].
    static Tensor pack_input(const Tensor& h2, double s, double t);

    /// Plain forward pass; h2 is [2,H,W], requires 0 ≤ s ≤ t ≤ 1.
    Tensor forward(const Tensor& h2, double s, double t) const;

    /// Forward-mode pass with parameters held constant; x4 is the packed
    /// [in_planes,H,W] dual input.
    DualTensor forward_dual(const DualTensor& x4) const;

    /// Records the forward pass on `tape`; param_vars must come from
    /// declare_params on the same tape. Returns the output var.
    Tape::Var forward_tape(Tape& tape, const std::vector<Tape::Var>& param_vars,
                           Tape::Var x4) const;
    std::vector<Tape::Var> declare_params(Tape& tape) const;

  private:
    void check_time_pair(double s, double t) const;

    BackboneConfig cfg_;
    std::vector<Tensor> params_; // conv0.weight, conv0.bias, conv1.weight, …
    std::vector<std::string> names_;
};

/// Bias-corrected Adam with linear learning-rate warmup.
struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int warmup_steps = 500;
};

class AdamState {
  public:
    AdamState(const std::vector<Tensor>& params, AdamConfig cfg);

    /// One descent step in place. Throws NumericError naming the parameter
    /// if its gradient is non-finite.
    void step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
              const std::vector<std::string>& names);

    int64_t step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }
    /// α·min(1, step/warmup) for a given 1-based step index.
    double lr_at(int64_t step) const;

  private:
    AdamConfig cfg_;
    std::vector<Tensor> m_, v_;
    int64_t step_ = 0;
};

/// Exponential moving average of the parameters; evaluation always runs on
/// the shadow weights.
struct EmaState {
    double decay = 0.999;
    std::vector<Tensor> shadow;

    static EmaState init(const std::vector<Tensor>& params, double decay);
    /// shadow ← decay·shadow + (1−decay)·params
    void update(const std::vector<Tensor>& params);
};

} // namespace avf

// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "avf/complexmat.hpp"
#include "avf/net.hpp"
#include "avf/rng.hpp"
#include "avf/signal.hpp"

namespace avf {

/// Linear-schedule flow configuration: the path H_t = (1−t)·H + t·Ĥ is
/// fixed; these fields control the logit-normal time sampler and the ratio of
/// s ≠ t pairs. mix_ratio = 0 degenerates to conventional flow matching.
struct FlowConfig {
    double time_mean = 0.4; // μ of the pre-logistic normal draw
    double time_std = 1.0;  // σ of the pre-logistic normal draw
    double mix_ratio = 0.25; // probability that s ≠ t

    void validate() const;
};

struct TimePair {
    double s = 0.0;
    double t = 0.0;
};

/// Draw z₁, z₂ ~ N(μ, σ²), map through the logistic function, sort so s ≤ t,
/// then with probability 1 − mix_ratio collapse s ← t.
TimePair sample_time_pair(const FlowConfig& cfg, CounterRng& rng);

/// H_t = (1−t)·H + t·Ĥ.
ComplexMatrix state_transform(const ComplexMatrix& h, const ComplexMatrix& h_hat, double t);

/// Instantaneous velocity V = Ĥ − H (constant in t for the linear schedule).
ComplexMatrix ivf(const ComplexMatrix& h, const ComplexMatrix& h_hat);

/// Average-velocity regression target
///   U_target = V − (t−s)·dU/dt,   dU/dt from the JVP with tangent [V, 0, 1].
/// Inputs and result are [2,H,W] real-plane tensors; the result is a plain
/// detached tensor (nothing is recorded). `Net` needs
/// forward_dual(DualTensor [4,H,W]) with the [re, im, s, t] plane packing.
template <typename Net>
Tensor compute_target(const Net& net, const Tensor& h_t, double s, double t, const Tensor& v) {
    if (!(s >= 0.0 && t <= 1.0 && s <= t))
        throw ConfigError("compute_target: need 0 <= s <= t <= 1, got s=" + std::to_string(s) +
                          " t=" + std::to_string(t));
    if (s == t) return v;
    DualTensor x = DualTensor::seeded(VelocityNet::pack_input(h_t, s, t),
                                      VelocityNet::pack_input(v, 0.0, 1.0));
    DualTensor u = net.forward_dual(x);
    Tensor target = v;
    axpy_inplace(-(t - s), u.tangent, target);
    if (!target.all_finite())
        throw NumericError("compute_target: non-finite target at s=" + std::to_string(s) +
                           " t=" + std::to_string(t));
    return target;
}

/// Training controls. `iterations` counts optimizer steps over freshly drawn
/// batches; one SNR value and one (s,t) pair are sampled per step.
struct TrainConfig {
    int64_t iterations = 8000;
    int batch_size = 512;
    double lr = 1e-4;
    int warmup_steps = 500;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double ema_decay = 0.999;
    std::vector<double> snr_grid_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
    uint64_t seed = 0;
    /// Use the deterministic self-noise observation Ĥ = H + H/√snr instead of
    /// a random AWGN draw.
    bool deterministic_noise = false;
    /// Ablation: keep all flow arithmetic in the spatial domain (no angular
    /// transform).
    bool spatial_domain = false;

    void validate() const;
};

/// One optimizer step on an explicit batch: sample snr and (s,t), form noisy
/// observations, build targets, regress, Adam + EMA update. Returns the
/// batch-mean loss. Throws NumericError with (iteration, snr, s, t) context
/// if the loss is non-finite.
double train_step(VelocityNet& net, AdamState& adam, EmaState& ema,
                  const std::vector<ComplexMatrix>& batch, const FlowConfig& fcfg,
                  const TrainConfig& tcfg, int64_t iteration, CounterRng& rng);

using ChannelSampler = std::function<ComplexMatrix(CounterRng&)>;
using ProgressFn = std::function<void(int64_t iteration, double loss)>;

struct TrainOutput {
    EmaState ema;
    std::vector<double> loss_curve;
};

/// Full training run: initializes the network parameters from the config
/// seed, then `iterations` train_step calls on freshly sampled batches.
/// Fully determined by (net config, sampler, configs, seed).
TrainOutput run_training(VelocityNet& net, const ChannelSampler& sampler, const FlowConfig& fcfg,
                         const TrainConfig& tcfg, const ProgressFn& progress = {});

/// Multi-step inference over the angular-domain observation:
///   X ← Ĥ;  for i = nfe..1:  X ← X − (1/nfe)·U(X, (i−1)/nfe, i/nfe).
/// `literal_step` drops the 1/nfe factor (identical at nfe = 1). `Net` needs
/// forward(Tensor[2,H,W], s, t). Note the signature takes no noise variance:
/// inference is SNR-blind.
template <typename Net>
ComplexMatrix infer(const Net& net, const ComplexMatrix& h_hat_ang, int nfe,
                    bool literal_step = false) {
    if (nfe < 1) throw ConfigError("infer: nfe must be >= 1, got " + std::to_string(nfe));
    ComplexMatrix x = h_hat_ang;
    const double step = literal_step ? 1.0 : 1.0 / nfe;
    for (int i = nfe; i >= 1; --i) {
        const double s = static_cast<double>(i - 1) / nfe;
        const double t = static_cast<double>(i) / nfe;
        Tensor u = net.forward(pack_planes(x), s, t);
        axpy_inplace(cplx{-step, 0.0}, unpack_planes(u), x);
    }
    return x;
}

/// End-to-end estimate from a pilot observation: LS decorrelation, angular
/// transform, flow inference, inverse transform. `spatial_domain` skips the
/// angular transforms for nets trained with the spatial ablation.
template <typename Net>
ComplexMatrix estimate_channel(const Net& net, const ComplexMatrix& y, const PilotMatrix& pilot,
                               int nfe, bool literal_step = false, bool spatial_domain = false) {
    ComplexMatrix h_hat = ls_decorrelate(y, pilot);
    if (spatial_domain) return infer(net, h_hat, nfe, literal_step);
    return from_angular(infer(net, to_angular(h_hat), nfe, literal_step));
}

} // namespace avf

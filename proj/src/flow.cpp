// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include "avf/flow.hpp"

#include <algorithm>
#include <cmath>

namespace avf {

void FlowConfig::validate() const {
    if (!(time_std > 0.0)) throw ConfigError("FlowConfig: time_std must be > 0");
    if (!(mix_ratio >= 0.0 && mix_ratio <= 1.0))
        throw ConfigError("FlowConfig: mix_ratio must lie in [0, 1]");
}

void TrainConfig::validate() const {
    if (iterations < 0) throw ConfigError("TrainConfig: iterations must be >= 0");
    if (batch_size < 1) throw ConfigError("TrainConfig: batch_size must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("TrainConfig: lr must be > 0");
    if (warmup_steps < 0) throw ConfigError("TrainConfig: warmup_steps must be >= 0");
    if (!(ema_decay >= 0.0 && ema_decay <= 1.0))
        throw ConfigError("TrainConfig: ema_decay must lie in [0, 1]");
    if (snr_grid_db.empty()) throw ConfigError("TrainConfig: snr grid must be non-empty");
}

namespace {
double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
} // namespace

TimePair sample_time_pair(const FlowConfig& cfg, CounterRng& rng) {
    const double z1 = cfg.time_mean + cfg.time_std * rng.normal();
    const double z2 = cfg.time_mean + cfg.time_std * rng.normal();
    double a = logistic(z1);
    double b = logistic(z2);
    TimePair tp;
    tp.t = std::max(a, b);
    tp.s = std::min(a, b);
    if (rng.uniform() >= cfg.mix_ratio) tp.s = tp.t;
    return tp;
}

ComplexMatrix state_transform(const ComplexMatrix& h, const ComplexMatrix& h_hat, double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw ConfigError("state_transform: t must lie in [0, 1], got " + std::to_string(t));
    ComplexMatrix out = scale(h, 1.0 - t);
    axpy_inplace(cplx{t, 0.0}, h_hat, out);
    return out;
}

ComplexMatrix ivf(const ComplexMatrix& h, const ComplexMatrix& h_hat) { return sub(h_hat, h); }

double train_step(VelocityNet& net, AdamState& adam, EmaState& ema,
                  const std::vector<ComplexMatrix>& batch, const FlowConfig& fcfg,
                  const TrainConfig& tcfg, int64_t iteration, CounterRng& rng) {
    if (batch.empty()) throw ConfigError("train_step: empty batch");

    const size_t snr_idx = std::min(tcfg.snr_grid_db.size() - 1,
                                    static_cast<size_t>(rng.uniform() *
                                                        static_cast<double>(tcfg.snr_grid_db.size())));
    const SnrSpec snr = SnrSpec::from_db(tcfg.snr_grid_db[snr_idx]);
    const TimePair tp = sample_time_pair(fcfg, rng);

    std::vector<Tensor> grad_sum;
    grad_sum.reserve(net.params().size());
    for (const Tensor& p : net.params()) grad_sum.push_back(Tensor::zeros(p.shape()));
    double loss_sum = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    for (const ComplexMatrix& h_true : batch) {
        ComplexMatrix h_hat = tcfg.deterministic_noise
                                  ? deterministic_observation(h_true, snr)
                                  : noisy_observation(h_true, snr, rng);
        ComplexMatrix h = h_true;
        if (!tcfg.spatial_domain) {
            h = to_angular(h);
            h_hat = to_angular(h_hat);
        }
        const Tensor v = pack_planes(ivf(h, h_hat));
        const Tensor h_t = pack_planes(state_transform(h, h_hat, tp.t));
        const Tensor target = compute_target(net, h_t, tp.s, tp.t, v);

        Tape tape;
        std::vector<Tape::Var> pv = net.declare_params(tape);
        Tape::Var x = tape.input(VelocityNet::pack_input(h_t, tp.s, tp.t));
        Tape::Var pred = net.forward_tape(tape, pv, x);
        Tape::Var loss = tape.mse(pred, tape.input(target));
        tape.backward(loss);
        for (size_t i = 0; i < pv.size(); ++i)
            axpy_inplace(inv_batch, tape.grad(pv[i]), grad_sum[i]);
        loss_sum += tape.value(loss)[0];
    }

    const double loss = loss_sum * inv_batch;
    if (!std::isfinite(loss))
        throw NumericError("train_step: non-finite loss at iteration " +
                           std::to_string(iteration) + " (snr_db=" +
                           std::to_string(snr.snr_db) + ", s=" + std::to_string(tp.s) +
                           ", t=" + std::to_string(tp.t) + ")");

    adam.step(net.params(), grad_sum, net.param_names());
    ema.update(net.params());
    return loss;
}

TrainOutput run_training(VelocityNet& net, const ChannelSampler& sampler, const FlowConfig& fcfg,
                         const TrainConfig& tcfg, const ProgressFn& progress) {
    fcfg.validate();
    tcfg.validate();

    CounterRng root(tcfg.seed);
    CounterRng init_rng = root.derive(0);
    net.init_params(init_rng);

    AdamConfig acfg;
    acfg.lr = tcfg.lr;
    acfg.beta1 = tcfg.adam_beta1;
    acfg.beta2 = tcfg.adam_beta2;
    acfg.eps = tcfg.adam_eps;
    acfg.warmup_steps = tcfg.warmup_steps;
    AdamState adam(net.params(), acfg);

    TrainOutput out;
    out.ema = EmaState::init(net.params(), tcfg.ema_decay);
    out.loss_curve.reserve(static_cast<size_t>(tcfg.iterations));

    std::vector<ComplexMatrix> batch;
    batch.reserve(static_cast<size_t>(tcfg.batch_size));
    for (int64_t it = 0; it < tcfg.iterations; ++it) {
        CounterRng iter_rng = root.derive(static_cast<uint64_t>(it) + 1);
        batch.clear();
        for (int b = 0; b < tcfg.batch_size; ++b) batch.push_back(sampler(iter_rng));
        const double loss = train_step(net, adam, out.ema, batch, fcfg, tcfg, it, iter_rng);
        out.loss_curve.push_back(loss);
        if (progress) progress(it, loss);
    }
    return out;
}

} // namespace avf

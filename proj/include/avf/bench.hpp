// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avf/baselines.hpp"
#include "avf/channel.hpp"
#include "avf/checkpoint.hpp"
#include "avf/metrics.hpp"

namespace avf {

/// Known estimator names for eval cells.
///   ls             — identity on the noisy observation
///   lmmse          — sample-covariance Wiener filter (needs fit data config)
///   lmmse-analytic — identity-covariance Wiener filter
///   avf            — learned model from the checkpoint
const std::vector<std::string>& known_methods();

struct EvalOptions {
    std::vector<std::string> methods = {"ls"};
    std::vector<double> snr_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
    std::vector<int> nfe_list = {1}; // applied to learned methods only
    uint64_t seed = 0;
    /// Cap on evaluation samples per cell (0 = full dataset).
    int max_samples = 0;
    /// Fresh channels drawn for the sample-covariance LMMSE fit.
    int lmmse_fit_samples = 20000;
    uint64_t lmmse_fit_seed = 0x1a2b3c4dULL;
    bool literal_step = false;
};

/// NMSE grid over (method × snr × nfe) with per-cell derived seeds; rows are
/// deterministic functions of (options, dataset, checkpoint). `ck` may be
/// null when no learned method is requested; `fit_data` supplies the channel
/// family for the "lmmse" fit (defaults to the checkpoint's data section).
EvalReport run_eval(const Checkpoint* ck, const Dataset& ds, const EvalOptions& opt,
                    const DataConfig* fit_data = nullptr);

struct LatencyOptions {
    std::vector<int> nfe_list = {1, 13};
    int repetitions = 200; // must be >= 100
    double snr_db = 10.0;
    int nmse_samples = 128; // samples behind the row's NMSE value
    uint64_t seed = 0;
    /// Include angular transforms in the timed region (the default times the
    /// network pass alone).
    bool end_to_end = false;
    bool literal_step = false;
};

/// Single-threaded wall-clock per-sample inference latency: median and p90
/// over `repetitions` timed calls after 10 warmups, checked mode disabled
/// during timing. Rows carry NMSE at the fixed SNR; n_samples = repetitions.
EvalReport run_latency_bench(const Checkpoint& ck, const Dataset& ds, const LatencyOptions& opt);

struct SweepOptions {
    std::vector<double> snr_db = {-10, 0, 10, 20, 30};
    std::vector<int> nfe_list = {1, 2, 4, 8, 13, 20};
    uint64_t seed = 0;
    int max_samples = 0;
    bool literal_step = false;
};

/// NFE sweep of the learned model; the report's `extra` JSON carries
/// gain-over-1-NFE rows and qualitative trend flags:
///   high_snr_multi_nfe_ok — at the highest SNR, 4-NFE ≤ 1-NFE + 0.2 dB
///   low_snr_one_nfe_ok    — at the lowest SNR, 1-NFE ≤ 20-NFE + 0.2 dB
/// (each flag only present when the sweep covers the NFE values it needs).
EvalReport run_sweep_nfe(const Checkpoint& ck, const Dataset& ds, const SweepOptions& opt);

/// Fig.-3-style CSV (snr_db,nfe,nmse_db,gain_db) built from a sweep report.
std::string sweep_gain_csv(const EvalReport& report);

} // namespace avf

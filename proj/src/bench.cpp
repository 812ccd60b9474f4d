// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include "avf/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>

#include "avf/flow.hpp"
#include "avf/signal.hpp"

namespace avf {

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Per-cell stream: deterministic in (master seed, method, snr, nfe) and
/// independent across cells.
CounterRng cell_rng(uint64_t seed, const std::string& method, double snr_db, int nfe) {
    return CounterRng(seed)
        .derive(fnv1a(method))
        .derive(std::bit_cast<uint64_t>(snr_db))
        .derive(static_cast<uint64_t>(nfe));
}

struct CheckedGuard {
    bool prev;
    explicit CheckedGuard(bool v) : prev(checked()) { set_checked(v); }
    ~CheckedGuard() { set_checked(prev); }
};

double percentile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    const size_t idx = std::min(xs.size() - 1, static_cast<size_t>(q * xs.size()));
    return xs[idx];
}

int effective_count(const Dataset& ds, int max_samples) {
    const int total = static_cast<int>(ds.samples.size());
    if (max_samples <= 0) return total;
    return std::min(total, max_samples);
}

} // namespace

const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> m = {"ls", "lmmse", "lmmse-analytic", "avf"};
    return m;
}

EvalReport run_eval(const Checkpoint* ck, const Dataset& ds, const EvalOptions& opt,
                    const DataConfig* fit_data) {
    if (ds.samples.empty()) throw ConfigError("run_eval: empty dataset");
    for (const std::string& m : opt.methods) {
        const auto& known = known_methods();
        if (std::find(known.begin(), known.end(), m) == known.end()) {
            std::string valid;
            for (const std::string& k : known) valid += (valid.empty() ? "" : ", ") + k;
            throw ConfigError("run_eval: unknown method \"" + m + "\" (valid: " + valid + ")");
        }
        if (m == "avf" && ck == nullptr)
            throw ConfigError("run_eval: method \"avf\" needs a checkpoint");
    }

    // One-time setup for learned / fitted estimators.
    std::optional<VelocityNet> net;
    bool spatial = false;
    if (std::find(opt.methods.begin(), opt.methods.end(), "avf") != opt.methods.end()) {
        net.emplace(ck->make_net(true));
        spatial = ck->config.train.spatial_domain;
    }
    std::optional<LmmseModel> sample_model;
    if (std::find(opt.methods.begin(), opt.methods.end(), "lmmse") != opt.methods.end()) {
        const DataConfig* dc = fit_data;
        if (dc == nullptr && ck != nullptr) dc = &ck->config.data;
        if (dc == nullptr)
            throw ConfigError("run_eval: method \"lmmse\" needs a data config for the fit");
        ChannelSampler sampler = dc->sampler();
        CounterRng fit_rng(opt.lmmse_fit_seed);
        std::vector<ComplexMatrix> fit_set;
        fit_set.reserve(static_cast<size_t>(opt.lmmse_fit_samples));
        for (int i = 0; i < opt.lmmse_fit_samples; ++i) fit_set.push_back(sampler(fit_rng));
        sample_model = fit_lmmse(fit_set);
        if (sample_model->n_rx != ds.n_rx || sample_model->n_tx != ds.n_tx)
            throw ConfigError("run_eval: lmmse fit dims disagree with dataset");
    }
    std::optional<LmmseModel> analytic_model;
    if (std::find(opt.methods.begin(), opt.methods.end(), "lmmse-analytic") !=
        opt.methods.end())
        analytic_model = analytic_identity_lmmse(ds.n_rx, ds.n_tx);

    const int n = effective_count(ds, opt.max_samples);
    EvalReport report;
    for (const std::string& method : opt.methods) {
        const bool learned = method == "avf";
        const std::vector<int> nfes = learned ? opt.nfe_list : std::vector<int>{1};
        for (double snr_db : opt.snr_db) {
            const SnrSpec snr = SnrSpec::from_db(snr_db);
            std::optional<LmmseFilter> filter;
            if (method == "lmmse")
                filter = make_lmmse_filter(*sample_model, snr.noise_variance);
            else if (method == "lmmse-analytic")
                filter = make_lmmse_filter(*analytic_model, snr.noise_variance);
            for (int nfe : nfes) {
                CounterRng rng = cell_rng(opt.seed, method, snr_db, nfe);
                std::vector<ComplexMatrix> ests, truths;
                ests.reserve(static_cast<size_t>(n));
                truths.reserve(static_cast<size_t>(n));
                for (int i = 0; i < n; ++i) {
                    const ComplexMatrix& h = ds.samples[static_cast<size_t>(i)];
                    ComplexMatrix h_hat = noisy_observation(h, snr, rng);
                    ComplexMatrix est;
                    if (method == "ls") {
                        est = ls_estimate(h_hat);
                    } else if (method == "avf") {
                        est = spatial
                                  ? infer(*net, h_hat, nfe, opt.literal_step)
                                  : from_angular(
                                        infer(*net, to_angular(h_hat), nfe, opt.literal_step));
                    } else {
                        est = apply_lmmse_filter(*filter, h_hat);
                    }
                    ests.push_back(std::move(est));
                    truths.push_back(h);
                }
                EvalRow row;
                row.method = method;
                row.snr_db = snr_db;
                row.nfe = nfe;
                row.nmse_db = nmse_db(ests, truths);
                row.n_samples = n;
                row.seed = opt.seed;
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

EvalReport run_latency_bench(const Checkpoint& ck, const Dataset& ds, const LatencyOptions& opt) {
    if (opt.repetitions < 100)
        throw ConfigError("run_latency_bench: repetitions must be >= 100, got " +
                          std::to_string(opt.repetitions));
    if (ds.samples.empty()) throw ConfigError("run_latency_bench: empty dataset");
    VelocityNet net = ck.make_net(true);
    const bool spatial = ck.config.train.spatial_domain;
    const SnrSpec snr = SnrSpec::from_db(opt.snr_db);

    EvalReport report;
    for (int nfe : opt.nfe_list) {
        CounterRng rng = cell_rng(opt.seed, "latency", opt.snr_db, nfe);

        // Pre-draw observations so the timed region is estimation only.
        const int pool = static_cast<int>(std::min<size_t>(ds.samples.size(), 64));
        std::vector<ComplexMatrix> obs;
        obs.reserve(static_cast<size_t>(pool));
        for (int i = 0; i < pool; ++i)
            obs.push_back(noisy_observation(ds.samples[static_cast<size_t>(i)], snr, rng));
        std::vector<ComplexMatrix> obs_ang;
        if (!opt.end_to_end && !spatial) {
            obs_ang.reserve(obs.size());
            for (const ComplexMatrix& o : obs) obs_ang.push_back(to_angular(o));
        }

        std::vector<double> times_ms;
        times_ms.reserve(static_cast<size_t>(opt.repetitions));
        {
            CheckedGuard guard(false);
            using clock = std::chrono::steady_clock;
            for (int rep = -10; rep < opt.repetitions; ++rep) {
                const size_t idx = static_cast<size_t>((rep + 10) % pool);
                const auto start = clock::now();
                ComplexMatrix est;
                if (opt.end_to_end && !spatial)
                    est = from_angular(infer(net, to_angular(obs[idx]), nfe, opt.literal_step));
                else if (!spatial)
                    est = infer(net, obs_ang[idx], nfe, opt.literal_step);
                else
                    est = infer(net, obs[idx], nfe, opt.literal_step);
                const auto stop = clock::now();
                if (est.rows() != ds.n_rx) throw NumericError("latency: bad estimate dims");
                if (rep >= 0)
                    times_ms.push_back(
                        std::chrono::duration<double, std::milli>(stop - start).count());
            }
        }

        // NMSE context at the same SNR/nfe over fresh draws.
        std::vector<ComplexMatrix> ests, truths;
        const int m = static_cast<int>(
            std::min<size_t>(ds.samples.size(), static_cast<size_t>(opt.nmse_samples)));
        for (int i = 0; i < m; ++i) {
            const ComplexMatrix& h = ds.samples[static_cast<size_t>(i)];
            ComplexMatrix h_hat = noisy_observation(h, snr, rng);
            ests.push_back(spatial ? infer(net, h_hat, nfe, opt.literal_step)
                                   : from_angular(
                                         infer(net, to_angular(h_hat), nfe, opt.literal_step)));
            truths.push_back(h);
        }

        EvalRow row;
        row.method = "avf";
        row.snr_db = opt.snr_db;
        row.nfe = nfe;
        row.nmse_db = nmse_db(ests, truths);
        row.latency_ms_median = percentile(times_ms, 0.5);
        row.latency_ms_p90 = percentile(times_ms, 0.9);
        row.n_samples = opt.repetitions;
        row.seed = opt.seed;
        report.rows.push_back(std::move(row));
    }
    return report;
}

EvalReport run_sweep_nfe(const Checkpoint& ck, const Dataset& ds, const SweepOptions& opt) {
    EvalOptions eopt;
    eopt.methods = {"avf"};
    eopt.snr_db = opt.snr_db;
    eopt.nfe_list = opt.nfe_list;
    eopt.seed = opt.seed;
    eopt.max_samples = opt.max_samples;
    eopt.literal_step = opt.literal_step;
    EvalReport report = run_eval(&ck, ds, eopt);

    auto find_nmse = [&report](double snr, int nfe) -> const double* {
        for (const EvalRow& r : report.rows)
            if (r.snr_db == snr && r.nfe == nfe) return &r.nmse_db;
        return nullptr;
    };

    nlohmann::json gains = nlohmann::json::array();
    for (double snr : opt.snr_db) {
        const double* base = find_nmse(snr, 1);
        for (int nfe : opt.nfe_list) {
            const double* cur = find_nmse(snr, nfe);
            if (base == nullptr || cur == nullptr) continue;
            nlohmann::json row;
            row["snr_db"] = snr;
            row["nfe"] = nfe;
            row["nmse_db"] = *cur;
            row["gain_db"] = *base - *cur; // positive = better than 1-NFE
            gains.push_back(std::move(row));
        }
    }
    report.extra["gain_over_1nfe"] = std::move(gains);

    if (!opt.snr_db.empty()) {
        const double hi = *std::max_element(opt.snr_db.begin(), opt.snr_db.end());
        const double lo = *std::min_element(opt.snr_db.begin(), opt.snr_db.end());
        nlohmann::json flags = nlohmann::json::object();
        const double *hi1 = find_nmse(hi, 1), *hi4 = find_nmse(hi, 4);
        if (hi1 != nullptr && hi4 != nullptr)
            flags["high_snr_multi_nfe_ok"] = (*hi4 <= *hi1 + 0.2);
        const double *lo1 = find_nmse(lo, 1), *lo20 = find_nmse(lo, 20);
        if (lo1 != nullptr && lo20 != nullptr)
            flags["low_snr_one_nfe_ok"] = (*lo1 <= *lo20 + 0.2);
        if (!flags.empty()) report.extra["trend_flags"] = std::move(flags);
    }
    return report;
}

std::string sweep_gain_csv(const EvalReport& report) {
    std::string csv = "snr_db,nfe,nmse_db,gain_db\n";
    if (!report.extra.contains("gain_over_1nfe")) return csv;
    for (const auto& row : report.extra.at("gain_over_1nfe")) {
        csv += format_g6(row.at("snr_db").get<double>()) + ",";
        csv += std::to_string(row.at("nfe").get<int>()) + ",";
        csv += format_g6(row.at("nmse_db").get<double>()) + ",";
        csv += format_g6(row.at("gain_db").get<double>()) + "\n";
    }
    return csv;
}

} // namespace avf

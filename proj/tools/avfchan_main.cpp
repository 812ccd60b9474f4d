// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0
//
// avfchan command-line front end.
//
// Verbs: gen-data, train, eval, sweep-nfe, bench-latency, inspect-checkpoint.
// Exit codes: 0 success, 2 configuration/argument error, 3 numeric failure,
// 4 I/O error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avf/bench.hpp"
#include "avf/checkpoint.hpp"
#include "avf/config.hpp"
#include "avf/flow.hpp"

namespace {

using namespace avf;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for write: " + path);
    os << text;
    if (!os) throw IoError("write failed: " + path);
}

void emit_report(const EvalReport& report, const std::string& out_prefix, bool json_stdout) {
    const std::string json_text = report.to_json().dump(2) + "\n";
    if (!out_prefix.empty()) {
        write_text(out_prefix + ".csv", report.to_csv());
        write_text(out_prefix + ".json", json_text);
        std::cerr << "wrote " << out_prefix << ".csv and " << out_prefix << ".json\n";
    } else if (json_stdout) {
        std::cout << json_text;
    } else {
        std::cout << report.to_csv();
    }
}

struct GenDataArgs {
    std::string out;
    std::string kind = "clustered";
    int count = 10000;
    uint64_t seed = 0;
    int n_rx = 16;
    int n_tx = 64;
    int n_paths = 3;
    double spread_deg = 10.0;
    double center_range_deg = 60.0;
    bool on_grid = false;
    bool no_normalize = false;
};

int cmd_gen_data(const GenDataArgs& a) {
    ClusterConfig cfg;
    cfg.n_rx = a.n_rx;
    cfg.n_tx = a.n_tx;
    cfg.n_paths = a.n_paths;
    cfg.angle_spread_deg = a.spread_deg;
    cfg.center_range_deg = a.center_range_deg;
    cfg.on_grid = a.on_grid;
    Dataset ds;
    if (a.kind == "clustered")
        ds = make_clustered_dataset(cfg, a.count, a.seed, !a.no_normalize);
    else if (a.kind == "gaussian")
        ds = make_gaussian_dataset(a.n_rx, a.n_tx, a.count, a.seed, !a.no_normalize);
    else
        throw ConfigError("gen-data: kind must be clustered or gaussian, got \"" + a.kind +
                          "\"");
    save_dataset(ds, a.out);
    double mean_energy = 0.0;
    for (const ComplexMatrix& h : ds.samples) mean_energy += fro_norm2(h);
    if (!ds.samples.empty())
        mean_energy /= static_cast<double>(ds.samples.size()) * a.n_rx * a.n_tx;
    std::cout << "wrote " << a.out << ": " << ds.samples.size() << " samples " << a.n_rx << "x"
              << a.n_tx << ", mean ||H||_F^2 / (Nrx*Ntx) = " << format_g6(mean_energy) << "\n";
    return 0;
}

struct TrainArgs {
    std::string config_path;
    std::string out;
    int64_t log_every = 100;
    std::optional<uint64_t> seed_override;
    std::optional<int64_t> iterations_override;
};

int cmd_train(const TrainArgs& a) {
    RunConfig cfg = load_run_config(a.config_path);
    if (a.seed_override) cfg.train.seed = *a.seed_override;
    if (a.iterations_override) cfg.train.iterations = *a.iterations_override;
    cfg.validate();

    VelocityNet net(cfg.backbone);
    std::cerr << "backbone: depth " << cfg.backbone.depth << ", " << net.param_count()
              << " parameters\n";

    const int64_t log_every = a.log_every > 0 ? a.log_every : 1;
    ProgressFn progress = [log_every](int64_t it, double loss) {
        if (it % log_every == 0)
            std::cerr << "iter " << it << " loss " << format_g6(loss) << "\n";
    };
    TrainOutput out = run_training(net, cfg.data.sampler(), cfg.flow, cfg.train, progress);
    if (!out.loss_curve.empty())
        std::cerr << "final loss " << format_g6(out.loss_curve.back()) << " (initial "
                  << format_g6(out.loss_curve.front()) << ")\n";

    Checkpoint ck = make_checkpoint(cfg, net, out.ema, static_cast<uint64_t>(cfg.train.iterations));
    save_checkpoint(ck, a.out);
    std::cerr << "wrote checkpoint " << a.out << "\n";
    return 0;
}

struct EvalArgs {
    std::string checkpoint;
    std::string data;
    std::string fit_config;
    std::vector<std::string> methods = {"ls"};
    std::vector<double> snrs = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
    std::vector<int> nfes = {1};
    uint64_t seed = 0;
    int samples = 0;
    int lmmse_fit_samples = 20000;
    bool literal_step = false;
    std::string out;
    bool json_stdout = false;
};

int cmd_eval(const EvalArgs& a) {
    Dataset ds = load_dataset(a.data);
    std::optional<Checkpoint> ck;
    if (!a.checkpoint.empty()) ck = load_checkpoint(a.checkpoint);
    std::optional<DataConfig> fit_data;
    if (!a.fit_config.empty()) fit_data = load_run_config(a.fit_config).data;

    EvalOptions opt;
    opt.methods = a.methods;
    opt.snr_db = a.snrs;
    opt.nfe_list = a.nfes;
    opt.seed = a.seed;
    opt.max_samples = a.samples;
    opt.lmmse_fit_samples = a.lmmse_fit_samples;
    opt.literal_step = a.literal_step;
    EvalReport report = run_eval(ck ? &*ck : nullptr, ds, opt, fit_data ? &*fit_data : nullptr);
    emit_report(report, a.out, a.json_stdout);
    return 0;
}

struct SweepArgs {
    std::string checkpoint;
    std::string data;
    std::vector<double> snrs = {-10, 0, 10, 20, 30};
    std::vector<int> nfes = {1, 2, 4, 8, 13, 20};
    uint64_t seed = 0;
    int samples = 0;
    bool literal_step = false;
    std::string out;
    bool json_stdout = false;
};

int cmd_sweep_nfe(const SweepArgs& a) {
    Dataset ds = load_dataset(a.data);
    Checkpoint ck = load_checkpoint(a.checkpoint);
    SweepOptions opt;
    opt.snr_db = a.snrs;
    opt.nfe_list = a.nfes;
    opt.seed = a.seed;
    opt.max_samples = a.samples;
    opt.literal_step = a.literal_step;
    EvalReport report = run_sweep_nfe(ck, ds, opt);
    if (!a.out.empty()) {
        write_text(a.out + ".csv", report.to_csv());
        write_text(a.out + "_gain.csv", sweep_gain_csv(report));
        write_text(a.out + ".json", report.to_json().dump(2) + "\n");
        std::cerr << "wrote " << a.out << ".csv, " << a.out << "_gain.csv, " << a.out
                  << ".json\n";
    } else if (a.json_stdout) {
        std::cout << report.to_json().dump(2) << "\n";
    } else {
        std::cout << sweep_gain_csv(report);
        if (report.extra.contains("trend_flags"))
            std::cout << "trend_flags: " << report.extra.at("trend_flags").dump() << "\n";
    }
    return 0;
}

struct LatencyArgs {
    std::string checkpoint;
    std::string data;
    std::vector<int> nfes = {1, 13};
    int reps = 200;
    double snr_db = 10.0;
    int nmse_samples = 128;
    uint64_t seed = 0;
    bool end_to_end = false;
    bool literal_step = false;
    std::string out;
    bool json_stdout = false;
};

int cmd_bench_latency(const LatencyArgs& a) {
    Dataset ds = load_dataset(a.data);
    Checkpoint ck = load_checkpoint(a.checkpoint);
    LatencyOptions opt;
    opt.nfe_list = a.nfes;
    opt.repetitions = a.reps;
    opt.snr_db = a.snr_db;
    opt.nmse_samples = a.nmse_samples;
    opt.seed = a.seed;
    opt.end_to_end = a.end_to_end;
    opt.literal_step = a.literal_step;
    EvalReport report = run_latency_bench(ck, ds, opt);
    emit_report(report, a.out, a.json_stdout);
    return 0;
}

int cmd_inspect(const std::string& path) {
    Checkpoint ck = load_checkpoint(path);
    std::cout << "checkpoint: " << path << "\n";
    std::cout << "seed: " << ck.seed << "\n";
    std::cout << "trained iterations: " << ck.iterations << "\n";
    int64_t total = 0;
    for (const Tensor& t : ck.raw) total += t.numel();
    std::cout << "parameters: " << total << " across " << ck.raw.size()
              << " arrays (raw + EMA stored)\n";
    for (size_t i = 0; i < ck.names.size(); ++i)
        std::cout << "  " << ck.names[i] << " " << ck.raw[i].shape_str() << "\n";
    std::cout << "config: " << to_json(ck.config).dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"avfchan: one-step generative MIMO channel estimation"};
    app.require_subcommand(1);

    GenDataArgs gen;
    CLI::App* sub_gen = app.add_subcommand("gen-data", "Generate a channel dataset file");
    sub_gen->add_option("--out", gen.out, "Output dataset path")->required();
    sub_gen->add_option("--kind", gen.kind, "clustered|gaussian");
    sub_gen->add_option("--count", gen.count, "Number of samples");
    sub_gen->add_option("--seed", gen.seed, "Generator seed");
    sub_gen->add_option("--n-rx", gen.n_rx, "Receive antennas");
    sub_gen->add_option("--n-tx", gen.n_tx, "Transmit antennas");
    sub_gen->add_option("--paths", gen.n_paths, "Clustered: number of paths");
    sub_gen->add_option("--spread-deg", gen.spread_deg, "Clustered: angle spread (deg)");
    sub_gen->add_option("--center-range-deg", gen.center_range_deg,
                        "Clustered: cluster-center range (deg)");
    sub_gen->add_flag("--on-grid", gen.on_grid, "Clustered: snap angles to the DFT grid");
    sub_gen->add_flag("--no-normalize", gen.no_normalize,
                      "Skip global energy normalization");

    TrainArgs train;
    CLI::App* sub_train = app.add_subcommand("train", "Train a model from a JSON config");
    sub_train->add_option("--config", train.config_path, "JSON config path")->required();
    sub_train->add_option("--out", train.out, "Output checkpoint path")->required();
    sub_train->add_option("--log-every", train.log_every, "Loss logging period");
    uint64_t seed_ov = 0;
    int64_t iter_ov = 0;
    CLI::Option* o_seed = sub_train->add_option("--seed", seed_ov, "Override config seed");
    CLI::Option* o_iter =
        sub_train->add_option("--iterations", iter_ov, "Override config iterations");

    EvalArgs ev;
    CLI::App* sub_eval = app.add_subcommand("eval", "NMSE evaluation grid");
    sub_eval->add_option("--checkpoint", ev.checkpoint, "Checkpoint path (needed for avf)");
    sub_eval->add_option("--data", ev.data, "Dataset path")->required();
    sub_eval->add_option("--fit-config", ev.fit_config,
                         "JSON config whose data section drives the lmmse fit");
    sub_eval->add_option("--methods", ev.methods, "ls,lmmse,lmmse-analytic,avf")
        ->delimiter(',');
    sub_eval->add_option("--snrs", ev.snrs, "SNR grid in dB")->delimiter(',');
    sub_eval->add_option("--nfes", ev.nfes, "NFE list for learned methods")->delimiter(',');
    sub_eval->add_option("--seed", ev.seed, "Master evaluation seed");
    sub_eval->add_option("--samples", ev.samples, "Cap on samples per cell (0 = all)");
    sub_eval->add_option("--lmmse-fit-samples", ev.lmmse_fit_samples,
                         "Fresh channels for the lmmse fit");
    sub_eval->add_flag("--literal-step", ev.literal_step,
                       "Inference update without the 1/nfe factor");
    sub_eval->add_option("--out", ev.out, "Report path prefix (.csv/.json)");
    sub_eval->add_flag("--json", ev.json_stdout, "Print JSON instead of CSV on stdout");

    SweepArgs sw;
    CLI::App* sub_sweep = app.add_subcommand("sweep-nfe", "NFE sweep with gain-over-1-NFE");
    sub_sweep->add_option("--checkpoint", sw.checkpoint, "Checkpoint path")->required();
    sub_sweep->add_option("--data", sw.data, "Dataset path")->required();
    sub_sweep->add_option("--snrs", sw.snrs, "SNR grid in dB")->delimiter(',');
    sub_sweep->add_option("--nfes", sw.nfes, "NFE list")->delimiter(',');
    sub_sweep->add_option("--seed", sw.seed, "Master evaluation seed");
    sub_sweep->add_option("--samples", sw.samples, "Cap on samples per cell (0 = all)");
    sub_sweep->add_flag("--literal-step", sw.literal_step,
                        "Inference update without the 1/nfe factor");
    sub_sweep->add_option("--out", sw.out, "Report path prefix");
    sub_sweep->add_flag("--json", sw.json_stdout, "Print JSON instead of CSV on stdout");

    LatencyArgs lat;
    CLI::App* sub_lat = app.add_subcommand("bench-latency", "Single-thread latency benchmark");
    sub_lat->add_option("--checkpoint", lat.checkpoint, "Checkpoint path")->required();
    sub_lat->add_option("--data", lat.data, "Dataset path")->required();
    sub_lat->add_option("--nfes", lat.nfes, "NFE list")->delimiter(',');
    sub_lat->add_option("--reps", lat.reps, "Timed repetitions (>= 100)");
    sub_lat->add_option("--snr", lat.snr_db, "SNR (dB) for the NMSE context column");
    sub_lat->add_option("--nmse-samples", lat.nmse_samples, "Samples behind the NMSE column");
    sub_lat->add_option("--seed", lat.seed, "Seed");
    sub_lat->add_flag("--end-to-end", lat.end_to_end,
                      "Time angular transforms along with the network");
    sub_lat->add_flag("--literal-step", lat.literal_step,
                      "Inference update without the 1/nfe factor");
    sub_lat->add_option("--out", lat.out, "Report path prefix");
    sub_lat->add_flag("--json", lat.json_stdout, "Print JSON instead of CSV on stdout");

    std::string inspect_path;
    CLI::App* sub_inspect = app.add_subcommand("inspect-checkpoint", "Describe a checkpoint");
    sub_inspect->add_option("--checkpoint", inspect_path, "Checkpoint path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (sub_gen->parsed()) return cmd_gen_data(gen);
        if (sub_train->parsed()) {
            if (o_seed->count() > 0) train.seed_override = seed_ov;
            if (o_iter->count() > 0) train.iterations_override = iter_ov;
            return cmd_train(train);
        }
        if (sub_eval->parsed()) return cmd_eval(ev);
        if (sub_sweep->parsed()) return cmd_sweep_nfe(sw);
        if (sub_lat->parsed()) return cmd_bench_latency(lat);
        if (sub_inspect->parsed()) return cmd_inspect(inspect_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

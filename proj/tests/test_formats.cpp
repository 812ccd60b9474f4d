// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "avf/channel.hpp"
#include "avf/checkpoint.hpp"
#include "avf/config.hpp"
#include "avf/metrics.hpp"
#include "oracles.hpp"

using namespace avf;

namespace {

std::string file_bytes(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

RunConfig tiny_run_config() {
    RunConfig cfg;
    cfg.backbone.hidden_planes = 8;
    cfg.backbone.depth = 3;
    cfg.data.kind = "gaussian";
    cfg.data.cluster.n_rx = 4;
    cfg.data.cluster.n_tx = 4;
    cfg.train.iterations = 2;
    cfg.train.batch_size = 2;
    cfg.train.seed = 77;
    return cfg;
}

Checkpoint tiny_checkpoint() {
    RunConfig cfg = tiny_run_config();
    VelocityNet net(cfg.backbone);
    TrainOutput out = run_training(net, cfg.data.sampler(), cfg.flow, cfg.train);
    return make_checkpoint(cfg, net, out.ema, static_cast<uint64_t>(cfg.train.iterations));
}

} // namespace

TEST_CASE("nmse basics") {
    CounterRng rng(130);
    ComplexMatrix t1 = gen_gaussian(3, 3, rng);
    ComplexMatrix t2 = gen_gaussian(3, 3, rng);

    CHECK(nmse_db({t1, t2}, {t1, t2}) == -std::numeric_limits<double>::infinity());
    // All-zero estimates score exactly 0 dB.
    CHECK(nmse_db({ComplexMatrix(3, 3), ComplexMatrix(3, 3)}, {t1, t2}) == 0.0);
    // Doubling the truth leaves an error of exactly the signal energy: 0 dB.
    CHECK(nmse_db({scale(t1, 2.0)}, {t1}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("nmse pools energies before the ratio") {
    // One sample with all the energy and no error, one tiny sample fully
    // wrong: the pooled ratio is 1/101, not the 1/2 a per-sample average of
    // ratios would give.
    ComplexMatrix big(1, 1), small(1, 1);
    big(0, 0) = 10.0;  // energy 100
    small(0, 0) = 1.0; // energy 1
    ComplexMatrix small_est(1, 1); // zero: error energy 1
    const double got = nmse_db({big, small_est}, {big, small});
    CHECK(got == doctest::Approx(10.0 * std::log10(1.0 / 101.0)).epsilon(1e-12));
}

TEST_CASE("nmse argument validation") {
    ComplexMatrix a(2, 2);
    a(0, 0) = 1.0;
    CHECK_THROWS_AS(nmse_db({}, {}), ConfigError);
    CHECK_THROWS_AS(nmse_db({a, a}, {a}), ShapeError);
    CHECK_THROWS_AS(nmse_db({ComplexMatrix(2, 2)}, {ComplexMatrix(2, 2)}), NumericError);
}

TEST_CASE("report float formatting") {
    CHECK(format_g6(1.0) == "1");
    CHECK(format_g6(-10.41392) == "-10.4139");
    CHECK(format_g6(0.123456789) == "0.123457");
    CHECK(format_g6(1234567.0) == "1.23457e+06");
    CHECK(format_g6(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_g6(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_g6(0.0) == "0");
}

TEST_CASE("csv report layout is fixed") {
    EvalReport rep;
    EvalRow r;
    r.method = "ls";
    r.snr_db = 10.0;
    r.nfe = 1;
    r.nmse_db = -10.413927;
    r.latency_ms_median = 0.25;
    r.latency_ms_p90 = 0.375;
    r.n_samples = 256;
    r.seed = 42;
    rep.rows.push_back(r);
    r.method = "avf";
    r.nfe = 13;
    r.nmse_db = -std::numeric_limits<double>::infinity();
    rep.rows.push_back(r);

    const std::string want =
        "method,snr_db,nfe,nmse_db,latency_ms_median,latency_ms_p90,n_samples,seed\n"
        "ls,10,1,-10.4139,0.25,0.375,256,42\n"
        "avf,10,13,-inf,0.25,0.375,256,42\n";
    CHECK(rep.to_csv() == want);
}

TEST_CASE("json report mirrors the csv numbers exactly") {
    EvalReport rep;
    EvalRow r;
    r.method = "lmmse";
    r.snr_db = -5.0;
    r.nfe = 1;
    r.nmse_db = -3.14159265358979; // not representable in 6 significant digits
    r.latency_ms_median = 1.0 / 3.0;
    r.latency_ms_p90 = 2.0 / 3.0;
    r.n_samples = 64;
    r.seed = 7;
    rep.rows.push_back(r);
    rep.extra["note"] = true;

    nlohmann::json j = rep.to_json();
    REQUIRE(j.at("rows").size() == 1);
    const nlohmann::json& row = j.at("rows").at(0);
    CHECK(row.at("method") == "lmmse");
    // The JSON value equals the re-parsed CSV text, not the raw double.
    CHECK(row.at("nmse_db").get<double>() == std::stod(format_g6(r.nmse_db)));
    CHECK(row.at("latency_ms_median").get<double>() == std::stod(format_g6(1.0 / 3.0)));
    CHECK(row.at("nfe").get<int>() == 1);
    CHECK(j.at("extra").at("note") == true);

    // Infinities travel as the same strings the CSV uses.
    EvalReport inf_rep;
    EvalRow ir;
    ir.method = "avf";
    ir.nmse_db = -std::numeric_limits<double>::infinity();
    inf_rep.rows.push_back(ir);
    CHECK(inf_rep.to_json().at("rows").at(0).at("nmse_db") == "-inf");
    CHECK(inf_rep.to_json().count("extra") == 0);
}

TEST_CASE("run config json round-trip") {
    RunConfig cfg = tiny_run_config();
    cfg.flow.mix_ratio = 0.125;
    cfg.train.snr_grid_db = {-10.0, 0.0, 10.0};
    cfg.train.deterministic_noise = true;
    cfg.data.cluster.on_grid = true;

    RunConfig back = run_config_from_json(to_json(cfg));
    CHECK(back.backbone.hidden_planes == 8);
    CHECK(back.backbone.depth == 3);
    CHECK(back.flow.mix_ratio == 0.125);
    CHECK(back.train.snr_grid_db == cfg.train.snr_grid_db);
    CHECK(back.train.deterministic_noise == true);
    CHECK(back.train.seed == 77);
    CHECK(back.data.kind == "gaussian");
    CHECK(back.data.cluster.on_grid == true);
    CHECK(to_json(back) == to_json(cfg));
}

TEST_CASE("config parsing is strict") {
    nlohmann::json j = to_json(RunConfig{});
    j["train"]["iteraitons"] = 5; // typo
    try {
        run_config_from_json(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("train.iteraitons") != std::string::npos);
    }

    nlohmann::json sect = to_json(RunConfig{});
    sect["optimizer"] = nlohmann::json::object();
    CHECK_THROWS_AS(run_config_from_json(sect), ConfigError);

    nlohmann::json badtype = to_json(RunConfig{});
    badtype["train"]["lr"] = "fast";
    try {
        run_config_from_json(badtype);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("train.lr") != std::string::npos);
    }

    CHECK_THROWS_AS(run_config_from_json(nlohmann::json::array()), ConfigError);

    // Partial configs keep defaults for everything not mentioned.
    nlohmann::json partial = {{"backbone", {{"depth", 4}}}};
    RunConfig cfg = run_config_from_json(partial);
    CHECK(cfg.backbone.depth == 4);
    CHECK(cfg.backbone.hidden_planes == 32);
    CHECK(cfg.train.iterations == 8000);

    // Values that parse but fail validation are also rejected.
    nlohmann::json invalid = {{"backbone", {{"depth", 1}}}};
    CHECK_THROWS_AS(run_config_from_json(invalid), ConfigError);
}

TEST_CASE("config file loading") {
    const std::string p = "cfg_test.json";
    {
        std::ofstream os(p);
        os << to_json(tiny_run_config()).dump(2);
    }
    RunConfig cfg = load_run_config(p);
    CHECK(cfg.train.seed == 77);
    {
        std::ofstream os(p);
        os << "{ not json";
    }
    CHECK_THROWS_AS(load_run_config(p), ConfigError);
    CHECK_THROWS_AS(load_run_config("missing_config.json"), IoError);
    std::remove(p.c_str());
}

TEST_CASE("checkpoint round-trip is byte-exact") {
    Checkpoint ck = tiny_checkpoint();
    const std::string p1 = "ck_a.avfc";
    const std::string p2 = "ck_b.avfc";
    save_checkpoint(ck, p1);
    Checkpoint back = load_checkpoint(p1);

    CHECK(back.seed == ck.seed);
    CHECK(back.iterations == 2);
    CHECK(back.names == ck.names);
    CHECK(to_json(back.config) == to_json(ck.config));
    REQUIRE(back.raw.size() == ck.raw.size());
    for (size_t i = 0; i < ck.raw.size(); ++i) {
        CHECK(oracle::max_abs_diff(back.raw[i], ck.raw[i]) == 0.0);
        CHECK(oracle::max_abs_diff(back.ema[i], ck.ema[i]) == 0.0);
    }

    save_checkpoint(back, p2);
    CHECK(file_bytes(p1) == file_bytes(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("checkpoint nets carry the requested weights") {
    Checkpoint ck = tiny_checkpoint();
    VelocityNet raw_net = ck.make_net(false);
    VelocityNet ema_net = ck.make_net(true);
    for (size_t i = 0; i < ck.raw.size(); ++i) {
        CHECK(oracle::max_abs_diff(raw_net.params()[i], ck.raw[i]) == 0.0);
        CHECK(oracle::max_abs_diff(ema_net.params()[i], ck.ema[i]) == 0.0);
    }
    // Two optimizer steps in: EMA and raw weights already disagree.
    double diff = 0.0;
    for (size_t i = 0; i < ck.raw.size(); ++i)
        diff = std::max(diff, oracle::max_abs_diff(ck.raw[i], ck.ema[i]));
    CHECK(diff > 0.0);
}

TEST_CASE("checkpoint loader rejects corruption") {
    Checkpoint ck = tiny_checkpoint();
    const std::string p = "ck_bad.avfc";

    {
        std::ofstream os(p, std::ios::binary);
        os << "WXYZ....";
    }
    CHECK_THROWS_AS(load_checkpoint(p), IoError);

    save_checkpoint(ck, p);
    std::string bytes = file_bytes(p);
    {
        std::ofstream os(p, std::ios::binary);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK_THROWS_AS(load_checkpoint(p), IoError);
    CHECK_THROWS_AS(load_checkpoint("missing.avfc"), IoError);
    std::remove(p.c_str());
}

TEST_CASE("mismatched shapes are reported with parameter names") {
    Checkpoint ck = tiny_checkpoint();
    ck.ema[2] = Tensor::zeros({8, 8, 5, 5});
    try {
        (void)ck.make_net(true);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("conv1.weight") != std::string::npos);
    }
    ck.ema.pop_back();
    CHECK_THROWS_AS(ck.make_net(true), ConfigError);
}

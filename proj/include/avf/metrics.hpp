// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avf/complexmat.hpp"

#include <json.hpp>

namespace avf {

/// Ratio-of-sums NMSE in dB: 10·log10(Σ‖est−truth‖²_F / Σ‖truth‖²_F).
/// Returns −inf when the total error is exactly zero. Throws ConfigError on
/// an empty set, ShapeError on mismatched counts/dims.
double nmse_db(const std::vector<ComplexMatrix>& estimates,
               const std::vector<ComplexMatrix>& truths);

/// Fixed report float format: 6 significant digits, infinities spelled
/// "-inf"/"inf" so report files are platform-stable.
std::string format_g6(double v);

struct EvalRow {
    std::string method;
    double snr_db = 0.0;
    int nfe = 1;
    double nmse_db = 0.0;
    double latency_ms_median = 0.0;
    double latency_ms_p90 = 0.0;
    int64_t n_samples = 0;
    uint64_t seed = 0;
};

/// Tabular report; CSV column order is fixed and the JSON mirror carries the
/// same values re-parsed from the CSV formatting, so both hold identical
/// numeric content.
struct EvalReport {
    std::vector<EvalRow> rows;
    /// Free-form flags (e.g. trend checks from the NFE sweep).
    nlohmann::json extra = nlohmann::json::object();

    std::string to_csv() const;
    nlohmann::json to_json() const;
};

} // namespace avf

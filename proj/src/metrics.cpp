// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include "avf/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace avf {

double nmse_db(const std::vector<ComplexMatrix>& estimates,
               const std::vector<ComplexMatrix>& truths) {
    if (estimates.empty() || truths.empty()) throw ConfigError("nmse_db: empty evaluation set");
    if (estimates.size() != truths.size())
        throw ShapeError("nmse_db: " + std::to_string(estimates.size()) + " estimates vs " +
                         std::to_string(truths.size()) + " truths");
    double err = 0.0, sig = 0.0;
    for (size_t i = 0; i < truths.size(); ++i) {
        require_same_shape(estimates[i], truths[i], "nmse_db");
        err += fro_norm2(sub(estimates[i], truths[i]));
        sig += fro_norm2(truths[i]);
    }
    if (sig <= 0.0) throw NumericError("nmse_db: zero truth energy");
    if (err == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(err / sig);
}

std::string format_g6(double v) {
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

namespace {

/// Round-trip a value through the report text format so CSV and JSON carry
/// numerically identical content.
nlohmann::json g6_json(double v) {
    if (std::isinf(v) || std::isnan(v)) return format_g6(v);
    return std::stod(format_g6(v));
}

} // namespace

std::string EvalReport::to_csv() const {
    std::ostringstream os;
    os << "method,snr_db,nfe,nmse_db,latency_ms_median,latency_ms_p90,n_samples,seed\n";
    for (const EvalRow& r : rows) {
        os << r.method << ',' << format_g6(r.snr_db) << ',' << r.nfe << ','
           << format_g6(r.nmse_db) << ',' << format_g6(r.latency_ms_median) << ','
           << format_g6(r.latency_ms_p90) << ',' << r.n_samples << ',' << r.seed << '\n';
    }
    return os.str();
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const EvalRow& r : rows) {
        nlohmann::json row;
        row["method"] = r.method;
        row["snr_db"] = g6_json(r.snr_db);
        row["nfe"] = r.nfe;
        row["nmse_db"] = g6_json(r.nmse_db);
        row["latency_ms_median"] = g6_json(r.latency_ms_median);
        row["latency_ms_p90"] = g6_json(r.latency_ms_p90);
        row["n_samples"] = r.n_samples;
        row["seed"] = r.seed;
        j["rows"].push_back(std::move(row));
    }
    if (!extra.empty()) j["extra"] = extra;
    return j;
}

} // namespace avf

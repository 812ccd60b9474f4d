// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include "avf/signal.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <unordered_map>

namespace avf {

PilotMatrix PilotMatrix::identity(int n_tx) { return {ComplexMatrix::identity(n_tx)}; }

PilotMatrix PilotMatrix::dft(int n_tx) { return {dft_matrix(n_tx)}; }

void PilotMatrix::validate() const {
    if (p.cols() < p.rows())
        throw ConfigError("PilotMatrix: needs Np >= Ntx, got " + std::to_string(p.rows()) + "x" +
                          std::to_string(p.cols()));
    ComplexMatrix g = matmul(p, adjoint(p));
    ComplexMatrix err = sub(g, ComplexMatrix::identity(p.rows()));
    if (max_abs(err) > 1e-10)
        throw ConfigError("PilotMatrix: P·P^H deviates from identity by " +
                          std::to_string(max_abs(err)));
}

SnrSpec SnrSpec::from_db(double db) {
    SnrSpec s;
    s.snr_db = db;
    s.snr_linear = std::pow(10.0, db / 10.0);
    s.noise_variance = std::isinf(s.snr_linear) ? 0.0 : 1.0 / s.snr_linear;
    if (!(s.noise_variance >= 0.0))
        throw ConfigError("SnrSpec: invalid snr_db " + std::to_string(db));
    return s;
}

ComplexMatrix transmit(const ComplexMatrix& h, const PilotMatrix& pilot, const SnrSpec& snr,
                       CounterRng& rng) {
    if (h.cols() != pilot.p.rows())
        throw ShapeError("transmit: H cols " + std::to_string(h.cols()) + " != pilot rows " +
                         std::to_string(pilot.p.rows()));
    ComplexMatrix y = matmul(h, pilot.p);
    if (snr.noise_variance > 0.0) {
        cplx* q = y.data();
        for (int64_t i = 0, n = y.size(); i < n; ++i) q[i] += rng.cnormal(snr.noise_variance);
    }
    return y;
}

ComplexMatrix ls_decorrelate(const ComplexMatrix& y, const PilotMatrix& pilot) {
    pilot.validate();
    return matmul(y, adjoint(pilot.p));
}

ComplexMatrix noisy_observation(const ComplexMatrix& h, const SnrSpec& snr, CounterRng& rng) {
    ComplexMatrix out = h;
    if (snr.noise_variance > 0.0) {
        cplx* q = out.data();
        for (int64_t i = 0, n = out.size(); i < n; ++i) q[i] += rng.cnormal(snr.noise_variance);
    }
    return out;
}

ComplexMatrix deterministic_observation(const ComplexMatrix& h, const SnrSpec& snr) {
    if (std::isinf(snr.snr_linear)) return h;
    return scale(h, 1.0 + 1.0 / std::sqrt(snr.snr_linear));
}

const ComplexMatrix& dft_matrix(int n) {
    static std::mutex mu;
    static std::unordered_map<int, ComplexMatrix> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    ComplexMatrix f(n, n);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
            // exp(−2πi·k·m/n)/√n; reduce k·m mod n first to keep the phase
            // argument small and the matrix exactly symmetric.
            const long km = static_cast<long>(k) * m % n;
            const double phase = -2.0 * std::numbers::pi * static_cast<double>(km) / n;
            f(k, m) = std::polar(inv_sqrt_n, phase);
        }
    return cache.emplace(n, std::move(f)).first->second;
}

ComplexMatrix to_angular(const ComplexMatrix& h) {
    const ComplexMatrix& frx = dft_matrix(h.rows());
    const ComplexMatrix& ftx = dft_matrix(h.cols());
    return matmul(matmul(frx, h), adjoint(ftx));
}

ComplexMatrix from_angular(const ComplexMatrix& h_ang) {
    const ComplexMatrix& frx = dft_matrix(h_ang.rows());
    const ComplexMatrix& ftx = dft_matrix(h_ang.cols());
    return matmul(matmul(adjoint(frx), h_ang), ftx);
}

} // namespace avf

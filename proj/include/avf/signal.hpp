// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "avf/complexmat.hpp"
#include "avf/rng.hpp"

namespace avf {

/// Pilot block P with Ntx rows and Np columns, P·Pᴴ = I (requires Np ≥ Ntx).
struct PilotMatrix {
    ComplexMatrix p;

    static PilotMatrix identity(int n_tx);
    /// Unitary DFT pilot, Np = Ntx.
    static PilotMatrix dft(int n_tx);
    /// Throws ConfigError if P·Pᴴ deviates from I by more than 1e-10.
    void validate() const;
};

/// SNR bookkeeping: per-complex-entry noise variance σ² = 1/snr_linear
/// against unit per-entry channel power. snr_db = +inf is the noise-free
/// sentinel (σ² = 0).
struct SnrSpec {
    double snr_db = 0.0;
    double snr_linear = 1.0;
    double noise_variance = 1.0;

    static SnrSpec from_db(double db);
};

/// Y = H·P + N with N i.i.d. CN(0, σ²).
ComplexMatrix transmit(const ComplexMatrix& h, const PilotMatrix& pilot, const SnrSpec& snr,
                       CounterRng& rng);

/// Ĥ = Y·Pᴴ; with unitary P the residual noise stays white with variance σ².
ComplexMatrix ls_decorrelate(const ComplexMatrix& y, const PilotMatrix& pilot);

/// Ĥ = H + CN(0, σ²) per entry: transmit + ls_decorrelate collapsed for a
/// unitary pilot, used by training and evaluation loops.
ComplexMatrix noisy_observation(const ComplexMatrix& h, const SnrSpec& snr, CounterRng& rng);

/// Ĥ = H + H/√snr_linear: the deterministic self-noise variant.
ComplexMatrix deterministic_observation(const ComplexMatrix& h, const SnrSpec& snr);

/// Unitary angular transform F_rx·H·F_txᴴ with F_n the n-point unitary DFT
/// matrix. Energy-preserving; an on-grid steering outer product maps to a
/// single nonzero coefficient.
ComplexMatrix to_angular(const ComplexMatrix& h);
/// Inverse transform F_rxᴴ·H_ang·F_tx.
ComplexMatrix from_angular(const ComplexMatrix& h_ang);

/// n-point unitary DFT matrix F[k,m] = exp(−2πi·k·m/n)/√n (cached).
const ComplexMatrix& dft_matrix(int n);

} // namespace avf

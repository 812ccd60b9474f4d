// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used only by tests. Everything here
// is written the slow, obvious way on purpose: these are the oracles the
// optimized library code is checked against.

#pragma once

#include <cmath>
#include <vector>

#include "avf/complexmat.hpp"
#include "avf/tensor.hpp"

namespace oracle {

/// Brute-force shape-preserving cross-correlation, quadruple nested loops
/// over output channel / position / input channel / kernel tap.
inline avf::Tensor conv2d_naive(const avf::Tensor& input, const avf::Tensor& kernel,
                                const avf::Tensor& bias, int padding) {
    const auto& is = input.shape();
    const auto& ks = kernel.shape();
    const int c_in = is[0], h = is[1], w = is[2];
    const int c_out = ks[0], k = ks[2];
    avf::Tensor out = avf::Tensor::zeros({c_out, h, w});
    for (int co = 0; co < c_out; ++co)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = bias[co];
                for (int ci = 0; ci < c_in; ++ci)
                    for (int ky = 0; ky < k; ++ky)
                        for (int kx = 0; kx < k; ++kx) {
                            const int iy = y + ky - padding;
                            const int ix = x + kx - padding;
                            if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                            const double iv =
                                input[(static_cast<int64_t>(ci) * h + iy) * w + ix];
                            const double kv =
                                kernel[((static_cast<int64_t>(co) * c_in + ci) * k + ky) * k +
                                       kx];
                            acc += iv * kv;
                        }
                out[(static_cast<int64_t>(co) * h + y) * w + x] = acc;
            }
    return out;
}

/// x·σ(x) evaluated in extended precision straight from the formula.
inline double silu_longdouble(double x) {
    const long double xl = x;
    return static_cast<double>(xl / (1.0L + std::exp(-xl)));
}

/// Relative error with an absolute floor for near-zero references.
inline double rel_err(double got, double want, double floor = 1e-12) {
    return std::abs(got - want) / std::max(std::abs(want), floor);
}

/// Max relative elementwise deviation between two same-shape tensors.
inline double max_rel_err(const avf::Tensor& got, const avf::Tensor& want,
                          double floor = 1e-9) {
    double m = 0.0;
    for (int64_t i = 0; i < got.numel(); ++i)
        m = std::max(m, std::abs(got[i] - want[i]) /
                            std::max(std::abs(want[i]), floor));
    return m;
}

inline double max_abs_diff(const avf::Tensor& a, const avf::Tensor& b) {
    double m = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const avf::ComplexMatrix& a, const avf::ComplexMatrix& b) {
    return avf::max_abs(avf::sub(a, b));
}

/// Slow textbook DFT of a vector (forward, unitary 1/√n scaling).
inline std::vector<avf::cplx> dft_naive(const std::vector<avf::cplx>& x) {
    const size_t n = x.size();
    std::vector<avf::cplx> out(n);
    for (size_t k = 0; k < n; ++k) {
        avf::cplx acc{0.0, 0.0};
        for (size_t m = 0; m < n; ++m) {
            const double ph = -2.0 * M_PI * static_cast<double>(k * m % n) /
                              static_cast<double>(n);
            acc += x[m] * std::polar(1.0, ph);
        }
        out[k] = acc / std::sqrt(static_cast<double>(n));
    }
    return out;
}

} // namespace oracle

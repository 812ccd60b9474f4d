// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace avf {

/// Counter-based pseudo-random generator.
///
/// Each output is a SplitMix64-style finalizer applied to
/// key + GOLDEN * counter, so the stream is a pure function of
/// (seed, draw index) and bitwise reproducible across runs.
/// `derive(stream)` yields an independent child generator, which is how
/// per-sample / per-cell seeding is done throughout the project.
class CounterRng {
  public:
    explicit CounterRng(uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    uint64_t next_u64() {
        counter_ += 1;
        return mix(key_ + kGolden * counter_);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; consumes exactly two draws.
    double normal() {
        // u1 in (0,1] so the log is finite.
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Circularly-symmetric complex normal with E|z|^2 = var.
    std::complex<double> cnormal(double var = 1.0) {
        double sd = std::sqrt(var * 0.5);
        double re = normal();
        double im = normal();
        return {sd * re, sd * im};
    }

    /// Independent child stream; children with distinct ids do not collide.
    CounterRng derive(uint64_t stream) const {
        CounterRng child;
        child.key_ = mix(key_ + mix(stream + 0xd1342543de82ef95ULL));
        return child;
    }

  private:
    CounterRng() = default;

    static constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t key_ = 0;
    uint64_t counter_ = 0;
};

} // namespace avf

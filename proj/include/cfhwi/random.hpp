// cfhwi: cell-free massive MIMO uplink with transceiver hardware impairments
// Copyright (C) 2026 The cfhwi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cfhwi {

/// Named randomness sources. Each one expands from the master seed into an
/// independent substream so toggling one source never shifts the others.
enum class Stream : std::uint64_t {
    kApPositions = 1,
    kUePositions = 2,
    kShadowing = 3,
    kChannels = 4,
    kPilotNoise = 5,
    kDataNoise = 6,
    kDistortion = 7,
    kPilotAssignment = 8,
    kSymbols = 9,
    kGeometrySample = 10,
};

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for (master, stream, index). Pure function; the index is typically a trial or sample number.
constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) noexcept {
    return mix64(mix64(mix64(master) ^ static_cast<std::uint64_t>(stream)) + index);
}

inline Engine make_engine(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
    return Engine(derive_seed(master, stream, index));
}

/// Circularly-symmetric complex Gaussian sampler, CN(0, variance).
class ComplexNormal {
public:
    std::complex<double> operator()(Engine& rng, double variance) {
        // Always consumes two draws so the stream position never depends on the variance.
        const double s = variance > 0.0 ? std::sqrt(variance / 2.0) : 0.0;
        const double re = normal_(rng);
        const double im = normal_(rng);
        return {s * re, s * im};
    }

private:
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace cfhwi

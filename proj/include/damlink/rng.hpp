// SPDX-License-Identifier: Apache-2.0
//
// damlink: link-level simulator for delay-aligned single-carrier and
// cyclic-prefix OFDM transmission over sparse multipath MIMO channels.
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
// -------------------------------------------------------------------------

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace damlink {

// One step of the splitmix64 sequence starting at x. Used both as a seed
// expander and as the mixing function behind derive_seed.
std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent stream seed from a base seed and a stream index.
// Identical (base, stream) pairs always give identical seeds, so simulation
// blocks can be distributed across workers in any order without changing
// the drawn values.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Deterministic random source. All distributions are implemented here on
// top of the raw 64-bit engine output so that sequences are identical
// across platforms and standard-library versions; std::*_distribution is
// deliberately not used, its output is implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform on [0, 1), with 53 random mantissa bits.
    double uniform01();

    // Uniform on [lo, hi).
    double uniform(double lo, double hi);

    // Uniform on the integers {lo, ..., hi}, endpoints included.
    // Unbiased via rejection sampling.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    // Standard normal via the Box-Muller transform. Values come in pairs;
    // the second of each pair is cached and returned by the next call.
    double normal();

    // Circularly symmetric complex normal with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance);

  private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool have_cached_normal_ = false;
};

}  // namespace damlink

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

#include "damlink/rng.hpp"

#include <cmath>
#include <limits>

#include "damlink/errors.hpp"

namespace damlink {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    // Two mixing rounds so that nearby (base, stream) pairs share no
    // low-order structure.
    return splitmix64(splitmix64(base ^ 0xA3C59AC2F0525D1BULL) + stream);
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform01() {
    // Top 53 bits scaled by 2^-53; the result is always in [0, 1).
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    if (!(lo <= hi)) {
        throw DomainError("uniform: empty interval");
    }
    return lo + (hi - lo) * uniform01();
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) {
        throw DomainError("uniform_int: empty range");
    }
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1ULL;
    if (span == 0ULL) {  // full 64-bit range
        return static_cast<std::int64_t>(next_u64());
    }
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / span * span;
    std::uint64_t r = next_u64();
    while (r >= limit) {
        r = next_u64();
    }
    return lo + static_cast<std::int64_t>(r % span);
}

double Rng::normal() {
    if (have_cached_normal_) {
        have_cached_normal_ = false;
        return cached_normal_;
    }
    // Box-Muller on (0,1] x [0,1); 1 - uniform01() keeps the log argument
    // strictly positive.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_normal_ = radius * std::sin(angle);
    have_cached_normal_ = true;
    return radius * std::cos(angle);
}

std::complex<double> Rng::complex_normal(double variance) {
    if (variance < 0.0) {
        throw DomainError("complex_normal: negative variance");
    }
    const double scale = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {scale * re, scale * im};
}

}  // namespace damlink

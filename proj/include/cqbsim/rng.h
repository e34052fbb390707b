// Copyright 2026 The cqbsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CQBSIM_RNG_H
#define CQBSIM_RNG_H

#include <cstdint>
#include <random>

namespace cqbsim {

/// splitmix64 finalizer; used to derive independent streams from (seed, index).
uint64_t splitmix64(uint64_t x);

/// Deterministic random stream. The std distributions are implementation defined,
/// so the draws below are written out to keep outputs identical across toolchains.
class Rng {
   public:
    explicit Rng(uint64_t seed) : engine_(splitmix64(seed)) {
    }
    /// Stream for task `index` of a run seeded with `seed`.
    static Rng derive(uint64_t seed, uint64_t index) {
        return Rng(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
    }

    uint64_t next_u64() {
        return engine_();
    }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n);
    /// Standard normal via Box-Muller.
    double normal();
    int binomial(int n, double p);

   private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0;
};

}  // namespace cqbsim

#endif

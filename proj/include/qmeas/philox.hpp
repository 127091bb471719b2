// Copyright 2026 The qmeas authors
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

#ifndef QMEAS_PHILOX_HPP
#define QMEAS_PHILOX_HPP

#include <array>
#include <cstdint>

namespace qmeas {

/// Philox-4x32 counter-based generator, 10 rounds.
/// Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC 2011.
///
/// Being a pure function of (key, counter) it needs no carried state: any
/// trial index can be evaluated in any order on any worker and always yields
/// the same bits, which is what makes sharded runs merge deterministically.
class Philox4x32 {
  public:
    explicit Philox4x32(std::uint64_t key)
        : key_lo_(static_cast<std::uint32_t>(key)),
          key_hi_(static_cast<std::uint32_t>(key >> 32)) {}

    std::array<std::uint32_t, 4> block(std::uint64_t counter_lo,
                                       std::uint64_t counter_hi = 0) const {
        std::array<std::uint32_t, 4> x{
            static_cast<std::uint32_t>(counter_lo),
            static_cast<std::uint32_t>(counter_lo >> 32),
            static_cast<std::uint32_t>(counter_hi),
            static_cast<std::uint32_t>(counter_hi >> 32),
        };
        std::uint32_t k0 = key_lo_;
        std::uint32_t k1 = key_hi_;
        for (int round = 0; round < 10; round++) {
            std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * x[0];
            std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * x[2];
            std::array<std::uint32_t, 4> next{
                static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k0,
                static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k1,
                static_cast<std::uint32_t>(p0),
            };
            x = next;
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return x;
    }

    /// 53-bit uniform double in [0, 1).
    static double uniform(std::uint32_t hi, std::uint32_t lo) {
        std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

  private:
    static constexpr std::uint32_t kMult0 = 0xD2511F53u;
    static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    std::uint32_t key_lo_;
    std::uint32_t key_hi_;
};

/// The two uniform deviates a single protocol trial consumes: one for the
/// first measurement, one for the postselection.
struct TrialRandoms {
    double first;
    double second;
};

inline TrialRandoms trial_randoms(std::uint64_t seed, std::uint64_t trial_index) {
    auto block = Philox4x32(seed).block(trial_index);
    return {Philox4x32::uniform(block[0], block[1]), Philox4x32::uniform(block[2], block[3])};
}

}  // namespace qmeas

#endif

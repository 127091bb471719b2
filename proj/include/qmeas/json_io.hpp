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

#ifndef QMEAS_JSON_IO_HPP
#define QMEAS_JSON_IO_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "qmeas/montecarlo.hpp"

namespace qmeas {

inline std::string hex64(std::uint64_t value) {
    static const char *digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; k--) {
        out[static_cast<std::size_t>(k)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

inline nlohmann::ordered_json to_json(const EstimatorResult &result) {
    nlohmann::ordered_json j;
    j["protocol_hash"] = hex64(result.protocol_hash);
    j["seed"] = result.seed;
    j["shards"] = result.shards;
    j["n_trials"] = result.n_trials;
    j["leaves"] = nlohmann::ordered_json::array();
    for (const auto &leaf : result.leaves) {
        j["leaves"].push_back({{"path", leaf.path}, {"count", leaf.count}});
    }
    j["estimates"] = nlohmann::ordered_json::array();
    for (const auto &e : result.estimates) {
        j["estimates"].push_back({{"name", e.name}, {"value", e.value}, {"stderr", e.stderr_value}});
    }
    return j;
}

inline std::string estimator_result_json(const EstimatorResult &result) {
    return to_json(result).dump(2) + "\n";
}

}  // namespace qmeas

#endif

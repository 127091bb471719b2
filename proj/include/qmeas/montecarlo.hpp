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

#ifndef QMEAS_MONTECARLO_HPP
#define QMEAS_MONTECARLO_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qmeas/discrete_detector.hpp"
#include "qmeas/null_protocol.hpp"
#include "qmeas/philox.hpp"
#include "qmeas/protocol.hpp"

namespace qmeas {

/// Second-detector outcome of one trajectory. `not_applicable` marks the
/// destroyed branch of the null protocol: the system never reaches the second
/// detector alive, which counts as a silent detector when leaves are tallied.
enum class SecondStage { click, noclick, not_applicable };

struct TrajectoryOutcome {
    bool first_click;
    SecondStage second;
};

/// Closed-form branch probabilities of a two-stage measurement tree. The
/// second detector fires on the retained state itself (retain = click) or on
/// its orthogonal complement (retain = noclick).
struct TreeProbabilities {
    double p_first_click = 0.0;
    double p_second_click_given_click = 0.0;
    double p_second_click_given_noclick = 0.0;
    bool destroyed_on_click = false;

    std::array<double, 4> leaf_probabilities() const {
        double sc = destroyed_on_click ? 0.0 : p_second_click_given_click;
        return {
            p_first_click * sc,
            p_first_click * (1.0 - sc),
            (1.0 - p_first_click) * p_second_click_given_noclick,
            (1.0 - p_first_click) * (1.0 - p_second_click_given_noclick),
        };
    }
};

inline double second_click_probability(const Ket &state, const Ket &retained,
                                       RetainBranch retain) {
    double p_retained_state = fidelity(retained, state);
    return retain == RetainBranch::click ? p_retained_state : 1.0 - p_retained_state;
}

inline TreeProbabilities wv_tree(const Ket &i, const DetectorParams &d, const Ket &f,
                                 RetainBranch retain = RetainBranch::click) {
    require_qubit(f, "wv_tree");
    require_normalized(f, "wv_tree");
    BackActionPair pair = backaction_states(i, d);
    TreeProbabilities tree;
    tree.p_first_click = pair.p_click;
    if (pair.i_plus) {
        tree.p_second_click_given_click = second_click_probability(*pair.i_plus, f, retain);
    }
    if (pair.i_minus) {
        tree.p_second_click_given_noclick = second_click_probability(*pair.i_minus, f, retain);
    }
    return tree;
}

inline TreeProbabilities nwv_tree(const Ket &i, const PartialCollapseSpec &spec, const Ket &f,
                                  RetainBranch retain = RetainBranch::noclick) {
    require_qubit(f, "nwv_tree");
    require_normalized(f, "nwv_tree");
    PartialCollapseOutcomes branches = partial_collapse(i, spec);
    TreeProbabilities tree;
    tree.p_first_click = branches.click.probability;
    tree.destroyed_on_click = true;
    if (branches.null.post_state) {
        tree.p_second_click_given_noclick =
            second_click_probability(*branches.null.post_state, f, retain);
    }
    return tree;
}

inline TrajectoryOutcome sample_tree(const TreeProbabilities &tree, const TrialRandoms &r) {
    bool first = r.first < tree.p_first_click;
    if (first && tree.destroyed_on_click) {
        return {true, SecondStage::not_applicable};
    }
    double p_second = first ? tree.p_second_click_given_click : tree.p_second_click_given_noclick;
    return {first, r.second < p_second ? SecondStage::click : SecondStage::noclick};
}

inline TrajectoryOutcome sample_wv_trajectory(const TrialRandoms &r, const Ket &i,
                                              const DetectorParams &d, const Ket &f,
                                              RetainBranch retain = RetainBranch::click) {
    return sample_tree(wv_tree(i, d, f, retain), r);
}

inline TrajectoryOutcome sample_nwv_trajectory(const TrialRandoms &r, const Ket &i,
                                               const PartialCollapseSpec &spec, const Ket &f,
                                               RetainBranch retain = RetainBranch::noclick) {
    return sample_tree(nwv_tree(i, spec, f, retain), r);
}

struct LeafCount {
    std::string path;
    std::uint64_t count;
};

struct Estimate {
    std::string name;
    double value;
    double stderr_value;
};

struct EstimatorResult {
    std::uint64_t protocol_hash = 0;
    std::uint64_t seed = 0;
    std::uint32_t shards = 1;
    std::uint64_t n_trials = 0;
    std::vector<LeafCount> leaves;
    std::vector<Estimate> estimates;
};

inline const std::array<std::string, 4> &leaf_paths() {
    static const std::array<std::string, 4> paths{
        "click/click",
        "click/noclick",
        "noclick/click",
        "noclick/noclick",
    };
    return paths;
}

namespace mc_detail {

inline std::size_t leaf_index(const TrajectoryOutcome &outcome) {
    // not_applicable tallies with the silent second detector.
    bool second_click = outcome.second == SecondStage::click;
    return (outcome.first_click ? 0u : 2u) + (second_click ? 0u : 1u);
}

inline TreeProbabilities protocol_tree(const ProtocolSpec &protocol) {
    if (protocol.kind == ProtocolKind::wv) {
        const auto *stage = protocol.detector();
        if (!stage) {
            throw std::invalid_argument("wv protocol requires a detector stage");
        }
        return wv_tree(protocol.preselect, stage->params(), protocol.postselect, protocol.retain);
    }
    if (protocol.kind == ProtocolKind::nwv) {
        const auto *stage = protocol.collapse();
        if (!stage) {
            throw std::invalid_argument("nwv protocol requires a collapse stage");
        }
        return nwv_tree(protocol.preselect, *stage, protocol.postselect, protocol.retain);
    }
    throw std::invalid_argument("trajectory sampling is defined for wv and nwv protocols only");
}

inline double binomial_stderr(double p_hat, std::uint64_t n) {
    if (n == 0) {
        return 0.0;
    }
    return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

}  // namespace mc_detail

/// Conditional estimates derived from raw leaf counts. Shared between the
/// sampler and the exact evaluators so that both sides always talk about the
/// same events.
inline std::vector<Estimate> estimates_from_counts(const ProtocolSpec &protocol,
                                                   const std::array<std::uint64_t, 4> &counts,
                                                   std::uint64_t n_trials) {
    using mc_detail::binomial_stderr;
    const double n = static_cast<double>(n_trials);
    std::uint64_t first_click = counts[0] + counts[1];
    bool retain_click = protocol.retain == RetainBranch::click;
    std::uint64_t retained = retain_click ? counts[0] + counts[2] : counts[1] + counts[3];
    std::uint64_t first_and_retained = retain_click ? counts[0] : counts[1];

    std::vector<Estimate> out;
    double p_first = static_cast<double>(first_click) / n;
    out.push_back({"p_first_click", p_first, binomial_stderr(p_first, n_trials)});
    double p_retained = static_cast<double>(retained) / n;
    out.push_back({"p_retained", p_retained, binomial_stderr(p_retained, n_trials)});
    if (retained > 0) {
        double p_cond = static_cast<double>(first_and_retained) / static_cast<double>(retained);
        double se_cond = binomial_stderr(p_cond, retained);
        out.push_back({"p_first_given_retained", p_cond, se_cond});
        if (const auto *stage = protocol.detector()) {
            double response = stage->params().response();
            if (std::abs(response) >= kZeroStrengthTol) {
                out.push_back({"conditional_calibrated",
                               (p_cond - std::norm(stage->params().delta)) / response,
                               se_cond / std::abs(response)});
            }
        } else if (const auto *stage = protocol.collapse()) {
            if (stage->p1 > 0.0) {
                out.push_back({"conditional_over_p", p_cond / stage->p1, se_cond / stage->p1});
            }
        }
    }
    return out;
}

/// Samples the protocol tree n_trials times. Trial t always consumes the
/// Philox block keyed by (seed, t), so a run sharded S ways merges to byte
/// identical counts for every S; shards only partition the index range and
/// may execute on any number of workers.
inline EstimatorResult estimate(const ProtocolSpec &protocol, std::uint64_t n_trials,
                                std::uint64_t seed, std::uint32_t shards) {
    if (n_trials == 0) {
        throw std::invalid_argument("estimate: n_trials must be >= 1");
    }
    if (shards == 0) {
        throw std::invalid_argument("estimate: shards must be >= 1");
    }
    TreeProbabilities tree = mc_detail::protocol_tree(protocol);

    auto run_shard = [&tree, seed](std::uint64_t begin,
                                   std::uint64_t end) -> std::array<std::uint64_t, 4> {
        std::array<std::uint64_t, 4> counts{0, 0, 0, 0};
        for (std::uint64_t t = begin; t < end; t++) {
            counts[mc_detail::leaf_index(sample_tree(tree, trial_randoms(seed, t)))]++;
        }
        return counts;
    };

    std::array<std::uint64_t, 4> counts{0, 0, 0, 0};
    std::uint64_t per_shard = n_trials / shards;
    if (shards == 1 || per_shard == 0) {
        counts = run_shard(0, n_trials);
    } else {
        std::vector<std::future<std::array<std::uint64_t, 4>>> futures;
        futures.reserve(shards);
        for (std::uint32_t s = 0; s < shards; s++) {
            std::uint64_t begin = per_shard * s;
            std::uint64_t end = s + 1 == shards ? n_trials : begin + per_shard;
            futures.push_back(std::async(std::launch::async, run_shard, begin, end));
        }
        for (auto &f : futures) {
            std::array<std::uint64_t, 4> local = f.get();
            for (std::size_t k = 0; k < 4; k++) {
                counts[k] += local[k];
            }
        }
    }

    EstimatorResult result;
    result.protocol_hash = protocol_hash(protocol);
    result.seed = seed;
    result.shards = shards;
    result.n_trials = n_trials;
    for (std::size_t k = 0; k < 4; k++) {
        result.leaves.push_back({leaf_paths()[k], counts[k]});
    }
    result.estimates = estimates_from_counts(protocol, counts, n_trials);
    return result;
}

struct LeafProbability {
    std::string path;
    double probability;
};

/// Exact leaf probabilities for the same tree and the same leaf naming the
/// sampler uses; this is the cross-validation target for every run.
inline std::vector<LeafProbability> exact_leaf_probabilities(const ProtocolSpec &protocol) {
    std::array<double, 4> p = mc_detail::protocol_tree(protocol).leaf_probabilities();
    std::vector<LeafProbability> out;
    for (std::size_t k = 0; k < 4; k++) {
        out.push_back({leaf_paths()[k], p[k]});
    }
    return out;
}

}  // namespace qmeas

#endif

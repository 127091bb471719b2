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

#ifndef QMEAS_WEAK_VALUES_HPP
#define QMEAS_WEAK_VALUES_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmeas/hilbert.hpp"

namespace qmeas {

/// Default threshold on |<f|i>|^2 below which conditional quantities built on
/// that overlap are reported as divergent instead of evaluated.
inline constexpr double kDefaultOverlapEpsilon = 1e-12;

/// Thrown when a pre/post overlap is too small for a conditional value to be
/// meaningful. Carries the raw numerator and the offending overlap so that
/// callers probing the divergent regime still get the pieces.
class DivergentValueError : public std::runtime_error {
  public:
    DivergentValueError(std::string what, cdouble numerator, double overlap_squared)
        : std::runtime_error(std::move(what)),
          numerator_(numerator),
          overlap_squared_(overlap_squared) {}

    cdouble numerator() const { return numerator_; }
    double overlap_squared() const { return overlap_squared_; }

  private:
    cdouble numerator_;
    double overlap_squared_;
};

/// <f|A|i> / <f|i>. Complex, and allowed to land outside the spectrum of A.
inline cdouble weak_value(const Ket &i, const Ket &f, const Observable &a,
                          double epsilon_overlap = kDefaultOverlapEpsilon) {
    require_same_space(i, f, "weak_value");
    if (a.labels() != i.labels()) {
        throw std::invalid_argument("weak_value: observable and state dimension mismatch");
    }
    require_normalized(i, "weak_value");
    require_normalized(f, "weak_value");
    cdouble numerator{};
    for (const auto &p : a.eigenpairs()) {
        numerator += p.value * inner(f, i.with_amps(p.projector.apply(i.amps())));
    }
    cdouble overlap = inner(f, i);
    double overlap_sq = std::norm(overlap);
    if (overlap_sq <= epsilon_overlap) {
        throw DivergentValueError("divergent weak value: postselection overlap below threshold",
                                  numerator, overlap_sq);
    }
    return numerator / overlap;
}

/// One term of a conditional-average decomposition of <A>. Terms whose weight
/// sits below the divergence threshold keep their slot but carry no
/// conditional value, so term counts always match the postselection basis
/// size. `contribution` is the exact weight-times-conditional product,
/// evaluated on a route that stays finite even where the conditional value
/// itself diverges; the identity checks sum these.
struct DecompositionTerm {
    double weight;
    std::optional<cdouble> conditional_value;
    cdouble contribution;
};

namespace detail {

inline void require_orthonormal_basis(const Ket &i, const std::vector<Ket> &basis,
                                      const char *what) {
    if (basis.size() != i.dim()) {
        throw std::invalid_argument(std::string(what) + ": postselection basis is incomplete");
    }
    for (std::size_t m = 0; m < basis.size(); m++) {
        require_same_space(i, basis[m], what);
        for (std::size_t n = m; n < basis.size(); n++) {
            cdouble g = inner(basis[m], basis[n]);
            double expected = m == n ? 1.0 : 0.0;
            if (std::abs(g - expected) > kIdentityTol) {
                throw std::invalid_argument(std::string(what) +
                                            ": postselection basis is not orthonormal");
            }
        }
    }
}

}  // namespace detail

/// Splits <i|A|i> into postselection-weighted weak values: weight_n is the
/// bare overlap |<f_n|i>|^2 and the conditional value is weak_value(i, f_n, A).
/// The weighted sum reconstructs the expectation exactly.
inline std::vector<DecompositionTerm> wv_decomposition(const Ket &i,
                                                       const std::vector<Ket> &basis,
                                                       const Observable &a) {
    detail::require_orthonormal_basis(i, basis, "wv_decomposition");
    if (a.labels() != i.labels()) {
        throw std::invalid_argument("wv_decomposition: observable dimension mismatch");
    }
    require_normalized(i, "wv_decomposition");
    std::vector<DecompositionTerm> terms;
    terms.reserve(basis.size());
    for (const auto &f : basis) {
        cdouble numerator{};
        for (const auto &p : a.eigenpairs()) {
            numerator += p.value * inner(f, i.with_amps(p.projector.apply(i.amps())));
        }
        cdouble overlap = inner(f, i);
        double weight = std::norm(overlap);
        cdouble contribution = std::conj(overlap) * numerator;  // = weight * (numerator/overlap)
        if (weight <= kDefaultOverlapEpsilon) {
            terms.push_back({weight, std::nullopt, contribution});
            continue;
        }
        terms.push_back({weight, numerator / overlap, contribution});
    }
    return terms;
}

/// The strong-measurement counterpart: weight_n sums the per-eigenspace
/// transition probabilities |<f_n|P_j|i>|^2 and the conditional value is their
/// eigenvalue-weighted average, which always stays inside the spectrum of A.
inline std::vector<DecompositionTerm> strong_decomposition(const Ket &i,
                                                           const std::vector<Ket> &basis,
                                                           const Observable &a) {
    detail::require_orthonormal_basis(i, basis, "strong_decomposition");
    if (a.labels() != i.labels()) {
        throw std::invalid_argument("strong_decomposition: observable dimension mismatch");
    }
    require_normalized(i, "strong_decomposition");
    std::vector<DecompositionTerm> terms;
    terms.reserve(basis.size());
    for (const auto &f : basis) {
        double weight = 0.0;
        double weighted_values = 0.0;
        for (const auto &p : a.eigenpairs()) {
            double t = std::norm(inner(f, i.with_amps(p.projector.apply(i.amps()))));
            weight += t;
            weighted_values += p.value * t;
        }
        cdouble contribution{weighted_values, 0.0};
        if (weight <= 0.0) {
            terms.push_back({0.0, std::nullopt, contribution});
            continue;
        }
        terms.push_back({weight, cdouble{weighted_values / weight, 0.0}, contribution});
    }
    return terms;
}

inline cdouble decomposition_total(const std::vector<DecompositionTerm> &terms) {
    cdouble acc{};
    for (const auto &t : terms) {
        acc += t.contribution;
    }
    return acc;
}

}  // namespace qmeas

#endif

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

#ifndef QMEAS_NULL_PROTOCOL_HPP
#define QMEAS_NULL_PROTOCOL_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qmeas/discrete_detector.hpp"
#include "qmeas/hilbert.hpp"
#include "qmeas/weak_values.hpp"

namespace qmeas {

/// Strong-but-rare projective measurement: basis state |0> fires the detector
/// with probability p0 (usually zero) and |1> with probability p1. A click
/// destroys the system; the null outcome leaves a weakly damped survivor.
struct PartialCollapseSpec {
    double p0 = 0.0;
    double p1 = 0.0;
    // Optional physical parameterization p1 = 1 - exp(-gamma * t). Kept so
    // protocol files written in rate form round-trip unchanged.
    std::optional<double> gamma;
    std::optional<double> t;

    static PartialCollapseSpec from_probabilities(double p1, double p0 = 0.0) {
        PartialCollapseSpec spec;
        spec.p0 = p0;
        spec.p1 = p1;
        spec.check();
        return spec;
    }

    static PartialCollapseSpec from_rate(double gamma, double t) {
        if (gamma < 0.0 || t < 0.0) {
            throw std::invalid_argument("partial collapse rate and window must be >= 0");
        }
        PartialCollapseSpec spec;
        spec.p0 = 0.0;
        spec.p1 = -std::expm1(-gamma * t);
        spec.gamma = gamma;
        spec.t = t;
        spec.check();
        return spec;
    }

    void check() const {
        if (p0 < 0.0 || p0 > 1.0 || p1 < 0.0 || p1 > 1.0) {
            throw std::invalid_argument("partial collapse click probabilities must lie in [0,1]");
        }
        if (gamma && t && std::abs(p1 - (-std::expm1(-*gamma * *t))) > kIdentityTol) {
            throw std::invalid_argument("partial collapse rate parameters disagree with p1");
        }
    }
};

/// One branch of the first (partial-collapse) measurement. A click destroys
/// the system, so the clicked outcome carries no post state.
struct NullOutcome {
    bool clicked;
    std::optional<Ket> post_state;
    double probability;
};

struct PartialCollapseOutcomes {
    NullOutcome click;
    NullOutcome null;
};

/// Splits i into the click branch (probability p0|alpha|^2 + p1|beta|^2,
/// system destroyed) and the null branch with its damped survivor
/// (sqrt(1-p0) alpha, sqrt(1-p1) beta) renormalized.
inline PartialCollapseOutcomes partial_collapse(const Ket &i, const PartialCollapseSpec &spec) {
    require_qubit(i, "partial_collapse");
    require_normalized(i, "partial_collapse");
    spec.check();
    double p_click = spec.p0 * std::norm(i[0]) + spec.p1 * std::norm(i[1]);
    PartialCollapseOutcomes out{
        {true, std::nullopt, p_click},
        {false, std::nullopt, 1.0 - p_click},
    };
    if (p_click < 1.0) {
        out.null.post_state =
            Ket::qubit(std::sqrt(1.0 - spec.p0) * i[0], std::sqrt(1.0 - spec.p1) * i[1])
                .normalized();
    }
    return out;
}

/// P(click)/p1 for the p0 = 0 protocol; equals <i|1><1|i> = |beta|^2 exactly.
inline double click_observable(const Ket &i, const PartialCollapseSpec &spec) {
    if (spec.p0 != 0.0) {
        throw std::domain_error("click_observable: defined for p0 = 0 only");
    }
    if (spec.p1 <= 0.0) {
        throw std::domain_error("click_observable: p1 must be positive");
    }
    return partial_collapse(i, spec).click.probability / spec.p1;
}

/// Anti-causal conditional P(click | second detector silent), by Bayes
/// inversion over the measurement tree. The retained postselection state f is
/// the one the second detector does NOT fire on; a destroyed system never
/// fires it, so P(silent | click) = 1.
inline double bayes_null_conditional(const Ket &i, const PartialCollapseSpec &spec,
                                     const Ket &f) {
    require_qubit(f, "bayes_null_conditional");
    require_normalized(f, "bayes_null_conditional");
    PartialCollapseOutcomes branches = partial_collapse(i, spec);
    double denominator = branches.click.probability;
    if (branches.null.post_state) {
        denominator += branches.null.probability * fidelity(f, *branches.null.post_state);
    }
    if (denominator <= 0.0) {
        throw std::domain_error("bayes_null_conditional: zero retained-outcome probability");
    }
    return branches.click.probability / denominator;
}

/// <i|A|i> / |<f|i>|^2 with A = |1><1|. Real and nonnegative; diverges as the
/// overlap closes, in which case the raw numerator is reported in the error.
inline double null_weak_value(const Ket &i, const Ket &f, const Observable &a,
                              double epsilon_overlap = kDefaultOverlapEpsilon) {
    require_same_space(i, f, "null_weak_value");
    double numerator = expectation(a, i);
    require_normalized(f, "null_weak_value");
    double overlap_sq = fidelity(f, i);
    if (overlap_sq <= epsilon_overlap) {
        throw DivergentValueError("divergent null weak value: postselection overlap below threshold",
                                  cdouble{numerator, 0.0}, overlap_sq);
    }
    return numerator / overlap_sq;
}

/// Both sides of the conditional identity: lhs = P(click|silent)/p equals
/// rhs_exact = <i|A|i> / P(silent) without any smallness assumption, while
/// rhs_approx = <i|A|i> / |<f|i>|^2 picks up an O(p) gap.
struct ConditionalIdentity {
    double lhs;
    double rhs_exact;
    double rhs_approx;
};

inline ConditionalIdentity null_conditional_identity(const Ket &i,
                                                     const PartialCollapseSpec &spec,
                                                     const Ket &f) {
    if (spec.p0 != 0.0) {
        throw std::domain_error("null_conditional_identity: defined for p0 = 0 only");
    }
    if (spec.p1 <= 0.0) {
        throw std::domain_error("null_conditional_identity: p1 must be positive");
    }
    require_qubit(f, "null_conditional_identity");
    require_normalized(f, "null_conditional_identity");
    PartialCollapseOutcomes branches = partial_collapse(i, spec);
    double p_silent = branches.click.probability;
    if (branches.null.post_state) {
        p_silent += branches.null.probability * fidelity(f, *branches.null.post_state);
    }
    if (p_silent <= 0.0) {
        throw std::domain_error("null_conditional_identity: zero retained-outcome probability");
    }
    double expectation_value = std::norm(i[1]);
    double overlap_sq = fidelity(f, i);
    if (overlap_sq <= kDefaultOverlapEpsilon) {
        throw DivergentValueError("null_conditional_identity: vanishing pre/post overlap",
                                  cdouble{expectation_value, 0.0}, overlap_sq);
    }
    return {bayes_null_conditional(i, spec, f) / spec.p1, expectation_value / p_silent,
            expectation_value / overlap_sq};
}

inline const std::vector<std::string> &ancilla_labels() {
    static const std::vector<std::string> labels{"0", "1", "R"};
    return labels;
}

/// Qubit state viewed inside the ancilla-extended 3-space.
inline Ket embed_in_ancilla_space(const Ket &psi) {
    require_qubit(psi, "embed_in_ancilla_space");
    return Ket(ancilla_labels(), {psi[0], psi[1], cdouble{}});
}

/// The extended-space machinery: U rotates |1> partially into the ancilla
/// state |R> (unitary on the 3-space), and the postselection map transfers
/// the f-component to |R> while leaving |R> itself untouched, which makes it
/// non-unitary by construction.
struct AncillaSpace {
    LinearMap u;        // unitary
    LinearMap u_tilde;  // non-unitary: fixes |R>, maps |f> to |R>

    Matrix projector_r() const {
        Matrix m(3, 3);
        m(2, 2) = 1.0;
        return m;
    }

    Matrix projector_qubit_sector() const { return Matrix::identity(3) - projector_r(); }
};

inline LinearMap make_ancilla_unitary(const PartialCollapseSpec &spec) {
    if (spec.p0 != 0.0) {
        throw std::domain_error("ancilla extension: defined for p0 = 0 only");
    }
    double c = std::sqrt(1.0 - spec.p1);
    double s = std::sqrt(spec.p1);
    Matrix u(3, 3);
    u(0, 0) = 1.0;
    u(1, 1) = c;
    u(2, 1) = s;
    u(1, 2) = -s;
    u(2, 2) = c;
    return LinearMap(ancilla_labels(), ancilla_labels(), u, /*unitary_flag=*/true);
}

inline LinearMap make_postselect_map(const Ket &f) {
    require_qubit(f, "make_postselect_map");
    require_normalized(f, "make_postselect_map");
    Ket f3 = embed_in_ancilla_space(f);
    Ket fbar3 = embed_in_ancilla_space(orthogonal_qubit(f));
    Ket r = Ket::basis_state(ancilla_labels(), 2);
    Matrix m(3, 3);
    for (std::size_t row = 0; row < 3; row++) {
        for (std::size_t col = 0; col < 3; col++) {
            m(row, col) = fbar3[row] * std::conj(fbar3[col])  // keeps the f-bar component
                          + r[row] * std::conj(f3[col])       // sends f to R
                          + r[row] * std::conj(r[col]);       // leaves R fixed
        }
    }
    return LinearMap(ancilla_labels(), ancilla_labels(), m, /*unitary_flag=*/false);
}

inline AncillaSpace make_ancilla_space(const PartialCollapseSpec &spec, const Ket &f) {
    return {make_ancilla_unitary(spec), make_postselect_map(f)};
}

/// U|i> = alpha|0> + sqrt(1-p) beta |1> + sqrt(p) beta |R>.
inline Ket extend_ancilla(const Ket &i, const PartialCollapseSpec &spec) {
    require_normalized(i, "extend_ancilla");
    return make_ancilla_unitary(spec).apply(embed_in_ancilla_space(i));
}

/// Image of a 3-space state under the postselection map. Unnormalized: the
/// map is not unitary and does not preserve norm in general.
inline Ket postselect_map(const Ket &state3, const Ket &f) {
    if (state3.labels() != ancilla_labels()) {
        throw std::invalid_argument("postselect_map: state must live in the ancilla 3-space");
    }
    return make_postselect_map(f).apply(state3);
}

/// Numerator of the decomposition that postselects inside the qubit sector:
/// sum over f_n in {f, f-bar} of |<f_n| P_R U |i>|^2. The click branch lies
/// entirely along |R>, so this vanishes identically; the value is returned so
/// callers can assert the failure rather than assume it.
inline double naive_decomposition_numerator(const Ket &i, const PartialCollapseSpec &spec,
                                            const Ket &f) {
    require_normalized(i, "naive_decomposition_numerator");
    AncillaSpace space = make_ancilla_space(spec, f);
    Ket extended = space.u.apply(embed_in_ancilla_space(i));
    Ket click_branch = extended.with_amps(space.projector_r().apply(extended.amps()));
    Ket f3 = embed_in_ancilla_space(f);
    Ket fbar3 = embed_in_ancilla_space(orthogonal_qubit(f));
    return std::norm(inner(f3, click_branch)) + std::norm(inner(fbar3, click_branch));
}

/// The conditional-average decomposition that fits the null protocol: the
/// postselection runs through the non-unitary map and the outcomes are
/// {R, f-bar}. total reconstructs <i|A|i>; middle_factor is the conditional
/// click rate per unit p and matches bayes_null_conditional / p exactly;
/// transition_probability collapses to |<f|i>|^2 as p -> 0.
struct AncillaDecomposition {
    std::vector<DecompositionTerm> terms;  // ordered {R, f-bar}
    double middle_factor;
    double total;
    double transition_probability;
};

inline AncillaDecomposition ancilla_decomposition(const Ket &i, const PartialCollapseSpec &spec,
                                                  const Ket &f) {
    if (spec.p1 <= 0.0) {
        throw std::domain_error("ancilla_decomposition: p1 must be positive");
    }
    require_normalized(i, "ancilla_decomposition");
    AncillaSpace space = make_ancilla_space(spec, f);
    Ket extended = space.u.apply(embed_in_ancilla_space(i));
    Ket via_qubit_sector = space.u_tilde.apply(
        extended.with_amps(space.projector_qubit_sector().apply(extended.amps())));
    Ket via_click = space.u_tilde.apply(
        extended.with_amps(space.projector_r().apply(extended.amps())));

    Ket r = Ket::basis_state(ancilla_labels(), 2);
    Ket fbar3 = embed_in_ancilla_space(orthogonal_qubit(f));

    AncillaDecomposition out;
    out.total = 0.0;
    for (const Ket &f_n : {r, fbar3}) {
        double through_qubit = std::norm(inner(f_n, via_qubit_sector));
        double through_click = std::norm(inner(f_n, via_click));
        double weight = through_qubit + through_click;
        if (weight <= 0.0) {
            out.terms.push_back({0.0, std::nullopt, cdouble{}});
            continue;
        }
        double conditional = through_click / weight;
        out.terms.push_back({weight, cdouble{conditional, 0.0}, cdouble{through_click, 0.0}});
        out.total += through_click;
    }
    out.total /= spec.p1;

    double click_amplitude_sq = std::norm(inner(r, extended.with_amps(
        space.projector_r().apply(extended.amps()))));
    out.transition_probability = std::norm(inner(r, via_qubit_sector)) + click_amplitude_sq;
    if (out.transition_probability <= 0.0) {
        throw std::domain_error("ancilla_decomposition: zero transition probability");
    }
    out.middle_factor = click_amplitude_sq / (spec.p1 * out.transition_probability);
    return out;
}

}  // namespace qmeas

#endif

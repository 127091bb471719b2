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

#ifndef QMEAS_DISCRETE_DETECTOR_HPP
#define QMEAS_DISCRETE_DETECTOR_HPP

#include <cmath>
#include <optional>
#include <stdexcept>

#include "qmeas/hilbert.hpp"

namespace qmeas {

/// Denominators |delta_tilde|^2 - |delta|^2 smaller than this are treated as a
/// zero-strength detector: nothing can be calibrated out of it.
inline constexpr double kZeroStrengthTol = 1e-14;

/// Two-level detector amplitudes. (gamma, delta) is the detector state when
/// the system sits in |0>, (gamma_tilde, delta_tilde) when it sits in |1>.
/// Both branches must be unit vectors.
struct DetectorParams {
    cdouble gamma;
    cdouble delta;
    cdouble gamma_tilde;
    cdouble delta_tilde;

    DetectorParams(cdouble g, cdouble d, cdouble gt, cdouble dt)
        : gamma(g), delta(d), gamma_tilde(gt), delta_tilde(dt) {
        if (std::abs(std::norm(gamma) + std::norm(delta) - 1.0) > kIdentityTol ||
            std::abs(std::norm(gamma_tilde) + std::norm(delta_tilde) - 1.0) > kIdentityTol) {
            throw std::invalid_argument("detector branch amplitudes must be normalized");
        }
    }

    /// Single-knob parameterization used for strength sweeps:
    /// gamma = cos(theta), delta = sin(theta), tilde pair rotated by eps.
    static DetectorParams from_angles(double theta, double eps) {
        return DetectorParams(std::cos(theta), std::sin(theta), std::cos(theta + eps),
                              std::sin(theta + eps));
    }

    /// Measurement strength w = | |delta_tilde|^2 - |delta|^2 |. The exact
    /// formulas below hold at any strength; w << 1 is only needed when the
    /// conditional readout is to be read as a weak value.
    double strength() const { return std::abs(response()); }

    /// Signed calibration denominator |delta_tilde|^2 - |delta|^2.
    double response() const { return std::norm(delta_tilde) - std::norm(delta); }
};

inline void require_qubit(const Ket &i, const char *what) {
    if (i.dim() != 2) {
        throw std::invalid_argument(std::string(what) + ": expected a qubit state");
    }
}

/// Joint system-detector state after the coupling: amplitudes
/// (alpha*gamma, alpha*delta, beta*gamma_tilde, beta*delta_tilde) on the
/// labels (0,0),(0,1),(1,0),(1,1). Normalization comes out exactly 1 because
/// each detector branch is itself normalized.
inline Ket entangle(const Ket &i, const DetectorParams &d) {
    require_qubit(i, "entangle");
    require_normalized(i, "entangle");
    return Ket({"0,0", "0,1", "1,0", "1,1"},
               {i[0] * d.gamma, i[0] * d.delta, i[1] * d.gamma_tilde, i[1] * d.delta_tilde});
}

/// Probability that the detector reads 1 on the entangled state.
inline double detector_click_probability(const Ket &i, const DetectorParams &d) {
    require_qubit(i, "detector_click_probability");
    require_normalized(i, "detector_click_probability");
    return std::norm(i[0]) * std::norm(d.delta) + std::norm(i[1]) * std::norm(d.delta_tilde);
}

/// Calibrated single-detector readout (P(read 1) - |delta|^2) / response.
/// Equal to <i|1><1|i> = |beta|^2 exactly, at every strength.
inline double calibrated_observable(const Ket &i, const DetectorParams &d) {
    double response = d.response();
    if (std::abs(response) < kZeroStrengthTol) {
        throw std::domain_error("calibrated_observable: zero-strength detector");
    }
    return (detector_click_probability(i, d) - std::norm(d.delta)) / response;
}

/// Same calibration applied to the detector readout conditioned on a strong
/// postselection of the system onto f. Computed exactly from joint Born
/// probabilities; converges to Re(weak_value) as the strength goes to zero.
inline double conditional_calibrated(const Ket &i, const DetectorParams &d, const Ket &f) {
    require_qubit(f, "conditional_calibrated");
    require_normalized(f, "conditional_calibrated");
    double response = d.response();
    if (std::abs(response) < kZeroStrengthTol) {
        throw std::domain_error("conditional_calibrated: zero-strength detector");
    }
    Ket joint = entangle(i, d);
    // Detector components riding with a postselected system: <f| applied to
    // the system factor leaves a two-component detector vector (g, e).
    cdouble g = std::conj(f[0]) * joint[0] + std::conj(f[1]) * joint[2];
    cdouble e = std::conj(f[0]) * joint[1] + std::conj(f[1]) * joint[3];
    double p_joint_click = std::norm(e);
    double p_postselect = std::norm(g) + std::norm(e);
    if (p_postselect <= 1e-12) {
        throw std::domain_error("conditional_calibrated: vanishing postselection probability");
    }
    return (p_joint_click / p_postselect - std::norm(d.delta)) / response;
}

/// Post-measurement system states for each detector outcome, with the click
/// probability. Feeding these into a second Born-rule stage reproduces the
/// joint statistics of entangle() exactly.
struct BackActionPair {
    std::optional<Ket> i_plus;   // system state given the detector read 1
    std::optional<Ket> i_minus;  // system state given the detector read 0
    double p_click;
};

inline BackActionPair backaction_states(const Ket &i, const DetectorParams &d) {
    require_qubit(i, "backaction_states");
    require_normalized(i, "backaction_states");
    double p_click = detector_click_probability(i, d);
    BackActionPair pair{std::nullopt, std::nullopt, p_click};
    if (p_click > 0.0) {
        pair.i_plus = Ket::qubit(i[0] * d.delta, i[1] * d.delta_tilde).normalized();
    }
    if (p_click < 1.0) {
        pair.i_minus = Ket::qubit(i[0] * d.gamma, i[1] * d.gamma_tilde).normalized();
    }
    return pair;
}

}  // namespace qmeas

#endif

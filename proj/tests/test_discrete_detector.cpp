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

#include <numbers>

#include <catch2/catch_amalgamated.hpp>

#include "qmeas/discrete_detector.hpp"
#include "qmeas/weak_values.hpp"
#include "support/test_support.hpp"

using namespace qmeas;
using Catch::Approx;

namespace {

DetectorParams random_detector(std::mt19937 &rng, bool with_phases) {
    std::uniform_real_distribution<double> angle(0.15, 1.4);
    std::uniform_real_distribution<double> phase(0.0, 6.28);
    double theta = angle(rng);
    double theta_tilde = angle(rng);
    if (!with_phases) {
        return DetectorParams(std::cos(theta), std::sin(theta), std::cos(theta_tilde),
                              std::sin(theta_tilde));
    }
    return DetectorParams(std::polar(std::cos(theta), phase(rng)),
                          std::polar(std::sin(theta), phase(rng)),
                          std::polar(std::cos(theta_tilde), phase(rng)),
                          std::polar(std::sin(theta_tilde), phase(rng)));
}

}  // namespace

TEST_CASE("detector params are validated and parameterized by angles", "[detector]") {
    REQUIRE_THROWS_AS(DetectorParams(0.9, 0.9, 1.0, 0.0), std::invalid_argument);
    DetectorParams d = DetectorParams::from_angles(0.7853981633974483, 0.2);
    REQUIRE(std::norm(d.gamma) + std::norm(d.delta) == Approx(1.0).margin(1e-15));
    REQUIRE(std::norm(d.gamma_tilde) + std::norm(d.delta_tilde) == Approx(1.0).margin(1e-15));
    REQUIRE(d.strength() > 0.0);
}

TEST_CASE("zero-strength coupling leaves a product state", "[detector]") {
    DetectorParams d = DetectorParams::from_angles(0.9, 0.0);
    Ket i = Ket::qubit(0.6, 0.8);
    Ket joint = entangle(i, d);
    Ket product = tensor(i, Ket::qubit(d.gamma, d.delta));
    REQUIRE(fidelity(joint, product) == Approx(1.0).margin(1e-12));
}

TEST_CASE("system in |1> hands the detector the tilde amplitudes", "[detector]") {
    DetectorParams d = DetectorParams::from_angles(0.6, 0.3);
    Ket joint = entangle(Ket::qubit(0.0, 1.0), d);
    REQUIRE(joint[0] == cdouble{});
    REQUIRE(joint[1] == cdouble{});
    REQUIRE(joint[2] == d.gamma_tilde);
    REQUIRE(joint[3] == d.delta_tilde);
}

TEST_CASE("worked click probability at theta=pi/4, eps=0.2", "[detector]") {
    Ket i = Ket::qubit(0.6, 0.8);
    DetectorParams d = DetectorParams::from_angles(std::numbers::pi / 4.0, 0.2);
    // Independent arithmetic: |alpha|^2 |delta|^2 + |beta|^2 |delta_tilde|^2.
    double expected = 0.36 * std::pow(std::sin(std::numbers::pi / 4.0), 2) +
                      0.64 * std::pow(std::sin(std::numbers::pi / 4.0 + 0.2), 2);
    REQUIRE(expected == Approx(0.6247).margin(5e-4));
    REQUIRE(detector_click_probability(i, d) == Approx(expected).margin(1e-15));
}

TEST_CASE("calibration inverts the detector response exactly at any strength",
          "[detector]") {
    Ket i = Ket::qubit(0.6, 0.8);
    DetectorParams d = DetectorParams::from_angles(0.5, 0.45);
    REQUIRE(calibrated_observable(i, d) == Approx(0.64).margin(1e-12));
    REQUIRE(calibrated_observable(Ket::qubit(1.0, 0.0), d) == Approx(0.0).margin(1e-12));
    REQUIRE(calibrated_observable(Ket::qubit(0.0, 1.0), d) == Approx(1.0).margin(1e-12));

    std::mt19937 rng(59);
    for (int rep = 0; rep < 100; rep++) {
        Ket psi = test::random_ket(rng, 2);
        DetectorParams random_d = random_detector(rng, rep % 2 == 1);
        if (random_d.strength() < 1e-3) {
            continue;
        }
        REQUIRE(calibrated_observable(psi, random_d) ==
                Approx(std::norm(psi[1])).margin(1e-12));
    }
}

TEST_CASE("zero-strength detector cannot be calibrated", "[detector]") {
    DetectorParams d = DetectorParams::from_angles(0.8, 0.0);
    Ket i = Ket::qubit(0.6, 0.8);
    REQUIRE_THROWS_AS(calibrated_observable(i, d), std::domain_error);
    REQUIRE_THROWS_AS(conditional_calibrated(i, d, Ket::qubit(1.0, 0.0)), std::domain_error);
}

TEST_CASE("postselecting the observable eigenstate pins the conditional readout",
          "[detector]") {
    Ket i = Ket::qubit(0.6, 0.8);
    for (double eps : {0.4, 0.2, 0.05}) {
        DetectorParams d = DetectorParams::from_angles(std::numbers::pi / 4.0, eps);
        REQUIRE(conditional_calibrated(i, d, Ket::qubit(0.0, 1.0)) ==
                Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("conditional calibrated readout converges to the real weak value",
          "[detector]") {
    Ket i = Ket::qubit(0.6, 0.8);
    Ket f = Ket::qubit(1.0, 1.0).normalized();
    Observable a = Observable::projector_observable(Ket::qubit(0.0, 1.0));
    double target = test::weak_value_oracle(i, f, a).real();
    REQUIRE(target == Approx(4.0 / 7.0).margin(1e-15));

    double previous_err = 1e9;
    for (double eps : {0.2, 0.1, 0.05}) {
        DetectorParams d = DetectorParams::from_angles(std::numbers::pi / 4.0, eps);
        double err = std::abs(conditional_calibrated(i, d, f) - target);
        REQUIRE(err < previous_err);
        previous_err = err;
    }
}

TEST_CASE("weak-limit error is monotone under halvings and small at the end",
          "[detector]") {
    std::mt19937 rng(61);
    Observable a = Observable::projector_observable(Ket::qubit(0.0, 1.0));
    int tested = 0;
    while (tested < 10) {
        Ket i = test::random_ket(rng, 2);
        Ket f = test::random_ket(rng, 2);
        if (fidelity(f, i) < 0.1) {
            continue;
        }
        double target = weak_value(i, f, a).real();
        DetectorParams coarse = DetectorParams::from_angles(std::numbers::pi / 4.0, 0.2);
        if (std::abs(conditional_calibrated(i, coarse, f) - target) < 1e-4) {
            continue;  // degenerate linear coefficient; the halving signal drowns
        }
        double previous_err = 1e9;
        for (double eps : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
            DetectorParams d = DetectorParams::from_angles(std::numbers::pi / 4.0, eps);
            double err = std::abs(conditional_calibrated(i, d, f) - target);
            REQUIRE(err < previous_err);
            previous_err = err;
        }
        REQUIRE(previous_err <= 0.02);
        tested++;
    }
}

TEST_CASE("back-action states reproduce the projective and trivial limits",
          "[detector]") {
    Ket i = Ket::qubit(0.6, 0.8);

    DetectorParams idle = DetectorParams::from_angles(0.7, 0.0);
    BackActionPair no_backaction = backaction_states(i, idle);
    REQUIRE(fidelity(*no_backaction.i_plus, i) == Approx(1.0).margin(1e-12));
    REQUIRE(fidelity(*no_backaction.i_minus, i) == Approx(1.0).margin(1e-12));

    DetectorParams strong(1.0, 0.0, 0.0, 1.0);
    BackActionPair projective = backaction_states(i, strong);
    REQUIRE(fidelity(*projective.i_plus, Ket::qubit(0.0, 1.0)) == Approx(1.0).margin(1e-12));
    REQUIRE(fidelity(*projective.i_minus, Ket::qubit(1.0, 0.0)) == Approx(1.0).margin(1e-12));
    REQUIRE(projective.p_click == Approx(0.64).margin(1e-12));
}

TEST_CASE("worked back-action pair at theta=pi/4, eps=0.2", "[detector]") {
    Ket i = Ket::qubit(0.6, 0.8);
    DetectorParams d = DetectorParams::from_angles(std::numbers::pi / 4.0, 0.2);
    BackActionPair pair = backaction_states(i, d);
    REQUIRE(pair.p_click == Approx(0.6247).margin(5e-4));
    Ket plus_oracle = Ket::qubit(0.6 * d.delta, 0.8 * d.delta_tilde).normalized();
    Ket minus_oracle = Ket::qubit(0.6 * d.gamma, 0.8 * d.gamma_tilde).normalized();
    REQUIRE(fidelity(*pair.i_plus, plus_oracle) == Approx(1.0).margin(1e-12));
    REQUIRE(fidelity(*pair.i_minus, minus_oracle) == Approx(1.0).margin(1e-12));
}

TEST_CASE("degenerate click probabilities mark the absent branch", "[detector]") {
    DetectorParams always(0.0, 1.0, 0.0, 1.0);
    BackActionPair pair = backaction_states(Ket::qubit(0.6, 0.8), always);
    REQUIRE(pair.p_click == Approx(1.0).margin(1e-15));
    REQUIRE(pair.i_plus.has_value());
    REQUIRE_FALSE(pair.i_minus.has_value());
}

TEST_CASE("the measurement tree factorizes the joint statistics", "[detector]") {
    std::mt19937 rng(67);
    for (int rep = 0; rep < 100; rep++) {
        Ket i = test::random_ket(rng, 2);
        Ket f = test::random_ket(rng, 2);
        DetectorParams d = random_detector(rng, rep % 3 == 0);
        BackActionPair pair = backaction_states(i, d);

        double via_tree = 0.0;
        if (pair.i_plus) {
            via_tree += pair.p_click * fidelity(f, *pair.i_plus);
        }
        if (pair.i_minus) {
            via_tree += (1.0 - pair.p_click) * fidelity(f, *pair.i_minus);
        }

        Ket joint = entangle(i, d);
        Matrix postselect_system = kron(projector_onto(f), Matrix::identity(2));
        double via_joint = project(postselect_system, joint).probability;
        REQUIRE(via_tree == Approx(via_joint).margin(1e-12));
    }
}

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

#include <catch2/catch_amalgamated.hpp>

#include "qmeas/weak_values.hpp"
#include "support/test_support.hpp"

using namespace qmeas;
using Catch::Approx;

namespace {

Observable click_observable_qubit() {
    return Observable::projector_observable(Ket::qubit(0.0, 1.0));
}

}  // namespace

TEST_CASE("weak value of an eigenstate collapses to the eigenvalue", "[weakvalues]") {
    std::mt19937 rng(5);
    Observable a = test::random_observable(rng, 3);
    for (const auto &pair : a.eigenpairs()) {
        // Recover a normalized eigenvector by projecting a random state.
        Ket probe = test::random_ket(rng, 3);
        Ket eigvec = probe.with_amps(pair.projector.apply(probe.amps()));
        if (eigvec.norm() < 1e-3) {
            continue;
        }
        eigvec = eigvec.normalized();
        Ket f = test::random_ket(rng, 3);
        if (fidelity(f, eigvec) < 1e-3) {
            continue;
        }
        cdouble wv = weak_value(eigvec, f, a);
        REQUIRE(std::abs(wv - cdouble{pair.value, 0.0}) <= 1e-10);
    }
}

TEST_CASE("worked weak value 4/7 with an anomalous partner", "[weakvalues]") {
    Ket i = Ket::qubit(0.6, 0.8);
    Ket f_plus = Ket::qubit(1.0, 1.0).normalized();
    Ket f_minus = Ket::qubit(1.0, -1.0).normalized();
    Observable a = click_observable_qubit();

    cdouble expected = test::weak_value_oracle(i, f_plus, a);
    REQUIRE(expected.real() == Approx(4.0 / 7.0).margin(1e-15));
    REQUIRE(std::abs(weak_value(i, f_plus, a) - expected) <= 1e-12);

    // The complementary postselection lands far outside the [0, 1] spectrum.
    cdouble anomalous = weak_value(i, f_minus, a);
    REQUIRE(anomalous.real() == Approx(4.0).margin(1e-12));
}

TEST_CASE("orthogonal postselection raises a divergence carrying the numerator",
          "[weakvalues]") {
    Ket i = Ket::qubit(1.0, 1.0).normalized();
    Ket f = Ket::qubit(1.0, -1.0).normalized();
    Observable a = click_observable_qubit();
    try {
        weak_value(i, f, a);
        FAIL("expected a divergence");
    } catch (const DivergentValueError &err) {
        REQUIRE(err.overlap_squared() <= 1e-12);
        // Numerator <f|1><1|i> = (-1/sqrt(2)) * (1/sqrt(2)) = -0.5.
        REQUIRE(err.numerator().real() == Approx(-0.5).margin(1e-12));
    }
}

TEST_CASE("weak value magnitude ignores independent global phases", "[weakvalues]") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> angle(0.0, 6.28);
    for (int rep = 0; rep < 25; rep++) {
        Ket i = test::random_ket(rng, 2);
        Ket f = test::random_ket(rng, 2);
        Observable a = test::random_observable(rng, 2);
        if (fidelity(f, i) < 1e-6) {
            continue;
        }
        cdouble base = weak_value(i, f, a);
        auto rotate = [&](const Ket &k) {
            cdouble phase = std::polar(1.0, angle(rng));
            std::vector<cdouble> amps = k.amps();
            for (auto &v : amps) {
                v *= phase;
            }
            return k.with_amps(amps);
        };
        cdouble rotated = weak_value(rotate(i), rotate(f), a);
        REQUIRE(std::abs(std::abs(rotated) - std::abs(base)) <= 1e-12);
    }
}

TEST_CASE("postselection-weighted weak values reassemble the expectation",
          "[weakvalues]") {
    Ket i = Ket::qubit(0.6, 0.8);
    Observable a = click_observable_qubit();
    std::vector<Ket> basis{Ket::qubit(1.0, 1.0).normalized(), Ket::qubit(1.0, -1.0).normalized()};
    auto terms = wv_decomposition(i, basis, a);
    REQUIRE(terms.size() == 2);
    REQUIRE(terms[0].weight == Approx(0.98).margin(1e-12));
    REQUIRE(terms[1].weight == Approx(0.02).margin(1e-12));
    REQUIRE(decomposition_total(terms).real() == Approx(0.64).margin(1e-12));
    REQUIRE(std::abs(decomposition_total(terms).imag()) <= 1e-12);
}

TEST_CASE("decomposition in the eigenbasis reduces to Born statistics", "[weakvalues]") {
    std::mt19937 rng(29);
    std::vector<Ket> basis = test::random_orthonormal_basis(rng, 3);
    std::vector<double> values{-1.5, 0.25, 2.0};
    Observable a = Observable::from_eigenbasis(basis, values);
    Ket i = test::random_ket(rng, 3);
    auto weak_terms = wv_decomposition(i, basis, a);
    auto strong_terms = strong_decomposition(i, basis, a);
    for (std::size_t n = 0; n < basis.size(); n++) {
        double born = fidelity(basis[n], i);
        REQUIRE(weak_terms[n].weight == Approx(born).margin(1e-12));
        REQUIRE(strong_terms[n].weight == Approx(born).margin(1e-12));
        if (born > 1e-9) {
            REQUIRE(std::abs(*weak_terms[n].conditional_value - cdouble{values[n], 0.0}) <= 1e-9);
            REQUIRE(std::abs(*strong_terms[n].conditional_value - cdouble{values[n], 0.0}) <=
                    1e-9);
        }
    }
}

TEST_CASE("identity observable yields conditional value one everywhere", "[weakvalues]") {
    std::mt19937 rng(37);
    Ket i = test::random_ket(rng, 2);
    std::vector<Ket> basis = test::random_orthonormal_basis(rng, 2);
    Observable identity(i.labels(), {{1.0, Matrix::identity(2)}});
    for (const auto &term : wv_decomposition(i, basis, identity)) {
        if (term.conditional_value) {
            REQUIRE(std::abs(*term.conditional_value - cdouble{1.0, 0.0}) <= 1e-12);
        }
    }
}

TEST_CASE("strong decomposition stays in the eigenvalue hull and sums right",
          "[weakvalues]") {
    Ket i = Ket::qubit(0.6, 0.8);
    Observable a = click_observable_qubit();
    std::vector<Ket> basis{Ket::qubit(1.0, 1.0).normalized(), Ket::qubit(1.0, -1.0).normalized()};
    auto terms = strong_decomposition(i, basis, a);
    double total = 0.0;
    for (const auto &term : terms) {
        REQUIRE(term.conditional_value.has_value());
        double v = term.conditional_value->real();
        REQUIRE(v >= 0.0 - 1e-12);
        REQUIRE(v <= 1.0 + 1e-12);
        total += term.weight * v;
    }
    REQUIRE(total == Approx(0.64).margin(1e-12));
}

TEST_CASE("degenerate spectrum forces every conditional value to the scalar",
          "[weakvalues]") {
    std::mt19937 rng(43);
    std::vector<Ket> eigenbasis = test::random_orthonormal_basis(rng, 2);
    Observable a = Observable::from_eigenbasis(eigenbasis, {0.75, 0.75});
    Ket i = test::random_ket(rng, 2);
    std::vector<Ket> basis = test::random_orthonormal_basis(rng, 2);
    for (const auto &term : strong_decomposition(i, basis, a)) {
        if (term.conditional_value) {
            REQUIRE(term.conditional_value->real() == Approx(0.75).margin(1e-12));
        }
    }
}

TEST_CASE("both decompositions satisfy their identities on random triples",
          "[weakvalues]") {
    std::mt19937 rng(53);
    bool saw_anomalous = false;
    for (int rep = 0; rep < 200; rep++) {
        std::size_t dim = rep % 2 == 0 ? 2 : 3;
        Ket i = test::random_ket(rng, dim);
        Observable a = test::random_observable(rng, dim);
        std::vector<Ket> basis = test::random_orthonormal_basis(rng, dim);
        double reference = test::expectation_oracle(a, i);

        auto weak_terms = wv_decomposition(i, basis, a);
        REQUIRE(std::abs(decomposition_total(weak_terms) - cdouble{reference, 0.0}) <= 1e-12);

        auto strong_terms = strong_decomposition(i, basis, a);
        REQUIRE(std::abs(decomposition_total(strong_terms) - cdouble{reference, 0.0}) <= 1e-12);
        for (const auto &term : strong_terms) {
            if (!term.conditional_value) {
                continue;
            }
            REQUIRE(term.conditional_value->real() >= a.min_eigenvalue() - 1e-12);
            REQUIRE(term.conditional_value->real() <= a.max_eigenvalue() + 1e-12);
        }
        for (const auto &term : weak_terms) {
            if (term.conditional_value &&
                (term.conditional_value->real() > a.max_eigenvalue() + 1e-9 ||
                 term.conditional_value->real() < a.min_eigenvalue() - 1e-9)) {
                saw_anomalous = true;
            }
        }
    }
    // Weak values are not confined to the hull; random sampling must surface
    // at least one escapee.
    REQUIRE(saw_anomalous);
}

TEST_CASE("decomposition rejects bad postselection bases", "[weakvalues]") {
    Ket i = Ket::qubit(0.6, 0.8);
    Observable a = click_observable_qubit();
    std::vector<Ket> incomplete{Ket::qubit(1.0, 0.0)};
    REQUIRE_THROWS_AS(wv_decomposition(i, incomplete, a), std::invalid_argument);
    std::vector<Ket> skewed{Ket::qubit(1.0, 0.0), Ket::qubit(1.0, 1.0).normalized()};
    REQUIRE_THROWS_AS(strong_decomposition(i, skewed, a), std::invalid_argument);
}

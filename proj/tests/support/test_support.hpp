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

#ifndef QMEAS_TEST_SUPPORT_HPP
#define QMEAS_TEST_SUPPORT_HPP

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmeas/hilbert.hpp"

namespace qmeas::test {

// ---------------------------------------------------------------------------
// Independent oracles. These deliberately avoid the library's spectral-route
// evaluators: everything is reduced to one dense matrix and explicit loops.
// ---------------------------------------------------------------------------

inline cdouble bra_m_ket(const Matrix &m, const std::vector<cdouble> &bra,
                         const std::vector<cdouble> &ket) {
    cdouble acc{};
    for (std::size_t r = 0; r < m.rows(); r++) {
        for (std::size_t c = 0; c < m.cols(); c++) {
            acc += std::conj(bra[r]) * m(r, c) * ket[c];
        }
    }
    return acc;
}

inline double expectation_oracle(const Observable &a, const Ket &psi) {
    return bra_m_ket(a.to_matrix(), psi.amps(), psi.amps()).real();
}

inline cdouble weak_value_oracle(const Ket &i, const Ket &f, const Observable &a) {
    cdouble numerator = bra_m_ket(a.to_matrix(), f.amps(), i.amps());
    cdouble overlap{};
    for (std::size_t k = 0; k < i.dim(); k++) {
        overlap += std::conj(f[k]) * i[k];
    }
    return numerator / overlap;
}

// ---------------------------------------------------------------------------
// Seeded random inputs.
// ---------------------------------------------------------------------------

inline std::vector<std::string> index_labels(std::size_t dim) {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < dim; k++) {
        labels.push_back(std::to_string(k));
    }
    return labels;
}

inline std::vector<cdouble> random_amps(std::mt19937 &rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cdouble> amps(dim);
    for (auto &a : amps) {
        a = cdouble{gauss(rng), gauss(rng)};
    }
    return amps;
}

inline Ket random_ket(std::mt19937 &rng, std::size_t dim) {
    while (true) {
        Ket candidate(index_labels(dim), random_amps(rng, dim));
        if (candidate.norm() > 1e-6) {
            return candidate.normalized();
        }
    }
}

/// Gram-Schmidt over random Gaussian vectors.
inline std::vector<Ket> random_orthonormal_basis(std::mt19937 &rng, std::size_t dim) {
    std::vector<std::vector<cdouble>> vecs;
    while (vecs.size() < dim) {
        std::vector<cdouble> v = random_amps(rng, dim);
        for (const auto &u : vecs) {
            cdouble overlap{};
            for (std::size_t k = 0; k < dim; k++) {
                overlap += std::conj(u[k]) * v[k];
            }
            for (std::size_t k = 0; k < dim; k++) {
                v[k] -= overlap * u[k];
            }
        }
        double norm_sq = 0.0;
        for (const auto &a : v) {
            norm_sq += std::norm(a);
        }
        if (norm_sq < 1e-8) {
            continue;  // nearly dependent draw; resample
        }
        double inv = 1.0 / std::sqrt(norm_sq);
        for (auto &a : v) {
            a *= inv;
        }
        vecs.push_back(std::move(v));
    }
    std::vector<Ket> basis;
    basis.reserve(dim);
    for (auto &v : vecs) {
        basis.emplace_back(index_labels(dim), std::move(v));
    }
    return basis;
}

inline Observable random_observable(std::mt19937 &rng, std::size_t dim, double lo = -2.0,
                                    double hi = 2.0) {
    std::uniform_real_distribution<double> value(lo, hi);
    std::vector<Ket> basis = random_orthonormal_basis(rng, dim);
    std::vector<double> eigenvalues;
    eigenvalues.reserve(dim);
    for (std::size_t k = 0; k < dim; k++) {
        eigenvalues.push_back(value(rng));
    }
    return Observable::from_eigenbasis(basis, eigenvalues);
}

}  // namespace qmeas::test

#endif

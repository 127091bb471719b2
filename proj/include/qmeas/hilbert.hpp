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

#ifndef QMEAS_HILBERT_HPP
#define QMEAS_HILBERT_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qmeas {

using cdouble = std::complex<double>;

/// Absolute tolerance for algebraic identity checks (hermiticity,
/// idempotency, completeness, norm preservation).
inline constexpr double kIdentityTol = 1e-12;

/// Looser tolerance used when checking normalization preconditions on
/// caller-supplied states.
inline constexpr double kStateNormTol = 1e-9;

/// Born probabilities below this are indistinguishable from the cancellation
/// noise of exactly-orthogonal amplitudes (entry errors ~1e-16 squared and
/// summed over at most 6 components) and are reported as zero.
inline constexpr double kBornZeroTol = 1e-28;

/// Dense row-major complex matrix. Dimensions in this library stay tiny
/// (at most 6), so there is no attempt at sparsity or blocking.
class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cdouble{0.0, 0.0}) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; i++) {
            m(i, i) = 1.0;
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cdouble &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cdouble &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Matrix adjoint() const {
        Matrix m(cols_, rows_);
        for (std::size_t r = 0; r < rows_; r++) {
            for (std::size_t c = 0; c < cols_; c++) {
                m(c, r) = std::conj((*this)(r, c));
            }
        }
        return m;
    }

    Matrix operator*(const Matrix &other) const {
        if (cols_ != other.rows_) {
            throw std::invalid_argument("matrix product dimension mismatch");
        }
        Matrix m(rows_, other.cols_);
        for (std::size_t r = 0; r < rows_; r++) {
            for (std::size_t k = 0; k < cols_; k++) {
                cdouble v = (*this)(r, k);
                if (v == cdouble{}) {
                    continue;
                }
                for (std::size_t c = 0; c < other.cols_; c++) {
                    m(r, c) += v * other(k, c);
                }
            }
        }
        return m;
    }

    Matrix operator+(const Matrix &other) const {
        require_same_shape(other, "matrix sum");
        Matrix m = *this;
        for (std::size_t k = 0; k < data_.size(); k++) {
            m.data_[k] += other.data_[k];
        }
        return m;
    }

    Matrix operator-(const Matrix &other) const {
        require_same_shape(other, "matrix difference");
        Matrix m = *this;
        for (std::size_t k = 0; k < data_.size(); k++) {
            m.data_[k] -= other.data_[k];
        }
        return m;
    }

    Matrix operator*(cdouble scale) const {
        Matrix m = *this;
        for (auto &v : m.data_) {
            v *= scale;
        }
        return m;
    }

    std::vector<cdouble> apply(const std::vector<cdouble> &v) const {
        if (v.size() != cols_) {
            throw std::invalid_argument("matrix apply dimension mismatch");
        }
        std::vector<cdouble> out(rows_, cdouble{});
        for (std::size_t r = 0; r < rows_; r++) {
            cdouble acc{};
            for (std::size_t c = 0; c < cols_; c++) {
                acc += (*this)(r, c) * v[c];
            }
            out[r] = acc;
        }
        return out;
    }

    /// Largest entrywise |a_ij - b_ij|.
    double max_abs_diff(const Matrix &other) const {
        require_same_shape(other, "matrix comparison");
        double worst = 0.0;
        for (std::size_t k = 0; k < data_.size(); k++) {
            worst = std::max(worst, std::abs(data_[k] - other.data_[k]));
        }
        return worst;
    }

    bool is_hermitian(double tol = kIdentityTol) const {
        return rows_ == cols_ && max_abs_diff(adjoint()) <= tol;
    }

    bool is_idempotent(double tol = kIdentityTol) const {
        return rows_ == cols_ && ((*this) * (*this)).max_abs_diff(*this) <= tol;
    }

    bool is_unitary(double tol = kIdentityTol) const {
        return rows_ == cols_ && (adjoint() * (*this)).max_abs_diff(identity(rows_)) <= tol;
    }

  private:
    void require_same_shape(const Matrix &other, const char *what) const {
        if (rows_ != other.rows_ || cols_ != other.cols_) {
            throw std::invalid_argument(std::string(what) + " dimension mismatch");
        }
    }

    std::size_t rows_;
    std::size_t cols_;
    std::vector<cdouble> data_;
};

inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ar++) {
        for (std::size_t ac = 0; ac < a.cols(); ac++) {
            for (std::size_t br = 0; br < b.rows(); br++) {
                for (std::size_t bc = 0; bc < b.cols(); bc++) {
                    m(ar * b.rows() + br, ac * b.cols() + bc) = a(ar, ac) * b(br, bc);
                }
            }
        }
    }
    return m;
}

/// Pure state over a labeled finite basis. Amplitudes are not forced to
/// unit norm at construction; `normalized()` produces a unit-norm copy.
/// States are compared through |<a|b>|^2 fidelity, never componentwise,
/// so global phase is left alone.
class Ket {
  public:
    Ket(std::vector<std::string> basis_labels, std::vector<cdouble> amps)
        : labels_(std::move(basis_labels)), amps_(std::move(amps)) {
        if (labels_.empty()) {
            throw std::invalid_argument("ket dimension must be >= 1");
        }
        if (labels_.size() != amps_.size()) {
            throw std::invalid_argument("ket label/amplitude count mismatch");
        }
        std::set<std::string> seen(labels_.begin(), labels_.end());
        if (seen.size() != labels_.size()) {
            throw std::invalid_argument("ket basis labels must be unique");
        }
    }

    static Ket qubit(cdouble a0, cdouble a1) { return Ket({"0", "1"}, {a0, a1}); }

    static Ket basis_state(std::vector<std::string> labels, std::size_t index) {
        std::vector<cdouble> amps(labels.size(), cdouble{});
        amps.at(index) = 1.0;
        return Ket(std::move(labels), std::move(amps));
    }

    std::size_t dim() const { return amps_.size(); }
    const std::vector<std::string> &labels() const { return labels_; }
    const std::vector<cdouble> &amps() const { return amps_; }
    const cdouble &operator[](std::size_t k) const { return amps_[k]; }

    double norm_squared() const {
        double s = 0.0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    double norm() const { return std::sqrt(norm_squared()); }

    bool is_normalized(double tol = kStateNormTol) const {
        return std::abs(norm() - 1.0) <= tol;
    }

    Ket normalized() const {
        double n = norm();
        if (n == 0.0) {
            throw std::domain_error("cannot normalize the zero vector");
        }
        std::vector<cdouble> scaled(amps_);
        for (auto &a : scaled) {
            a /= n;
        }
        return Ket(labels_, std::move(scaled));
    }

    Ket with_amps(std::vector<cdouble> amps) const { return Ket(labels_, std::move(amps)); }

  private:
    std::vector<std::string> labels_;
    std::vector<cdouble> amps_;
};

inline void require_same_space(const Ket &a, const Ket &b, const char *what) {
    if (a.labels() != b.labels()) {
        throw std::invalid_argument(std::string(what) + ": states live in different labeled spaces");
    }
}

inline void require_normalized(const Ket &psi, const char *what) {
    if (!psi.is_normalized()) {
        throw std::invalid_argument(std::string(what) + ": state is not normalized");
    }
}

/// <a|b>.
inline cdouble inner(const Ket &a, const Ket &b) {
    require_same_space(a, b, "inner product");
    cdouble acc{};
    for (std::size_t k = 0; k < a.dim(); k++) {
        acc += std::conj(a[k]) * b[k];
    }
    return acc;
}

/// |<a|b>|^2.
inline double fidelity(const Ket &a, const Ket &b) { return std::norm(inner(a, b)); }

/// |f><f|.
inline Matrix projector_onto(const Ket &f) {
    Matrix m(f.dim(), f.dim());
    for (std::size_t r = 0; r < f.dim(); r++) {
        for (std::size_t c = 0; c < f.dim(); c++) {
            m(r, c) = f[r] * std::conj(f[c]);
        }
    }
    return m;
}

/// The unique (up to phase) qubit state orthogonal to f.
inline Ket orthogonal_qubit(const Ket &f) {
    if (f.dim() != 2) {
        throw std::invalid_argument("orthogonal_qubit requires a two-dimensional state");
    }
    return f.with_amps({-std::conj(f[1]), std::conj(f[0])});
}

/// Hermitian observable given by its spectral decomposition. The projectors
/// must be hermitian, idempotent, mutually orthogonal, and complete.
class Observable {
  public:
    struct EigenPair {
        double value;
        Matrix projector;
    };

    Observable(std::vector<std::string> basis_labels, std::vector<EigenPair> eigenpairs)
        : labels_(std::move(basis_labels)), pairs_(std::move(eigenpairs)) {
        if (pairs_.empty()) {
            throw std::invalid_argument("observable needs at least one eigenpair");
        }
        const std::size_t n = labels_.size();
        Matrix sum(n, n);
        for (const auto &p : pairs_) {
            if (p.projector.rows() != n || p.projector.cols() != n) {
                throw std::invalid_argument("projector dimension mismatch");
            }
            if (!p.projector.is_hermitian()) {
                throw std::invalid_argument("projector is not hermitian");
            }
            if (!p.projector.is_idempotent()) {
                throw std::invalid_argument("projector is not idempotent");
            }
            sum = sum + p.projector;
        }
        for (std::size_t i = 0; i < pairs_.size(); i++) {
            for (std::size_t j = i + 1; j < pairs_.size(); j++) {
                Matrix prod = pairs_[i].projector * pairs_[j].projector;
                if (prod.max_abs_diff(Matrix(n, n)) > kIdentityTol) {
                    throw std::invalid_argument("projectors are not mutually orthogonal");
                }
            }
        }
        if (sum.max_abs_diff(Matrix::identity(n)) > kIdentityTol) {
            throw std::invalid_argument("projectors do not sum to the identity");
        }
    }

    /// Observable with spectrum {1, 0}: the projector onto f and its complement.
    static Observable projector_observable(const Ket &f) {
        require_normalized(f, "projector_observable");
        Matrix p = projector_onto(f);
        Matrix rest = Matrix::identity(f.dim()) - p;
        return Observable(f.labels(), {{1.0, p}, {0.0, rest}});
    }

    /// Observable with one projector per given orthonormal eigenstate.
    static Observable from_eigenbasis(const std::vector<Ket> &eigenstates,
                                      const std::vector<double> &eigenvalues) {
        if (eigenstates.empty() || eigenstates.size() != eigenvalues.size()) {
            throw std::invalid_argument("eigenstate/eigenvalue count mismatch");
        }
        std::vector<EigenPair> pairs;
        pairs.reserve(eigenstates.size());
        for (std::size_t k = 0; k < eigenstates.size(); k++) {
            require_same_space(eigenstates[0], eigenstates[k], "from_eigenbasis");
            pairs.push_back({eigenvalues[k], projector_onto(eigenstates[k])});
        }
        return Observable(eigenstates[0].labels(), std::move(pairs));
    }

    const std::vector<std::string> &labels() const { return labels_; }
    const std::vector<EigenPair> &eigenpairs() const { return pairs_; }
    std::size_t dim() const { return labels_.size(); }

    double min_eigenvalue() const {
        double v = pairs_[0].value;
        for (const auto &p : pairs_) {
            v = std::min(v, p.value);
        }
        return v;
    }

    double max_eigenvalue() const {
        double v = pairs_[0].value;
        for (const auto &p : pairs_) {
            v = std::max(v, p.value);
        }
        return v;
    }

    Matrix to_matrix() const {
        Matrix m(dim(), dim());
        for (const auto &p : pairs_) {
            m = m + p.projector * cdouble{p.value, 0.0};
        }
        return m;
    }

  private:
    std::vector<std::string> labels_;
    std::vector<EigenPair> pairs_;
};

/// Linear map between labeled spaces. `unitary_flag` is a checked claim:
/// constructing a map with the flag set verifies M^dag M = 1.
class LinearMap {
  public:
    LinearMap(std::vector<std::string> out_labels, std::vector<std::string> in_labels,
              Matrix matrix, bool unitary_flag)
        : out_labels_(std::move(out_labels)),
          in_labels_(std::move(in_labels)),
          matrix_(std::move(matrix)),
          unitary_(unitary_flag) {
        if (matrix_.rows() != out_labels_.size() || matrix_.cols() != in_labels_.size()) {
            throw std::invalid_argument("linear map shape does not match label spaces");
        }
        if (unitary_ && !matrix_.is_unitary()) {
            throw std::invalid_argument("map claims unitarity but M^dag M != 1");
        }
    }

    const Matrix &matrix() const { return matrix_; }
    bool unitary_flag() const { return unitary_; }
    const std::vector<std::string> &in_labels() const { return in_labels_; }
    const std::vector<std::string> &out_labels() const { return out_labels_; }

    /// Applies the map. The image is returned as-is; non-unitary maps do not
    /// preserve norm.
    Ket apply(const Ket &psi) const {
        if (psi.labels() != in_labels_) {
            throw std::invalid_argument("linear map applied to a state from the wrong space");
        }
        return Ket(out_labels_, matrix_.apply(psi.amps()));
    }

  private:
    std::vector<std::string> out_labels_;
    std::vector<std::string> in_labels_;
    Matrix matrix_;
    bool unitary_;
};

/// Product state a (x) b. Joint labels are "<a>,<b>" pairs; a collision
/// (possible when factor labels already contain the separator) is an error.
inline Ket tensor(const Ket &a, const Ket &b) {
    std::vector<std::string> labels;
    std::vector<cdouble> amps;
    labels.reserve(a.dim() * b.dim());
    amps.reserve(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); i++) {
        for (std::size_t j = 0; j < b.dim(); j++) {
            labels.push_back(a.labels()[i] + "," + b.labels()[j]);
            amps.push_back(a[i] * b[j]);
        }
    }
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size()) {
        throw std::invalid_argument("tensor label collision between factor namespaces");
    }
    return Ket(std::move(labels), std::move(amps));
}

/// <psi|A|psi> evaluated through the spectral decomposition.
inline double expectation(const Observable &a, const Ket &psi) {
    if (a.labels() != psi.labels()) {
        throw std::invalid_argument("expectation: observable and state dimension mismatch");
    }
    require_normalized(psi, "expectation");
    double acc = 0.0;
    for (const auto &p : a.eigenpairs()) {
        std::vector<cdouble> proj = p.projector.apply(psi.amps());
        double weight = 0.0;
        for (const auto &v : proj) {
            weight += std::norm(v);
        }
        acc += p.value * weight;
    }
    return acc;
}

struct ProjectionResult {
    double probability;
    std::optional<Ket> post_state;  // absent when the outcome has zero probability
};

/// Born rule for a single projector: outcome probability and the collapsed
/// normalized state.
inline ProjectionResult project(const Matrix &projector, const Ket &psi) {
    if (projector.rows() != psi.dim() || projector.cols() != psi.dim()) {
        throw std::invalid_argument("project: projector and state dimension mismatch");
    }
    require_normalized(psi, "project");
    std::vector<cdouble> image = projector.apply(psi.amps());
    double prob = 0.0;
    for (const auto &v : image) {
        prob += std::norm(v);
    }
    if (prob <= kBornZeroTol) {
        return {0.0, std::nullopt};
    }
    prob = std::min(prob, 1.0);
    double scale = 1.0 / std::sqrt(prob);
    for (auto &v : image) {
        v *= scale;
    }
    return {prob, Ket(psi.labels(), std::move(image))};
}

}  // namespace qmeas

#endif

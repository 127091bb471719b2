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

#ifndef QMEAS_POINTER_HPP
#define QMEAS_POINTER_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qmeas/hilbert.hpp"

namespace qmeas {

inline constexpr std::size_t kDefaultPointerPoints = 4001;
inline constexpr double kGridNormTol = 1e-9;

/// Trapezoidal integral of uniformly sampled values.
inline double trapezoid(const std::vector<double> &values, double dq) {
    if (values.size() < 2) {
        throw std::invalid_argument("trapezoid needs at least two samples");
    }
    double acc = 0.5 * (values.front() + values.back());
    for (std::size_t k = 1; k + 1 < values.size(); k++) {
        acc += values[k];
    }
    return acc * dq;
}

/// Continuous detector pointer prepared in a Gaussian wave packet of width
/// delta centered at q0, discretized on a uniform grid. Shifted copies are
/// produced by re-evaluating the analytic Gaussian, never by interpolation.
class GaussianPointer {
  public:
    GaussianPointer(double q0, double delta, double q_min, double q_max, std::size_t n_points)
        : q0_(q0), delta_(delta), q_min_(q_min), q_max_(q_max), n_points_(n_points) {
        if (delta_ <= 0.0) {
            throw std::invalid_argument("pointer width must be positive");
        }
        if (n_points_ < 2 || q_max_ <= q_min_) {
            throw std::invalid_argument("pointer grid is degenerate");
        }
        if (q_min_ > q0_ - 8.0 * delta_ || q_max_ < q0_ + 8.0 * delta_) {
            throw std::invalid_argument("pointer grid must span at least q0 +/- 8 delta");
        }
        std::vector<double> density(n_points_);
        for (std::size_t k = 0; k < n_points_; k++) {
            double a = amplitude_at(q(k), q0_);
            density[k] = a * a;
        }
        if (std::abs(trapezoid(density, dq()) - 1.0) > kGridNormTol) {
            throw std::invalid_argument("pointer grid too coarse: |phi0|^2 does not integrate to 1");
        }
    }

    /// Grid covering q0 +/- 10 delta, widened to keep every coupled branch
    /// center (q0 + shift) at least 8 delta away from the edges.
    static GaussianPointer with_default_grid(double q0, double delta, double min_shift = 0.0,
                                             double max_shift = 0.0) {
        double lo = q0 - 10.0 * delta + std::min(0.0, min_shift);
        double hi = q0 + 10.0 * delta + std::max(0.0, max_shift);
        return GaussianPointer(q0, delta, lo, hi, kDefaultPointerPoints);
    }

    double q0() const { return q0_; }
    double delta() const { return delta_; }
    double q_min() const { return q_min_; }
    double q_max() const { return q_max_; }
    std::size_t n_points() const { return n_points_; }
    double dq() const { return (q_max_ - q_min_) / static_cast<double>(n_points_ - 1); }
    double q(std::size_t k) const { return q_min_ + dq() * static_cast<double>(k); }

    /// Analytic Gaussian amplitude (2 pi delta^2)^(-1/4) exp(-(q-c)^2/(4 delta^2)).
    double amplitude_at(double point, double center) const {
        double c = std::pow(2.0 * std::numbers::pi * delta_ * delta_, -0.25);
        double u = (point - center) / (2.0 * delta_);
        return c * std::exp(-u * u);
    }

  private:
    double q0_;
    double delta_;
    double q_min_;
    double q_max_;
    std::size_t n_points_;
};

/// One eigenspace branch of the coupled system-detector state: the system
/// component P_j|i> rides a Gaussian translated to q0 + lambda * a_j.
struct PointerBranch {
    Ket system_component;  // unnormalized projection of i onto the eigenspace
    double eigenvalue;
    double center;

    double weight() const { return system_component.norm_squared(); }
};

struct JointPointerState {
    std::vector<PointerBranch> branches;
    GaussianPointer pointer;
    double lambda;
};

/// Impulsive coupling of strength lambda between the system observable and the
/// pointer momentum: each eigenspace of A drags its Gaussian by lambda * a_j.
inline JointPointerState couple(const Ket &i, const Observable &a, double lambda,
                                const GaussianPointer &pointer) {
    if (a.labels() != i.labels()) {
        throw std::invalid_argument("couple: observable and state dimension mismatch");
    }
    require_normalized(i, "couple");
    if (!std::isfinite(lambda)) {
        throw std::invalid_argument("couple: coupling strength must be finite");
    }
    JointPointerState joint{{}, pointer, lambda};
    for (const auto &p : a.eigenpairs()) {
        double center = pointer.q0() + lambda * p.value;
        if (center - 8.0 * pointer.delta() < pointer.q_min() ||
            center + 8.0 * pointer.delta() > pointer.q_max()) {
            throw std::invalid_argument(
                "couple: grid too narrow to hold the shifted Gaussian at 8 delta");
        }
        joint.branches.push_back({i.with_amps(p.projector.apply(i.amps())), p.value, center});
    }
    return joint;
}

/// Pointer marginal of the full joint state: sum of branch weights times
/// displaced Gaussians (branches are orthogonal in the system factor, so no
/// cross terms survive). Normalized exactly on the grid.
inline std::vector<double> marginal_pointer_density(const JointPointerState &joint) {
    const GaussianPointer &g = joint.pointer;
    std::vector<double> density(g.n_points(), 0.0);
    for (const auto &branch : joint.branches) {
        double w = branch.weight();
        if (w == 0.0) {
            continue;
        }
        for (std::size_t k = 0; k < g.n_points(); k++) {
            double a = g.amplitude_at(g.q(k), branch.center);
            density[k] += w * a * a;
        }
    }
    double total = trapezoid(density, g.dq());
    for (auto &v : density) {
        v /= total;
    }
    return density;
}

struct PostselectedWave {
    std::vector<cdouble> wave;  // normalized on the grid
    double probability;         // postselection probability (grid integral)
};

/// Pointer wavefunction conditioned on finding the system in f:
/// psi_f(q) = sum_j <f|P_j|i> phi0(q - lambda a_j), then normalized.
inline PostselectedWave postselected_pointer_wave(const JointPointerState &joint, const Ket &f) {
    const GaussianPointer &g = joint.pointer;
    require_normalized(f, "postselected_pointer_wave");
    std::vector<cdouble> wave(g.n_points(), cdouble{});
    for (const auto &branch : joint.branches) {
        cdouble coeff = inner(f, branch.system_component);
        if (coeff == cdouble{}) {
            continue;
        }
        for (std::size_t k = 0; k < g.n_points(); k++) {
            wave[k] += coeff * g.amplitude_at(g.q(k), branch.center);
        }
    }
    std::vector<double> density(g.n_points());
    for (std::size_t k = 0; k < g.n_points(); k++) {
        density[k] = std::norm(wave[k]);
    }
    double probability = trapezoid(density, g.dq());
    if (probability <= 1e-12) {
        throw std::domain_error("postselected_pointer_wave: vanishing postselection probability");
    }
    double scale = 1.0 / std::sqrt(probability);
    for (auto &v : wave) {
        v *= scale;
    }
    return {std::move(wave), probability};
}

inline std::vector<double> postselected_pointer_distribution(const JointPointerState &joint,
                                                             const Ket &f) {
    PostselectedWave w = postselected_pointer_wave(joint, f);
    std::vector<double> density(w.wave.size());
    for (std::size_t k = 0; k < w.wave.size(); k++) {
        density[k] = std::norm(w.wave[k]);
    }
    return density;
}

struct PointerMoments {
    double mean_q;
    double var_q;
};

inline PointerMoments pointer_moments(const GaussianPointer &grid,
                                      const std::vector<double> &density) {
    if (density.size() != grid.n_points()) {
        throw std::invalid_argument("pointer_moments: density does not match the grid");
    }
    std::vector<double> weighted(density.size());
    for (std::size_t k = 0; k < density.size(); k++) {
        weighted[k] = density[k] * grid.q(k);
    }
    double mean = trapezoid(weighted, grid.dq());
    for (std::size_t k = 0; k < density.size(); k++) {
        double d = grid.q(k) - mean;
        weighted[k] = density[k] * d * d;
    }
    return {mean, trapezoid(weighted, grid.dq())};
}

/// Momentum readout <p> = integral Im(conj(psi) dpsi/dq) dq, i.e. the phase
/// gradient weighted by |psi|^2, with central differences on the grid.
inline double mean_momentum(const GaussianPointer &grid, const std::vector<cdouble> &wave) {
    if (wave.size() != grid.n_points()) {
        throw std::invalid_argument("mean_momentum: wave does not match the grid");
    }
    std::vector<double> integrand(wave.size(), 0.0);
    double two_dq = 2.0 * grid.dq();
    for (std::size_t k = 1; k + 1 < wave.size(); k++) {
        cdouble derivative = (wave[k + 1] - wave[k - 1]) / two_dq;
        integrand[k] = std::imag(std::conj(wave[k]) * derivative);
    }
    return trapezoid(integrand, grid.dq());
}

}  // namespace qmeas

#endif

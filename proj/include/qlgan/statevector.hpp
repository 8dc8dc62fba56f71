// Copyright 2026 The qlgan Authors
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

/**
 * @file
 * Exact statevector simulation for rotation-gate circuits.
 *
 * Qubit q is bit q of the amplitude index (little-endian). Gates are applied
 * in place by striding over amplitude pairs; no 2^n x 2^n matrix is formed.
 * Rotations follow R_P(theta) = exp(-i theta P / 2).
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qlgan/error.hpp"
#include "qlgan/random.hpp"

namespace qlgan {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 24;

enum class GateKind { RX, RY, RZ, CNOT, CRX, CRY, CRZ };
enum class Pauli { X, Z };

constexpr bool is_controlled(GateKind k) noexcept {
    return k == GateKind::CNOT || k == GateKind::CRX || k == GateKind::CRY ||
           k == GateKind::CRZ;
}

constexpr bool is_parameterized(GateKind k) noexcept {
    return k != GateKind::CNOT;
}

struct GateOp {
    GateKind kind = GateKind::RY;
    double angle = 0.0;
    int control = -1; ///< -1 for single-qubit gates
    int target = 0;

    static GateOp rx(int t, double a) { return {GateKind::RX, a, -1, t}; }
    static GateOp ry(int t, double a) { return {GateKind::RY, a, -1, t}; }
    static GateOp rz(int t, double a) { return {GateKind::RZ, a, -1, t}; }
    static GateOp cnot(int c, int t) { return {GateKind::CNOT, 0.0, c, t}; }
    static GateOp crx(int c, int t, double a) {
        return {GateKind::CRX, a, c, t};
    }
    static GateOp cry(int c, int t, double a) {
        return {GateKind::CRY, a, c, t};
    }
    static GateOp crz(int c, int t, double a) {
        return {GateKind::CRZ, a, c, t};
    }

    /// Same gate with the angle negated (CNOT is self-inverse).
    GateOp inverse() const {
        GateOp g = *this;
        g.angle = -angle;
        return g;
    }
};

using Matrix2 = std::array<Complex, 4>; // row-major {m00, m01, m10, m11}

/// 2x2 unitary acting on the target (the controlled block for CR*).
inline Matrix2 target_matrix(const GateOp &g) {
    const double c = std::cos(g.angle / 2.0);
    const double s = std::sin(g.angle / 2.0);
    const Complex i{0.0, 1.0};
    switch (g.kind) {
    case GateKind::RX:
    case GateKind::CRX:
        return {c, -i * s, -i * s, c};
    case GateKind::RY:
    case GateKind::CRY:
        return {c, -s, s, c};
    case GateKind::RZ:
    case GateKind::CRZ:
        return {std::polar(1.0, -g.angle / 2.0), 0.0, 0.0,
                std::polar(1.0, g.angle / 2.0)};
    case GateKind::CNOT:
        return {0.0, 1.0, 1.0, 0.0};
    }
    return {1.0, 0.0, 0.0, 1.0};
}

/**
 * -i/2 times the Pauli generator of a rotation gate, so that
 * dR(theta)/dtheta = generator_matrix(g) * R(theta).
 */
inline Matrix2 generator_matrix(const GateOp &g) {
    const Complex h{0.0, -0.5};
    switch (g.kind) {
    case GateKind::RX:
    case GateKind::CRX:
        return {0.0, h, h, 0.0};
    case GateKind::RY:
    case GateKind::CRY:
        return {0.0, -0.5, 0.5, 0.0};
    case GateKind::RZ:
    case GateKind::CRZ:
        return {h, 0.0, 0.0, -h};
    case GateKind::CNOT:
        break;
    }
    throw ArgumentError("CNOT has no generator");
}

class StateVector {
  public:
    /// |0...0> on n_qubits qubits.
    explicit StateVector(int n_qubits, int max_qubits = kMaxQubits)
        : n_qubits_(n_qubits) {
        if (n_qubits < 1 || n_qubits > max_qubits) {
            throw ConfigError("n_qubits must be in [1, " +
                              std::to_string(max_qubits) + "], got " +
                              std::to_string(n_qubits));
        }
        amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
        amplitudes_[0] = 1.0;
    }

    /// Wraps explicit amplitudes; the length must be a power of two.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes) {
        const std::size_t n = amplitudes.size();
        if (n < 2 || (n & (n - 1)) != 0) {
            throw ArgumentError("amplitude count must be a power of two >= 2");
        }
        int q = 0;
        while ((std::size_t{1} << q) < n) {
            ++q;
        }
        StateVector sv(q);
        sv.amplitudes_ = std::move(amplitudes);
        return sv;
    }

    int n_qubits() const noexcept { return n_qubits_; }
    std::size_t size() const noexcept { return amplitudes_.size(); }

    std::span<const Complex> amplitudes() const noexcept {
        return amplitudes_;
    }
    std::span<Complex> amplitudes() noexcept { return amplitudes_; }

    void apply(const GateOp &g) {
        check_gate(g);
        apply_matrix(target_matrix(g), g.target, g.control);
    }

    void apply_inverse(const GateOp &g) { apply(g.inverse()); }

    /**
     * Applies an arbitrary 2x2 matrix to `target`, restricted to the subspace
     * where `control` is 1 when control >= 0. Amplitudes outside that
     * subspace are untouched.
     */
    void apply_matrix(const Matrix2 &m, int target, int control = -1) {
        const std::size_t stride = std::size_t{1} << target;
        const std::size_t cmask =
            control >= 0 ? std::size_t{1} << control : std::size_t{0};
        const std::size_t dim = amplitudes_.size();
        Complex *a = amplitudes_.data();
        for (std::size_t hi = 0; hi < dim; hi += 2 * stride) {
            for (std::size_t i = hi; i < hi + stride; ++i) {
                if ((i & cmask) != cmask) {
                    continue;
                }
                const Complex a0 = a[i];
                const Complex a1 = a[i + stride];
                a[i] = m[0] * a0 + m[1] * a1;
                a[i + stride] = m[2] * a0 + m[3] * a1;
            }
        }
    }

    /// Zeroes every amplitude whose `qubit` bit is 0.
    void project_one(int qubit) {
        const std::size_t mask = std::size_t{1} << qubit;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if ((i & mask) == 0) {
                amplitudes_[i] = 0.0;
            }
        }
    }

    void apply_pauli(int qubit, Pauli p) {
        check_qubit(qubit);
        if (p == Pauli::X) {
            apply_matrix({0.0, 1.0, 1.0, 0.0}, qubit);
        } else {
            apply_matrix({1.0, 0.0, 0.0, -1.0}, qubit);
        }
    }

    /// <psi| P_qubit |psi>
    double expectation(int qubit, Pauli p) const {
        check_qubit(qubit);
        const std::size_t stride = std::size_t{1} << qubit;
        const std::size_t dim = amplitudes_.size();
        double acc = 0.0;
        for (std::size_t hi = 0; hi < dim; hi += 2 * stride) {
            for (std::size_t i = hi; i < hi + stride; ++i) {
                const Complex a0 = amplitudes_[i];
                const Complex a1 = amplitudes_[i + stride];
                if (p == Pauli::Z) {
                    acc += std::norm(a0) - std::norm(a1);
                } else {
                    acc += 2.0 * (std::conj(a0) * a1).real();
                }
            }
        }
        return acc;
    }

    double norm_squared() const {
        double acc = 0.0;
        for (const auto &a : amplitudes_) {
            acc += std::norm(a);
        }
        return acc;
    }

    /// <this|other>
    Complex inner(const StateVector &other) const {
        if (other.size() != size()) {
            throw ArgumentError("inner product of states with different sizes");
        }
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            acc += std::conj(amplitudes_[i]) * other.amplitudes_[i];
        }
        return acc;
    }

    /**
     * <bra| M |this>, where M acts as `m` on `target` inside the subspace
     * control = 1 and as zero outside it (identity control when < 0).
     */
    Complex transition(const StateVector &bra, const Matrix2 &m, int target,
                       int control = -1) const {
        if (bra.size() != size()) {
            throw ArgumentError("transition between states of different sizes");
        }
        const std::size_t stride = std::size_t{1} << target;
        const std::size_t cmask =
            control >= 0 ? std::size_t{1} << control : std::size_t{0};
        const std::size_t dim = amplitudes_.size();
        const Complex *a = amplitudes_.data();
        const Complex *b = bra.amplitudes_.data();
        Complex acc{0.0, 0.0};
        for (std::size_t hi = 0; hi < dim; hi += 2 * stride) {
            for (std::size_t i = hi; i < hi + stride; ++i) {
                if ((i & cmask) != cmask) {
                    continue;
                }
                const Complex a0 = a[i];
                const Complex a1 = a[i + stride];
                acc += std::conj(b[i]) * (m[0] * a0 + m[1] * a1) +
                       std::conj(b[i + stride]) * (m[2] * a0 + m[3] * a1);
            }
        }
        return acc;
    }

    void check_gate(const GateOp &g) const {
        check_qubit(g.target);
        if (is_controlled(g.kind)) {
            check_qubit(g.control);
            if (g.control == g.target) {
                throw ArgumentError("control and target coincide on qubit " +
                                    std::to_string(g.target));
            }
        } else if (g.control >= 0) {
            throw ArgumentError("single-qubit gate given a control qubit");
        }
    }

  private:
    void check_qubit(int q) const {
        if (q < 0 || q >= n_qubits_) {
            throw ArgumentError("qubit index " + std::to_string(q) +
                                " out of range for " +
                                std::to_string(n_qubits_) + " qubits");
        }
    }

    int n_qubits_;
    std::vector<Complex> amplitudes_;
};

inline StateVector init_zero(int n_qubits) { return StateVector(n_qubits); }

inline StateVector apply_gate(StateVector state, const GateOp &gate) {
    state.apply(gate);
    return state;
}

inline double expectation(const StateVector &state, int qubit, Pauli p) {
    return state.expectation(qubit, p);
}

/**
 * Finite-shot estimate of a Pauli expectation: 2k/n - 1 with
 * k ~ Binomial(n, (1 + E) / 2).
 */
inline double shot_estimate(double expectation, int n_shots, Rng &rng) {
    if (n_shots <= 0) {
        throw ArgumentError("n_shots must be positive");
    }
    if (!(std::abs(expectation) <= 1.0 + 1e-9)) {
        throw ArgumentError("expectation outside [-1, 1]");
    }
    const double p = std::clamp((1.0 + expectation) / 2.0, 0.0, 1.0);
    std::binomial_distribution<std::int64_t> dist(n_shots, p);
    const auto k = dist(rng);
    return 2.0 * static_cast<double>(k) / n_shots - 1.0;
}

} // namespace qlgan

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
 * Exact derivatives of readout expectations with respect to circuit angles
 * and, through the style map, with respect to (W, b).
 *
 * The adjoint engine runs one forward simulation and one reverse sweep that
 * carries a bra per readout term. Parameter-shift is kept as an independent
 * cross-check: two terms for single-qubit rotations, four terms for
 * controlled rotations (whose generator spectrum is {0, +-1/2}).
 */
#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "qlgan/ansatz.hpp"
#include "qlgan/error.hpp"
#include "qlgan/linalg.hpp"
#include "qlgan/statevector.hpp"

namespace qlgan {

/// Rows are unscaled readout terms, columns are angles in emission order.
struct AngleJacobian {
    Matrix values;
};

struct ReadoutWithJacobian {
    std::vector<double> raw; ///< unscaled readout
    AngleJacobian jacobian;
};

/// Forward pass plus adjoint reverse sweep over an already built circuit.
inline ReadoutWithJacobian adjoint_readout(const GeneratorConfig &cfg,
                                           const StyledCircuit &circuit) {
    const auto terms = readout_terms(cfg);
    StateVector phi = simulate(circuit);

    ReadoutWithJacobian out;
    out.raw = raw_readout(cfg, phi);

    std::vector<StateVector> bras;
    bras.reserve(terms.size());
    for (const auto &t : terms) {
        bras.push_back(phi);
        bras.back().apply_pauli(t.qubit, t.pauli);
    }

    const auto n_angles = static_cast<Eigen::Index>(circuit.angle_count());
    out.jacobian.values = Matrix::Zero(static_cast<Eigen::Index>(terms.size()),
                                       n_angles);
    Eigen::Index col = n_angles;
    for (std::size_t k = circuit.gates.size(); k-- > 0;) {
        const GateOp &g = circuit.gates[k];
        if (is_parameterized(g.kind)) {
            --col;
            const Matrix2 gen = generator_matrix(g);
            for (std::size_t j = 0; j < bras.size(); ++j) {
                out.jacobian.values(static_cast<Eigen::Index>(j), col) =
                    2.0 * phi.transition(bras[j], gen, g.target, g.control).real();
            }
        }
        phi.apply_inverse(g);
        for (auto &bra : bras) {
            bra.apply_inverse(g);
        }
    }
    return out;
}

/**
 * Vector-Jacobian product: sum_j weights_j d<P_j>/d theta for every angle,
 * from a single adjoint sweep with the combined bra sum_j weights_j P_j |psi>.
 * `final_state` must be the circuit's output state.
 */
inline std::vector<double> adjoint_vjp(const GeneratorConfig &cfg,
                                       const StyledCircuit &circuit,
                                       StateVector final_state,
                                       std::span<const double> weights) {
    const auto terms = readout_terms(cfg);
    if (weights.size() != terms.size()) {
        throw ArgumentError("VJP weight count does not match the readout");
    }
    StateVector &phi = final_state;
    StateVector bra = StateVector::from_amplitudes(
        std::vector<Complex>(phi.size(), Complex{0.0, 0.0}));
    for (std::size_t j = 0; j < terms.size(); ++j) {
        StateVector term = phi;
        term.apply_pauli(terms[j].qubit, terms[j].pauli);
        auto dst = bra.amplitudes();
        const auto src = term.amplitudes();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] += weights[j] * src[i];
        }
    }
    std::vector<double> out(circuit.angle_count(), 0.0);
    std::size_t col = out.size();
    for (std::size_t k = circuit.gates.size(); k-- > 0;) {
        const GateOp &g = circuit.gates[k];
        if (is_parameterized(g.kind)) {
            --col;
            out[col] = 2.0 *
                       phi.transition(bra, generator_matrix(g), g.target, g.control)
                           .real();
        }
        phi.apply_inverse(g);
        bra.apply_inverse(g);
    }
    return out;
}

inline AngleJacobian angle_jacobian(const GeneratorConfig &cfg,
                                    const StyleParams &params,
                                    std::span<const double> noise) {
    return adjoint_readout(cfg, build_circuit(cfg, noise, params)).jacobian;
}

/// Parameter-shift Jacobian of an already built circuit.
inline AngleJacobian parameter_shift_jacobian(const GeneratorConfig &cfg,
                                              const StyledCircuit &circuit) {
    const auto terms = readout_terms(cfg);
    const double half_pi = std::numbers::pi / 2.0;
    const double c_plus = (std::sqrt(2.0) + 1.0) / (4.0 * std::sqrt(2.0));
    const double c_minus = (std::sqrt(2.0) - 1.0) / (4.0 * std::sqrt(2.0));

    auto shifted = [&](std::size_t gate, double shift) {
        StyledCircuit c = circuit;
        c.gates[gate].angle += shift;
        return raw_readout(cfg, simulate(c));
    };

    AngleJacobian jac;
    jac.values = Matrix::Zero(static_cast<Eigen::Index>(terms.size()),
                              static_cast<Eigen::Index>(circuit.angle_count()));
    Eigen::Index col = 0;
    for (std::size_t k = 0; k < circuit.gates.size(); ++k) {
        const GateOp &g = circuit.gates[k];
        if (!is_parameterized(g.kind)) {
            continue;
        }
        const auto fp = shifted(k, half_pi);
        const auto fm = shifted(k, -half_pi);
        if (!is_controlled(g.kind)) {
            for (std::size_t j = 0; j < terms.size(); ++j) {
                jac.values(static_cast<Eigen::Index>(j), col) =
                    (fp[j] - fm[j]) / 2.0;
            }
        } else {
            const auto fp3 = shifted(k, 3.0 * half_pi);
            const auto fm3 = shifted(k, -3.0 * half_pi);
            for (std::size_t j = 0; j < terms.size(); ++j) {
                jac.values(static_cast<Eigen::Index>(j), col) =
                    c_plus * (fp[j] - fm[j]) - c_minus * (fp3[j] - fm3[j]);
            }
        }
        ++col;
    }
    return jac;
}

inline AngleJacobian angle_jacobian_parameter_shift(
    const GeneratorConfig &cfg, const StyleParams &params,
    std::span<const double> noise) {
    return parameter_shift_jacobian(cfg, build_circuit(cfg, noise, params));
}

/// dL/dW and dL/db, shaped like StyleParams::weights()/biases().
struct StyleGradient {
    std::vector<double> weights;
    std::vector<double> biases;
};

/**
 * Chains per-angle derivatives dL/d theta (already including the output
 * gain) through the style map: d theta/dw = 2 pi sech^2(u) xi and
 * d theta/db = 2 pi sech^2(u).
 */
inline StyleGradient style_chain_angles(const StyledCircuit &circuit,
                                        std::span<const double> dtheta,
                                        std::span<const double> noise,
                                        const StyleParams &params) {
    if (dtheta.size() != circuit.angle_count()) {
        throw ArgumentError("angle gradient does not match the circuit");
    }
    StyleGradient grad{std::vector<double>(params.slot_count(), 0.0),
                       std::vector<double>(params.slot_count(), 0.0)};
    const auto w = params.weights();
    const auto b = params.biases();
    std::size_t col = 0;
    for (std::size_t k = 0; k < circuit.gates.size(); ++k) {
        const int slot = circuit.slots[k];
        if (slot < 0) {
            continue;
        }
        const double xi = noise[static_cast<std::size_t>(circuit.noise_qubits[k])];
        const double t = std::tanh(xi * w[slot] + b[slot]);
        const double dtheta_du = 2.0 * std::numbers::pi * (1.0 - t * t);
        grad.weights[slot] += dtheta[col] * dtheta_du * xi;
        grad.biases[slot] += dtheta[col] * dtheta_du;
        ++col;
    }
    return grad;
}

/**
 * Chains dL/d(latent) through the output gain, the angle Jacobian and the
 * style map.
 */
inline StyleGradient style_chain(const GeneratorConfig &cfg,
                                 const StyledCircuit &circuit,
                                 const AngleJacobian &jac,
                                 std::span<const double> noise,
                                 const StyleParams &params,
                                 std::span<const double> upstream) {
    if (upstream.size() != static_cast<std::size_t>(jac.values.rows())) {
        throw ArgumentError("upstream gradient length does not match the "
                            "latent dimension");
    }
    if (static_cast<std::size_t>(jac.values.cols()) != circuit.angle_count()) {
        throw ArgumentError("Jacobian does not match the circuit");
    }
    std::vector<double> dtheta(circuit.angle_count(), 0.0);
    for (Eigen::Index c = 0; c < jac.values.cols(); ++c) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < jac.values.rows(); ++j) {
            acc += upstream[static_cast<std::size_t>(j)] * jac.values(j, c);
        }
        dtheta[static_cast<std::size_t>(c)] = acc * cfg.output_scale.gain;
    }
    return style_chain_angles(circuit, dtheta, noise, params);
}

inline StyleGradient style_chain(const GeneratorConfig &cfg,
                                 const AngleJacobian &jac,
                                 std::span<const double> noise,
                                 const StyleParams &params,
                                 std::span<const double> upstream) {
    return style_chain(cfg, build_circuit(cfg, noise, params), jac, noise,
                       params, upstream);
}

} // namespace qlgan

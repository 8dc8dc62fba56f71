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
 * Forward-only GRU machinery: cell, sequence fold, bidirectional encoder and
 * the Bernoulli inter-layer dropout h -> delta * h (no 1/(1-p) rescaling).
 *
 *   r = sigma(W_r x + U_r h + b_r)
 *   z = sigma(W_z x + U_z h + b_z)
 *   n = tanh(W_n x + b_n + r .* (U_n h + b_nu))
 *   h' = (1 - z) .* n + z .* h
 */
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qlgan/error.hpp"
#include "qlgan/linalg.hpp"
#include "qlgan/random.hpp"

namespace qlgan {

struct GruWeights {
    Matrix w_r, w_z, w_n; ///< hidden x input
    Matrix u_r, u_z, u_n; ///< hidden x hidden
    Vector b_r, b_z, b_n, b_nu;

    GruWeights() = default;

    /// All-zero weights.
    GruWeights(int input_dim, int hidden_dim)
        : w_r(Matrix::Zero(hidden_dim, input_dim)),
          w_z(Matrix::Zero(hidden_dim, input_dim)),
          w_n(Matrix::Zero(hidden_dim, input_dim)),
          u_r(Matrix::Zero(hidden_dim, hidden_dim)),
          u_z(Matrix::Zero(hidden_dim, hidden_dim)),
          u_n(Matrix::Zero(hidden_dim, hidden_dim)),
          b_r(Vector::Zero(hidden_dim)), b_z(Vector::Zero(hidden_dim)),
          b_n(Vector::Zero(hidden_dim)), b_nu(Vector::Zero(hidden_dim)) {
        if (input_dim < 1 || hidden_dim < 1) {
            throw ConfigError("GRU dimensions must be positive");
        }
    }

    /// Every entry ~ Uniform(-scale, scale).
    static GruWeights random(int input_dim, int hidden_dim, Rng &rng,
                             double scale = 1.0) {
        GruWeights w(input_dim, hidden_dim);
        std::uniform_real_distribution<double> u(-scale, scale);
        auto fill = [&](auto &m) {
            for (Eigen::Index i = 0; i < m.size(); ++i) {
                m.data()[i] = u(rng);
            }
        };
        fill(w.w_r), fill(w.w_z), fill(w.w_n);
        fill(w.u_r), fill(w.u_z), fill(w.u_n);
        fill(w.b_r), fill(w.b_z), fill(w.b_n), fill(w.b_nu);
        return w;
    }

    int input_dim() const { return static_cast<int>(w_r.cols()); }
    int hidden_dim() const { return static_cast<int>(w_r.rows()); }

    void validate() const {
        const auto h = w_r.rows();
        const auto in = w_r.cols();
        auto ok = [&](const Matrix &m, Eigen::Index cols) {
            return m.rows() == h && m.cols() == cols;
        };
        if (!ok(w_z, in) || !ok(w_n, in) || !ok(u_r, h) || !ok(u_z, h) ||
            !ok(u_n, h) || b_r.size() != h || b_z.size() != h ||
            b_n.size() != h || b_nu.size() != h) {
            throw ArgumentError("inconsistent GRU weight shapes");
        }
    }
};

inline Vector sigmoid(const Vector &x) {
    return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

/// Gate activations of one step, exposed for property checks.
struct GruGates {
    Vector reset;
    Vector update;
    Vector candidate;
    Vector hidden;
};

inline GruGates gru_gates(const Vector &x, const Vector &h_prev,
                          const GruWeights &w) {
    if (x.size() != w.input_dim() || h_prev.size() != w.hidden_dim()) {
        throw ArgumentError("GRU step dimension mismatch: input " +
                            std::to_string(x.size()) + ", hidden " +
                            std::to_string(h_prev.size()));
    }
    GruGates g;
    g.reset = sigmoid(w.w_r * x + w.u_r * h_prev + w.b_r);
    g.update = sigmoid(w.w_z * x + w.u_z * h_prev + w.b_z);
    g.candidate = (w.w_n * x + w.b_n +
                   g.reset.cwiseProduct(w.u_n * h_prev + w.b_nu))
                      .array()
                      .tanh()
                      .matrix();
    g.hidden = (Vector::Ones(h_prev.size()) - g.update).cwiseProduct(g.candidate) +
               g.update.cwiseProduct(h_prev);
    return g;
}

inline Vector gru_step(const Vector &x, const Vector &h_prev,
                       const GruWeights &w) {
    return gru_gates(x, h_prev, w).hidden;
}

struct GruTrace {
    Vector final_state;
    std::vector<Vector> states; ///< hidden state after each step
};

/// Left fold of gru_step; an empty sequence returns h0 and an empty trace.
inline GruTrace gru_sequence(const std::vector<Vector> &inputs, const Vector &h0,
                             const GruWeights &w) {
    w.validate();
    if (h0.size() != w.hidden_dim()) {
        throw ArgumentError("initial state has the wrong dimension");
    }
    GruTrace trace;
    Vector h = h0;
    for (const auto &x : inputs) {
        h = gru_step(x, h, w);
        trace.states.push_back(h);
    }
    trace.final_state = std::move(h);
    return trace;
}

/// [forward final state, backward final state], length 2 * hidden.
inline Vector bidirectional(const std::vector<Vector> &inputs,
                            const Vector &h0_fwd, const Vector &h0_bwd,
                            const GruWeights &w_fwd, const GruWeights &w_bwd) {
    const auto fwd = gru_sequence(inputs, h0_fwd, w_fwd).final_state;
    const std::vector<Vector> reversed(inputs.rbegin(), inputs.rend());
    const auto bwd = gru_sequence(reversed, h0_bwd, w_bwd).final_state;
    Vector out(fwd.size() + bwd.size());
    out << fwd, bwd;
    return out;
}

/// Multiplies each element by delta ~ Bernoulli(1 - p).
inline Vector dropout_between_layers(const Vector &h, double p, Rng &rng) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw ArgumentError("dropout probability must lie in [0, 1)");
    }
    if (p == 0.0) {
        return h;
    }
    Vector out = h;
    std::bernoulli_distribution keep(1.0 - p);
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        if (!keep(rng)) {
            out(i) = 0.0;
        }
    }
    return out;
}

} // namespace qlgan

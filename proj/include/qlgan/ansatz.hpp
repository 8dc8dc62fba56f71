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
 * Style-based data re-uploading ansaetze.
 *
 * Every rotation angle is theta = 2 pi tanh(xi_q W_{q,l,k} + b_{q,l,k}), where
 * xi_q is the noise element of the gate's control (or only) qubit, so the
 * noise vector enters every layer of the circuit.
 *
 * Simple layer: RY on each qubit, then a CNOT ring q -> q+1.
 * BEL layer: RZ RY RZ on each qubit, a CRY ring q -> q+1 and a CRX ring
 * q -> q-1; after the last layer a final RY column.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qlgan/error.hpp"
#include "qlgan/linalg.hpp"
#include "qlgan/random.hpp"
#include "qlgan/statevector.hpp"

namespace qlgan {

enum class AnsatzKind { Simple, BEL };
enum class Readout { Single, Dual };
enum class NoiseDistribution { StandardNormal, Uniform01 };

/// Elementwise affine map applied to readout values.
struct OutputScale {
    double gain = 1.0;
    double offset = 0.0;
};

struct GeneratorConfig {
    AnsatzKind kind = AnsatzKind::BEL;
    int n_qb = 5;
    int n_layers = 2;
    Readout readout = Readout::Dual;
    OutputScale output_scale{};
    NoiseDistribution noise = NoiseDistribution::StandardNormal;

    int latent_dim() const {
        return readout == Readout::Single ? n_qb : 2 * n_qb;
    }

    void validate(int max_qubits = kMaxQubits) const {
        if (n_qb < 1 || n_qb > max_qubits) {
            throw ConfigError("n_qb must be in [1, " +
                              std::to_string(max_qubits) + "]");
        }
        if (n_layers < 1) {
            throw ConfigError("n_layers must be positive");
        }
        if (!std::isfinite(output_scale.gain) ||
            !std::isfinite(output_scale.offset)) {
            throw ConfigError("output scale must be finite");
        }
    }
};

/// 2 pi tanh(xi w + b).
inline double style_angle(double xi, double w, double b) {
    return 2.0 * std::numbers::pi * std::tanh(xi * w + b);
}

/// Angle slots owned by one qubit: one per layer (Simple) or five per layer
/// plus the final RY (BEL).
constexpr int slots_per_qubit(AnsatzKind kind, int n_layers) {
    return kind == AnsatzKind::Simple ? n_layers : 5 * n_layers + 1;
}

/// Trainable scalars: a (W, b) pair per angle slot.
constexpr std::size_t param_count(AnsatzKind kind, int n_qb, int n_layers) {
    return 2 * static_cast<std::size_t>(n_qb) *
           static_cast<std::size_t>(slots_per_qubit(kind, n_layers));
}

inline constexpr int kBelSlotsPerLayer = 5;

/**
 * Trainable (W, b) tensors. Both are stored flat in (q, l, k) lexicographic
 * order; for BEL the final-RY slot of qubit q follows its last layer.
 */
class StyleParams {
  public:
    StyleParams() = default;

    StyleParams(AnsatzKind kind, int n_qb, int n_layers)
        : kind_(kind), n_qb_(n_qb), n_layers_(n_layers),
          weights_(static_cast<std::size_t>(n_qb) *
                       slots_per_qubit(kind, n_layers),
                   0.0),
          biases_(weights_.size(), 0.0) {
        if (n_qb < 1 || n_layers < 1) {
            throw ConfigError("StyleParams needs n_qb >= 1 and n_layers >= 1");
        }
    }

    static StyleParams zeros(const GeneratorConfig &cfg) {
        return StyleParams(cfg.kind, cfg.n_qb, cfg.n_layers);
    }

    /// W, b ~ Uniform(-scale, scale).
    static StyleParams random(const GeneratorConfig &cfg, Rng &rng,
                              double scale) {
        StyleParams p = zeros(cfg);
        std::uniform_real_distribution<double> u(-scale, scale);
        for (auto &w : p.weights_) {
            w = u(rng);
        }
        for (auto &b : p.biases_) {
            b = u(rng);
        }
        return p;
    }

    AnsatzKind kind() const noexcept { return kind_; }
    int n_qb() const noexcept { return n_qb_; }
    int n_layers() const noexcept { return n_layers_; }
    std::size_t slot_count() const noexcept { return weights_.size(); }
    std::size_t trainable_count() const noexcept { return 2 * slot_count(); }

    /// Flat slot of (qubit, layer, k), k zero-based within the layer.
    std::size_t slot(int q, int layer, int k) const {
        return static_cast<std::size_t>(q) * slots_per_qubit(kind_, n_layers_) +
               static_cast<std::size_t>(layer) *
                   (kind_ == AnsatzKind::Simple ? 1 : kBelSlotsPerLayer) +
               static_cast<std::size_t>(k);
    }

    /// BEL final-RY slot of qubit q.
    std::size_t final_slot(int q) const {
        return static_cast<std::size_t>(q) * slots_per_qubit(kind_, n_layers_) +
               static_cast<std::size_t>(kBelSlotsPerLayer) * n_layers_;
    }

    std::span<double> weights() noexcept { return weights_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<double> biases() noexcept { return biases_; }
    std::span<const double> biases() const noexcept { return biases_; }

    bool matches(const GeneratorConfig &cfg) const {
        return kind_ == cfg.kind && n_qb_ == cfg.n_qb &&
               n_layers_ == cfg.n_layers;
    }

  private:
    AnsatzKind kind_ = AnsatzKind::Simple;
    int n_qb_ = 0;
    int n_layers_ = 0;
    std::vector<double> weights_;
    std::vector<double> biases_;
};

/// A concrete circuit plus, per gate, where its angle came from.
struct StyledCircuit {
    int n_qubits = 0;
    std::vector<GateOp> gates;
    std::vector<int> slots;        ///< parameter slot per gate, -1 for CNOT
    std::vector<int> noise_qubits; ///< qubit whose noise element drives it

    std::size_t angle_count() const {
        std::size_t n = 0;
        for (int s : slots) {
            n += s >= 0 ? 1 : 0;
        }
        return n;
    }
};

namespace detail {

inline void check_shapes(const GeneratorConfig &cfg,
                         std::span<const double> noise,
                         const StyleParams &params) {
    cfg.validate();
    if (noise.size() != static_cast<std::size_t>(cfg.n_qb)) {
        throw ArgumentError("noise length " + std::to_string(noise.size()) +
                            " != n_qb " + std::to_string(cfg.n_qb));
    }
    if (!params.matches(cfg)) {
        throw ArgumentError("style parameters do not match the generator "
                            "configuration");
    }
}

} // namespace detail

inline StyledCircuit build_circuit(const GeneratorConfig &cfg,
                                   std::span<const double> noise,
                                   const StyleParams &params) {
    detail::check_shapes(cfg, noise, params);
    const int n = cfg.n_qb;
    const auto w = params.weights();
    const auto b = params.biases();

    StyledCircuit c;
    c.n_qubits = n;
    auto emit = [&](GateKind kind, int control, int target, std::size_t slot,
                    int q) {
        const double theta = style_angle(noise[q], w[slot], b[slot]);
        c.gates.push_back({kind, theta, control, target});
        c.slots.push_back(static_cast<int>(slot));
        c.noise_qubits.push_back(q);
    };
    auto emit_cnot = [&](int control, int target) {
        c.gates.push_back(GateOp::cnot(control, target));
        c.slots.push_back(-1);
        c.noise_qubits.push_back(control);
    };

    for (int layer = 0; layer < cfg.n_layers; ++layer) {
        if (cfg.kind == AnsatzKind::Simple) {
            for (int q = 0; q < n; ++q) {
                emit(GateKind::RY, -1, q, params.slot(q, layer, 0), q);
            }
            if (n == 2) {
                emit_cnot(0, 1);
            } else if (n > 2) {
                for (int q = 0; q < n; ++q) {
                    emit_cnot(q, (q + 1) % n);
                }
            }
        } else {
            for (int q = 0; q < n; ++q) {
                emit(GateKind::RZ, -1, q, params.slot(q, layer, 0), q);
                emit(GateKind::RY, -1, q, params.slot(q, layer, 1), q);
                emit(GateKind::RZ, -1, q, params.slot(q, layer, 2), q);
            }
            if (n > 1) {
                for (int q = 0; q < n; ++q) {
                    emit(GateKind::CRY, q, (q + 1) % n,
                         params.slot(q, layer, 3), q);
                }
                for (int q = 0; q < n; ++q) {
                    emit(GateKind::CRX, q, (q + n - 1) % n,
                         params.slot(q, layer, 4), q);
                }
            }
        }
    }
    if (cfg.kind == AnsatzKind::BEL) {
        for (int q = 0; q < n; ++q) {
            emit(GateKind::RY, -1, q, params.final_slot(q), q);
        }
    }
    return c;
}

inline StateVector simulate(const StyledCircuit &c) {
    StateVector psi(c.n_qubits);
    for (const auto &g : c.gates) {
        psi.apply(g);
    }
    return psi;
}

/// Observable measured for latent component `j`: Z block, then X block.
struct ReadoutTerm {
    int qubit;
    Pauli pauli;
};

inline std::vector<ReadoutTerm> readout_terms(const GeneratorConfig &cfg) {
    std::vector<ReadoutTerm> terms;
    for (int q = 0; q < cfg.n_qb; ++q) {
        terms.push_back({q, Pauli::Z});
    }
    if (cfg.readout == Readout::Dual) {
        for (int q = 0; q < cfg.n_qb; ++q) {
            terms.push_back({q, Pauli::X});
        }
    }
    return terms;
}

/// Unscaled expectation values, each in [-1, 1].
inline std::vector<double> raw_readout(const GeneratorConfig &cfg,
                                       const StateVector &psi) {
    std::vector<double> out;
    for (const auto &t : readout_terms(cfg)) {
        out.push_back(psi.expectation(t.qubit, t.pauli));
    }
    return out;
}

inline double apply_scale(const OutputScale &s, double raw) {
    return s.gain * raw + s.offset;
}

inline std::vector<double> generate_latent(const GeneratorConfig &cfg,
                                           const StyleParams &params,
                                           std::span<const double> noise) {
    auto out = raw_readout(cfg, simulate(build_circuit(cfg, noise, params)));
    for (auto &v : out) {
        v = apply_scale(cfg.output_scale, v);
    }
    return out;
}

/// n x n_qb matrix of i.i.d. noise drawn from the configured law.
inline Matrix sample_noise(const GeneratorConfig &cfg, int n_samples,
                           Rng &rng) {
    if (n_samples < 1) {
        throw ArgumentError("n_samples must be positive");
    }
    Matrix noise(n_samples, cfg.n_qb);
    for (int i = 0; i < n_samples; ++i) {
        for (int q = 0; q < cfg.n_qb; ++q) {
            noise(i, q) = cfg.noise == NoiseDistribution::StandardNormal
                              ? standard_normal(rng)
                              : uniform01(rng);
        }
    }
    return noise;
}

inline Matrix generate_from_noise(const GeneratorConfig &cfg,
                                  const StyleParams &params,
                                  const Matrix &noise) {
    Matrix out(noise.rows(), cfg.latent_dim());
    std::vector<double> xi(static_cast<std::size_t>(cfg.n_qb));
    for (Eigen::Index i = 0; i < noise.rows(); ++i) {
        for (int q = 0; q < cfg.n_qb; ++q) {
            xi[q] = noise(i, q);
        }
        const auto row = generate_latent(cfg, params, xi);
        for (std::size_t j = 0; j < row.size(); ++j) {
            out(i, static_cast<Eigen::Index>(j)) = row[j];
        }
    }
    return out;
}

/**
 * Like generate_from_noise but each expectation is replaced by a finite-shot
 * estimate before scaling. Rows draw their shots in order from `rng`.
 */
inline Matrix generate_with_shots(const GeneratorConfig &cfg,
                                  const StyleParams &params,
                                  const Matrix &noise, int n_shots, Rng &rng) {
    if (n_shots <= 0) {
        throw ArgumentError("n_shots must be positive");
    }
    Matrix out(noise.rows(), cfg.latent_dim());
    std::vector<double> xi(static_cast<std::size_t>(cfg.n_qb));
    for (Eigen::Index i = 0; i < noise.rows(); ++i) {
        for (int q = 0; q < cfg.n_qb; ++q) {
            xi[q] = noise(i, q);
        }
        const auto raw =
            raw_readout(cfg, simulate(build_circuit(cfg, xi, params)));
        for (std::size_t j = 0; j < raw.size(); ++j) {
            out(i, static_cast<Eigen::Index>(j)) = apply_scale(
                cfg.output_scale, shot_estimate(raw[j], n_shots, rng));
        }
    }
    return out;
}

inline Matrix generate_batch(const GeneratorConfig &cfg,
                             const StyleParams &params, int n_samples,
                             Rng &rng) {
    return generate_from_noise(cfg, params, sample_noise(cfg, n_samples, rng));
}

inline std::string_view to_string(AnsatzKind k) {
    return k == AnsatzKind::Simple ? "simple" : "bel";
}
inline std::string_view to_string(Readout r) {
    return r == Readout::Single ? "single" : "dual";
}
inline std::string_view to_string(NoiseDistribution d) {
    return d == NoiseDistribution::StandardNormal ? "normal" : "uniform";
}

} // namespace qlgan

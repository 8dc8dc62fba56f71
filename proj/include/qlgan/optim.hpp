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


#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qlgan/error.hpp"

namespace qlgan {

struct AdamConfig {
    double learning_rate = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.9;
    double epsilon = 1e-8;
};

/// Moment accumulators, one per parameter tensor, created on first use.
struct AdamState {
    std::vector<std::vector<double>> first;
    std::vector<std::vector<double>> second;
    std::int64_t step = 0;
};

/**
 * One bias-corrected Adam step over a list of tensors:
 * m <- b1 m + (1-b1) g, v <- b2 v + (1-b2) g^2,
 * theta <- theta - lr * m_hat / (sqrt(v_hat) + eps).
 */
inline void adam_update(AdamState &state, std::span<const std::span<double>> params,
                        std::span<const std::span<const double>> grads,
                        const AdamConfig &cfg) {
    if (params.size() != grads.size()) {
        throw ArgumentError("parameter and gradient tensor counts differ");
    }
    if (state.first.empty()) {
        for (const auto &p : params) {
            state.first.emplace_back(p.size(), 0.0);
            state.second.emplace_back(p.size(), 0.0);
        }
    }
    if (state.first.size() != params.size()) {
        throw ArgumentError("Adam state does not match the parameter list");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto p = params[k];
        auto g = grads[k];
        auto &m = state.first[k];
        auto &v = state.second[k];
        if (g.size() != p.size() || m.size() != p.size()) {
            throw ArgumentError("tensor " + std::to_string(k) +
                                " has mismatched gradient shape");
        }
        // plain loop: results must not depend on where the buffers live
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            p[i] -= cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.epsilon);
        }
    }
}

} // namespace qlgan

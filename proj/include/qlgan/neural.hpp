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
 * Dense networks for the critic and the classical generator.
 *
 * The critic is a LeakyReLU(0.2) stack whose input gradient is, for fixed
 * activation masks, a product of weight matrices. That makes the gradient
 * penalty an explicit function of the weights, which penalty() differentiates
 * exactly (second-order pass). At a pre-activation of exactly 0 the
 * negative-side slope is used.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qlgan/error.hpp"
#include "qlgan/linalg.hpp"
#include "qlgan/random.hpp"

namespace qlgan {

inline constexpr double kLeakySlope = 0.2;

enum class Mode { Train, Eval };

/// Parameter gradients, one matrix per trainable tensor (vectors as n x 1).
using ParamGrads = std::vector<Matrix>;

inline Matrix leaky_relu(const Matrix &a) {
    return a.unaryExpr([](double v) { return v > 0.0 ? v : kLeakySlope * v; });
}

inline Matrix leaky_relu_slope(const Matrix &a) {
    return a.unaryExpr([](double v) { return v > 0.0 ? 1.0 : kLeakySlope; });
}

struct DenseLayer {
    Matrix weights; ///< out x in
    Vector bias;    ///< out

    DenseLayer() = default;
    DenseLayer(int in, int out)
        : weights(Matrix::Zero(out, in)), bias(Vector::Zero(out)) {}

    int in_dim() const { return static_cast<int>(weights.cols()); }
    int out_dim() const { return static_cast<int>(weights.rows()); }

    Matrix forward(const Matrix &x) const {
        Matrix y(x.rows(), weights.rows());
        y.noalias() = x * weights.transpose();
        y.rowwise() += bias.transpose();
        return y;
    }

    /// Weights ~ Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)), bias 0.
    void initialize(Rng &rng) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim()));
        std::uniform_real_distribution<double> u(-bound, bound);
        for (Eigen::Index i = 0; i < weights.size(); ++i) {
            weights.data()[i] = u(rng);
        }
        bias.setZero();
    }

    std::size_t param_count() const {
        return static_cast<std::size_t>(weights.size() + bias.size());
    }
};

inline void check_input(const Matrix &x, int expected) {
    if (x.cols() != expected) {
        throw ArgumentError("input has " + std::to_string(x.cols()) +
                            " columns, expected " + std::to_string(expected));
    }
}

/// Value and parameter gradient of lambda * mean((||grad_x D|| - 1)^2).
struct PenaltyEval {
    double value = 0.0;
    Vector grad_norms;
    ParamGrads grads;
};

/**
 * Critic: dense stack with LeakyReLU after every layer but the last, which
 * has a single output. The standard layout is [latent -> 512 -> 256 -> 1].
 */
class MlpDiscriminator {
  public:
    MlpDiscriminator() = default;

    explicit MlpDiscriminator(std::vector<DenseLayer> layers)
        : layers_(std::move(layers)) {
        if (layers_.empty() || layers_.back().out_dim() != 1) {
            throw ConfigError("critic must end in a single output");
        }
        for (std::size_t l = 1; l < layers_.size(); ++l) {
            if (layers_[l].in_dim() != layers_[l - 1].out_dim()) {
                throw ConfigError("critic layer sizes do not chain");
            }
        }
    }

    /// Zero-initialized [latent_dim, 512, 256, 1] critic.
    static MlpDiscriminator standard(int latent_dim) {
        if (latent_dim < 1) {
            throw ConfigError("latent dimension must be positive");
        }
        return MlpDiscriminator({DenseLayer(latent_dim, 512),
                                 DenseLayer(512, 256), DenseLayer(256, 1)});
    }

    static MlpDiscriminator standard(int latent_dim, Rng &rng) {
        auto d = standard(latent_dim);
        for (auto &layer : d.layers_) {
            layer.initialize(rng);
        }
        return d;
    }

    int input_dim() const { return layers_.front().in_dim(); }
    std::vector<DenseLayer> &layers() { return layers_; }
    const std::vector<DenseLayer> &layers() const { return layers_; }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto &l : layers_) {
            n += l.param_count();
        }
        return n;
    }

    /// Trainable tensors in declaration order: W0, b0, W1, b1, ...
    std::vector<std::span<double>> parameters() {
        std::vector<std::span<double>> out;
        for (auto &l : layers_) {
            out.emplace_back(l.weights.data(),
                             static_cast<std::size_t>(l.weights.size()));
            out.emplace_back(l.bias.data(),
                             static_cast<std::size_t>(l.bias.size()));
        }
        return out;
    }

    Vector forward(const Matrix &x) const {
        check_input(x, input_dim());
        Matrix h = x;
        for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
            h = leaky_relu(layers_[l].forward(h));
        }
        return layers_.back().forward(h).col(0);
    }

    /// Row i is grad_x D(x_i).
    Matrix input_gradient(const Matrix &x) const {
        return input_gradient_with_deltas(activation_masks(x), x.rows())
            .back();
    }

    /// grad_theta sum_i coeff_i D(x_i), in parameters() order. The scores
    /// themselves go to `scores` when given.
    ParamGrads score_gradient(const Matrix &x, const Vector &coeff,
                              Vector *scores = nullptr) const {
        check_input(x, input_dim());
        if (coeff.size() != x.rows()) {
            throw ArgumentError("coefficient count does not match batch");
        }
        const std::size_t n = layers_.size();
        std::vector<Matrix> inputs(n);
        std::vector<Matrix> masks(n);
        Matrix h = x;
        for (std::size_t l = 0; l < n; ++l) {
            inputs[l] = h;
            Matrix a = layers_[l].forward(h);
            if (l + 1 < n) {
                masks[l] = leaky_relu_slope(a);
                h = leaky_relu(a);
            } else if (scores != nullptr) {
                *scores = a.col(0);
            }
        }
        ParamGrads grads(2 * n);
        Matrix delta = coeff; // B x 1
        for (std::size_t l = n; l-- > 0;) {
            grads[2 * l] = delta.transpose() * inputs[l];
            grads[2 * l + 1] = delta.colwise().sum().transpose();
            if (l > 0) {
                delta = (delta * layers_[l].weights).cwiseProduct(masks[l - 1]);
            }
        }
        return grads;
    }

    /**
     * lambda * mean_i (||grad_x D(x_i)||_2 - 1)^2 and its exact gradient with
     * respect to every critic parameter. Bias gradients are identically zero
     * because the input gradient depends on biases only through the
     * (locally constant) activation masks. A zero gradient norm contributes
     * the subgradient 0.
     */
    PenaltyEval penalty(const Matrix &x_hat, double lambda) const {
        const auto masks = activation_masks(x_hat);
        const auto deltas = input_gradient_with_deltas(masks, x_hat.rows());
        const Matrix &g = deltas.back(); // B x D
        const std::size_t n = layers_.size();
        const auto batch = static_cast<double>(x_hat.rows());

        PenaltyEval out;
        out.grad_norms = g.rowwise().norm();
        Matrix gamma = Matrix::Zero(g.rows(), g.cols());
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const double norm = out.grad_norms(i);
            out.value += (norm - 1.0) * (norm - 1.0);
            if (norm > 0.0) {
                gamma.row(i) = (2.0 * lambda / batch) * (norm - 1.0) / norm *
                               g.row(i);
            }
        }
        out.value *= lambda / batch;

        out.grads.resize(2 * n);
        for (std::size_t l = 0; l < n; ++l) {
            out.grads[2 * l] = Matrix::Zero(layers_[l].weights.rows(),
                                            layers_[l].weights.cols());
            out.grads[2 * l + 1] = Matrix::Zero(layers_[l].bias.size(), 1);
        }
        // g = delta_0 W_0 and delta_{l-1} = (delta_l W_l) .* M_{l-1};
        // deltas[k] holds delta_{n-1-k}.
        const Matrix &delta0 = deltas[n - 1];
        out.grads[0] = delta0.transpose() * gamma;
        Matrix d_delta = gamma * layers_[0].weights.transpose();
        for (std::size_t l = 1; l < n; ++l) {
            const Matrix e = d_delta.cwiseProduct(masks[l - 1]);
            const Matrix &delta_l = deltas[n - 1 - l];
            out.grads[2 * l] = delta_l.transpose() * e;
            d_delta = e * layers_[l].weights.transpose();
        }
        return out;
    }

    /// LeakyReLU slope of every hidden unit, one batch x width matrix per layer.
    std::vector<Matrix> activation_masks(const Matrix &x) const {
        check_input(x, input_dim());
        std::vector<Matrix> masks;
        Matrix h = x;
        for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
            Matrix a = layers_[l].forward(h);
            masks.push_back(leaky_relu_slope(a));
            h = leaky_relu(a);
        }
        return masks;
    }

  private:
    /// [delta_{n-1}, ..., delta_0, grad_x] for the score's input gradient.
    std::vector<Matrix>
    input_gradient_with_deltas(const std::vector<Matrix> &masks,
                               Eigen::Index batch) const {
        const std::size_t n = layers_.size();
        std::vector<Matrix> out;
        Matrix delta = Matrix::Ones(batch, 1);
        out.push_back(delta);
        for (std::size_t l = n - 1; l > 0; --l) {
            delta = (delta * layers_[l].weights).cwiseProduct(masks[l - 1]);
            out.push_back(delta);
        }
        out.push_back(delta * layers_[0].weights);
        return out;
    }

    std::vector<DenseLayer> layers_;
};

struct BatchNormLayer {
    Vector gamma;
    Vector beta;
    Vector running_mean;
    Vector running_var;
    double epsilon = 1e-5;
    double momentum = 0.1;

    BatchNormLayer() = default;
    explicit BatchNormLayer(int features)
        : gamma(Vector::Ones(features)), beta(Vector::Zero(features)),
          running_mean(Vector::Zero(features)),
          running_var(Vector::Ones(features)) {}

    int features() const { return static_cast<int>(gamma.size()); }
    std::size_t param_count() const {
        return static_cast<std::size_t>(gamma.size() + beta.size());
    }

    Matrix eval(const Matrix &a) const {
        Matrix y = a.rowwise() - running_mean.transpose();
        const RowVector scale =
            (gamma.array() / (running_var.array() + epsilon).sqrt())
                .matrix()
                .transpose();
        y = y.array().rowwise() * scale.array();
        y.rowwise() += beta.transpose();
        return y;
    }
};

/**
 * Classical generator: dense widths [128, 256, 512, 1024, latent], LeakyReLU
 * after all but the last, batch norm (before the activation) after the
 * second, third and fourth dense layers. The noise dimension equals the
 * latent dimension.
 */
class MlpGenerator {
  public:
    static constexpr std::array<int, 4> kHidden = {128, 256, 512, 1024};
    static constexpr int kDenseCount = 5;

    struct Cache {
        std::array<Matrix, kDenseCount> inputs;   // input to dense l
        std::array<Matrix, kDenseCount> outputs;  // pre-activation (post-BN)
        std::array<Matrix, 3> normalized;          // x-hat per BN
        std::array<Vector, 3> batch_mean;
        std::array<Vector, 3> batch_var;           // biased
        Matrix result;
    };

    MlpGenerator() = default;

    /// Dense layers zero, gamma 1, beta 0, running stats (0, 1).
    explicit MlpGenerator(int latent_dim) : latent_dim_(latent_dim) {
        if (latent_dim < 1) {
            throw ConfigError("latent dimension must be positive");
        }
        int in = latent_dim;
        for (int l = 0; l < kDenseCount; ++l) {
            const int out = l < 4 ? kHidden[l] : latent_dim;
            dense_[l] = DenseLayer(in, out);
            in = out;
        }
        for (int k = 0; k < 3; ++k) {
            norms_[k] = BatchNormLayer(kHidden[k + 1]);
        }
    }

    MlpGenerator(int latent_dim, Rng &rng) : MlpGenerator(latent_dim) {
        for (auto &d : dense_) {
            d.initialize(rng);
        }
    }

    int latent_dim() const { return latent_dim_; }
    int noise_dim() const { return latent_dim_; }

    std::array<DenseLayer, kDenseCount> &dense() { return dense_; }
    const std::array<DenseLayer, kDenseCount> &dense() const { return dense_; }
    std::array<BatchNormLayer, 3> &norms() { return norms_; }
    const std::array<BatchNormLayer, 3> &norms() const { return norms_; }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto &d : dense_) {
            n += d.param_count();
        }
        for (const auto &b : norms_) {
            n += b.param_count();
        }
        return n;
    }

    /// W0 b0 | W1 b1 g0 be0 | W2 b2 g1 be1 | W3 b3 g2 be2 | W4 b4
    std::vector<std::span<double>> parameters() {
        std::vector<std::span<double>> out;
        auto add = [&out](auto &m) {
            out.emplace_back(m.data(), static_cast<std::size_t>(m.size()));
        };
        for (int l = 0; l < kDenseCount; ++l) {
            add(dense_[l].weights);
            add(dense_[l].bias);
            if (const int k = norm_index(l); k >= 0) {
                add(norms_[k].gamma);
                add(norms_[k].beta);
            }
        }
        return out;
    }

    /// Non-trainable state (running mean/var of every batch norm).
    std::vector<std::span<double>> buffers() {
        std::vector<std::span<double>> out;
        for (auto &b : norms_) {
            out.emplace_back(b.running_mean.data(),
                             static_cast<std::size_t>(b.running_mean.size()));
            out.emplace_back(b.running_var.data(),
                             static_cast<std::size_t>(b.running_var.size()));
        }
        return out;
    }

    /// Train-mode forward with batch statistics; does not touch running stats.
    Cache forward_train(const Matrix &noise) const {
        check_input(noise, noise_dim());
        if (noise.rows() < 2) {
            throw ArgumentError("train-mode batch norm needs a batch of >= 2");
        }
        Cache c;
        Matrix h = noise;
        for (int l = 0; l < kDenseCount; ++l) {
            c.inputs[l] = h;
            Matrix a = dense_[l].forward(h);
            if (const int k = norm_index(l); k >= 0) {
                const auto &bn = norms_[k];
                const Vector mean = a.colwise().mean().transpose();
                Matrix centered = a.rowwise() - mean.transpose();
                const Vector var =
                    centered.array().square().colwise().mean().transpose();
                const RowVector inv_std =
                    (var.array() + bn.epsilon).rsqrt().matrix().transpose();
                c.normalized[k] = centered.array().rowwise() * inv_std.array();
                a = c.normalized[k].array().rowwise() *
                    bn.gamma.transpose().array();
                a.rowwise() += bn.beta.transpose();
                c.batch_mean[k] = mean;
                c.batch_var[k] = var;
            }
            c.outputs[l] = a;
            h = l + 1 < kDenseCount ? leaky_relu(a) : a;
        }
        c.result = h;
        return c;
    }

    /// running <- (1 - momentum) running + momentum batch (unbiased variance).
    void commit_running_stats(const Cache &c) {
        const double n = static_cast<double>(c.result.rows());
        for (int k = 0; k < 3; ++k) {
            auto &bn = norms_[k];
            bn.running_mean = (1.0 - bn.momentum) * bn.running_mean +
                              bn.momentum * c.batch_mean[k];
            bn.running_var = (1.0 - bn.momentum) * bn.running_var +
                             bn.momentum * c.batch_var[k] * (n / (n - 1.0));
        }
    }

    Matrix forward_eval(const Matrix &noise) const {
        check_input(noise, noise_dim());
        Matrix h = noise;
        for (int l = 0; l < kDenseCount; ++l) {
            Matrix a = dense_[l].forward(h);
            if (const int k = norm_index(l); k >= 0) {
                a = norms_[k].eval(a);
            }
            h = l + 1 < kDenseCount ? leaky_relu(a) : a;
        }
        return h;
    }

    /// Train mode also updates the running statistics.
    Matrix forward(const Matrix &noise, Mode mode) {
        if (mode == Mode::Eval) {
            return forward_eval(noise);
        }
        Cache c = forward_train(noise);
        commit_running_stats(c);
        return std::move(c.result);
    }

    /// Gradients of sum_ij upstream_ij * out_ij, in parameters() order.
    ParamGrads backward(const Cache &c, const Matrix &upstream) const {
        if (upstream.rows() != c.result.rows() ||
            upstream.cols() != c.result.cols()) {
            throw ArgumentError("upstream gradient shape mismatch");
        }
        std::array<Matrix, kDenseCount> d_w;
        std::array<Matrix, kDenseCount> d_b;
        std::array<Matrix, 3> d_gamma;
        std::array<Matrix, 3> d_beta;
        const double batch = static_cast<double>(upstream.rows());

        Matrix d = upstream;
        for (int l = kDenseCount; l-- > 0;) {
            if (l + 1 < kDenseCount) {
                d = d.cwiseProduct(leaky_relu_slope(c.outputs[l]));
            }
            if (const int k = norm_index(l); k >= 0) {
                const auto &bn = norms_[k];
                const Matrix &xhat = c.normalized[k];
                d_gamma[k] = d.cwiseProduct(xhat).colwise().sum().transpose();
                d_beta[k] = d.colwise().sum().transpose();
                const Matrix dxhat =
                    d.array().rowwise() * bn.gamma.transpose().array();
                const RowVector sum_dxhat = dxhat.colwise().sum();
                const RowVector sum_dxhat_xhat =
                    dxhat.cwiseProduct(xhat).colwise().sum();
                const RowVector inv_std =
                    (c.batch_var[k].array() + bn.epsilon)
                        .rsqrt()
                        .matrix()
                        .transpose();
                Matrix da = batch * dxhat;
                da.rowwise() -= sum_dxhat;
                da -= (xhat.array().rowwise() * sum_dxhat_xhat.array())
                          .matrix();
                d = (da.array().rowwise() * inv_std.array()).matrix() / batch;
            }
            d_w[l] = d.transpose() * c.inputs[l];
            d_b[l] = d.colwise().sum().transpose();
            if (l > 0) {
                d = d * dense_[l].weights;
            }
        }

        ParamGrads grads;
        for (int l = 0; l < kDenseCount; ++l) {
            grads.push_back(std::move(d_w[l]));
            grads.push_back(std::move(d_b[l]));
            if (const int k = norm_index(l); k >= 0) {
                grads.push_back(std::move(d_gamma[k]));
                grads.push_back(std::move(d_beta[k]));
            }
        }
        return grads;
    }

  private:
    static constexpr int norm_index(int dense_layer) {
        return dense_layer >= 1 && dense_layer <= 3 ? dense_layer - 1 : -1;
    }

    int latent_dim_ = 0;
    std::array<DenseLayer, kDenseCount> dense_;
    std::array<BatchNormLayer, 3> norms_;
};

inline Vector disc_forward(const MlpDiscriminator &d, const Matrix &x) {
    return d.forward(x);
}

inline Vector disc_input_gradient(const MlpDiscriminator &d, const Vector &x) {
    return d.input_gradient(x.transpose()).row(0).transpose();
}

inline PenaltyEval penalty_param_gradient(const MlpDiscriminator &d,
                                          const Matrix &x_hat, double lambda) {
    return d.penalty(x_hat, lambda);
}

inline Matrix gen_forward(MlpGenerator &g, const Matrix &noise, Mode mode) {
    return g.forward(noise, mode);
}

} // namespace qlgan

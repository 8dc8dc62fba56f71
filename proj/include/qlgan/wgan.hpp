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
 * WGAN-GP adversarial training over a quantum or classical generator.
 *
 * Orientation: the critic minimizes
 *   L_D = mean D(real) - mean D(G(xi)) + lambda mean (||grad D(x_hat)|| - 1)^2
 * and the generator minimizes L_G = mean D(G(xi)). The expectation terms keep
 * the sign of L_WGAN = E[D(G(xi))] - E[D(x)] (the critic maximizes it) while
 * the penalty is always driven towards zero.
 */
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlgan/ansatz.hpp"
#include "qlgan/error.hpp"
#include "qlgan/latent_data.hpp"
#include "qlgan/linalg.hpp"
#include "qlgan/neural.hpp"
#include "qlgan/optim.hpp"
#include "qlgan/qgrad.hpp"
#include "qlgan/random.hpp"

namespace qlgan {

enum class GeneratorKind { Classical, QuantumSimple, QuantumBEL };

struct TrainConfig {
    double learning_rate = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.9;
    double lambda_gp = 10.0;
    int n_critic = 1;
    int epochs = 100;
    int batch_size = 64;
    std::uint64_t seed = 1;
    GeneratorKind generator_kind = GeneratorKind::QuantumBEL;

    AdamConfig adam() const { return {learning_rate, beta1, beta2, 1e-8}; }

    void validate() const {
        if (!(learning_rate > 0.0)) {
            throw ConfigError("learning_rate must be positive");
        }
        if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
            throw ConfigError("Adam betas must lie in (0, 1)");
        }
        if (!(lambda_gp > 0.0)) {
            throw ConfigError("lambda_gp must be positive");
        }
        if (n_critic < 1) {
            throw ConfigError("n_critic must be >= 1");
        }
        if (epochs < 0) {
            throw ConfigError("epochs must be >= 0");
        }
        if (batch_size < 2) {
            throw ConfigError("batch_size must be >= 2");
        }
    }
};

struct EpochRecord {
    int epoch = 0;
    double critic_loss = 0.0;
    double gen_loss = 0.0;
    double gp_mean = 0.0;
    double seconds = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    std::int64_t critic_updates = 0;
    std::int64_t generator_updates = 0;
};

/// Generator interface shared by the quantum and classical models.
class LatentGenerator {
  public:
    virtual ~LatentGenerator() = default;

    virtual int latent_dim() const = 0;
    virtual int noise_dim() const = 0;
    virtual std::size_t param_count() const = 0;
    virtual Matrix sample_noise(int n, Rng &rng) const = 0;

    /// Forward pass. Train mode may update internal statistics.
    virtual Matrix generate(const Matrix &noise, Mode mode) = 0;

    /// Train-mode forward pass that keeps what backward() needs.
    virtual Matrix forward_for_gradient(const Matrix &noise) = 0;

    /// Gradients of sum_ij upstream_ij * out_ij for the last
    /// forward_for_gradient() call, in parameters() order.
    virtual ParamGrads backward(const Matrix &upstream) = 0;

    virtual std::vector<std::span<double>> parameters() = 0;
};

class QuantumGenerator final : public LatentGenerator {
  public:
    QuantumGenerator(GeneratorConfig cfg, StyleParams params)
        : cfg_(cfg), params_(std::move(params)) {
        cfg_.validate();
        if (!params_.matches(cfg_)) {
            throw ConfigError("style parameters do not match the config");
        }
    }

    const GeneratorConfig &config() const { return cfg_; }
    const StyleParams &params() const { return params_; }
    StyleParams &params() { return params_; }

    int latent_dim() const override { return cfg_.latent_dim(); }
    int noise_dim() const override { return cfg_.n_qb; }
    std::size_t param_count() const override {
        return params_.trainable_count();
    }

    Matrix sample_noise(int n, Rng &rng) const override {
        return qlgan::sample_noise(cfg_, n, rng);
    }

    Matrix generate(const Matrix &noise, Mode) override {
        return generate_from_noise(cfg_, params_, noise);
    }

    Matrix forward_for_gradient(const Matrix &noise) override {
        check_input(noise, noise_dim());
        cache_noise_ = noise;
        circuits_.clear();
        states_.clear();
        Matrix out(noise.rows(), latent_dim());
        std::vector<double> xi(static_cast<std::size_t>(cfg_.n_qb));
        for (Eigen::Index i = 0; i < noise.rows(); ++i) {
            for (int q = 0; q < cfg_.n_qb; ++q) {
                xi[q] = noise(i, q);
            }
            circuits_.push_back(build_circuit(cfg_, xi, params_));
            states_.push_back(simulate(circuits_.back()));
            const auto raw = raw_readout(cfg_, states_.back());
            for (std::size_t j = 0; j < raw.size(); ++j) {
                out(i, static_cast<Eigen::Index>(j)) =
                    apply_scale(cfg_.output_scale, raw[j]);
            }
        }
        return out;
    }

    ParamGrads backward(const Matrix &upstream) override {
        if (upstream.rows() != cache_noise_.rows() ||
            upstream.cols() != latent_dim() ||
            states_.size() != static_cast<std::size_t>(upstream.rows())) {
            throw ArgumentError("upstream gradient shape mismatch");
        }
        const auto slots = static_cast<Eigen::Index>(params_.slot_count());
        ParamGrads grads{Matrix::Zero(slots, 1), Matrix::Zero(slots, 1)};
        std::vector<double> xi(static_cast<std::size_t>(cfg_.n_qb));
        std::vector<double> up(static_cast<std::size_t>(latent_dim()));
        for (Eigen::Index i = 0; i < upstream.rows(); ++i) {
            for (int q = 0; q < cfg_.n_qb; ++q) {
                xi[q] = cache_noise_(i, q);
            }
            for (std::size_t j = 0; j < up.size(); ++j) {
                up[j] = cfg_.output_scale.gain *
                        upstream(i, static_cast<Eigen::Index>(j));
            }
            const auto dtheta =
                adjoint_vjp(cfg_, circuits_[i], states_[i], up);
            const auto g = style_chain_angles(circuits_[i], dtheta, xi, params_);
            for (Eigen::Index s = 0; s < slots; ++s) {
                grads[0](s, 0) += g.weights[s];
                grads[1](s, 0) += g.biases[s];
            }
        }
        return grads;
    }

    std::vector<std::span<double>> parameters() override {
        return {params_.weights(), params_.biases()};
    }

  private:
    GeneratorConfig cfg_;
    StyleParams params_;
    Matrix cache_noise_;
    std::vector<StyledCircuit> circuits_;
    std::vector<StateVector> states_;
};

class ClassicalGenerator final : public LatentGenerator {
  public:
    ClassicalGenerator(MlpGenerator net, NoiseDistribution noise =
                                             NoiseDistribution::StandardNormal)
        : net_(std::move(net)), noise_(noise) {}

    MlpGenerator &network() { return net_; }
    const MlpGenerator &network() const { return net_; }
    NoiseDistribution noise_distribution() const { return noise_; }

    int latent_dim() const override { return net_.latent_dim(); }
    int noise_dim() const override { return net_.noise_dim(); }
    std::size_t param_count() const override { return net_.param_count(); }

    Matrix sample_noise(int n, Rng &rng) const override {
        if (n < 1) {
            throw ArgumentError("n_samples must be positive");
        }
        Matrix m(n, noise_dim());
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            m.data()[i] = noise_ == NoiseDistribution::StandardNormal
                              ? standard_normal(rng)
                              : uniform01(rng);
        }
        return m;
    }

    Matrix generate(const Matrix &noise, Mode mode) override {
        return net_.forward(noise, mode);
    }

    Matrix forward_for_gradient(const Matrix &noise) override {
        cache_ = net_.forward_train(noise);
        net_.commit_running_stats(*cache_);
        return cache_->result;
    }

    ParamGrads backward(const Matrix &upstream) override {
        if (!cache_) {
            throw ArgumentError("backward() without a forward pass");
        }
        return net_.backward(*cache_, upstream);
    }

    std::vector<std::span<double>> parameters() override {
        return net_.parameters();
    }

  private:
    MlpGenerator net_;
    NoiseDistribution noise_;
    std::optional<MlpGenerator::Cache> cache_;
};

// --- single steps -------------------------------------------------------------

inline Matrix interpolate_with(const Matrix &real, const Matrix &fake,
                               const Vector &u) {
    if (real.rows() != fake.rows() || real.cols() != fake.cols()) {
        throw ArgumentError("real and fake batches differ in shape");
    }
    if (u.size() != real.rows()) {
        throw ArgumentError("one interpolation weight per row required");
    }
    Matrix x(real.rows(), real.cols());
    for (Eigen::Index i = 0; i < real.rows(); ++i) {
        x.row(i) = u(i) * real.row(i) + (1.0 - u(i)) * fake.row(i);
    }
    return x;
}

/// x_hat = u x_real + (1 - u) x_fake with u ~ Uniform(0, 1) per row.
inline Matrix interpolate(const Matrix &real, const Matrix &fake, Rng &rng) {
    Vector u(real.rows());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        u(i) = uniform01(rng);
    }
    return interpolate_with(real, fake, u);
}

struct CriticObjective {
    double loss = 0.0;
    double wasserstein = 0.0; ///< mean D(real) - mean D(fake)
    double penalty = 0.0;
    ParamGrads grads;
};

inline CriticObjective critic_objective(const MlpDiscriminator &d,
                                        const Matrix &real, const Matrix &fake,
                                        const Matrix &x_hat, double lambda,
                                        bool with_grads = true) {
    if (real.cols() != fake.cols()) {
        throw ArgumentError("real and fake batches differ in width");
    }
    const Eigen::Index nr = real.rows();
    const Eigen::Index nf = fake.rows();
    Matrix stacked(nr + nf, real.cols());
    stacked << real, fake;
    Vector coeff(nr + nf);
    coeff.head(nr).setConstant(1.0 / static_cast<double>(nr));
    coeff.tail(nf).setConstant(-1.0 / static_cast<double>(nf));

    CriticObjective out;
    auto pen = d.penalty(x_hat, lambda);
    out.penalty = pen.value;
    if (with_grads) {
        Vector scores;
        out.grads = d.score_gradient(stacked, coeff, &scores);
        out.wasserstein = coeff.dot(scores);
        for (std::size_t k = 0; k < out.grads.size(); ++k) {
            out.grads[k] += pen.grads[k];
        }
    } else {
        out.wasserstein = coeff.dot(d.forward(stacked));
    }
    out.loss = out.wasserstein + out.penalty;
    return out;
}

inline std::vector<std::span<const double>> as_spans(const ParamGrads &grads) {
    std::vector<std::span<const double>> out;
    for (const auto &g : grads) {
        out.emplace_back(g.data(), static_cast<std::size_t>(g.size()));
    }
    return out;
}

inline void apply_adam(AdamState &state, std::vector<std::span<double>> params,
                       const ParamGrads &grads, const AdamConfig &cfg) {
    const auto g = as_spans(grads);
    adam_update(state, params, g, cfg);
}

struct CriticStep {
    double loss = 0.0;
    double penalty = 0.0;
};

/// One Adam update of the critic against a fresh generated batch.
inline CriticStep critic_step(MlpDiscriminator &d, LatentGenerator &g,
                              const Matrix &real_batch, const TrainConfig &cfg,
                              AdamState &adam, Rng &rng) {
    check_input(real_batch, d.input_dim());
    if (g.latent_dim() != d.input_dim()) {
        throw ArgumentError("generator and critic latent dimensions differ");
    }
    const int batch = static_cast<int>(real_batch.rows());
    const Matrix fake = g.generate(g.sample_noise(batch, rng), Mode::Train);
    const Matrix x_hat = interpolate(real_batch, fake, rng);
    auto obj = critic_objective(d, real_batch, fake, x_hat, cfg.lambda_gp);
    apply_adam(adam, d.parameters(), obj.grads, cfg.adam());
    return {obj.loss, obj.penalty};
}

/// Generator loss mean D(G(xi)) and its parameter gradient.
struct GeneratorObjective {
    double loss = 0.0;
    ParamGrads grads;
};

inline GeneratorObjective generator_objective(const MlpDiscriminator &d,
                                              LatentGenerator &g,
                                              const Matrix &noise) {
    const Matrix out = g.forward_for_gradient(noise);
    GeneratorObjective obj;
    obj.loss = d.forward(out).mean();
    const Matrix upstream =
        d.input_gradient(out) / static_cast<double>(noise.rows());
    obj.grads = g.backward(upstream);
    return obj;
}

/// One Adam update of the generator against the current critic.
inline double generator_step(const MlpDiscriminator &d, LatentGenerator &g,
                             int batch_size, const TrainConfig &cfg,
                             AdamState &adam, Rng &rng) {
    auto obj = generator_objective(d, g, g.sample_noise(batch_size, rng));
    apply_adam(adam, g.parameters(), obj.grads, cfg.adam());
    return obj.loss;
}

// --- construction and training ---------------------------------------------------

/// Default half-width of the uniform initialization of W and b.
inline constexpr double kStyleInitScale = 1.0;

inline std::unique_ptr<LatentGenerator>
make_generator(const TrainConfig &cfg, const GeneratorConfig &quantum,
               int latent_dim, double style_init_scale = kStyleInitScale) {
    Rng rng = make_stream(cfg.seed, "generator-init");
    if (cfg.generator_kind == GeneratorKind::Classical) {
        return std::make_unique<ClassicalGenerator>(
            MlpGenerator(latent_dim, rng), quantum.noise);
    }
    GeneratorConfig q = quantum;
    q.kind = cfg.generator_kind == GeneratorKind::QuantumSimple
                 ? AnsatzKind::Simple
                 : AnsatzKind::BEL;
    if (q.latent_dim() != latent_dim) {
        throw ConfigError("quantum generator latent dimension " +
                          std::to_string(q.latent_dim()) +
                          " does not match the data dimension " +
                          std::to_string(latent_dim));
    }
    return std::make_unique<QuantumGenerator>(
        q, StyleParams::random(q, rng, style_init_scale));
}

inline MlpDiscriminator make_discriminator(const TrainConfig &cfg,
                                           int latent_dim) {
    Rng rng = make_stream(cfg.seed, "critic-init");
    return MlpDiscriminator::standard(latent_dim, rng);
}

/// Called after each epoch; used for progress reporting.
using EpochCallback = std::function<void(const EpochRecord &)>;

/**
 * Runs cfg.epochs epochs. Each epoch walks the shuffled drop-last batches;
 * each batch performs n_critic critic steps on that batch followed by one
 * generator step.
 */
inline TrainHistory train(const TrainConfig &cfg, const LatentDataset &data,
                          LatentGenerator &g, MlpDiscriminator &d,
                          const EpochCallback &on_epoch = {}) {
    cfg.validate();
    if (data.size() == 0) {
        throw ArgumentError("training dataset is empty");
    }
    if (data.dim() != d.input_dim() || data.dim() != g.latent_dim()) {
        throw ConfigError("dataset dimension " + std::to_string(data.dim()) +
                          " does not match the model latent dimension");
    }
    TrainHistory history;
    AdamState adam_d;
    AdamState adam_g;
    Rng critic_rng = make_stream(cfg.seed, "critic");
    Rng generator_rng = make_stream(cfg.seed, "generator");

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        const auto plan = batches(data, cfg.batch_size, cfg.seed, true,
                                  static_cast<std::uint64_t>(epoch));
        double critic_sum = 0.0;
        double gp_sum = 0.0;
        double gen_sum = 0.0;
        std::int64_t critic_n = 0;
        std::int64_t gen_n = 0;
        for (const auto &idx : plan) {
            const Matrix real = gather_rows(data, idx);
            for (int k = 0; k < cfg.n_critic; ++k) {
                const auto step = critic_step(d, g, real, cfg, adam_d, critic_rng);
                critic_sum += step.loss;
                gp_sum += step.penalty;
                ++critic_n;
            }
            gen_sum += generator_step(d, g, cfg.batch_size, cfg, adam_g,
                                      generator_rng);
            ++gen_n;
        }
        history.critic_updates += critic_n;
        history.generator_updates += gen_n;
        EpochRecord rec;
        rec.epoch = epoch + 1;
        rec.critic_loss = critic_n ? critic_sum / critic_n : 0.0;
        rec.gp_mean = critic_n ? gp_sum / critic_n : 0.0;
        rec.gen_loss = gen_n ? gen_sum / gen_n : 0.0;
        rec.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        history.epochs.push_back(rec);
        if (on_epoch) {
            on_epoch(rec);
        }
    }
    return history;
}

/// History CSV: epoch, critic_loss, gen_loss, gp_mean[, seconds].
inline void write_history_csv(const TrainHistory &h, const std::string &path,
                              bool with_seconds = true) {
    auto out = detail::open_for_writing(path);
    out << "epoch,critic_loss,gen_loss,gp_mean" << (with_seconds ? ",seconds" : "")
        << '\n';
    for (const auto &r : h.epochs) {
        out << r.epoch << ',' << detail::format_double(r.critic_loss) << ','
            << detail::format_double(r.gen_loss) << ','
            << detail::format_double(r.gp_mean);
        if (with_seconds) {
            out << ',' << detail::format_double(r.seconds);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

inline std::string_view to_string(GeneratorKind k) {
    switch (k) {
    case GeneratorKind::Classical:
        return "classical";
    case GeneratorKind::QuantumSimple:
        return "simple";
    case GeneratorKind::QuantumBEL:
        return "bel";
    }
    return "?";
}

} // namespace qlgan

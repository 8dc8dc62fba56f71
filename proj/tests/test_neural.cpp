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


#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qlgan/neural.hpp"
#include "qlgan/optim.hpp"

namespace {

using namespace qlgan;

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng &rng) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = standard_normal(rng);
    }
    return m;
}

MlpDiscriminator small_critic(int in, Rng &rng) {
    std::vector<DenseLayer> layers{DenseLayer(in, 7), DenseLayer(7, 5),
                                   DenseLayer(5, 1)};
    for (auto &l : layers) {
        l.initialize(rng);
        for (auto &b : l.bias) {
            b = 0.1 * standard_normal(rng);
        }
    }
    return MlpDiscriminator(std::move(layers));
}

/// Independent penalty: per-sample input gradient as an explicit product
/// W0^T M0 W1^T M1 ... w_last^T, masks from a plain forward pass.
struct OraclePenalty {
    double value = 0.0;
    std::vector<std::vector<bool>> signs; // pre-activation > 0, per layer/unit/sample
};

OraclePenalty oracle_penalty(const MlpDiscriminator &d, const Matrix &x,
                             double lambda) {
    const auto &layers = d.layers();
    OraclePenalty out;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        Vector h = x.row(i).transpose();
        std::vector<Vector> slopes;
        for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
            Vector a = layers[l].weights * h + layers[l].bias;
            Vector s(a.size());
            std::vector<bool> sign;
            for (Eigen::Index u = 0; u < a.size(); ++u) {
                sign.push_back(a(u) > 0.0);
                s(u) = a(u) > 0.0 ? 1.0 : 0.2;
            }
            out.signs.push_back(sign);
            h = a.cwiseProduct(s);
            slopes.push_back(s);
        }
        Matrix j = layers.back().weights; // 1 x width
        for (std::size_t l = layers.size() - 1; l-- > 0;) {
            j = (j.array().rowwise() * slopes[l].transpose().array()).matrix() *
                layers[l].weights;
        }
        const double norm = j.norm();
        out.value += (norm - 1.0) * (norm - 1.0);
    }
    out.value *= lambda / static_cast<double>(x.rows());
    return out;
}

TEST(LeakyRelu, SlopeAndKink) {
    Matrix a(1, 3);
    a << -1.0, 0.0, 2.0;
    const Matrix y = leaky_relu(a);
    EXPECT_DOUBLE_EQ(y(0, 0), -0.2);
    EXPECT_DOUBLE_EQ(y(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(y(0, 2), 2.0);
    const Matrix s = leaky_relu_slope(a);
    EXPECT_DOUBLE_EQ(s(0, 0), 0.2);
    EXPECT_DOUBLE_EQ(s(0, 1), 0.2);
    EXPECT_DOUBLE_EQ(s(0, 2), 1.0);
}

TEST(Discriminator, ZeroWeightsScoreZero) {
    const auto d = MlpDiscriminator::standard(10);
    Rng rng = make_stream(1, "x");
    const Vector s = disc_forward(d, random_matrix(8, 10, rng));
    EXPECT_TRUE((s.array() == 0.0).all());
}

TEST(Discriminator, SingleLayerByHand) {
    DenseLayer l(2, 1);
    l.weights << 0.5, -2.0;
    l.bias << 0.25;
    const MlpDiscriminator d({l});
    Matrix x(2, 2);
    x << 1.0, 2.0, -3.0, 0.5;
    const Vector s = disc_forward(d, x);
    EXPECT_DOUBLE_EQ(s(0), 0.5 - 4.0 + 0.25);
    EXPECT_DOUBLE_EQ(s(1), -1.5 - 1.0 + 0.25);
    const Vector g = disc_input_gradient(d, x.row(0).transpose());
    EXPECT_DOUBLE_EQ(g(0), 0.5);
    EXPECT_DOUBLE_EQ(g(1), -2.0);
}

TEST(Discriminator, LeakyActivationThroughOneLayer) {
    DenseLayer a(1, 1);
    a.weights << 1.0;
    DenseLayer b(1, 1);
    b.weights << 1.0;
    const MlpDiscriminator d({a, b});
    Matrix x(1, 1);
    x << -1.0;
    EXPECT_DOUBLE_EQ(disc_forward(d, x)(0), -0.2);
}

TEST(Discriminator, InputDimensionChecked) {
    const auto d = MlpDiscriminator::standard(10);
    EXPECT_THROW(d.forward(Matrix::Zero(3, 9)), ArgumentError);
    EXPECT_THROW(MlpDiscriminator({DenseLayer(3, 2)}), ConfigError);
    EXPECT_THROW(MlpDiscriminator({DenseLayer(3, 2), DenseLayer(3, 1)}), ConfigError);
}

TEST(Discriminator, ParamCount) {
    EXPECT_EQ(MlpDiscriminator::standard(10).param_count(), 137217u);
}

TEST(Discriminator, InputGradientMatchesFiniteDifferences) {
    Rng rng = make_stream(2, "grad");
    const auto d = MlpDiscriminator::standard(10, rng);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix x = random_matrix(1, 10, rng);
        const Vector g = disc_input_gradient(d, x.row(0).transpose());
        for (int c = 0; c < 10; ++c) {
            Matrix xp = x;
            Matrix xm = x;
            xp(0, c) += 1e-6;
            xm(0, c) -= 1e-6;
            const double fd = (d.forward(xp)(0) - d.forward(xm)(0)) / 2e-6;
            EXPECT_LT(oracle::rel_err(g(c), fd), 1e-6);
        }
    }
}

TEST(Discriminator, FinalLayerHomogeneity) {
    Rng rng = make_stream(3, "homog");
    auto d = MlpDiscriminator::standard(10, rng);
    const Matrix x = random_matrix(6, 10, rng);
    const Vector s = d.forward(x);
    const Matrix g = d.input_gradient(x);
    auto &last = d.layers().back();
    last.weights *= 2.0;
    last.bias *= 2.0;
    EXPECT_EQ(d.forward(x), 2.0 * s);
    EXPECT_EQ(d.input_gradient(x), 2.0 * g);
}

TEST(Discriminator, ScoreGradientMatchesFiniteDifferences) {
    Rng rng = make_stream(4, "score");
    auto d = small_critic(4, rng);
    const Matrix x = random_matrix(6, 4, rng);
    Vector coeff(6);
    for (auto &c : coeff) {
        c = standard_normal(rng);
    }
    Vector scores;
    const auto grads = d.score_gradient(x, coeff, &scores);
    EXPECT_LT((scores - d.forward(x)).cwiseAbs().maxCoeff(), 1e-14);
    auto params = d.parameters();
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t i = 0; i < params[t].size(); ++i) {
            const double v0 = params[t][i];
            params[t][i] = v0 + 1e-6;
            const double fp = coeff.dot(d.forward(x));
            params[t][i] = v0 - 1e-6;
            const double fm = coeff.dot(d.forward(x));
            params[t][i] = v0;
            EXPECT_LT(oracle::rel_err(grads[t].data()[i], (fp - fm) / 2e-6), 1e-6);
        }
    }
}

TEST(Penalty, LinearCriticClosedForm) {
    Rng rng = make_stream(5, "linear");
    for (int trial = 0; trial < 10; ++trial) {
        DenseLayer l(10, 1);
        for (auto &w : l.weights.reshaped()) {
            w = standard_normal(rng);
        }
        l.bias << standard_normal(rng);
        const MlpDiscriminator d({l});
        const Matrix x = random_matrix(7, 10, rng);
        const double lambda = 10.0;
        const auto pen = penalty_param_gradient(d, x, lambda);
        const double norm = l.weights.norm();
        EXPECT_NEAR(pen.value, lambda * (norm - 1) * (norm - 1), 1e-10);
        const Matrix expected = 2 * lambda * (norm - 1) / norm * l.weights;
        EXPECT_LT((pen.grads[0] - expected).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_EQ(pen.grads[1](0, 0), 0.0);
    }
}

TEST(Penalty, UnitNormIsMinimum) {
    DenseLayer l(2, 1);
    l.weights << 0.6, 0.8;
    const MlpDiscriminator d({l});
    const auto pen = penalty_param_gradient(d, Matrix::Ones(3, 2), 10.0);
    EXPECT_NEAR(pen.value, 0.0, 1e-15);
    EXPECT_LT(pen.grads[0].cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Penalty, ZeroCriticUsesSubgradient) {
    const auto d = MlpDiscriminator::standard(10);
    const auto pen = penalty_param_gradient(d, Matrix::Ones(4, 10), 10.0);
    EXPECT_DOUBLE_EQ(pen.value, 10.0);
    for (const auto &g : pen.grads) {
        EXPECT_TRUE(g.allFinite());
        EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Penalty, MlpMatchesOracleAndFiniteDifferences) {
    Rng rng = make_stream(6, "penalty");
    auto d = small_critic(10, rng);
    const Matrix x = random_matrix(10, 10, rng);
    const double lambda = 10.0;
    const auto pen = d.penalty(x, lambda);
    const auto base = oracle_penalty(d, x, lambda);
    EXPECT_NEAR(pen.value, base.value, 1e-12);
    auto params = d.parameters();
    int skipped = 0;
    int checked = 0;
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t i = 0; i < params[t].size(); ++i) {
            const double v0 = params[t][i];
            params[t][i] = v0 + 1e-4;
            const auto p = oracle_penalty(d, x, lambda);
            params[t][i] = v0 - 1e-4;
            const auto m = oracle_penalty(d, x, lambda);
            params[t][i] = v0;
            if (p.signs != base.signs || m.signs != base.signs) {
                ++skipped;
                continue;
            }
            ++checked;
            EXPECT_LT(oracle::rel_err(pen.grads[t].data()[i],
                                      (p.value - m.value) / 2e-4),
                      1e-4);
        }
    }
    EXPECT_GT(checked, 9 * (checked + skipped) / 10);
}

TEST(Generator, KnownParamCounts) {
    EXPECT_EQ(MlpGenerator(10).param_count(), 705162u);
    EXPECT_EQ(MlpGenerator(20).param_count(), 716692u);
    EXPECT_EQ(MlpGenerator(30).param_count(), 728222u);
}

TEST(Generator, BatchNormStandardizes) {
    Rng rng = make_stream(7, "bn");
    const MlpGenerator g(10, rng);
    const auto c = g.forward_train(random_matrix(32, 10, rng));
    for (const auto &xhat : c.normalized) {
        const RowVector mean = xhat.colwise().mean();
        const RowVector var = xhat.array().square().colwise().mean();
        EXPECT_LT(mean.cwiseAbs().maxCoeff(), 1e-6);
        // var / (var + eps) is within 1e-4 of 1 for these activations
        EXPECT_LT((var.array() - 1.0).abs().maxCoeff(), 1e-3);
    }
}

TEST(Generator, TwoSampleBatchNormByHand) {
    // Batch of two: batch-normalized features are +-sqrt(v / (v + eps)).
    Rng rng = make_stream(8, "bn2");
    const MlpGenerator g(2, rng);
    const auto c = g.forward_train(random_matrix(2, 2, rng));
    for (std::size_t k = 0; k < 3; ++k) {
        const Matrix &xhat = c.normalized[k];
        for (Eigen::Index f = 0; f < xhat.cols(); ++f) {
            const double v = c.batch_var[k](f);
            const double expected = std::sqrt(v / (v + 1e-5));
            EXPECT_NEAR(std::abs(xhat(0, f)), expected, 1e-12);
            EXPECT_NEAR(xhat(0, f), -xhat(1, f), 1e-12);
        }
    }
}

TEST(Generator, EvalWithDefaultStatsIsPlainStack) {
    Rng rng = make_stream(9, "eval");
    MlpGenerator g(3, rng);
    const Matrix z = random_matrix(5, 3, rng);
    Matrix h = z;
    for (int l = 0; l < 5; ++l) {
        Matrix a = g.dense()[l].forward(h);
        if (l >= 1 && l <= 3) {
            a /= std::sqrt(1.0 + 1e-5);
        }
        h = l < 4 ? leaky_relu(a) : a;
    }
    EXPECT_LT((g.forward(z, Mode::Eval) - h).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Generator, TrainModeNeedsTwoRows) {
    MlpGenerator g(4);
    EXPECT_THROW(gen_forward(g, Matrix::Zero(1, 4), Mode::Train), ArgumentError);
    EXPECT_NO_THROW(gen_forward(g, Matrix::Zero(1, 4), Mode::Eval));
    EXPECT_THROW(gen_forward(g, Matrix::Zero(3, 5), Mode::Eval), ArgumentError);
}

TEST(Generator, RunningStatsUpdate) {
    Rng rng = make_stream(10, "running");
    MlpGenerator g(4, rng);
    const Matrix z = random_matrix(8, 4, rng);
    const auto c = g.forward_train(z);
    g.commit_running_stats(c);
    for (int k = 0; k < 3; ++k) {
        const auto &bn = g.norms()[k];
        EXPECT_LT((bn.running_mean - 0.1 * c.batch_mean[k]).cwiseAbs().maxCoeff(),
                  1e-15);
        const Vector expected =
            (0.9 * Vector::Ones(c.batch_var[k].size()) +
             0.1 * c.batch_var[k] * (8.0 / 7.0));
        EXPECT_LT((bn.running_var - expected).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Generator, BackwardMatchesFiniteDifferences) {
    Rng rng = make_stream(11, "gen-fd");
    MlpGenerator g(3, rng);
    for (auto &bn : g.norms()) {
        for (auto &v : bn.gamma) {
            v = 1.0 + 0.3 * standard_normal(rng);
        }
        for (auto &v : bn.beta) {
            v = 0.3 * standard_normal(rng);
        }
    }
    const Matrix z = random_matrix(6, 3, rng);
    const Matrix up = random_matrix(6, 3, rng);
    const auto grads = g.backward(g.forward_train(z), up);
    auto loss = [&] { return g.forward_train(z).result.cwiseProduct(up).sum(); };
    auto params = g.parameters();
    ASSERT_EQ(grads.size(), params.size());
    std::uniform_int_distribution<std::size_t> pick(0, 1u << 30);
    int bad = 0;
    int total = 0;
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (int trial = 0; trial < 25; ++trial) {
            const std::size_t i = pick(rng) % params[t].size();
            const double v0 = params[t][i];
            params[t][i] = v0 + 1e-6;
            const double fp = loss();
            params[t][i] = v0 - 1e-6;
            const double fm = loss();
            params[t][i] = v0;
            ++total;
            // LeakyReLU kinks can fall inside the stencil; tolerate rare misses
            bad += oracle::rel_err(grads[t].data()[i], (fp - fm) / 2e-6) > 1e-6;
        }
    }
    EXPECT_LE(bad, total / 50);
}

TEST(Adam, FirstStepMagnitude) {
    std::vector<double> p{1.0, -2.0};
    const std::vector<double> g{0.3, -5.0};
    AdamState st;
    const AdamConfig cfg;
    std::vector<std::span<double>> ps{p};
    std::vector<std::span<const double>> gs{g};
    adam_update(st, ps, gs, cfg);
    EXPECT_NEAR(p[0], 1.0 - cfg.learning_rate * 0.3 / (0.3 + 1e-8), 1e-15);
    EXPECT_NEAR(p[1], -2.0 + cfg.learning_rate * 5.0 / (5.0 + 1e-8), 1e-15);
    EXPECT_EQ(st.step, 1);
}

TEST(Adam, ZeroGradientLeavesParameters) {
    std::vector<double> p{1.0, -2.0, 3.0};
    const std::vector<double> g(3, 0.0);
    AdamState st;
    std::vector<std::span<double>> ps{p};
    std::vector<std::span<const double>> gs{g};
    for (int i = 0; i < 5; ++i) {
        adam_update(st, ps, gs, AdamConfig{});
    }
    EXPECT_EQ(p, (std::vector<double>{1.0, -2.0, 3.0}));
}

TEST(Adam, PureFunctionOfState) {
    std::vector<double> a{0.5, 0.25};
    std::vector<double> b = a;
    const std::vector<double> g{0.1, -0.7};
    AdamState sa;
    AdamState sb;
    for (int i = 0; i < 3; ++i) {
        std::vector<std::span<double>> pa{a};
        std::vector<std::span<double>> pb{b};
        std::vector<std::span<const double>> gs{g};
        adam_update(sa, pa, gs, AdamConfig{});
        adam_update(sb, pb, gs, AdamConfig{});
    }
    EXPECT_EQ(a, b);
    EXPECT_EQ(sa.first, sb.first);
    EXPECT_EQ(sa.second, sb.second);
}

TEST(Adam, IndependentOfBufferAlignment) {
    Rng rng = make_stream(5, "adam-align");
    std::vector<double> g(37);
    for (auto &x : g) {
        x = standard_normal(rng);
    }
    std::vector<double> results;
    for (std::size_t offset = 0; offset < 4; ++offset) {
        std::vector<double> buf(offset + g.size(), 0.0);
        std::span<double> p(buf.data() + offset, g.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = 0.1 * static_cast<double>(i);
        }
        AdamState st;
        for (int k = 0; k < 4; ++k) {
            std::vector<std::span<double>> ps{p};
            std::vector<std::span<const double>> gs{g};
            adam_update(st, ps, gs, AdamConfig{});
        }
        if (results.empty()) {
            results.assign(p.begin(), p.end());
        } else {
            EXPECT_EQ(std::vector<double>(p.begin(), p.end()), results) << offset;
        }
    }
}

TEST(Adam, ShapeMismatchThrows) {
    std::vector<double> p{1.0, 2.0};
    const std::vector<double> g{0.1};
    AdamState st;
    std::vector<std::span<double>> ps{p};
    std::vector<std::span<const double>> gs{g};
    EXPECT_THROW(adam_update(st, ps, gs, AdamConfig{}), ArgumentError);
}

} // namespace

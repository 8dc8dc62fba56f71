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


#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "qlgan/checkpoint.hpp"
#include "scratch_dir.hpp"

namespace {

using namespace qlgan;
using namespace qlgan::cli;
namespace fs = std::filesystem;

const std::string kScenarios = QLGAN_DATA_DIR "/scenarios";

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int run_cli(const std::string &args) {
    const std::string cmd = std::string(QLGAN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::vector<double> flatten(const std::vector<std::span<double>> &ps) {
    std::vector<double> out;
    for (const auto &p : ps) {
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

RunConfig tiny_config(const ScratchDir &dir, GeneratorKind kind) {
    RunConfig c;
    c.generator_kind = kind;
    c.quantum.kind = kind == GeneratorKind::QuantumSimple ? AnsatzKind::Simple
                                                          : AnsatzKind::BEL;
    c.quantum.n_qb = 2;
    c.quantum.n_layers = 1;
    c.quantum.output_scale = {2.0, 0.0};
    c.train.epochs = 2;
    c.train.batch_size = 16;
    c.data.spec.dim = 4;
    c.data.n = 64;
    c.data.seed = 3;
    c.seeds = {1, 2};
    c.output_dir = (dir.path() / "run").string();
    return c;
}

// --- checkpoints -----------------------------------------------------------------

TEST(Checkpoint, QuantumRoundTrip) {
    ScratchDir dir;
    Rng rng = make_stream(1, "ck");
    GeneratorConfig cfg;
    cfg.kind = AnsatzKind::Simple;
    cfg.n_qb = 3;
    cfg.n_layers = 2;
    cfg.readout = Readout::Single;
    cfg.output_scale = {1.25, -0.5};
    cfg.noise = NoiseDistribution::Uniform01;
    QuantumGenerator g(cfg, StyleParams::random(cfg, rng, 1.0));
    save_generator(g, dir.file("g.ckpt"));
    auto back = load_generator(dir.file("g.ckpt"));
    auto *q = dynamic_cast<QuantumGenerator *>(back.get());
    ASSERT_NE(q, nullptr);
    EXPECT_EQ(q->config().kind, cfg.kind);
    EXPECT_EQ(q->config().n_qb, 3);
    EXPECT_EQ(q->config().readout, Readout::Single);
    EXPECT_EQ(q->config().noise, NoiseDistribution::Uniform01);
    EXPECT_EQ(q->config().output_scale.gain, 1.25);
    EXPECT_EQ(flatten(q->parameters()), flatten(g.parameters()));
    const Matrix noise = g.sample_noise(4, rng);
    EXPECT_EQ(q->generate(noise, Mode::Eval), g.generate(noise, Mode::Eval));
}

TEST(Checkpoint, ClassicalRoundTripKeepsRunningStats) {
    ScratchDir dir;
    Rng rng = make_stream(2, "ck");
    ClassicalGenerator g(MlpGenerator(3, rng));
    g.forward_for_gradient(g.sample_noise(8, rng)); // moves the running stats
    save_generator(g, dir.file("c.ckpt"));
    auto back = load_generator(dir.file("c.ckpt"));
    auto *c = dynamic_cast<ClassicalGenerator *>(back.get());
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(flatten(c->network().parameters()), flatten(g.network().parameters()));
    EXPECT_EQ(flatten(c->network().buffers()), flatten(g.network().buffers()));
    const Matrix noise = g.sample_noise(5, rng);
    EXPECT_EQ(c->generate(noise, Mode::Eval), g.generate(noise, Mode::Eval));
}

TEST(Checkpoint, CriticRoundTrip) {
    ScratchDir dir;
    Rng rng = make_stream(3, "ck");
    auto d = MlpDiscriminator::standard(6, rng);
    save_discriminator(d, dir.file("d.ckpt"));
    const auto back = load_discriminator(dir.file("d.ckpt"));
    const Matrix x = Matrix::Random(4, 6);
    EXPECT_EQ(back.forward(x), d.forward(x));
    EXPECT_EQ(back.param_count(), d.param_count());
}

TEST(Checkpoint, CorruptFilesRejected) {
    ScratchDir dir;
    Rng rng = make_stream(4, "ck");
    GeneratorConfig cfg;
    cfg.n_qb = 2;
    cfg.n_layers = 1;
    QuantumGenerator g(cfg, StyleParams::random(cfg, rng, 1.0));
    save_generator(g, dir.file("g.ckpt"));
    const std::string text = slurp(dir.file("g.ckpt"));

    std::ofstream(dir.file("extra.ckpt")) << text << "0.5\n";
    EXPECT_THROW(load_generator(dir.file("extra.ckpt")), ParseError);
    std::ofstream(dir.file("short.ckpt")) << text.substr(0, text.rfind('\n', text.size() - 2) + 1);
    EXPECT_THROW(load_generator(dir.file("short.ckpt")), ParseError);
    std::ofstream(dir.file("empty.ckpt")) << "";
    EXPECT_THROW(load_generator(dir.file("empty.ckpt")), ParseError);
    EXPECT_THROW(load_generator(dir.file("missing.ckpt")), IoError);
    EXPECT_THROW(load_discriminator(dir.file("g.ckpt")), ParseError);
}

// --- config ---------------------------------------------------------------------

TEST(RunConfigJson, EchoRoundTrip) {
    ScratchDir dir;
    const RunConfig c = tiny_config(dir, GeneratorKind::QuantumSimple);
    const RunConfig back = run_config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
    EXPECT_EQ(back.generator_kind, GeneratorKind::QuantumSimple);
    EXPECT_EQ(back.quantum.kind, AnsatzKind::Simple);
    EXPECT_EQ(back.seeds, c.seeds);
}

TEST(RunConfigJson, Errors) {
    EXPECT_THROW(run_config_from_json(Json::parse(R"({"trian": {}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(Json::parse(R"({"train": {"epoch": 3}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(Json::parse(R"({"generator": {"kind": "vae"}})")),
                 ConfigError);
    EXPECT_THROW(run_config_from_json(Json::parse(R"({"train": {"epochs": "ten"}})")),
                 ConfigError);
    EXPECT_THROW(run_config_from_json(Json::parse(R"({"rng": "pcg32"})")), ConfigError);
    RunConfig c;
    c.seeds = {1, 1};
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RunConfigJson, SingleReadoutTenQubitsMatchesTenDims) {
    RunConfig c;
    c.quantum.n_qb = 10;
    c.quantum.readout = Readout::Single;
    c.data.spec.dim = 10;
    EXPECT_EQ(c.latent_dim(), 10);
    EXPECT_NO_THROW(c.validate());
}

TEST(RunConfigJson, ShippedConfigsLoad) {
    for (const auto &entry : fs::directory_iterator(QLGAN_SOURCE_DIR "/configs")) {
        if (entry.path().extension() == ".json") {
            SCOPED_TRACE(entry.path().string());
            EXPECT_NO_THROW(load_run_config(entry.path().string()).validate());
        }
    }
}

// --- commands ---------------------------------------------------------------------

TEST(GenData, WritesRowsAndIsDeterministic) {
    ScratchDir dir;
    GenDataOptions o;
    o.spec = {DistributionKind::StandardNormal, 10};
    o.n = 10000;
    o.seed = 4;
    o.out = dir.file("a.csv");
    std::ostringstream log;
    cmd_gen_data(o, log);
    EXPECT_EQ(load_csv(o.out).size(), 10000u);
    EXPECT_NE(log.str().find("10000"), std::string::npos);
    o.out = dir.file("b.csv");
    cmd_gen_data(o, log);
    EXPECT_EQ(slurp(dir.file("a.csv")), slurp(dir.file("b.csv")));
    o.n = 0;
    EXPECT_THROW(cmd_gen_data(o, log), ArgumentError);
}

TEST(TrainCommand, ArtifactsAndByteIdenticalRerun) {
    ScratchDir dir;
    for (auto kind : {GeneratorKind::QuantumBEL, GeneratorKind::Classical}) {
        RunConfig c = tiny_config(dir, kind);
        std::ostringstream log;
        const auto first = cmd_train(c, log);
        ASSERT_EQ(first.size(), 2u);
        const fs::path root = c.output_dir;
        for (const char *f : {"config.json", "metrics/train_seeds.csv",
                              "metrics/train_summary.csv", "histories/seed_1.csv",
                              "histories/seed_2.csv", "checkpoints/seed_1/generator.ckpt",
                              "checkpoints/seed_2/critic.ckpt", "train.log"}) {
            EXPECT_TRUE(fs::exists(root / f)) << f;
        }
        std::map<std::string, std::string> before;
        for (const auto &e : fs::recursive_directory_iterator(root)) {
            if (e.is_regular_file() && e.path().filename() != "train.log") {
                before[e.path().string()] = slurp(e.path());
            }
        }
        cmd_train(c, log);
        for (const auto &[path, bytes] : before) {
            EXPECT_EQ(slurp(path), bytes) << path;
        }
        // the echo reproduces the run
        RunConfig echoed = load_run_config((root / "config.json").string());
        echoed.output_dir = (dir.path() / "echo").string();
        cmd_train(echoed, log);
        EXPECT_EQ(slurp(dir.path() / "echo" / "metrics" / "train_seeds.csv"),
                  before[(root / "metrics" / "train_seeds.csv").string()]);
        fs::remove_all(root);
        fs::remove_all(dir.path() / "echo");
    }
}

TEST(TrainCommand, ZeroEpochsKeepsInitialization) {
    ScratchDir dir;
    RunConfig c = tiny_config(dir, GeneratorKind::QuantumBEL);
    c.train.epochs = 0;
    c.seeds = {5};
    std::ostringstream log;
    cmd_train(c, log);
    const fs::path root = c.output_dir;
    EXPECT_EQ(slurp(root / "histories" / "seed_5.csv"), "epoch,critic_loss,gen_loss,gp_mean\n");
    TrainConfig tc = c.train;
    tc.seed = 5;
    tc.generator_kind = c.generator_kind;
    auto fresh = make_generator(tc, c.quantum, 4, c.init_scale);
    auto saved = load_generator((root / "checkpoints" / "seed_5" / "generator.ckpt").string());
    EXPECT_EQ(flatten(saved->parameters()), flatten(fresh->parameters()));
    EXPECT_FALSE(fs::exists(root / "metrics" / "train_summary.csv"));
}

TEST(TrainCommand, DimensionMismatchBeforeTraining) {
    ScratchDir dir;
    RunConfig c = tiny_config(dir, GeneratorKind::QuantumBEL);
    c.data.spec.dim = 5;
    std::ostringstream log;
    EXPECT_THROW(cmd_train(c, log), ConfigError);
    EXPECT_FALSE(fs::exists(c.output_dir));
}

class SampleCommand : public ::testing::Test {
  protected:
    ScratchDir dir;
    std::string quantum_ckpt;
    std::string classical_ckpt;

    void SetUp() override {
        Rng rng = make_stream(6, "sample-test");
        GeneratorConfig cfg;
        cfg.n_qb = 2;
        cfg.n_layers = 1;
        QuantumGenerator q(cfg, StyleParams::random(cfg, rng, 1.0));
        quantum_ckpt = dir.file("q.ckpt");
        save_generator(q, quantum_ckpt);
        ClassicalGenerator c(MlpGenerator(4, rng));
        classical_ckpt = dir.file("c.ckpt");
        save_generator(c, classical_ckpt);
    }
};

TEST_F(SampleCommand, ShotsQuantize) {
    SampleOptions o{quantum_ckpt, 2500, 1000, 3, dir.file("s.csv")};
    std::ostringstream log;
    cmd_sample(o, log);
    const auto d = load_csv(o.out);
    ASSERT_EQ(d.size(), 2500u);
    for (double v : d.rows.reshaped()) {
        const double k = (v + 1.0) * 500.0;
        ASSERT_NEAR(k, std::round(k), 1e-9);
    }
}

TEST_F(SampleCommand, ExactAndDeterministic) {
    SampleOptions o{quantum_ckpt, 20, std::nullopt, 3, dir.file("a.csv")};
    std::ostringstream log;
    cmd_sample(o, log);
    o.out = dir.file("b.csv");
    cmd_sample(o, log);
    EXPECT_EQ(slurp(dir.file("a.csv")), slurp(dir.file("b.csv")));
    auto g = load_generator(quantum_ckpt);
    Rng rng = make_stream(3, "sample");
    const Matrix expected = g->generate(g->sample_noise(20, rng), Mode::Eval);
    EXPECT_EQ(load_csv(dir.file("a.csv")).rows, expected);
}

TEST_F(SampleCommand, Errors) {
    EXPECT_THROW(sample_from_checkpoint({quantum_ckpt, 5, 0, 1, ""}), ArgumentError);
    EXPECT_THROW(sample_from_checkpoint({classical_ckpt, 5, 100, 1, ""}), ConfigError);
    EXPECT_THROW(sample_from_checkpoint({quantum_ckpt, 0, std::nullopt, 1, ""}), ArgumentError);
    EXPECT_EQ(sample_from_checkpoint({classical_ckpt, 6, std::nullopt, 1, ""}).rows(), 6);
}

TEST(EvalCommand, SelfComparisonAndGaussianVsUniform) {
    ScratchDir dir;
    std::ostringstream log;
    save_csv(sample_synthetic({DistributionKind::StandardNormal, 3}, 10000, 1), dir.file("n.csv"));
    save_csv(sample_synthetic({DistributionKind::Uniform01, 3}, 10000, 2), dir.file("u.csv"));
    const auto self = cmd_eval({dir.file("n.csv"), dir.file("n.csv"), dir.file("self")}, log);
    for (double w : self) {
        EXPECT_EQ(w, 0.0);
    }
    const auto cross = cmd_eval({dir.file("n.csv"), dir.file("u.csv"), dir.file("cross")}, log);
    for (double w : cross) {
        EXPECT_GT(w, 0.3);
    }
    const auto corr = load_numeric_csv(dir.file("cross/correlation_generated.csv"));
    ASSERT_EQ(corr.values.rows(), 3);
    ASSERT_EQ(corr.values.cols(), 3);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(corr.values(i, i), 1.0);
    }
    EXPECT_TRUE(fs::exists(dir.file("cross/wasserstein.csv")));
    save_csv(sample_synthetic({DistributionKind::Uniform01, 2}, 10, 2), dir.file("two.csv"));
    EXPECT_THROW(cmd_eval({dir.file("n.csv"), dir.file("two.csv"), dir.file("bad")}, log),
                 ArgumentError);
}

TEST(CompareCommand, ScenarioAverages) {
    std::ostringstream log;
    const auto five = cmd_compare({kScenarios + "/qgan_5qb/classical_tuned.csv",
                                   {kScenarios + "/qgan_5qb/simple_qgan.csv",
                                    kScenarios + "/qgan_5qb/bel_qgan.csv"},
                                   ""},
                                  log);
    ASSERT_EQ(five.size(), 2u);
    EXPECT_NEAR(five[0], -1.00, 0.15);
    EXPECT_NEAR(five[1], -0.26, 0.15);
    const auto thirty = cmd_compare({kScenarios + "/qgan_latent30/classical_tuned.csv",
                                     {kScenarios + "/qgan_latent30/simple_qgan.csv",
                                      kScenarios + "/qgan_latent30/bel_qgan.csv"},
                                     ""},
                                    log);
    EXPECT_NEAR(thirty[0], 0.12, 0.15);
    EXPECT_NEAR(thirty[1], 0.11, 0.15);
    EXPECT_NE(log.str().find("<Z0>"), std::string::npos);
}

TEST(CompareCommand, SelfIsZeroAndMismatchNamed) {
    ScratchDir dir;
    std::ostringstream log;
    const std::string ref = kScenarios + "/gan_study/gan_tuned.csv";
    const auto z = cmd_compare({ref, {ref}, dir.file("self.csv")}, log);
    EXPECT_EQ(z[0], 0.0);
    std::ofstream(dir.file("partial.csv")) << "eps_d,0.5,0.01,max\n";
    try {
        cmd_compare({ref, {dir.file("partial.csv")}, ""}, log);
        FAIL();
    } catch (const ArgumentError &e) {
        EXPECT_NE(std::string(e.what()).find("eps_v"), std::string::npos);
    }
}

TEST(GruDemoCommand, DeterministicShape) {
    std::ostringstream log;
    GruDemoOptions o;
    const Vector a = cmd_gru_demo(o, log);
    const Vector b = cmd_gru_demo(o, log);
    EXPECT_EQ(a.size(), 2 * o.hidden_dim);
    EXPECT_EQ(a, b);
}

// --- binary -----------------------------------------------------------------------

TEST(CliBinary, ExitCodes) {
    ScratchDir dir;
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli(""), 1);
    EXPECT_EQ(run_cli("gen-data --bogus"), 1);
    EXPECT_EQ(run_cli("gen-data -n 0 -o " + dir.file("x.csv")), 1);
    EXPECT_EQ(run_cli("gen-data --distribution cauchy -o " + dir.file("x.csv")), 1);
    EXPECT_EQ(run_cli("gen-data -n 10 --dim 2 -o " + dir.file("x.csv")), 0);
    EXPECT_EQ(run_cli("gen-data -n 10 -o /proc/forbidden/x.csv"), 2);
    EXPECT_EQ(run_cli("sample --checkpoint " + dir.file("none.ckpt") + " -o " +
                      dir.file("s.csv")),
              2);
    EXPECT_EQ(run_cli("compare --reference " + kScenarios +
                      "/gan_study/vae_tuned.csv " + kScenarios +
                      "/gan_study/gan_nominal.csv"),
              0);
}

TEST(CliBinary, TrainFlagsOverrideAndRerunIdentical) {
    ScratchDir dir;
    ASSERT_EQ(run_cli("gen-data -n 64 --dim 4 --seed 2 -o " + dir.file("d.csv")), 0);
    const std::string base = "train --kind simple --n-qb 2 --layers 1 --epochs 1 "
                             "--batch-size 16 --seeds 3 --data " +
                             dir.file("d.csv") + " -o ";
    ASSERT_EQ(run_cli(base + dir.file("a")), 0);
    ASSERT_EQ(run_cli(base + dir.file("b")), 0);
    for (const char *f : {"histories/seed_3.csv", "metrics/train_seeds.csv",
                          "checkpoints/seed_3/generator.ckpt"}) {
        EXPECT_EQ(slurp(dir.path() / "a" / f), slurp(dir.path() / "b" / f)) << f;
    }
    const auto echo = load_run_config(dir.file("a/config.json"));
    EXPECT_EQ(echo.generator_kind, GeneratorKind::QuantumSimple);
    EXPECT_EQ(echo.train.epochs, 1);
    EXPECT_EQ(run_cli("train --kind bel --n-qb 3 --epochs 1 --data " + dir.file("d.csv") +
                      " -o " + dir.file("c")),
              1);
}

} // namespace

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


// qlgan command-line entry point.
//
// Exit codes: 0 success, 1 invalid configuration or input, 2 runtime failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace qlgan;
using namespace qlgan::cli;

struct TrainFlags {
    std::string config;
    std::optional<std::string> kind;
    std::optional<int> n_qb;
    std::optional<int> n_layers;
    std::optional<std::string> readout;
    std::optional<double> init_scale;
    std::optional<double> gain;
    std::optional<double> offset;
    std::optional<int> epochs;
    std::optional<int> batch_size;
    std::optional<int> n_critic;
    std::optional<double> learning_rate;
    std::optional<std::string> data;
    std::optional<std::string> out;
    std::vector<std::uint64_t> seeds;
    bool timing = false;
};

RunConfig resolve(const TrainFlags &f) {
    RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
    if (f.kind) {
        c.generator_kind = parse_generator_kind(*f.kind);
        c.train.generator_kind = c.generator_kind;
        c.quantum.kind = c.generator_kind == GeneratorKind::QuantumSimple
                             ? AnsatzKind::Simple
                             : AnsatzKind::BEL;
    }
    if (f.n_qb) {
        c.quantum.n_qb = *f.n_qb;
    }
    if (f.n_layers) {
        c.quantum.n_layers = *f.n_layers;
    }
    if (f.readout) {
        try {
            c.quantum.readout = parse_readout(*f.readout);
        } catch (const ParseError &e) {
            throw ConfigError(e.what());
        }
    }
    if (f.init_scale) {
        c.init_scale = *f.init_scale;
    }
    if (f.gain) {
        c.quantum.output_scale.gain = *f.gain;
    }
    if (f.offset) {
        c.quantum.output_scale.offset = *f.offset;
    }
    if (f.epochs) {
        c.train.epochs = *f.epochs;
    }
    if (f.batch_size) {
        c.train.batch_size = *f.batch_size;
    }
    if (f.n_critic) {
        c.train.n_critic = *f.n_critic;
    }
    if (f.learning_rate) {
        c.train.learning_rate = *f.learning_rate;
    }
    if (f.data) {
        c.data.path = *f.data;
    }
    if (f.out) {
        c.output_dir = *f.out;
    }
    if (!f.seeds.empty()) {
        c.seeds = f.seeds;
    }
    return c;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Latent style-based quantum and classical WGAN-GP toolkit"};
    app.require_subcommand(1);

    GenDataOptions gen;
    std::string dist = "normal";
    auto *gen_cmd = app.add_subcommand("gen-data", "Write a synthetic latent dataset");
    gen_cmd->add_option("--distribution", dist, "uniform, normal, lognormal or sin3")
        ->capture_default_str();
    gen_cmd->add_option("--dim", gen.spec.dim, "Latent dimension")->capture_default_str();
    gen_cmd->add_option("-n,--n", gen.n, "Number of rows")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
    gen_cmd->add_option("-o,--out", gen.out, "Output CSV")->required();

    TrainFlags tf;
    auto *train_cmd = app.add_subcommand("train", "Train one model per seed");
    train_cmd->add_option("-c,--config", tf.config, "JSON run config");
    train_cmd->add_option("--kind", tf.kind, "classical, simple or bel");
    train_cmd->add_option("--n-qb", tf.n_qb, "Qubit count");
    train_cmd->add_option("--layers", tf.n_layers, "Ansatz layers");
    train_cmd->add_option("--readout", tf.readout, "single or dual");
    train_cmd->add_option("--init-scale", tf.init_scale,
                          "Half-width of the uniform style-parameter init");
    train_cmd->add_option("--gain", tf.gain, "Quantum output gain");
    train_cmd->add_option("--offset", tf.offset, "Quantum output offset");
    train_cmd->add_option("--epochs", tf.epochs, "Epochs");
    train_cmd->add_option("--batch-size", tf.batch_size, "Batch size");
    train_cmd->add_option("--n-critic", tf.n_critic, "Critic steps per generator step");
    train_cmd->add_option("--lr", tf.learning_rate, "Adam learning rate");
    train_cmd->add_option("--data", tf.data, "Training CSV (overrides the config)");
    train_cmd->add_option("-o,--out", tf.out, "Output directory");
    train_cmd->add_option("--seeds", tf.seeds, "Seed list");
    train_cmd->add_flag("--timing", tf.timing,
                        "Add wall-clock seconds to the history CSVs");

    SampleOptions so;
    std::optional<int> shots;
    auto *sample_cmd = app.add_subcommand("sample", "Draw latent samples from a checkpoint");
    sample_cmd->add_option("--checkpoint", so.checkpoint, "Generator checkpoint")
        ->required();
    sample_cmd->add_option("-n,--n", so.n, "Number of samples")->capture_default_str();
    sample_cmd->add_option("--shots", shots, "Measurement shots per expectation");
    sample_cmd->add_option("--seed", so.seed, "Sampling seed")->capture_default_str();
    sample_cmd->add_option("-o,--out", so.out, "Output CSV")->required();

    EvalOptions eo;
    auto *eval_cmd = app.add_subcommand("eval", "Compare generated and reference latents");
    eval_cmd->add_option("--generated", eo.generated, "Generated CSV")->required();
    eval_cmd->add_option("--reference", eo.reference, "Reference CSV")->required();
    eval_cmd->add_option("-o,--out", eo.out_dir, "Output directory")->required();

    CompareOptions co;
    auto *cmp_cmd = app.add_subcommand("compare", "Z0 significance between scenarios");
    cmp_cmd->add_option("--reference", co.reference, "Reference scenario CSV")->required();
    cmp_cmd->add_option("tests", co.tests, "Test scenario CSVs")->required();
    cmp_cmd->add_option("-o,--out", co.out, "Comparison CSV");

    GruDemoOptions go;
    auto *gru_cmd = app.add_subcommand("gru-demo", "Run a random bidirectional GRU");
    gru_cmd->add_option("--input-dim", go.input_dim)->capture_default_str();
    gru_cmd->add_option("--hidden-dim", go.hidden_dim)->capture_default_str();
    gru_cmd->add_option("--length", go.length)->capture_default_str();
    gru_cmd->add_option("--dropout", go.dropout)->capture_default_str();
    gru_cmd->add_option("--seed", go.seed)->capture_default_str();
    gru_cmd->add_option("-o,--out", go.out, "Output CSV for the final state");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen_cmd) {
            gen.spec.kind = parse_distribution(dist);
            cmd_gen_data(gen, std::cout);
        } else if (*train_cmd) {
            cmd_train(resolve(tf), std::cout, tf.timing);
        } else if (*sample_cmd) {
            so.shots = shots;
            cmd_sample(so, std::cout);
        } else if (*eval_cmd) {
            cmd_eval(eo, std::cout);
        } else if (*cmp_cmd) {
            cmd_compare(co, std::cout);
        } else if (*gru_cmd) {
            cmd_gru_demo(go, std::cout);
        }
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const UndefinedError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

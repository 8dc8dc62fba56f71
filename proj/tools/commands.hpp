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
 * Subcommand implementations. Each returns normally on success and throws
 * the library exceptions otherwise; main() maps them to exit codes.
 */
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qlgan/checkpoint.hpp"
#include "qlgan/latent_data.hpp"
#include "qlgan/metrics.hpp"
#include "qlgan/recurrent.hpp"
#include "qlgan/wgan.hpp"
#include "run_config.hpp"

namespace qlgan::cli {

namespace fs = std::filesystem;

inline void make_dirs(const fs::path &p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) {
        throw IoError("cannot create directory '" + p.string() +
                      "': " + ec.message());
    }
}

inline void write_text(const fs::path &p, const std::string &text) {
    auto out = qlgan::detail::open_for_writing(p.string());
    out << text;
    if (!out) {
        throw IoError("failed writing '" + p.string() + "'");
    }
}

// --- gen-data -------------------------------------------------------------------

struct GenDataOptions {
    DistributionSpec spec;
    int n = 10000;
    std::uint64_t seed = 0;
    std::string out;
};

inline void print_summary(std::ostream &os, const LatentDataset &d) {
    os << "n=" << d.size() << " dim=" << d.dim() << '\n';
    if (d.size() == 0) {
        return;
    }
    const RowVector mean = d.rows.colwise().mean();
    os << std::setw(6) << "dim" << std::setw(14) << "mean" << std::setw(14)
       << "std" << '\n';
    for (int c = 0; c < d.dim(); ++c) {
        const double var =
            d.size() > 1 ? (d.rows.col(c).array() - mean(c)).square().sum() /
                               static_cast<double>(d.size() - 1)
                         : 0.0;
        os << std::setw(6) << c << std::setw(14) << mean(c) << std::setw(14)
           << std::sqrt(var) << '\n';
    }
}

inline void cmd_gen_data(const GenDataOptions &o, std::ostream &os) {
    if (o.out.empty()) {
        throw ConfigError("gen-data needs an output path");
    }
    const auto data = sample_synthetic(o.spec, o.n, o.seed);
    save_csv(data, o.out);
    os << "wrote " << o.out << '\n';
    print_summary(os, data);
}

// --- train ----------------------------------------------------------------------

inline LatentDataset load_training_data(RunConfig &c) {
    if (c.data.path.empty()) {
        return sample_synthetic(c.data.spec, c.data.n, c.data.seed);
    }
    auto d = load_csv(c.data.path);
    c.data.spec.dim = d.dim();
    return d;
}

/// Mean over dimensions of the 1D Wasserstein distance between the model's
/// samples and the data, with as many samples as data rows.
inline double sample_distance(LatentGenerator &g, const LatentDataset &data,
                              std::uint64_t seed) {
    Rng rng = make_stream(seed, "eval");
    const Matrix noise =
        g.sample_noise(static_cast<int>(data.size()), rng);
    return mean_wasserstein(g.generate(noise, Mode::Eval), data.rows);
}

struct SeedResult {
    std::uint64_t seed = 0;
    TrainHistory history;
    double w1_init = 0.0;
    double w1_final = 0.0;
};

/**
 * Trains one model per seed. Writes config.json, checkpoints/seed_<s>/,
 * histories/seed_<s>.csv, metrics/train_seeds.csv, metrics/train_summary.csv
 * and train.log under the output directory.
 */
inline std::vector<SeedResult> cmd_train(RunConfig c, std::ostream &os,
                                         bool history_seconds = false) {
    const auto data = load_training_data(c);
    c.validate();
    if (c.latent_dim() != data.dim()) {
        throw ConfigError("generator latent dimension " +
                          std::to_string(c.latent_dim()) +
                          " does not match the data dimension " +
                          std::to_string(data.dim()));
    }
    const fs::path root(c.output_dir);
    make_dirs(root / "checkpoints");
    make_dirs(root / "histories");
    make_dirs(root / "metrics");
    write_text(root / "config.json", to_json(c).dump(2) + "\n");
    auto log = qlgan::detail::open_for_writing((root / "train.log").string());

    std::vector<SeedResult> results;
    for (auto seed : c.seeds) {
        TrainConfig tc = c.train;
        tc.seed = seed;
        tc.generator_kind = c.generator_kind;
        auto g = make_generator(tc, c.quantum, data.dim(), c.init_scale);
        auto d = make_discriminator(tc, data.dim());
        SeedResult r;
        r.seed = seed;
        r.w1_init = sample_distance(*g, data, seed);
        const auto start = std::chrono::steady_clock::now();
        r.history = train(tc, data, *g, d, [&](const EpochRecord &e) {
            log << "seed " << seed << " epoch " << e.epoch << " critic "
                << e.critic_loss << " gen " << e.gen_loss << " gp " << e.gp_mean
                << " seconds " << e.seconds << '\n';
        });
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        r.w1_final = sample_distance(*g, data, seed);
        const fs::path ck = root / "checkpoints" / ("seed_" + std::to_string(seed));
        make_dirs(ck);
        save_generator(*g, (ck / "generator.ckpt").string());
        save_discriminator(d, (ck / "critic.ckpt").string());
        write_history_csv(r.history,
                          (root / "histories" /
                           ("seed_" + std::to_string(seed) + ".csv"))
                              .string(),
                          history_seconds);
        log << "seed " << seed << " done in " << secs << " s\n";
        os << "seed " << seed << ": W1 " << std::setprecision(4) << r.w1_init
           << " -> " << r.w1_final << " (" << std::setprecision(3) << secs
           << " s)\n";
        results.push_back(std::move(r));
    }

    {
        auto out = qlgan::detail::open_for_writing(
            (root / "metrics" / "train_seeds.csv").string());
        out << "seed,final_critic_loss,final_gen_loss,final_gp_mean,w1_init,"
               "w1_final\n";
        for (const auto &r : results) {
            const EpochRecord last =
                r.history.epochs.empty() ? EpochRecord{} : r.history.epochs.back();
            out << r.seed << ',' << qlgan::detail::format_double(last.critic_loss)
                << ',' << qlgan::detail::format_double(last.gen_loss) << ','
                << qlgan::detail::format_double(last.gp_mean) << ','
                << qlgan::detail::format_double(r.w1_init) << ','
                << qlgan::detail::format_double(r.w1_final) << '\n';
        }
    }
    if (results.size() >= 2) {
        auto out = qlgan::detail::open_for_writing(
            (root / "metrics" / "train_summary.csv").string());
        out << "quantity,mean,std\n";
        auto emit = [&](const std::string &name, auto field) {
            std::vector<double> v;
            for (const auto &r : results) {
                v.push_back(field(r));
            }
            const auto m = aggregate_seeds(v, name, Direction::Minimize);
            out << name << ',' << qlgan::detail::format_double(m.mean) << ','
                << qlgan::detail::format_double(m.std) << '\n';
            os << std::setw(18) << std::left << name << std::right
               << std::setprecision(5) << m.mean << " +- " << m.std << '\n';
        };
        auto last = [](const SeedResult &r) {
            return r.history.epochs.empty() ? EpochRecord{}
                                            : r.history.epochs.back();
        };
        emit("final_critic_loss",
             [&](const SeedResult &r) { return last(r).critic_loss; });
        emit("final_gen_loss", [&](const SeedResult &r) { return last(r).gen_loss; });
        emit("final_gp_mean", [&](const SeedResult &r) { return last(r).gp_mean; });
        emit("w1_init", [](const SeedResult &r) { return r.w1_init; });
        emit("w1_final", [](const SeedResult &r) { return r.w1_final; });
    }
    return results;
}

// --- sample ---------------------------------------------------------------------

struct SampleOptions {
    std::string checkpoint;
    int n = 1000;
    std::optional<int> shots;
    std::uint64_t seed = 0;
    std::string out;
};

inline Matrix sample_from_checkpoint(const SampleOptions &o) {
    if (o.n < 1) {
        throw ArgumentError("sample count must be positive");
    }
    if (o.shots && *o.shots <= 0) {
        throw ArgumentError("shots must be positive");
    }
    auto g = load_generator(o.checkpoint);
    Rng noise_rng = make_stream(o.seed, "sample");
    const Matrix noise = g->sample_noise(o.n, noise_rng);
    if (!o.shots) {
        return g->generate(noise, Mode::Eval);
    }
    auto *q = dynamic_cast<QuantumGenerator *>(g.get());
    if (q == nullptr) {
        throw ConfigError("shot sampling needs a quantum checkpoint");
    }
    Rng shot_rng = make_stream(o.seed, "shots");
    return generate_with_shots(q->config(), q->params(), noise, *o.shots,
                               shot_rng);
}

inline void cmd_sample(const SampleOptions &o, std::ostream &os) {
    if (o.out.empty()) {
        throw ConfigError("sample needs an output path");
    }
    const Matrix m = sample_from_checkpoint(o);
    save_csv(LatentDataset(m), o.out);
    os << "wrote " << m.rows() << " x " << m.cols() << " samples to " << o.out
       << '\n';
}

// --- eval -----------------------------------------------------------------------

struct EvalOptions {
    std::string generated;
    std::string reference;
    std::string out_dir;
};

inline void write_correlation(const CorrelationMatrix &c, const fs::path &p) {
    auto out = qlgan::detail::open_for_writing(p.string());
    for (Eigen::Index i = 0; i < c.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.values.cols(); ++j) {
            out << (j ? "," : "")
                << (std::isnan(c.values(i, j))
                        ? std::string("nan")
                        : qlgan::detail::format_double(c.values(i, j)));
        }
        out << '\n';
    }
}

/// Writes wasserstein.csv and the two correlation matrices. Returns the
/// per-dimension distances.
inline std::vector<double> cmd_eval(const EvalOptions &o, std::ostream &os) {
    const auto gen = load_csv(o.generated);
    const auto ref = load_csv(o.reference);
    if (gen.dim() != ref.dim()) {
        throw ArgumentError("generated data has dim " + std::to_string(gen.dim()) +
                            ", reference has " + std::to_string(ref.dim()));
    }
    const auto w = wasserstein_per_dim(gen.rows, ref.rows);
    const fs::path root(o.out_dir);
    make_dirs(root);
    auto stats = [](const Matrix &m, Eigen::Index c) {
        const double mean = m.col(c).mean();
        const double var =
            m.rows() > 1 ? (m.col(c).array() - mean).square().sum() /
                               static_cast<double>(m.rows() - 1)
                         : 0.0;
        return std::pair{mean, std::sqrt(var)};
    };
    {
        auto out = qlgan::detail::open_for_writing((root / "wasserstein.csv").string());
        out << "dim,wasserstein,gen_mean,gen_std,ref_mean,ref_std\n";
        for (int c = 0; c < gen.dim(); ++c) {
            const auto [gm, gs] = stats(gen.rows, c);
            const auto [rm, rs] = stats(ref.rows, c);
            out << c << ',' << qlgan::detail::format_double(w[c]) << ','
                << qlgan::detail::format_double(gm) << ','
                << qlgan::detail::format_double(gs) << ','
                << qlgan::detail::format_double(rm) << ','
                << qlgan::detail::format_double(rs) << '\n';
        }
    }
    const auto cg = correlation_matrix(gen);
    const auto cr = correlation_matrix(ref);
    write_correlation(cg, root / "correlation_generated.csv");
    write_correlation(cr, root / "correlation_reference.csv");

    double mean_w = 0.0;
    os << std::setw(6) << "dim" << std::setw(14) << "wasserstein" << '\n';
    for (std::size_t c = 0; c < w.size(); ++c) {
        os << std::setw(6) << c << std::setw(14) << w[c] << '\n';
        mean_w += w[c] / static_cast<double>(w.size());
    }
    os << "mean wasserstein " << mean_w << '\n';
    for (int c : cg.undefined_columns) {
        os << "generated column " << c << " has zero variance\n";
    }
    for (int c : cr.undefined_columns) {
        os << "reference column " << c << " has zero variance\n";
    }
    return w;
}

// --- compare --------------------------------------------------------------------

struct CompareOptions {
    std::string reference;
    std::vector<std::string> tests;
    std::string out;
};

inline std::vector<double> cmd_compare(const CompareOptions &o, std::ostream &os) {
    if (o.tests.empty()) {
        throw ConfigError("compare needs at least one test scenario");
    }
    const auto ref = load_scenario_table(o.reference);
    std::vector<ScenarioTable> tests;
    std::vector<double> averages;
    for (const auto &p : o.tests) {
        tests.push_back(load_scenario_table(p));
        averages.push_back(z0_average(ref, tests.back()));
    }
    print_comparison_table(os, ref, tests);
    if (!o.out.empty()) {
        write_comparison_csv(ref, tests, o.out);
    }
    return averages;
}

// --- gru-demo -------------------------------------------------------------------

struct GruDemoOptions {
    int input_dim = 4;
    int hidden_dim = 8;
    int length = 6;
    double dropout = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

/// Runs a random bidirectional GRU over a random sequence and prints the
/// concatenated final state.
inline Vector cmd_gru_demo(const GruDemoOptions &o, std::ostream &os) {
    if (o.input_dim < 1 || o.hidden_dim < 1 || o.length < 0) {
        throw ConfigError("gru-demo needs positive dims and a non-negative length");
    }
    Rng wr = make_stream(o.seed, "gru-weights");
    const auto fwd = GruWeights::random(o.input_dim, o.hidden_dim, wr, 0.5);
    const auto bwd = GruWeights::random(o.input_dim, o.hidden_dim, wr, 0.5);
    Rng xr = make_stream(o.seed, "gru-inputs");
    std::vector<Vector> xs;
    for (int t = 0; t < o.length; ++t) {
        Vector x(o.input_dim);
        for (auto &v : x) {
            v = standard_normal(xr);
        }
        xs.push_back(std::move(x));
    }
    const Vector h0 = Vector::Zero(o.hidden_dim);
    Vector h = bidirectional(xs, h0, h0, fwd, bwd);
    Rng dr = make_stream(o.seed, "gru-dropout");
    h = dropout_between_layers(h, o.dropout, dr);
    os << "final state (" << h.size() << "):";
    for (double v : h) {
        os << ' ' << v;
    }
    os << '\n';
    if (!o.out.empty()) {
        save_csv(LatentDataset(Matrix(h.transpose())), o.out);
    }
    return h;
}

} // namespace qlgan::cli

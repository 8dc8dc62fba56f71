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
 * JSON run configuration shared by the subcommands.
 *
 * {
 *   "generator": {"kind": "bel", "n_qb": 5, "n_layers": 2, "readout": "dual",
 *                 "gain": 1, "offset": 0, "noise": "normal", "init_scale": 1},
 *   "train": {"learning_rate": 2e-4, "beta1": 0.5, "beta2": 0.9,
 *             "lambda_gp": 10, "n_critic": 1, "epochs": 100, "batch_size": 64},
 *   "data": {"path": "latent.csv"}   or
 *   "data": {"distribution": "normal", "dim": 10, "n": 10000, "seed": 0},
 *   "seeds": [1, 2, 3, 4, 5],
 *   "output_dir": "runs/bel"
 * }
 *
 * Unknown keys are rejected. Missing keys take the defaults above.
 */
#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlgan/ansatz.hpp"
#include "qlgan/checkpoint.hpp"
#include "qlgan/error.hpp"
#include "qlgan/latent_data.hpp"
#include "qlgan/random.hpp"
#include "qlgan/wgan.hpp"

namespace qlgan::cli {

using Json = nlohmann::json;

struct DataSource {
    std::string path; ///< empty when synthetic
    DistributionSpec spec;
    int n = 10000;
    std::uint64_t seed = 0;
};

struct RunConfig {
    GeneratorKind generator_kind = GeneratorKind::QuantumBEL;
    GeneratorConfig quantum;
    double init_scale = kStyleInitScale;
    TrainConfig train;
    DataSource data;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::string output_dir = "run";

    int latent_dim() const {
        return generator_kind == GeneratorKind::Classical ? data.spec.dim
                                                          : quantum.latent_dim();
    }

    void validate() const {
        if (generator_kind != GeneratorKind::Classical) {
            quantum.validate();
        }
        TrainConfig t = train;
        t.generator_kind = generator_kind;
        t.validate();
        data.spec.validate();
        if (data.path.empty() && data.n < 1) {
            throw ConfigError("data.n must be positive");
        }
        if (seeds.empty()) {
            throw ConfigError("seed list is empty");
        }
        if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() !=
            seeds.size()) {
            throw ConfigError("seed list has duplicates");
        }
        if (!(init_scale >= 0.0)) {
            throw ConfigError("init_scale must be non-negative");
        }
        if (output_dir.empty()) {
            throw ConfigError("output_dir is empty");
        }
    }
};

inline GeneratorKind parse_generator_kind(const std::string &s) {
    if (s == "classical") {
        return GeneratorKind::Classical;
    }
    if (s == "simple") {
        return GeneratorKind::QuantumSimple;
    }
    if (s == "bel") {
        return GeneratorKind::QuantumBEL;
    }
    throw ConfigError("unknown generator kind '" + s +
                      "' (expected classical, simple or bel)");
}

inline DistributionKind parse_distribution(const std::string &s) {
    if (s == "uniform") {
        return DistributionKind::Uniform01;
    }
    if (s == "normal") {
        return DistributionKind::StandardNormal;
    }
    if (s == "lognormal") {
        return DistributionKind::ShiftedLogNormal;
    }
    if (s == "sin3") {
        return DistributionKind::SinThreePeak;
    }
    throw ConfigError("unknown distribution '" + s +
                      "' (expected uniform, normal, lognormal or sin3)");
}

inline std::string to_string(DistributionKind k) {
    switch (k) {
    case DistributionKind::Uniform01:
        return "uniform";
    case DistributionKind::StandardNormal:
        return "normal";
    case DistributionKind::ShiftedLogNormal:
        return "lognormal";
    case DistributionKind::SinThreePeak:
        return "sin3";
    }
    return "?";
}

namespace detail {

inline void check_keys(const Json &obj, const std::string &where,
                       std::initializer_list<const char *> allowed) {
    if (!obj.is_object()) {
        throw ConfigError("'" + where + "' must be an object");
    }
    for (const auto &item : obj.items()) {
        bool ok = false;
        for (const char *k : allowed) {
            ok = ok || item.key() == k;
        }
        if (!ok) {
            throw ConfigError("unknown key '" + where + "." + item.key() + "'");
        }
    }
}

template <class T>
void read(const Json &obj, const char *key, T &out, const std::string &where) {
    if (!obj.contains(key)) {
        return;
    }
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw ConfigError("'" + where + "." + key + "' has the wrong type");
    }
}

} // namespace detail

inline RunConfig run_config_from_json(const Json &j) {
    using detail::read;
    RunConfig c;
    detail::check_keys(j, "config",
                       {"generator", "train", "data", "seeds", "output_dir",
                        "rng"});
    if (j.contains("generator")) {
        const auto &g = j.at("generator");
        detail::check_keys(g, "generator",
                           {"kind", "n_qb", "n_layers", "readout", "gain",
                            "offset", "noise", "init_scale"});
        std::string s;
        if (read(g, "kind", s, "generator"), !s.empty()) {
            c.generator_kind = parse_generator_kind(s);
        }
        read(g, "n_qb", c.quantum.n_qb, "generator");
        read(g, "n_layers", c.quantum.n_layers, "generator");
        s.clear();
        if (read(g, "readout", s, "generator"), !s.empty()) {
            try {
                c.quantum.readout = parse_readout(s);
            } catch (const ParseError &e) {
                throw ConfigError(e.what());
            }
        }
        read(g, "gain", c.quantum.output_scale.gain, "generator");
        read(g, "offset", c.quantum.output_scale.offset, "generator");
        s.clear();
        if (read(g, "noise", s, "generator"), !s.empty()) {
            try {
                c.quantum.noise = parse_noise(s);
            } catch (const ParseError &e) {
                throw ConfigError(e.what());
            }
        }
        read(g, "init_scale", c.init_scale, "generator");
    }
    c.quantum.kind = c.generator_kind == GeneratorKind::QuantumSimple
                         ? AnsatzKind::Simple
                         : AnsatzKind::BEL;
    if (j.contains("train")) {
        const auto &t = j.at("train");
        detail::check_keys(t, "train",
                           {"learning_rate", "beta1", "beta2", "lambda_gp",
                            "n_critic", "epochs", "batch_size"});
        read(t, "learning_rate", c.train.learning_rate, "train");
        read(t, "beta1", c.train.beta1, "train");
        read(t, "beta2", c.train.beta2, "train");
        read(t, "lambda_gp", c.train.lambda_gp, "train");
        read(t, "n_critic", c.train.n_critic, "train");
        read(t, "epochs", c.train.epochs, "train");
        read(t, "batch_size", c.train.batch_size, "train");
    }
    if (j.contains("data")) {
        const auto &d = j.at("data");
        detail::check_keys(d, "data", {"path", "distribution", "dim", "n", "seed"});
        read(d, "path", c.data.path, "data");
        std::string s;
        if (read(d, "distribution", s, "data"), !s.empty()) {
            c.data.spec.kind = parse_distribution(s);
        }
        read(d, "dim", c.data.spec.dim, "data");
        read(d, "n", c.data.n, "data");
        read(d, "seed", c.data.seed, "data");
    }
    if (j.contains("rng") && j.at("rng") != std::string(kRngAlgorithm)) {
        throw ConfigError("config was written with random streams '" +
                          j.at("rng").dump() + "', this build uses '" +
                          std::string(kRngAlgorithm) + "'");
    }
    detail::read(j, "seeds", c.seeds, "config");
    detail::read(j, "output_dir", c.output_dir, "config");
    c.train.generator_kind = c.generator_kind;
    return c;
}

inline RunConfig load_run_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path + "'");
    }
    try {
        return run_config_from_json(Json::parse(in));
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
}

/// Fully resolved configuration; loading it back gives the same RunConfig.
inline Json to_json(const RunConfig &c) {
    Json j;
    j["generator"] = {{"kind", std::string(to_string(c.generator_kind))},
                      {"n_qb", c.quantum.n_qb},
                      {"n_layers", c.quantum.n_layers},
                      {"readout", std::string(to_string(c.quantum.readout))},
                      {"gain", c.quantum.output_scale.gain},
                      {"offset", c.quantum.output_scale.offset},
                      {"noise", std::string(to_string(c.quantum.noise))},
                      {"init_scale", c.init_scale}};
    j["train"] = {{"learning_rate", c.train.learning_rate},
                  {"beta1", c.train.beta1},
                  {"beta2", c.train.beta2},
                  {"lambda_gp", c.train.lambda_gp},
                  {"n_critic", c.train.n_critic},
                  {"epochs", c.train.epochs},
                  {"batch_size", c.train.batch_size}};
    if (c.data.path.empty()) {
        j["data"] = {{"distribution", to_string(c.data.spec.kind)},
                     {"dim", c.data.spec.dim},
                     {"n", c.data.n},
                     {"seed", c.data.seed}};
    } else {
        j["data"] = {{"path", c.data.path}, {"dim", c.data.spec.dim}};
    }
    j["seeds"] = c.seeds;
    j["output_dir"] = c.output_dir;
    j["rng"] = std::string(kRngAlgorithm);
    return j;
}

} // namespace qlgan::cli

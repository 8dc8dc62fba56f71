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
 * Flat text checkpoints.
 *
 * Line 1 lists header keys, line 2 their values, then one number per line.
 * Quantum generators store W then b in (q, l, k) order. Dense networks store
 * every trainable tensor in declaration order (matrices column-major), and
 * the classical generator appends its batch-norm running statistics.
 */
#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qlgan/ansatz.hpp"
#include "qlgan/error.hpp"
#include "qlgan/latent_data.hpp"
#include "qlgan/neural.hpp"
#include "qlgan/wgan.hpp"

namespace qlgan {

namespace detail {

struct FlatCheckpoint {
    std::map<std::string, std::string> header;
    std::vector<double> values;
};

inline void write_flat(const std::string &path,
                       const std::vector<std::pair<std::string, std::string>> &header,
                       const std::vector<std::span<const double>> &tensors) {
    auto out = open_for_writing(path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << header[i].first;
    }
    out << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << header[i].second;
    }
    out << '\n';
    for (const auto &t : tensors) {
        for (double v : t) {
            out << format_double(v) << '\n';
        }
    }
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

inline FlatCheckpoint read_flat(const std::string &path) {
    const auto lines = read_lines(path);
    if (lines.size() < 2) {
        throw ParseError("'" + path + "' is not a checkpoint");
    }
    const auto keys = split_commas(lines[0]);
    const auto vals = split_commas(lines[1]);
    if (keys.size() != vals.size()) {
        throw ParseError("checkpoint header keys and values differ", 2);
    }
    FlatCheckpoint ck;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        ck.header[std::string(keys[i])] = std::string(vals[i]);
    }
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto v = parse_double(lines[i]);
        if (!v) {
            throw ParseError("non-numeric checkpoint value", i + 1);
        }
        ck.values.push_back(*v);
    }
    return ck;
}

inline const std::string &require(const FlatCheckpoint &ck,
                                  const std::string &key) {
    const auto it = ck.header.find(key);
    if (it == ck.header.end()) {
        throw ParseError("checkpoint header lacks '" + key + "'");
    }
    return it->second;
}

inline int require_int(const FlatCheckpoint &ck, const std::string &key) {
    const auto v = parse_double(require(ck, key));
    if (!v || *v != static_cast<int>(*v)) {
        throw ParseError("checkpoint field '" + key + "' is not an integer");
    }
    return static_cast<int>(*v);
}

inline double require_double(const FlatCheckpoint &ck, const std::string &key) {
    const auto v = parse_double(require(ck, key));
    if (!v) {
        throw ParseError("checkpoint field '" + key + "' is not a number");
    }
    return *v;
}

inline void fill_tensors(const std::vector<double> &values, std::size_t &offset,
                         const std::vector<std::span<double>> &tensors) {
    for (auto t : tensors) {
        if (offset + t.size() > values.size()) {
            throw ParseError("checkpoint is shorter than the model");
        }
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset),
                    t.size(), t.begin());
        offset += t.size();
    }
}

inline std::vector<std::span<const double>>
as_const(const std::vector<std::span<double>> &v) {
    return {v.begin(), v.end()};
}

} // namespace detail

inline AnsatzKind parse_ansatz_kind(const std::string &s) {
    if (s == "simple") {
        return AnsatzKind::Simple;
    }
    if (s == "bel") {
        return AnsatzKind::BEL;
    }
    throw ParseError("unknown ansatz '" + s + "'");
}

inline Readout parse_readout(const std::string &s) {
    if (s == "single") {
        return Readout::Single;
    }
    if (s == "dual") {
        return Readout::Dual;
    }
    throw ParseError("unknown readout '" + s + "'");
}

inline NoiseDistribution parse_noise(const std::string &s) {
    if (s == "normal") {
        return NoiseDistribution::StandardNormal;
    }
    if (s == "uniform") {
        return NoiseDistribution::Uniform01;
    }
    throw ParseError("unknown noise distribution '" + s + "'");
}

inline void save_quantum_generator(const QuantumGenerator &g,
                                   const std::string &path) {
    const auto &c = g.config();
    detail::write_flat(
        path,
        {{"kind", std::string(to_string(c.kind))},
         {"n_qb", std::to_string(c.n_qb)},
         {"n_l", std::to_string(c.n_layers)},
         {"readout", std::string(to_string(c.readout))},
         {"gain", detail::format_double(c.output_scale.gain)},
         {"offset", detail::format_double(c.output_scale.offset)},
         {"noise", std::string(to_string(c.noise))}},
        {g.params().weights(), g.params().biases()});
}

inline void save_classical_generator(ClassicalGenerator &g,
                                     const std::string &path) {
    auto tensors = detail::as_const(g.network().parameters());
    for (auto b : g.network().buffers()) {
        tensors.emplace_back(b);
    }
    detail::write_flat(path,
                       {{"kind", "classical"},
                        {"latent_dim", std::to_string(g.latent_dim())},
                        {"noise", std::string(to_string(g.noise_distribution()))}},
                       tensors);
}

inline void save_generator(LatentGenerator &g, const std::string &path) {
    if (auto *q = dynamic_cast<QuantumGenerator *>(&g)) {
        save_quantum_generator(*q, path);
    } else if (auto *c = dynamic_cast<ClassicalGenerator *>(&g)) {
        save_classical_generator(*c, path);
    } else {
        throw ArgumentError("unknown generator type");
    }
}

inline std::unique_ptr<LatentGenerator> load_generator(const std::string &path) {
    const auto ck = detail::read_flat(path);
    const auto &kind = detail::require(ck, "kind");
    std::size_t offset = 0;
    std::unique_ptr<LatentGenerator> out;
    if (kind == "classical") {
        auto net = MlpGenerator(detail::require_int(ck, "latent_dim"));
        detail::fill_tensors(ck.values, offset, net.parameters());
        detail::fill_tensors(ck.values, offset, net.buffers());
        out = std::make_unique<ClassicalGenerator>(
            std::move(net), parse_noise(detail::require(ck, "noise")));
    } else {
        GeneratorConfig cfg;
        cfg.kind = parse_ansatz_kind(kind);
        cfg.n_qb = detail::require_int(ck, "n_qb");
        cfg.n_layers = detail::require_int(ck, "n_l");
        cfg.readout = parse_readout(detail::require(ck, "readout"));
        cfg.output_scale = {detail::require_double(ck, "gain"),
                            detail::require_double(ck, "offset")};
        cfg.noise = parse_noise(detail::require(ck, "noise"));
        try {
            cfg.validate();
        } catch (const ConfigError &e) {
            throw ParseError(std::string("invalid checkpoint header: ") + e.what());
        }
        StyleParams params = StyleParams::zeros(cfg);
        detail::fill_tensors(ck.values, offset,
                             {params.weights(), params.biases()});
        out = std::make_unique<QuantumGenerator>(cfg, std::move(params));
    }
    if (offset != ck.values.size()) {
        throw ParseError("checkpoint has " +
                         std::to_string(ck.values.size() - offset) +
                         " trailing values");
    }
    return out;
}

inline void save_discriminator(MlpDiscriminator &d, const std::string &path) {
    std::string widths = std::to_string(d.input_dim());
    for (const auto &l : d.layers()) {
        widths += ";" + std::to_string(l.out_dim());
    }
    detail::write_flat(path, {{"kind", "critic"}, {"widths", widths}},
                       detail::as_const(d.parameters()));
}

inline MlpDiscriminator load_discriminator(const std::string &path) {
    const auto ck = detail::read_flat(path);
    if (detail::require(ck, "kind") != "critic") {
        throw ParseError("'" + path + "' is not a critic checkpoint");
    }
    std::vector<int> widths;
    for (auto w : [&] {
             std::string s = detail::require(ck, "widths");
             std::vector<std::string> parts;
             std::size_t start = 0;
             while (true) {
                 const auto pos = s.find(';', start);
                 parts.push_back(s.substr(start, pos - start));
                 if (pos == std::string::npos) {
                     break;
                 }
                 start = pos + 1;
             }
             return parts;
         }()) {
        const auto v = detail::parse_double(w);
        if (!v || *v < 1) {
            throw ParseError("bad critic width '" + w + "'");
        }
        widths.push_back(static_cast<int>(*v));
    }
    if (widths.size() < 2) {
        throw ParseError("critic needs at least one layer");
    }
    std::vector<DenseLayer> layers;
    for (std::size_t i = 1; i < widths.size(); ++i) {
        layers.emplace_back(widths[i - 1], widths[i]);
    }
    MlpDiscriminator d(std::move(layers));
    std::size_t offset = 0;
    detail::fill_tensors(ck.values, offset, d.parameters());
    if (offset != ck.values.size()) {
        throw ParseError("critic checkpoint has trailing values");
    }
    return d;
}

} // namespace qlgan

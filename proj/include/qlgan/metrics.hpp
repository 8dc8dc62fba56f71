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
 * Distribution metrics and the direction-aware Z0 significance used to
 * compare scenarios (multi-seed mean +- std per metric).
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qlgan/error.hpp"
#include "qlgan/latent_data.hpp"
#include "qlgan/linalg.hpp"

namespace qlgan {

/**
 * Order-1 Wasserstein distance between two empirical distributions,
 * integral over t in [0, 1] of |F_a^-1(t) - F_b^-1(t)|. The quantile
 * functions are step functions with breaks at i/n and j/m, so the integral
 * is evaluated exactly on the merged breakpoints.
 */
inline double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw ArgumentError("wasserstein_1d needs non-empty samples");
    }
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const auto n = static_cast<std::uint64_t>(x.size());
    const auto m = static_cast<std::uint64_t>(y.size());
    // Positions along [0, 1] are measured in units of 1 / (n m).
    std::uint64_t pos = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    double acc = 0.0;
    while (i < x.size() && j < y.size()) {
        const std::uint64_t end_a = (i + 1) * m;
        const std::uint64_t end_b = (j + 1) * n;
        const std::uint64_t end = std::min(end_a, end_b);
        acc += static_cast<double>(end - pos) * std::abs(x[i] - y[j]);
        pos = end;
        if (end_a == end) {
            ++i;
        }
        if (end_b == end) {
            ++j;
        }
    }
    return acc / static_cast<double>(n * m);
}

/// Column-wise wasserstein_1d between two sample matrices of equal width.
inline std::vector<double> wasserstein_per_dim(const Matrix &a, const Matrix &b) {
    if (a.cols() != b.cols()) {
        throw ArgumentError("sample matrices have " + std::to_string(a.cols()) +
                            " and " + std::to_string(b.cols()) + " columns");
    }
    std::vector<double> out;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const Vector x = a.col(c);
        const Vector y = b.col(c);
        out.push_back(wasserstein_1d({x.data(), static_cast<std::size_t>(x.size())},
                                     {y.data(), static_cast<std::size_t>(y.size())}));
    }
    return out;
}

inline double mean_wasserstein(const Matrix &a, const Matrix &b) {
    const auto w = wasserstein_per_dim(a, b);
    double acc = 0.0;
    for (double v : w) {
        acc += v;
    }
    return acc / static_cast<double>(w.size());
}

enum class Direction { Maximize, Minimize };

struct MetricRecord {
    std::string name;
    double mean = 0.0;
    double std = 0.0;
    Direction direction = Direction::Maximize;
};

struct ScenarioTable {
    std::string name;
    std::vector<MetricRecord> metrics;

    const MetricRecord *find(const std::string &metric) const {
        for (const auto &m : metrics) {
            if (m.name == metric) {
                return &m;
            }
        }
        return nullptr;
    }
};

/**
 * Delta / sqrt(sigma_ref^2 + sigma_test^2), with Delta = mu_test - mu_ref
 * for maximized metrics and mu_ref - mu_test for minimized ones. Positive
 * values mean the test scenario improves on the reference.
 */
inline double z0_metric(const MetricRecord &ref, const MetricRecord &test) {
    if (ref.direction != test.direction) {
        throw ArgumentError("metric '" + ref.name +
                            "' has conflicting directions");
    }
    const double var = ref.std * ref.std + test.std * test.std;
    if (!(var > 0.0)) {
        throw UndefinedError("Z0 of metric '" + ref.name +
                             "' is undefined: both standard deviations are 0");
    }
    const double delta = ref.direction == Direction::Maximize
                             ? test.mean - ref.mean
                             : ref.mean - test.mean;
    return delta / std::sqrt(var);
}

namespace detail {

inline void check_same_metrics(const ScenarioTable &ref,
                               const ScenarioTable &test) {
    std::set<std::string> a;
    std::set<std::string> b;
    for (const auto &m : ref.metrics) {
        a.insert(m.name);
    }
    for (const auto &m : test.metrics) {
        b.insert(m.name);
    }
    if (a == b) {
        return;
    }
    std::string msg = "metric sets differ between '" + ref.name + "' and '" +
                      test.name + "':";
    for (const auto &n : a) {
        if (!b.count(n)) {
            msg += " missing '" + n + "' in test;";
        }
    }
    for (const auto &n : b) {
        if (!a.count(n)) {
            msg += " unexpected '" + n + "' in test;";
        }
    }
    throw ArgumentError(msg);
}

} // namespace detail

/// Per-metric Z0 in the reference table's metric order.
inline std::vector<double> z0_breakdown(const ScenarioTable &ref,
                                        const ScenarioTable &test) {
    detail::check_same_metrics(ref, test);
    std::vector<double> out;
    for (const auto &m : ref.metrics) {
        out.push_back(z0_metric(m, *test.find(m.name)));
    }
    return out;
}

/// Mean of the per-metric Z0 values.
inline double z0_average(const ScenarioTable &ref, const ScenarioTable &test) {
    const auto z = z0_breakdown(ref, test);
    if (z.empty()) {
        throw ArgumentError("no metrics to compare");
    }
    double sum = 0.0;
    for (double v : z) {
        sum += v;
    }
    return sum / static_cast<double>(z.size());
}

/// Mean and sample standard deviation (n - 1) over repeated runs.
inline MetricRecord aggregate_seeds(std::span<const double> values,
                                    std::string name = {},
                                    Direction direction = Direction::Maximize) {
    if (values.size() < 2) {
        throw ArgumentError("aggregation needs at least two runs");
    }
    // Sorted summation keeps the result independent of run order.
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    if (v.front() == v.back()) {
        return {std::move(name), v.front(), 0.0, direction};
    }
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return {std::move(name), mean,
            std::sqrt(ss / static_cast<double>(v.size() - 1)), direction};
}

struct CorrelationMatrix {
    Matrix values;                     ///< NaN where undefined
    std::vector<int> undefined_columns; ///< zero-variance columns

    bool defined(int i, int j) const {
        return !std::isnan(values(i, j));
    }
};

/// Pearson correlations between dataset columns.
inline CorrelationMatrix correlation_matrix(const LatentDataset &data) {
    if (data.size() < 2) {
        throw ArgumentError("correlation needs at least two rows");
    }
    const Matrix centered = data.rows.rowwise() - data.rows.colwise().mean();
    const Matrix cov = centered.transpose() * centered;
    const int d = data.dim();
    CorrelationMatrix out;
    out.values.resize(d, d);
    for (int c = 0; c < d; ++c) {
        if (!(cov(c, c) > 0.0)) {
            out.undefined_columns.push_back(c);
        }
    }
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (!(cov(i, i) > 0.0) || !(cov(j, j) > 0.0)) {
                out.values(i, j) = std::numeric_limits<double>::quiet_NaN();
            } else if (i == j) {
                out.values(i, j) = 1.0;
            } else if (j < i) {
                out.values(i, j) = out.values(j, i);
            } else {
                out.values(i, j) = std::clamp(
                    cov(i, j) / std::sqrt(cov(i, i) * cov(j, j)), -1.0, 1.0);
            }
        }
    }
    return out;
}

// --- scenario tables ----------------------------------------------------------

inline Direction parse_direction(std::string token, std::size_t line = 0) {
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (token == "max" || token == "maximize") {
        return Direction::Maximize;
    }
    if (token == "min" || token == "minimize") {
        return Direction::Minimize;
    }
    throw ParseError("unknown direction '" + token + "'", line);
}

inline std::string_view to_string(Direction d) {
    return d == Direction::Maximize ? "max" : "min";
}

/**
 * Reads a scenario CSV with columns name, mean, std, direction (header line
 * optional). The scenario is named after the file stem.
 */
inline ScenarioTable load_scenario_table(const std::string &path) {
    const auto lines = detail::read_lines(path);
    ScenarioTable table;
    table.name = std::filesystem::path(path).stem().string();
    std::set<std::string> seen;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto trimmed = detail::trim(lines[i]);
        if (trimmed.empty() || trimmed.front() == '#') {
            continue;
        }
        const auto cells = detail::split_commas(lines[i]);
        if (cells.size() != 4) {
            throw ParseError("expected 4 columns (name, mean, std, direction)",
                             i + 1);
        }
        if (table.metrics.empty() && seen.empty() && cells[0] == "name") {
            continue;
        }
        MetricRecord rec;
        rec.name = std::string(cells[0]);
        const auto mean = detail::parse_double(cells[1]);
        const auto sd = detail::parse_double(cells[2]);
        if (rec.name.empty() || !mean || !sd) {
            throw ParseError("malformed metric row", i + 1);
        }
        if (*sd < 0.0) {
            throw ParseError("negative standard deviation", i + 1);
        }
        rec.mean = *mean;
        rec.std = *sd;
        rec.direction = parse_direction(std::string(cells[3]), i + 1);
        if (!seen.insert(rec.name).second) {
            throw ParseError("duplicate metric '" + rec.name + "'", i + 1);
        }
        table.metrics.push_back(std::move(rec));
    }
    if (table.metrics.empty()) {
        throw ParseError("'" + path + "' contains no metrics");
    }
    return table;
}

inline void save_scenario_table(const ScenarioTable &t, const std::string &path) {
    auto out = detail::open_for_writing(path);
    out << "name,mean,std,direction\n";
    for (const auto &m : t.metrics) {
        out << m.name << ',' << detail::format_double(m.mean) << ','
            << detail::format_double(m.std) << ',' << to_string(m.direction)
            << '\n';
    }
}

/**
 * Long-format comparison report: one row per (scenario, metric) and one
 * "<Z0>" row per scenario holding the average.
 */
inline void write_comparison_csv(const ScenarioTable &ref,
                                 const std::vector<ScenarioTable> &tests,
                                 const std::string &path) {
    auto out = detail::open_for_writing(path);
    out << "scenario,metric,ref_mean,ref_std,test_mean,test_std,z0\n";
    for (const auto &t : tests) {
        const auto z = z0_breakdown(ref, t);
        for (std::size_t k = 0; k < ref.metrics.size(); ++k) {
            const auto &r = ref.metrics[k];
            const auto &m = *t.find(r.name);
            out << t.name << ',' << r.name << ','
                << detail::format_double(r.mean) << ','
                << detail::format_double(r.std) << ','
                << detail::format_double(m.mean) << ','
                << detail::format_double(m.std) << ','
                << detail::format_double(z[k]) << '\n';
        }
        out << t.name << ",<Z0>,,,,," << detail::format_double(z0_average(ref, t))
            << '\n';
    }
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

/// Console table: metric rows, one "mean +- std | Z0" column per scenario.
inline void print_comparison_table(std::ostream &os, const ScenarioTable &ref,
                                   const std::vector<ScenarioTable> &tests) {
    auto cell = [](double mean, double sd) {
        std::ostringstream s;
        s << std::setprecision(4) << mean << " +- " << sd;
        return s.str();
    };
    std::vector<std::vector<double>> z;
    for (const auto &t : tests) {
        z.push_back(z0_breakdown(ref, t));
    }
    os << std::left << std::setw(14) << "metric" << std::setw(22) << ref.name;
    for (const auto &t : tests) {
        os << std::setw(22) << t.name << std::setw(9) << "Z0";
    }
    os << '\n';
    for (std::size_t k = 0; k < ref.metrics.size(); ++k) {
        const auto &r = ref.metrics[k];
        os << std::setw(14) << r.name << std::setw(22) << cell(r.mean, r.std);
        for (std::size_t s = 0; s < tests.size(); ++s) {
            const auto &m = *tests[s].find(r.name);
            std::ostringstream zs;
            zs << std::showpos << std::fixed << std::setprecision(2) << z[s][k];
            os << std::setw(22) << cell(m.mean, m.std) << std::setw(9)
               << zs.str();
        }
        os << '\n';
    }
    os << std::setw(14) << "<Z0>" << std::setw(22) << "reference";
    for (const auto &t : tests) {
        std::ostringstream zs;
        zs << std::showpos << std::fixed << std::setprecision(2)
           << z0_average(ref, t);
        os << std::setw(22) << "--" << std::setw(9) << zs.str();
    }
    os << '\n';
}

} // namespace qlgan

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
 * Latent datasets: CSV and binary interchange, synthetic target
 * distributions, and epoch batching.
 *
 * CSV: comma separated, '.' decimal point, one vector per line, optional
 * single header line (detected when the first line is not numeric).
 * Binary: 16-byte header ("QLGANLAT", u32 version, u32 reserved), u64 rows,
 * u64 dim, then rows*dim little-endian IEEE-754 doubles in row-major order.
 */
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qlgan/error.hpp"
#include "qlgan/linalg.hpp"
#include "qlgan/random.hpp"

namespace qlgan {

struct LatentDataset {
    Matrix rows; ///< n x dim

    LatentDataset() = default;
    explicit LatentDataset(Matrix m) : rows(std::move(m)) {
        if (rows.cols() < 1) {
            throw ArgumentError("latent dataset needs dim >= 1");
        }
        if (!rows.allFinite()) {
            throw ArgumentError("latent dataset contains non-finite values");
        }
    }

    int dim() const { return static_cast<int>(rows.cols()); }
    std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
};

// --- text helpers ----------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                          s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return cells;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return std::nullopt;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

/// Shortest representation that parses back to exactly `v`.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

inline std::vector<std::string> read_lines(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(line);
    }
    while (!lines.empty() && trim(lines.back()).empty()) {
        lines.pop_back();
    }
    return lines;
}

inline std::ofstream open_for_writing(const std::string &path,
                                      std::ios::openmode extra = {}) {
    std::ofstream out(path, std::ios::out | std::ios::trunc | extra);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    return out;
}

} // namespace detail

struct CsvTable {
    std::vector<std::string> header; ///< empty when the file had none
    Matrix values;
};

inline CsvTable load_numeric_csv(const std::string &path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) {
        throw ParseError("'" + path + "' is empty");
    }
    CsvTable table;
    std::size_t first = 0;
    {
        const auto cells = detail::split_commas(lines[0]);
        const bool numeric = std::all_of(
            cells.begin(), cells.end(),
            [](std::string_view c) { return detail::parse_double(c).has_value(); });
        if (!numeric) {
            for (auto c : cells) {
                table.header.emplace_back(c);
            }
            first = 1;
        }
    }
    if (first == lines.size()) {
        throw ParseError("'" + path + "' has a header but no data rows");
    }
    std::vector<double> flat;
    std::size_t width = table.header.size();
    std::size_t n_rows = 0;
    for (std::size_t i = first; i < lines.size(); ++i) {
        const auto cells = detail::split_commas(lines[i]);
        if (width == 0) {
            width = cells.size();
        }
        if (cells.size() != width) {
            throw ParseError("expected " + std::to_string(width) +
                                 " columns, found " +
                                 std::to_string(cells.size()),
                             i + 1);
        }
        for (auto c : cells) {
            const auto v = detail::parse_double(c);
            if (!v) {
                throw ParseError("non-numeric cell '" + std::string(c) + "'",
                                 i + 1);
            }
            flat.push_back(*v);
        }
        ++n_rows;
    }
    table.values.resize(static_cast<Eigen::Index>(n_rows),
                        static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            table.values(static_cast<Eigen::Index>(r),
                         static_cast<Eigen::Index>(c)) = flat[r * width + c];
        }
    }
    return table;
}

inline void save_numeric_csv(const Matrix &values, const std::string &path,
                             const std::vector<std::string> &header = {}) {
    auto out = detail::open_for_writing(path);
    if (!header.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            out << (c ? "," : "") << header[c];
        }
        out << '\n';
    }
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            out << (c ? "," : "") << detail::format_double(values(r, c));
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

inline LatentDataset load_csv(const std::string &path) {
    auto table = load_numeric_csv(path);
    if (!table.values.allFinite()) {
        throw ParseError("'" + path + "' contains non-finite values");
    }
    return LatentDataset(std::move(table.values));
}

inline void save_csv(const LatentDataset &data, const std::string &path) {
    save_numeric_csv(data.rows, path);
}

// --- binary mirror ----------------------------------------------------------

inline constexpr std::array<char, 8> kBinaryMagic = {'Q', 'L', 'G', 'A',
                                                     'N', 'L', 'A', 'T'};
inline constexpr std::uint32_t kBinaryVersion = 1;

namespace detail {

template <class T> void write_le(std::ostream &out, T value) {
    std::array<char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    out.write(bytes.data(), sizeof(T));
}

template <class T> T read_le(std::istream &in) {
    std::array<char, sizeof(T)> bytes{};
    if (!in.read(bytes.data(), sizeof(T))) {
        throw ParseError("truncated binary file");
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

} // namespace detail

inline void save_binary(const LatentDataset &data, const std::string &path) {
    auto out = detail::open_for_writing(path, std::ios::binary);
    out.write(kBinaryMagic.data(), kBinaryMagic.size());
    detail::write_le<std::uint32_t>(out, kBinaryVersion);
    detail::write_le<std::uint32_t>(out, 0);
    detail::write_le<std::uint64_t>(out, data.size());
    detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(data.dim()));
    for (Eigen::Index r = 0; r < data.rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < data.rows.cols(); ++c) {
            detail::write_le<double>(out, data.rows(r, c));
        }
    }
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

inline LatentDataset load_binary(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kBinaryMagic) {
        throw ParseError("'" + path + "' is not a latent binary file");
    }
    const auto version = detail::read_le<std::uint32_t>(in);
    if (version != kBinaryVersion) {
        throw ParseError("unsupported binary version " + std::to_string(version));
    }
    detail::read_le<std::uint32_t>(in);
    const auto n = detail::read_le<std::uint64_t>(in);
    const auto dim = detail::read_le<std::uint64_t>(in);
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = detail::read_le<double>(in);
        }
    }
    return LatentDataset(std::move(m));
}

// --- synthetic targets -------------------------------------------------------

enum class DistributionKind { Uniform01, StandardNormal, ShiftedLogNormal, SinThreePeak };

struct DistributionSpec {
    DistributionKind kind = DistributionKind::StandardNormal;
    int dim = 10;
    double lognormal_mu = 0.0;
    double lognormal_sigma = 0.558;
    double lognormal_shift = -2.0;
    double sin_half_range = 3.0;

    void validate() const {
        if (dim < 1) {
            throw ConfigError("distribution dim must be positive");
        }
        if (!(lognormal_sigma > 0.0)) {
            throw ConfigError("log-normal sigma must be positive");
        }
    }
};

/**
 * Density proportional to cos^2(pi x / 2) on [-r, r]; for r = 3 it has
 * peaks at -2, 0, 2 and zeros at +-1, +-3. Sampled by rejection.
 */
inline double sample_sin_three_peak(Rng &rng, double half_range) {
    std::uniform_real_distribution<double> x_dist(-half_range, half_range);
    while (true) {
        const double x = x_dist(rng);
        const double c = std::cos(std::numbers::pi * x / 2.0);
        if (uniform01(rng) < c * c) {
            return x;
        }
    }
}

inline LatentDataset sample_synthetic(const DistributionSpec &spec, int n,
                                      std::uint64_t seed) {
    spec.validate();
    if (n < 1) {
        throw ArgumentError("sample count must be positive");
    }
    Rng rng = make_stream(seed, "synthetic");
    std::lognormal_distribution<double> lognormal(spec.lognormal_mu,
                                                  spec.lognormal_sigma);
    Matrix m(n, spec.dim);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < spec.dim; ++c) {
            double v = 0.0;
            switch (spec.kind) {
            case DistributionKind::Uniform01:
                v = uniform01(rng);
                break;
            case DistributionKind::StandardNormal:
                v = standard_normal(rng);
                break;
            case DistributionKind::ShiftedLogNormal:
                v = lognormal(rng) + spec.lognormal_shift;
                break;
            case DistributionKind::SinThreePeak:
                v = sample_sin_three_peak(rng, spec.sin_half_range);
                break;
            }
            m(r, c) = v;
        }
    }
    return LatentDataset(std::move(m));
}

// --- batching ----------------------------------------------------------------

/**
 * Index batches for one epoch. With shuffle the order is a permutation drawn
 * from `rng`; a trailing partial batch is dropped when drop_last is set.
 */
inline std::vector<std::vector<Eigen::Index>>
batch_indices(std::size_t n, int batch_size, Rng &rng, bool shuffle,
              bool drop_last = true) {
    if (batch_size < 1) {
        throw ArgumentError("batch_size must be positive");
    }
    if (static_cast<std::size_t>(batch_size) > n) {
        throw ArgumentError("batch_size " + std::to_string(batch_size) +
                            " exceeds dataset size " + std::to_string(n));
    }
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    if (shuffle) {
        std::shuffle(order.begin(), order.end(), rng);
    }
    std::vector<std::vector<Eigen::Index>> out;
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t end = std::min(n, start + batch_size);
        if (drop_last && end - start < static_cast<std::size_t>(batch_size)) {
            break;
        }
        out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

/// Epoch `epoch` batches; a pure function of (n, batch_size, seed, epoch).
inline std::vector<std::vector<Eigen::Index>>
batches(const LatentDataset &data, int batch_size, std::uint64_t seed,
        bool shuffle, std::uint64_t epoch = 0, bool drop_last = true) {
    Rng rng = make_stream(seed, "batches", epoch);
    return batch_indices(data.size(), batch_size, rng, shuffle, drop_last);
}

inline Matrix gather_rows(const LatentDataset &data,
                          const std::vector<Eigen::Index> &idx) {
    Matrix out(static_cast<Eigen::Index>(idx.size()), data.rows.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = data.rows.row(idx[i]);
    }
    return out;
}

} // namespace qlgan

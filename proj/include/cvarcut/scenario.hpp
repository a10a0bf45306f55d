#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cvarcut/rng.hpp"
#include "cvarcut/types.hpp"

namespace cvarcut {

// J x n matrix of simulated per-scenario, per-instrument monetary values,
// immutable after construction.
class ScenarioMatrix {
public:
    ScenarioMatrix(RowMatrix values, std::vector<std::string> instrument_names)
        : values_(std::move(values)), names_(std::move(instrument_names)) {
        if (values_.rows() < 1 || values_.cols() < 1) {
            throw std::invalid_argument("ScenarioMatrix: dimensions must be at least 1x1");
        }
        if (!values_.allFinite()) {
            throw std::invalid_argument("ScenarioMatrix: entries must be finite");
        }
        if (static_cast<Index>(names_.size()) != values_.cols()) {
            throw std::invalid_argument("ScenarioMatrix: need one instrument name per column");
        }
        std::unordered_set<std::string_view> seen;
        for (const auto& name : names_) {
            if (!seen.insert(name).second) {
                throw std::invalid_argument("ScenarioMatrix: duplicate instrument name '" + name + "'");
            }
        }
    }

    const RowMatrix& values() const { return values_; }
    const std::vector<std::string>& instrument_names() const { return names_; }
    Index scenarios() const { return values_.rows(); }
    Index instruments() const { return values_.cols(); }

private:
    RowMatrix values_;
    std::vector<std::string> names_;
};

// Expected per-unit instrument values; p' * x is the expected altered
// portfolio value.
struct ProfitVector {
    Vec p;

    explicit ProfitVector(Vec values) : p(std::move(values)) {
        if (p.size() < 1 || !p.allFinite()) {
            throw std::invalid_argument("ProfitVector: entries must be finite and non-empty");
        }
    }
};

struct GeneratorSpec {
    Index scenarios = 0;    // J
    Index instruments = 0;  // n
    Index num_factors = 100;
    std::uint64_t seed = 0;
};

namespace detail {

// Substream ids for the generator. F and L never share draws.
inline constexpr std::uint64_t kFactorStream = 0;
inline constexpr std::uint64_t kLoadingStream = 1;

// One factor-matrix entry: 2 - e^N with N standard normal. Support
// (-inf, 2], mean 2 - sqrt(e).
inline double sample_factor_entry(RandomStream& rng) {
    return 2.0 - std::exp(rng.normal());
}

} // namespace detail

// Synthetic scenario matrix Y = F * L: F is J x f with entries 2 - e^N,
// L is f x n with entries uniform on [0, 1). Entries are drawn row-major
// per matrix, F from substream 0 of the seed and L from substream 1, so the
// result is a pure function of the spec. F is generated in fixed-size row
// blocks and multiplied into Y block-wise; the block size does not affect
// the draw order.
inline ScenarioMatrix generate_synthetic(const GeneratorSpec& spec) {
    if (spec.scenarios < 1 || spec.instruments < 1 || spec.num_factors < 1) {
        throw std::invalid_argument("generate_synthetic: J, n and num_factors must be at least 1");
    }
    const Index J = spec.scenarios;
    const Index n = spec.instruments;
    const Index f = spec.num_factors;

    RandomStream rng_L(spec.seed, detail::kLoadingStream);
    RowMatrix L(f, n);
    for (Index k = 0; k < f; ++k) {
        for (Index i = 0; i < n; ++i) {
            L(k, i) = rng_L.uniform01();
        }
    }

    RandomStream rng_F(spec.seed, detail::kFactorStream);
    RowMatrix Y(J, n);
    constexpr Index kBlockRows = 4096;
    RowMatrix F_block(std::min(J, kBlockRows), f);
    for (Index row = 0; row < J; row += kBlockRows) {
        const Index rows = std::min(kBlockRows, J - row);
        for (Index j = 0; j < rows; ++j) {
            for (Index k = 0; k < f; ++k) {
                F_block(j, k) = detail::sample_factor_entry(rng_F);
            }
        }
        Y.middleRows(row, rows).noalias() = F_block.topRows(rows) * L;
    }

    std::vector<std::string> names(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        names[static_cast<std::size_t>(i)] = "i" + std::to_string(i + 1);
    }
    return ScenarioMatrix(std::move(Y), std::move(names));
}

// p_i = mean of column i.
inline ProfitVector column_means(const ScenarioMatrix& Y) {
    return ProfitVector(Y.values().colwise().mean().transpose());
}

// Altered outcome vector Y * x.
inline Vec outcome_vector(const ScenarioMatrix& Y, const Vec& x) {
    if (x.size() != Y.instruments()) {
        throw std::invalid_argument("outcome_vector: position vector has length " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(Y.instruments()));
    }
    if (!x.allFinite()) {
        throw std::invalid_argument("outcome_vector: position vector must be finite");
    }
    return Y.values() * x;
}

namespace detail {

// Shortest decimal form that parses back to the same double.
inline void append_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

inline double parse_double_field(std::string_view field, std::size_t line, std::size_t column) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw std::runtime_error("CSV parse error at row " + std::to_string(line) +
                                 ", column " + std::to_string(column) + ": '" +
                                 std::string(field) + "' is not a number");
    }
    return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

} // namespace detail

// Scenario CSV: one header row of instrument names, then J comma-separated
// numeric rows. UTF-8, '.' decimal point, no quoting.
inline void save_csv(const ScenarioMatrix& Y, const std::filesystem::path& path) {
    for (const auto& name : Y.instrument_names()) {
        if (name.empty() || name.find_first_of(",\n\r") != std::string::npos) {
            throw std::invalid_argument("save_csv: instrument name '" + name +
                                        "' cannot be written unquoted");
        }
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("save_csv: cannot open '" + path.string() + "' for writing");
    }
    std::string line;
    for (Index i = 0; i < Y.instruments(); ++i) {
        if (i > 0) line.push_back(',');
        line += Y.instrument_names()[static_cast<std::size_t>(i)];
    }
    line.push_back('\n');
    out << line;
    for (Index j = 0; j < Y.scenarios(); ++j) {
        line.clear();
        for (Index i = 0; i < Y.instruments(); ++i) {
            if (i > 0) line.push_back(',');
            detail::append_double(line, Y.values()(j, i));
        }
        line.push_back('\n');
        out << line;
    }
    if (!out) {
        throw std::runtime_error("save_csv: write to '" + path.string() + "' failed");
    }
}

inline ScenarioMatrix load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_csv: cannot open '" + path.string() + "'");
    }
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error("load_csv: '" + path.string() + "' is empty");
    }
    if (!header.empty() && header.back() == '\r') header.pop_back();

    std::vector<std::string> names;
    for (auto field : detail::split_fields(header)) {
        if (field.empty()) {
            throw std::runtime_error("load_csv: empty instrument name in header of '" +
                                     path.string() + "'");
        }
        names.emplace_back(field);
    }
    const std::size_t n = names.size();

    std::vector<double> data;
    std::string line;
    std::size_t line_no = 1; // header was line 1
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail::split_fields(line);
        if (fields.size() != n) {
            throw std::runtime_error("load_csv: row " + std::to_string(line_no) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(n));
        }
        for (std::size_t i = 0; i < n; ++i) {
            data.push_back(detail::parse_double_field(fields[i], line_no, i + 1));
        }
    }
    if (data.empty()) {
        throw std::runtime_error("load_csv: '" + path.string() + "' has no data rows");
    }
    const Index J = static_cast<Index>(data.size() / n);
    RowMatrix values(J, static_cast<Index>(n));
    std::copy(data.begin(), data.end(), values.data());
    return ScenarioMatrix(std::move(values), std::move(names));
}

} // namespace cvarcut

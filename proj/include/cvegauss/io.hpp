#pragma once

// File ingestion and output for the command-line front end: single-column
// (or column-selected) CSV, headerless little-endian float64, and the
// line-oriented key/value report.

#include "cvegauss/calibration.hpp"
#include "cvegauss/error.hpp"
#include "cvegauss/signal.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace cvegauss {

enum class InputFormat { Csv, RawF64Le };

inline const char* to_string(InputFormat f) { return f == InputFormat::Csv ? "csv" : "raw_f64le"; }

inline InputFormat parse_input_format(const std::string& name) {
    if (name == "csv") return InputFormat::Csv;
    if (name == "raw_f64le" || name == "raw") return InputFormat::RawF64Le;
    throw Error(ErrorKind::InvalidArgument, "unknown format '" + name + "' (expected csv or raw_f64le)");
}

struct InputSpec {
    std::string path;
    InputFormat format = InputFormat::Csv;
    std::size_t column = 0;
    double sample_rate_hz = 1.0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::optional<double> try_parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<std::string_view> csv_field(std::string_view line, std::size_t column) {
    for (std::size_t i = 0; i < column; ++i) {
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) return std::nullopt;
        line.remove_prefix(comma + 1);
    }
    return line.substr(0, line.find(','));
}

inline std::vector<double> read_csv_column(std::istream& in, std::size_t column) {
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto field = csv_field(line, column);
        if (!field) {
            throw Error(ErrorKind::InputError,
                        "line " + std::to_string(line_no) + " has no column " + std::to_string(column));
        }
        const auto value = try_parse_double(*field);
        if (!value) {
            if (out.empty() && line_no == 1) continue;  // header row
            throw Error(ErrorKind::InputError, "line " + std::to_string(line_no) + ": not a number: '" +
                                                   std::string(trim(*field)) + "'");
        }
        if (!std::isfinite(*value)) {
            throw Error(ErrorKind::InputError, "line " + std::to_string(line_no) + ": non-finite sample");
        }
        out.push_back(*value);
    }
    return out;
}

inline std::vector<double> decode_raw_f64le(const std::string& bytes) {
    if (bytes.size() % 8 != 0) throw Error(ErrorKind::InputError, "truncated raw file");
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t word = 0;
        std::memcpy(&word, bytes.data() + 8 * i, 8);
        if constexpr (std::endian::native == std::endian::big) word = __builtin_bswap64(word);
        out[i] = std::bit_cast<double>(word);
        if (!std::isfinite(out[i])) throw Error(ErrorKind::InputError, "non-finite sample in raw file");
    }
    return out;
}

}  // namespace detail

inline Signal read_signal(const InputSpec& spec) {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in) throw Error(ErrorKind::InputError, "cannot read input: " + spec.path);
    std::vector<double> samples;
    if (spec.format == InputFormat::Csv) {
        samples = detail::read_csv_column(in, spec.column);
    } else {
        const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        samples = detail::decode_raw_f64le(bytes);
    }
    if (samples.size() < 2) throw Error(ErrorKind::InputError, "input has fewer than 2 samples: " + spec.path);
    if (!(spec.sample_rate_hz > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample rate must be positive");
    return Signal(std::move(samples), spec.sample_rate_hz);
}

inline void write_samples(const std::string& path, InputFormat format, std::span<const double> samples) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::OutputError, "cannot write: " + path);
    if (format == InputFormat::Csv) {
        for (double v : samples) out << detail::format_double(v) << '\n';
    } else {
        for (double v : samples) {
            auto word = std::bit_cast<std::uint64_t>(v);
            if constexpr (std::endian::native == std::endian::big) word = __builtin_bswap64(word);
            char bytes[8];
            std::memcpy(bytes, &word, 8);
            out.write(bytes, 8);
        }
    }
    out.flush();
    if (!out) throw Error(ErrorKind::OutputError, "cannot write: " + path);
}

inline constexpr const char* kReportHeader = "cvegauss-report v1";

/// Ordered key/value report. Numeric fields must be finite.
class Report {
public:
    void add(const std::string& key, const std::string& value) { fields_.emplace_back(key, value); }

    void add(const std::string& key, const char* value) { add(key, std::string(value)); }

    void add(const std::string& key, double value) {
        require(std::isfinite(value), "report field '" + key + "' is not finite");
        add(key, detail::format_double(value));
    }

    template <typename Int>
        requires std::is_integral_v<Int>
    void add(const std::string& key, Int value) {
        add(key, std::to_string(value));
    }

    void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

    const std::vector<std::pair<std::string, std::string>>& fields() const noexcept { return fields_; }

    friend std::ostream& operator<<(std::ostream& out, const Report& r) {
        out << kReportHeader << '\n';
        for (const auto& [k, v] : r.fields_) out << k << ": " << v << '\n';
        return out;
    }

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

}  // namespace cvegauss

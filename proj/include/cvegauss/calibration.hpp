#pragma once

// Monte Carlo null distributions of the CVE under Gaussianity, their
// confidence intervals, and the on-disk calibration table format.

#include "cvegauss/error.hpp"
#include "cvegauss/generators.hpp"
#include "cvegauss/parallel.hpp"
#include "cvegauss/random.hpp"
#include "cvegauss/signal.hpp"
#include "cvegauss/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace cvegauss {

inline constexpr int kTableSchemaVersion = 1;
inline constexpr std::size_t kMinTrials = 1000;
inline constexpr std::size_t kCompressAboveTrials = 100000;
inline constexpr std::size_t kQuantileGridPoints = 1001;

/// Everything about the pipeline that changes the CVE a table was built with.
struct EstimatorMetadata {
    std::string rng_name = kRngName;
    std::string gaussian_sampler = kGaussianSampler;
    std::string hilbert_method = kHilbertMethod;
    std::string std_divisor = kStdDivisor;
    bool demean = false;

    friend bool operator==(const EstimatorMetadata&, const EstimatorMetadata&) = default;
};

struct NullDistribution {
    std::size_t n = 0;
    FilterSpec filter = FilterSpec::full_band();
    std::size_t trials = 0;
    /// Sorted ascending. Either every trial CVE, or a quantile grid at
    /// probabilities i / (size - 1) when `quantile_grid` is set.
    std::vector<double> cve_samples;
    bool quantile_grid = false;
    double mode = 0.0;
    double mean = 0.0;
    double std = 0.0;
    Seed seed{};
    EstimatorMetadata metadata{};

    /// Linear interpolation between order statistics (type 7). On a quantile
    /// grid the same rule interpolates between grid points.
    double quantile(double p) const {
        require(!cve_samples.empty(), "empty null distribution");
        require(p >= 0.0 && p <= 1.0, "probability must lie in [0, 1]");
        const double h = static_cast<double>(cve_samples.size() - 1) * p;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, cve_samples.size() - 1);
        return cve_samples[lo] + (h - static_cast<double>(lo)) * (cve_samples[hi] - cve_samples[lo]);
    }

    /// Same distribution reduced to a `points`-long quantile grid.
    NullDistribution compressed(std::size_t points = kQuantileGridPoints) const {
        require(points >= 2, "quantile grid needs at least two points");
        NullDistribution out = *this;
        out.cve_samples.resize(points);
        for (std::size_t i = 0; i < points; ++i) {
            out.cve_samples[i] = quantile(static_cast<double>(i) / static_cast<double>(points - 1));
        }
        out.quantile_grid = true;
        return out;
    }

    PipelineOptions pipeline() const {
        return {filter.is_full_band() ? std::nullopt : std::optional<FilterSpec>(filter), metadata.demean};
    }

    friend bool operator==(const NullDistribution&, const NullDistribution&) = default;
};

struct Histogram {
    double origin = 0.0;
    double width = 0.0;
    std::vector<std::size_t> counts;

    double center(std::size_t bin) const { return origin + (static_cast<double>(bin) + 0.5) * width; }
};

/// Histogram of sorted values with the Freedman-Diaconis bin width
/// 2 IQR / cbrt(count).
inline Histogram freedman_diaconis_histogram(std::span<const double> sorted) {
    require(sorted.size() >= 2, "histogram needs at least two values");
    auto type7 = [&](double p) {
        const double h = static_cast<double>(sorted.size() - 1) * p;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };
    const double lo = sorted.front();
    const double range = sorted.back() - lo;
    const double iqr = type7(0.75) - type7(0.25);
    Histogram hist;
    hist.origin = lo;
    if (range <= 0.0 || iqr <= 0.0) {
        hist.width = range > 0.0 ? range : 1.0;
        hist.counts = {sorted.size()};
        return hist;
    }
    hist.width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
    const auto bins = static_cast<std::size_t>(std::max(1.0, std::ceil(range / hist.width)));
    hist.counts.assign(bins, 0);
    for (double v : sorted) {
        const auto b = std::min(bins - 1, static_cast<std::size_t>((v - lo) / hist.width));
        ++hist.counts[b];
    }
    return hist;
}

/// Midpoint of the tallest Freedman-Diaconis bin (first one on ties).
inline double histogram_mode(std::span<const double> sorted) {
    const Histogram hist = freedman_diaconis_histogram(sorted);
    const auto peak = std::max_element(hist.counts.begin(), hist.counts.end()) - hist.counts.begin();
    return hist.center(static_cast<std::size_t>(peak));
}

/// Number of histogram peaks that stand out from counting noise. A local
/// maximum counts when its prominence (height above the higher of the two
/// valleys separating it from a taller bin; a side with no taller bin before
/// the edge contributes no valley) exceeds `z * sqrt(peak + valley)`, the
/// Poisson standard error of that difference.
inline std::size_t count_significant_modes(const Histogram& hist, double z = 4.0) {
    const auto& c = hist.counts;
    std::size_t modes = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const bool left_ok = i == 0 || c[i] > c[i - 1];
        const bool right_ok = i + 1 == c.size() || c[i] >= c[i + 1];
        if (!left_ok || !right_ok) continue;
        std::size_t valley = 0;
        std::size_t lowest = c[i];
        for (std::size_t j = i; j-- > 0;) {
            if (c[j] > c[i]) {
                valley = std::max(valley, lowest);
                break;
            }
            lowest = std::min(lowest, c[j]);
        }
        lowest = c[i];
        for (std::size_t j = i + 1; j < c.size(); ++j) {
            if (c[j] > c[i]) {
                valley = std::max(valley, lowest);
                break;
            }
            lowest = std::min(lowest, c[j]);
        }
        const double prominence = static_cast<double>(c[i] - valley);
        if (prominence > z * std::sqrt(static_cast<double>(c[i] + valley))) ++modes;
    }
    return modes;
}

struct BuildOptions {
    bool demean = false;
    std::size_t workers = default_workers();
};

inline NullDistribution build_null(std::size_t n, const FilterSpec& filter, std::size_t trials, Seed seed,
                                   const BuildOptions& options = {}) {
    require(n >= 16, "calibration epochs need at least 16 samples");
    require(trials >= kMinTrials, "insufficient trials");

    NullDistribution dist;
    dist.n = n;
    dist.filter = filter;
    dist.trials = trials;
    dist.seed = seed;
    dist.metadata.demean = options.demean;
    const PipelineOptions pipeline = dist.pipeline();

    struct Worker {
        CveEvaluator eval;
        std::vector<double> epoch;
    };
    std::vector<double> cves(trials);
    parallel_for(
        trials, options.workers, [&] { return Worker{CveEvaluator(n, pipeline), std::vector<double>(n)}; },
        [&](Worker& w, std::size_t trial) {
            fill_standard_normal(w.epoch, derive_seed(seed, trial));
            cves[trial] = w.eval(w.epoch).cve;
        });

    std::sort(cves.begin(), cves.end());
    double sum = 0.0;
    for (double v : cves) sum += v;
    dist.mean = sum / static_cast<double>(trials);
    double ss = 0.0;
    for (double v : cves) ss += (v - dist.mean) * (v - dist.mean);
    dist.std = std::sqrt(ss / static_cast<double>(trials - 1));
    dist.mode = histogram_mode(cves);
    dist.cve_samples = std::move(cves);
    if (trials > kCompressAboveTrials) {
        dist = dist.compressed();
    }
    return dist;
}

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double alpha = 0.05;

    bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

inline ConfidenceInterval interval(const NullDistribution& dist, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    return {dist.quantile(alpha / 2.0), dist.quantile(1.0 - alpha / 2.0), alpha};
}

// ---------------------------------------------------------------------------
// Table file format: line-oriented "key: value" header in a fixed order, the
// summary statistics, then one value per line. Doubles are written in their
// shortest round-trip form.

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& what) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::InputError, "corrupted table: bad value for " + what);
    }
    return v;
}

inline std::uint64_t parse_unsigned(std::string_view text, const std::string& what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw Error(ErrorKind::InputError, "corrupted table: bad value for " + what);
    }
    return v;
}

class TableReader {
public:
    explicit TableReader(std::istream& in) : in_(in) {}

    bool next_line(std::string& line) {
        if (!std::getline(in_, line)) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no_;
        return true;
    }

    /// Reads the next line and requires it to be `key: value`.
    std::string field(const std::string& key, ErrorKind missing_kind = ErrorKind::InputError,
                      const std::string& missing_message = "") {
        std::string line;
        if (next_line(line)) {
            const std::string prefix = key + ": ";
            if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
        }
        if (!missing_message.empty()) throw Error(missing_kind, missing_message);
        throw Error(ErrorKind::InputError,
                    "corrupted table: expected field '" + key + "' at line " + std::to_string(line_no_));
    }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

}  // namespace detail

inline constexpr const char* kTableMagic = "cvegauss-calibration-table";

inline void write_table(const NullDistribution& dist, std::ostream& out) {
    using detail::format_double;
    out << kTableMagic << '\n'
        << "schema_version: " << kTableSchemaVersion << '\n'
        << "n: " << dist.n << '\n'
        << "low_cut: " << format_double(dist.filter.low_cut()) << '\n'
        << "high_cut: " << format_double(dist.filter.high_cut()) << '\n'
        << "trials: " << dist.trials << '\n'
        << "seed: " << dist.seed.value << '\n'
        << "rng_name: " << dist.metadata.rng_name << '\n'
        << "gaussian_sampler: " << dist.metadata.gaussian_sampler << '\n'
        << "hilbert_method: " << dist.metadata.hilbert_method << '\n'
        << "std_divisor: " << dist.metadata.std_divisor << '\n'
        << "demean: " << (dist.metadata.demean ? "true" : "false") << '\n'
        << "mode: " << format_double(dist.mode) << '\n'
        << "mean: " << format_double(dist.mean) << '\n'
        << "std: " << format_double(dist.std) << '\n'
        << "storage: " << (dist.quantile_grid ? "quantile_grid" : "samples") << '\n'
        << "values: " << dist.cve_samples.size() << '\n';
    for (double v : dist.cve_samples) out << format_double(v) << '\n';
    out << "end\n";
}

inline NullDistribution read_table(std::istream& in) {
    using detail::parse_double;
    using detail::parse_unsigned;
    detail::TableReader reader(in);
    std::string line;
    if (!reader.next_line(line) || line != kTableMagic) {
        throw Error(ErrorKind::InputError, "corrupted table: missing header line");
    }
    const auto version = parse_unsigned(reader.field("schema_version"), "schema_version");
    if (version != kTableSchemaVersion) {
        throw Error(ErrorKind::DataMismatch, "schema version mismatch: file has " + std::to_string(version) +
                                                 ", this build reads " + std::to_string(kTableSchemaVersion));
    }

    NullDistribution dist;
    dist.n = parse_unsigned(reader.field("n"), "n");
    const double low = parse_double(reader.field("low_cut"), "low_cut");
    const double high = parse_double(reader.field("high_cut"), "high_cut");
    try {
        dist.filter = FilterSpec(low, high);
    } catch (const Error& e) {
        throw Error(ErrorKind::InputError, std::string("corrupted table: ") + e.what());
    }
    dist.trials = parse_unsigned(reader.field("trials"), "trials");
    dist.seed = Seed{parse_unsigned(reader.field("seed"), "seed")};

    const std::string incompatible = "incompatible table: estimator metadata missing";
    dist.metadata.rng_name = reader.field("rng_name", ErrorKind::DataMismatch, incompatible);
    dist.metadata.gaussian_sampler = reader.field("gaussian_sampler", ErrorKind::DataMismatch, incompatible);
    dist.metadata.hilbert_method = reader.field("hilbert_method", ErrorKind::DataMismatch, incompatible);
    dist.metadata.std_divisor = reader.field("std_divisor", ErrorKind::DataMismatch, incompatible);
    const std::string demean = reader.field("demean", ErrorKind::DataMismatch, incompatible);
    if (demean != "true" && demean != "false") {
        throw Error(ErrorKind::InputError, "corrupted table: bad value for demean");
    }
    dist.metadata.demean = demean == "true";

    dist.mode = parse_double(reader.field("mode"), "mode");
    dist.mean = parse_double(reader.field("mean"), "mean");
    dist.std = parse_double(reader.field("std"), "std");
    const std::string storage = reader.field("storage");
    if (storage != "samples" && storage != "quantile_grid") {
        throw Error(ErrorKind::InputError, "corrupted table: unknown storage '" + storage + "'");
    }
    dist.quantile_grid = storage == "quantile_grid";
    const auto count = parse_unsigned(reader.field("values"), "values");
    if (count < 2 || count > (std::uint64_t{1} << 32)) {
        throw Error(ErrorKind::InputError, "corrupted table: implausible value count");
    }
    dist.cve_samples.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        if (!reader.next_line(line)) throw Error(ErrorKind::InputError, "corrupted table: truncated value list");
        dist.cve_samples.push_back(parse_double(line, "value " + std::to_string(i)));
    }
    if (!reader.next_line(line) || line != "end") {
        throw Error(ErrorKind::InputError, "corrupted table: missing end marker");
    }

    if (dist.trials < kMinTrials) throw Error(ErrorKind::InputError, "corrupted table: insufficient trials");
    if (!dist.quantile_grid && dist.cve_samples.size() != dist.trials) {
        throw Error(ErrorKind::InputError, "corrupted table: sample count does not match trials");
    }
    if (!std::is_sorted(dist.cve_samples.begin(), dist.cve_samples.end()) || dist.cve_samples.front() <= 0.0) {
        throw Error(ErrorKind::InputError, "corrupted table: values must be positive and ascending");
    }
    return dist;
}

inline void save_table(const NullDistribution& dist, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::OutputError, "cannot write table: " + path);
    write_table(dist, out);
    out.flush();
    if (!out) throw Error(ErrorKind::OutputError, "cannot write table: " + path);
}

inline NullDistribution load_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::InputError, "cannot read table: " + path);
    return read_table(in);
}

}  // namespace cvegauss

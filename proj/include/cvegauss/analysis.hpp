#pragma once

// CVE Gaussianity test with amplitude-modulation labelling, and the
// estimator-quality experiments comparing CVE with skewness and kurtosis.

#include "cvegauss/calibration.hpp"
#include "cvegauss/error.hpp"
#include "cvegauss/fading.hpp"
#include "cvegauss/generators.hpp"
#include "cvegauss/parallel.hpp"
#include "cvegauss/random.hpp"
#include "cvegauss/signal.hpp"
#include "cvegauss/stats.hpp"

#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cvegauss {

enum class AmLabel { SubGaussianRhythmic, GaussianConsistent, SuperGaussianPulsating };

inline const char* to_string(AmLabel label) {
    switch (label) {
        case AmLabel::SubGaussianRhythmic: return "SubGaussianRhythmic";
        case AmLabel::GaussianConsistent: return "GaussianConsistent";
        case AmLabel::SuperGaussianPulsating: return "SuperGaussianPulsating";
    }
    return "?";
}

inline AmLabel label_for(double cve, const ConfidenceInterval& ci) {
    if (cve < ci.lower) return AmLabel::SubGaussianRhythmic;
    if (cve > ci.upper) return AmLabel::SuperGaussianPulsating;
    return AmLabel::GaussianConsistent;
}

struct ClassificationResult {
    EnvelopeStats stats;
    ConfidenceInterval interval;
    AmLabel label = AmLabel::GaussianConsistent;
    std::size_t n = 0;
    FilterSpec filter = FilterSpec::full_band();
    double alpha = 0.05;

    double cve() const noexcept { return stats.cve; }
};

/// Throws DataMismatch unless `table` was built with the pipeline this build
/// runs, including the requested demeaning.
inline void check_table_compatible(const NullDistribution& table, bool demean) {
    EstimatorMetadata expected;
    expected.demean = demean;
    const auto& got = table.metadata;
    if (got.hilbert_method != expected.hilbert_method || got.std_divisor != expected.std_divisor ||
        got.demean != expected.demean) {
        throw Error(ErrorKind::DataMismatch, "table/pipeline mismatch");
    }
}

inline ClassificationResult classify(const Signal& signal, const NullDistribution& table, double alpha,
                                     bool demean = false) {
    if (signal.size() != table.n) {
        throw Error(ErrorKind::DataMismatch, "signal length " + std::to_string(signal.size()) +
                                                 " does not match table length " + std::to_string(table.n));
    }
    check_table_compatible(table, demean);
    CveEvaluator eval(signal.size(), table.pipeline());
    ClassificationResult result;
    result.stats = eval(signal.samples());
    result.interval = interval(table, alpha);
    result.label = label_for(result.stats.cve, result.interval);
    result.n = table.n;
    result.filter = table.filter;
    result.alpha = alpha;
    return result;
}

// ---------------------------------------------------------------------------
// Estimator experiments

enum class Estimator { CVE, Skewness, Kurtosis };

inline constexpr Estimator kAllEstimators[] = {Estimator::CVE, Estimator::Skewness, Estimator::Kurtosis};

inline const char* to_string(Estimator e) {
    switch (e) {
        case Estimator::CVE: return "cve";
        case Estimator::Skewness: return "skewness";
        case Estimator::Kurtosis: return "kurtosis";
    }
    return "?";
}

/// Value each estimator converges to for Gaussian data.
inline double gaussian_target(Estimator e) { return e == Estimator::CVE ? motokawa_m() : 0.0; }

struct EstimatorReport {
    Estimator estimator = Estimator::CVE;
    std::vector<std::size_t> sample_sizes;
    std::vector<double> variance_curve;
    std::vector<double> bias_curve;
    std::vector<std::pair<double, double>> sensitivity_curve;  // (outlier magnitude, mean |shift|)
};

inline constexpr std::size_t kMinExperimentTrials = 10000;

struct ExperimentOptions {
    std::size_t workers = default_workers();
    std::size_t sensitivity_sample_size = 20;
};

namespace detail {

struct EstimatorValues {
    double cve = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;

    double get(Estimator e) const {
        switch (e) {
            case Estimator::CVE: return cve;
            case Estimator::Skewness: return skewness;
            case Estimator::Kurtosis: return kurtosis;
        }
        return 0.0;
    }
};

inline EstimatorValues evaluate_all(CveEvaluator& eval, std::span<const double> x) {
    const MomentStats m = moment_stats(x);
    return {eval(x).cve, m.skewness, m.excess_kurtosis};
}

struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Per-estimator mean and (n-1) variance over `trials` Gaussian epochs of length n.
inline std::vector<SampleMoments> gaussian_estimator_moments(std::size_t n, std::size_t trials, Seed seed,
                                                             std::size_t workers) {
    std::vector<EstimatorValues> values(trials);
    struct Worker {
        CveEvaluator eval;
        std::vector<double> epoch;
    };
    parallel_for(
        trials, workers, [&] { return Worker{CveEvaluator(n, {}), std::vector<double>(n)}; },
        [&](Worker& w, std::size_t trial) {
            fill_standard_normal(w.epoch, derive_seed(seed, trial));
            values[trial] = evaluate_all(w.eval, w.epoch);
        });
    std::vector<SampleMoments> out;
    for (Estimator e : kAllEstimators) {
        double sum = 0.0;
        for (const auto& v : values) sum += v.get(e);
        const double mean = sum / static_cast<double>(trials);
        double ss = 0.0;
        for (const auto& v : values) ss += (v.get(e) - mean) * (v.get(e) - mean);
        out.push_back({mean, ss / static_cast<double>(trials - 1)});
    }
    return out;
}

inline void validate_experiment(std::span<const std::size_t> sample_sizes, std::size_t trials) {
    require(!sample_sizes.empty(), "empty grid");
    require(trials >= kMinExperimentTrials, "experiments need at least 10000 trials");
    for (std::size_t n : sample_sizes) require(n >= 4, "sample sizes must be at least 4");
}

inline std::vector<EstimatorReport> empty_reports(std::span<const std::size_t> sample_sizes) {
    std::vector<EstimatorReport> reports;
    for (Estimator e : kAllEstimators) {
        EstimatorReport r;
        r.estimator = e;
        r.sample_sizes.assign(sample_sizes.begin(), sample_sizes.end());
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace detail

/// Variance of each estimator across Gaussian epochs, one point per sample size.
inline std::vector<EstimatorReport> estimator_variance_experiment(std::span<const std::size_t> sample_sizes,
                                                                  std::size_t trials, Seed seed,
                                                                  const ExperimentOptions& options = {}) {
    detail::validate_experiment(sample_sizes, trials);
    auto reports = detail::empty_reports(sample_sizes);
    for (std::size_t g = 0; g < sample_sizes.size(); ++g) {
        const auto moments =
            detail::gaussian_estimator_moments(sample_sizes[g], trials, derive_seed(seed, g), options.workers);
        for (std::size_t e = 0; e < reports.size(); ++e) reports[e].variance_curve.push_back(moments[e].variance);
    }
    return reports;
}

/// Mean estimate minus the Gaussian limit (m for CVE, 0 for the moments).
inline std::vector<EstimatorReport> estimator_bias_experiment(std::span<const std::size_t> sample_sizes,
                                                              std::size_t trials, Seed seed,
                                                              const ExperimentOptions& options = {}) {
    detail::validate_experiment(sample_sizes, trials);
    auto reports = detail::empty_reports(sample_sizes);
    for (std::size_t g = 0; g < sample_sizes.size(); ++g) {
        const auto moments =
            detail::gaussian_estimator_moments(sample_sizes[g], trials, derive_seed(seed, g), options.workers);
        for (std::size_t e = 0; e < reports.size(); ++e) {
            reports[e].bias_curve.push_back(moments[e].mean - gaussian_target(reports[e].estimator));
        }
    }
    return reports;
}

/// Mean absolute change of each estimator when an outlier of magnitude c is
/// appended to a small N(0, 1) sample. The base samples are shared across
/// magnitudes.
inline std::vector<EstimatorReport> sensitivity_experiment(std::span<const double> outlier_magnitudes,
                                                           std::size_t trials, Seed seed,
                                                           const ExperimentOptions& options = {}) {
    require(!outlier_magnitudes.empty(), "empty grid");
    require(trials >= kMinExperimentTrials, "experiments need at least 10000 trials");
    for (double c : outlier_magnitudes) require(std::isfinite(c), "outlier magnitudes must be finite");
    const std::size_t n = options.sensitivity_sample_size;
    require(n >= 4, "sensitivity sample size must be at least 4");
    const std::size_t grid = outlier_magnitudes.size();

    // shifts[trial * grid + g] per estimator
    std::vector<detail::EstimatorValues> shifts(trials * grid);
    struct Worker {
        CveEvaluator base_eval;
        CveEvaluator outlier_eval;
        std::vector<double> sample;
    };
    parallel_for(
        trials, options.workers,
        [&] { return Worker{CveEvaluator(n, {}), CveEvaluator(n + 1, {}), std::vector<double>(n + 1)}; },
        [&](Worker& w, std::size_t trial) {
            const std::span<double> base(w.sample.data(), n);
            fill_standard_normal(base, derive_seed(seed, trial));
            const auto before = detail::evaluate_all(w.base_eval, base);
            for (std::size_t g = 0; g < grid; ++g) {
                w.sample[n] = outlier_magnitudes[g];
                const auto after = detail::evaluate_all(w.outlier_eval, w.sample);
                shifts[trial * grid + g] = {std::abs(after.cve - before.cve),
                                            std::abs(after.skewness - before.skewness),
                                            std::abs(after.kurtosis - before.kurtosis)};
            }
        });

    std::vector<EstimatorReport> reports;
    for (Estimator e : kAllEstimators) {
        EstimatorReport r;
        r.estimator = e;
        r.sample_sizes = {n};
        for (std::size_t g = 0; g < grid; ++g) {
            double sum = 0.0;
            for (std::size_t t = 0; t < trials; ++t) sum += shifts[t * grid + g].get(e);
            r.sensitivity_curve.emplace_back(outlier_magnitudes[g], sum / static_cast<double>(trials));
        }
        reports.push_back(std::move(r));
    }
    return reports;
}

/// Plot-ready rows: experiment,estimator,grid,value.
inline void write_experiment_table(std::ostream& out, const std::string& experiment,
                                   const std::vector<EstimatorReport>& reports) {
    out << "experiment,estimator,grid,value\n";
    for (const auto& r : reports) {
        if (!r.sensitivity_curve.empty()) {
            for (const auto& [c, shift] : r.sensitivity_curve) {
                out << experiment << ',' << to_string(r.estimator) << ',' << detail::format_double(c) << ','
                    << detail::format_double(shift) << '\n';
            }
            continue;
        }
        const auto& curve = r.variance_curve.empty() ? r.bias_curve : r.variance_curve;
        for (std::size_t i = 0; i < curve.size(); ++i) {
            out << experiment << ',' << to_string(r.estimator) << ',' << r.sample_sizes[i] << ','
                << detail::format_double(curve[i]) << '\n';
        }
    }
}

}  // namespace cvegauss

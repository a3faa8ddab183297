// cvegauss: command-line front end for CVE-based Gaussianity testing.
//
// Exit codes
//   0   GaussianConsistent (analyze) or success
//   10  SubGaussianRhythmic (analyze)
//   11  SuperGaussianPulsating (analyze)
//   64  usage error or invalid parameter
//   65  inputs that do not fit together (length/table/pipeline mismatch)
//   66  unreadable or malformed input
//   70  internal error
//   73  output cannot be written

#include "cvegauss/cvegauss.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace cvegauss;

enum Exit : int {
    kOk = 0,
    kSubGaussian = 10,
    kSuperGaussian = 11,
    kUsage = 64,
    kDataError = 65,
    kNoInput = 66,
    kSoftware = 70,
    kCantCreate = 73,
};

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return kUsage;
        case ErrorKind::DataMismatch: return kDataError;
        case ErrorKind::InputError: return kNoInput;
        case ErrorKind::OutputError: return kCantCreate;
    }
    return kSoftware;
}

int exit_code_for(AmLabel label) {
    switch (label) {
        case AmLabel::GaussianConsistent: return kOk;
        case AmLabel::SubGaussianRhythmic: return kSubGaussian;
        case AmLabel::SuperGaussianPulsating: return kSuperGaussian;
    }
    return kSoftware;
}

struct InputFlags {
    std::string path;
    std::string format = "csv";
    std::size_t column = 0;
    double sample_rate = 1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("-i,--input", path, "Input signal file")->required();
        cmd->add_option("--format", format, "Input format: csv or raw_f64le")->capture_default_str();
        cmd->add_option("--column", column, "Zero-based CSV column")->capture_default_str();
        cmd->add_option("--sample-rate", sample_rate, "Sample rate in Hz")->capture_default_str();
    }

    InputSpec spec() const { return {path, parse_input_format(format), column, sample_rate}; }
};

void describe_input(Report& report, const InputSpec& spec, const Signal& signal) {
    report.add("input.path", spec.path);
    report.add("input.format", to_string(spec.format));
    report.add("input.column", spec.column);
    report.add("input.sample_rate_hz", spec.sample_rate_hz);
    report.add("input.samples", signal.size());
}

void describe_table(Report& report, const std::string& path, const NullDistribution& table) {
    report.add("table.path", path);
    report.add("table.schema_version", kTableSchemaVersion);
    report.add("table.n", table.n);
    report.add("table.low_cut", table.filter.low_cut());
    report.add("table.high_cut", table.filter.high_cut());
    report.add("table.trials", table.trials);
    report.add("table.seed", table.seed.value);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

Signal demeaned(const Signal& s) {
    double mean = 0.0;
    for (double v : s.samples()) mean += v;
    mean /= static_cast<double>(s.size());
    std::vector<double> out(s.samples().begin(), s.samples().end());
    for (auto& v : out) v -= mean;
    return Signal(std::move(out), s.sample_rate_hz());
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error(ErrorKind::OutputError, "cannot create output directory: " + dir);
    }
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
    InputFlags input;
    std::string table_path;
    double alpha = 0.05;
    std::optional<double> low_cut;
    std::optional<double> high_cut;
    bool demean = false;
};

int run_analyze(const AnalyzeArgs& args) {
    const InputSpec spec = args.input.spec();
    require(args.alpha > 0.0 && args.alpha < 1.0, "alpha must lie in (0, 1)");
    const NullDistribution table = load_table(args.table_path);
    if (args.low_cut || args.high_cut) {
        const FilterSpec requested(args.low_cut.value_or(0.0), args.high_cut.value_or(0.5));
        if (!(requested == table.filter)) throw Error(ErrorKind::DataMismatch, "table/pipeline mismatch");
    }
    const Signal signal = read_signal(spec);
    const ClassificationResult result = classify(signal, table, args.alpha, args.demean);

    Report report;
    report.add("command", "analyze");
    describe_input(report, spec, signal);
    report.add("pipeline.low_cut", result.filter.low_cut());
    report.add("pipeline.high_cut", result.filter.high_cut());
    report.add("pipeline.demean", args.demean);
    report.add("pipeline.hilbert_method", kHilbertMethod);
    report.add("pipeline.std_divisor", kStdDivisor);
    report.add("envelope.mean", result.stats.mean);
    report.add("envelope.std", result.stats.std);
    report.add("cve", result.stats.cve);
    report.add("alpha", result.alpha);
    report.add("interval.lower", result.interval.lower);
    report.add("interval.upper", result.interval.upper);
    report.add("label", to_string(result.label));
    describe_table(report, args.table_path, table);
    std::cout << report;
    return exit_code_for(result.label);
}

// --- calibrate -------------------------------------------------------------

struct CalibrateArgs {
    std::size_t n = 0;
    double low_cut = 0.0;
    double high_cut = 0.5;
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    std::string out;
    bool demean = false;
    std::size_t workers = default_workers();
};

int run_calibrate(const CalibrateArgs& args) {
    const FilterSpec filter(args.low_cut, args.high_cut);
    const NullDistribution dist =
        build_null(args.n, filter, args.trials, Seed{args.seed}, {args.demean, args.workers});
    save_table(dist, args.out);
    const ConfidenceInterval ci = interval(dist, 0.05);

    Report report;
    report.add("command", "calibrate");
    report.add("table.path", args.out);
    report.add("table.schema_version", kTableSchemaVersion);
    report.add("n", dist.n);
    report.add("low_cut", filter.low_cut());
    report.add("high_cut", filter.high_cut());
    report.add("trials", dist.trials);
    report.add("seed", dist.seed.value);
    report.add("demean", args.demean);
    report.add("storage", dist.quantile_grid ? "quantile_grid" : "samples");
    report.add("mode", dist.mode);
    report.add("mean", dist.mean);
    report.add("std", dist.std);
    report.add("interval95.lower", ci.lower);
    report.add("interval95.upper", ci.upper);
    std::cout << report;
    return kOk;
}

// --- surrogate -------------------------------------------------------------

struct SurrogateArgs {
    InputFlags input;
    std::size_t count = 19;
    std::uint64_t seed = 1;
    std::string out_dir;
    bool demean = false;
};

int run_surrogate(const SurrogateArgs& args) {
    const InputSpec spec = args.input.spec();
    require(args.count >= 1, "count must be at least 1");
    Signal signal = read_signal(spec);
    if (args.demean) signal = demeaned(signal);
    ensure_directory(args.out_dir);

    const SurrogateBatch batch = ftpr(signal, args.count, Seed{args.seed});
    const std::string ext = spec.format == InputFormat::Csv ? ".csv" : ".f64";
    std::vector<double> cves;
    cves.reserve(batch.surrogates.size());
    for (std::size_t i = 0; i < batch.surrogates.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "surrogate_%04zu", i);
        const auto path = (std::filesystem::path(args.out_dir) / (name + ext)).string();
        write_samples(path, spec.format, batch.surrogates[i].samples());
        cves.push_back(cve_of_signal(batch.surrogates[i]).cve);
    }

    Report report;
    report.add("command", "surrogate");
    describe_input(report, spec, signal);
    report.add("demean", args.demean);
    report.add("count", args.count);
    report.add("seed", args.seed);
    report.add("out_dir", args.out_dir);
    report.add("original.cve", cve_of_signal(signal).cve);
    report.add("surrogate.cve.min", *std::min_element(cves.begin(), cves.end()));
    report.add("surrogate.cve.median", median_of(cves));
    report.add("surrogate.cve.max", *std::max_element(cves.begin(), cves.end()));
    std::cout << report;
    return kOk;
}

// --- simulate --------------------------------------------------------------

inline constexpr const char* kGeneratorNames = "gaussian, sinusoid, poisson, two_tone";

struct SimulateArgs {
    std::string generator;
    std::size_t n = 8000;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    double mean = 0.0;
    double sigma = 1.0;
    double freq = 0.1;
    double snr_db = 0.0;
    double rate = 0.01;
    std::string pulse = "exponential";
    double pulse_width = 8.0;
    double amplitude = 1.0;
    double a_sin = 1.0;
    double a_cos = 1.0;
};

int run_simulate(const SimulateArgs& args) {
    const InputFormat format = parse_input_format(args.format);
    const Seed seed{args.seed};
    Report meta;
    meta.add("command", "simulate");
    meta.add("generator", args.generator);
    meta.add("n", args.n);

    std::optional<Signal> signal;
    if (args.generator == "gaussian") {
        signal = gaussian_noise(args.n, args.mean, args.sigma, seed);
        meta.add("mean", args.mean);
        meta.add("sigma", args.sigma);
        meta.add("seed", args.seed);
    } else if (args.generator == "sinusoid") {
        signal = noisy_sinusoid(args.n, args.freq, args.snr_db, seed);
        meta.add("freq", args.freq);
        meta.add("snr_db", args.snr_db);
        meta.add("seed", args.seed);
    } else if (args.generator == "poisson") {
        PulseShape shape;
        if (args.pulse == "exponential") {
            shape = PulseShape::exponential(args.pulse_width, args.amplitude);
        } else if (args.pulse == "gaussian") {
            shape = PulseShape::gaussian(args.pulse_width, args.amplitude);
        } else {
            throw Error(ErrorKind::InvalidArgument, "unknown pulse '" + args.pulse + "' (valid: exponential, gaussian)");
        }
        signal = filtered_poisson(args.n, args.rate, shape, seed);
        meta.add("rate", args.rate);
        meta.add("pulse", shape.name());
        meta.add("pulse_width", shape.width);
        meta.add("amplitude", shape.amplitude);
        meta.add("seed", args.seed);
    } else if (args.generator == "two_tone") {
        signal = two_tone(args.n, args.freq, args.a_sin, args.a_cos);
        meta.add("freq", args.freq);
        meta.add("a_sin", args.a_sin);
        meta.add("a_cos", args.a_cos);
    } else {
        throw Error(ErrorKind::InvalidArgument,
                    "unknown generator '" + args.generator + "' (valid: " + kGeneratorNames + ")");
    }

    meta.add("format", to_string(format));
    meta.add("out", args.out);
    write_samples(args.out, format, signal->samples());
    const std::string sidecar = args.out + ".meta";
    std::ofstream side(sidecar, std::ios::trunc);
    side << meta;
    side.flush();
    if (!side) throw Error(ErrorKind::OutputError, "cannot write: " + sidecar);
    std::cout << meta;
    return kOk;
}

// --- bench -----------------------------------------------------------------

struct BenchArgs {
    std::string experiment;
    std::vector<std::size_t> sizes{32, 128, 512, 2048};
    std::vector<double> magnitudes{0.0, 3.0, 5.0, 10.0};
    std::size_t trials = kMinExperimentTrials;
    std::uint64_t seed = 1;
    std::string out;
    std::size_t workers = default_workers();
    std::size_t sample_size = 20;
};

int run_bench(const BenchArgs& args) {
    const ExperimentOptions options{args.workers, args.sample_size};
    std::vector<EstimatorReport> reports;
    if (args.experiment == "variance") {
        reports = estimator_variance_experiment(args.sizes, args.trials, Seed{args.seed}, options);
    } else if (args.experiment == "bias") {
        reports = estimator_bias_experiment(args.sizes, args.trials, Seed{args.seed}, options);
    } else if (args.experiment == "sensitivity") {
        reports = sensitivity_experiment(args.magnitudes, args.trials, Seed{args.seed}, options);
    } else {
        throw Error(ErrorKind::InvalidArgument,
                    "unknown experiment '" + args.experiment + "' (valid: variance, bias, sensitivity)");
    }
    std::ofstream out(args.out, std::ios::trunc);
    if (!out) throw Error(ErrorKind::OutputError, "cannot write: " + args.out);
    write_experiment_table(out, args.experiment, reports);
    out.flush();
    if (!out) throw Error(ErrorKind::OutputError, "cannot write: " + args.out);

    Report report;
    report.add("command", "bench");
    report.add("experiment", args.experiment);
    report.add("trials", args.trials);
    report.add("seed", args.seed);
    report.add("out", args.out);
    report.add("rows", reports.size() * (args.experiment == "sensitivity" ? args.magnitudes.size()
                                                                         : args.sizes.size()));
    std::cout << report;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CVE-based Gaussianity testing and amplitude-modulation classification"};
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto* cmd_analyze = app.add_subcommand("analyze", "Classify a signal against a calibration table");
    analyze.input.attach(cmd_analyze);
    cmd_analyze->add_option("-t,--table", analyze.table_path, "Calibration table")->required();
    cmd_analyze->add_option("--alpha", analyze.alpha, "Two-sided significance level")->capture_default_str();
    cmd_analyze->add_option("--low-cut", analyze.low_cut, "Expected pass band low edge (checked against the table)");
    cmd_analyze->add_option("--high-cut", analyze.high_cut, "Expected pass band high edge (checked against the table)");
    cmd_analyze->add_flag("--demean", analyze.demean, "Subtract the sample mean before the envelope");

    CalibrateArgs calibrate;
    auto* cmd_calibrate = app.add_subcommand("calibrate", "Build a Monte Carlo CVE null distribution table");
    cmd_calibrate->add_option("-n,--length", calibrate.n, "Epoch length in samples")->required();
    cmd_calibrate->add_option("--low-cut", calibrate.low_cut, "Pass band low edge (cycles/sample)")->capture_default_str();
    cmd_calibrate->add_option("--high-cut", calibrate.high_cut, "Pass band high edge (cycles/sample)")->capture_default_str();
    cmd_calibrate->add_option("--trials", calibrate.trials, "Monte Carlo trials")->capture_default_str();
    cmd_calibrate->add_option("--seed", calibrate.seed, "Base seed")->capture_default_str();
    cmd_calibrate->add_option("-o,--out", calibrate.out, "Output table path")->required();
    cmd_calibrate->add_flag("--demean", calibrate.demean, "Calibrate the demeaned pipeline");
    cmd_calibrate->add_option("--workers", calibrate.workers, "Worker threads (output does not depend on it)");

    SurrogateArgs surrogate;
    auto* cmd_surrogate = app.add_subcommand("surrogate", "Write phase-randomized surrogates of a signal");
    surrogate.input.attach(cmd_surrogate);
    cmd_surrogate->add_option("--count", surrogate.count, "Number of surrogates")->capture_default_str();
    cmd_surrogate->add_option("--seed", surrogate.seed, "Base seed")->capture_default_str();
    cmd_surrogate->add_option("-o,--out-dir", surrogate.out_dir, "Output directory")->required();
    cmd_surrogate->add_flag("--demean", surrogate.demean, "Subtract the sample mean before randomizing");

    SimulateArgs simulate;
    auto* cmd_simulate = app.add_subcommand("simulate", "Generate a synthetic signal");
    cmd_simulate->add_option("-g,--generator", simulate.generator, std::string("One of: ") + kGeneratorNames)
        ->required();
    cmd_simulate->add_option("-n,--length", simulate.n, "Number of samples")->capture_default_str();
    cmd_simulate->add_option("--seed", simulate.seed, "Seed")->capture_default_str();
    cmd_simulate->add_option("-o,--out", simulate.out, "Output file")->required();
    cmd_simulate->add_option("--format", simulate.format, "csv or raw_f64le")->capture_default_str();
    cmd_simulate->add_option("--mean", simulate.mean, "gaussian: mean")->capture_default_str();
    cmd_simulate->add_option("--sigma", simulate.sigma, "gaussian: standard deviation")->capture_default_str();
    cmd_simulate->add_option("--freq", simulate.freq, "sinusoid/two_tone: normalized frequency")->capture_default_str();
    cmd_simulate->add_option("--snr-db", simulate.snr_db, "sinusoid: SNR in dB")->capture_default_str();
    cmd_simulate->add_option("--rate", simulate.rate, "poisson: events per sample")->capture_default_str();
    cmd_simulate->add_option("--pulse", simulate.pulse, "poisson: exponential or gaussian")->capture_default_str();
    cmd_simulate->add_option("--pulse-width", simulate.pulse_width, "poisson: tau or bump width, samples")
        ->capture_default_str();
    cmd_simulate->add_option("--amplitude", simulate.amplitude, "poisson: pulse amplitude")->capture_default_str();
    cmd_simulate->add_option("--a-sin", simulate.a_sin, "two_tone: sine amplitude")->capture_default_str();
    cmd_simulate->add_option("--a-cos", simulate.a_cos, "two_tone: cosine amplitude")->capture_default_str();

    BenchArgs bench;
    auto* cmd_bench = app.add_subcommand("bench", "Estimator variance, bias, or outlier sensitivity");
    cmd_bench->add_option("-e,--experiment", bench.experiment, "variance, bias, or sensitivity")->required();
    cmd_bench->add_option("--sizes", bench.sizes, "Sample-size grid (variance, bias)")->delimiter(',');
    cmd_bench->add_option("--magnitudes", bench.magnitudes, "Outlier grid (sensitivity)")->delimiter(',');
    cmd_bench->add_option("--trials", bench.trials, "Trials per grid point")->capture_default_str();
    cmd_bench->add_option("--seed", bench.seed, "Base seed")->capture_default_str();
    cmd_bench->add_option("-o,--out", bench.out, "Output CSV")->required();
    cmd_bench->add_option("--workers", bench.workers, "Worker threads (output does not depend on it)");
    cmd_bench->add_option("--sample-size", bench.sample_size, "sensitivity: base sample size")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*cmd_analyze) return run_analyze(analyze);
        if (*cmd_calibrate) return run_calibrate(calibrate);
        if (*cmd_surrogate) return run_surrogate(surrogate);
        if (*cmd_simulate) return run_simulate(simulate);
        if (*cmd_bench) return run_bench(bench);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kSoftware;
    }
    return kUsage;
}

// Command-line front end: estimate sensor values from a measured spectrum,
// synthesize spectra from a design, run the accuracy experiments, validate
// a design against the operating-region rules, and list spectrum minima.
//
// Exit codes: 0 success, 1 I/O or usage error, 2 estimation/validation failure.
// Stdout carries data only; diagnostics go to stderr.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bit/design_io.hpp"
#include "bit/estimator.hpp"
#include "bit/experiments.hpp"
#include "bit/simulator.hpp"
#include "bit/spectrum.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIoError = 1;
constexpr int kExitEstimationFailure = 2;

void write_text(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

int cmd_estimate(const std::string& design_path, const std::string& spectrum_path,
                 const std::string& output_path, bool csv) {
    const bit::KnownDesign design = bit::load_known_design(design_path);
    const bit::Spectrum spectrum = bit::read_spectrum_file(spectrum_path);

    bit::EstimationResult result;
    try {
        result = bit::estimate(spectrum, design);
    } catch (const bit::EstimationError& error) {
        std::cerr << "estimation failed: " << error.what() << "\n";
        return kExitEstimationFailure;
    }

    std::string text;
    if (csv) {
        text = bit::estimation_result_csv_header() + "\n" +
               bit::estimation_result_csv_row(result) + "\n";
    } else {
        text = bit::estimation_result_to_json(result).dump(2) + "\n";
    }
    write_text(text, output_path);

    for (const auto& branch : result.branches) {
        if (!branch.ok)
            std::cerr << "branch " << branch.branch_index << ": " << branch.failure << "\n";
    }
    return kExitOk;
}

int cmd_simulate(const std::string& design_path, const std::string& output_path,
                 std::uint64_t seed, const bit::NoiseModel& noise,
                 const bit::FrequencyGrid& grid) {
    const bit::InterfaceDesign design = bit::load_design(design_path);
    bit::Rng rng = bit::Rng::stream(seed, 0);
    const bit::Spectrum spectrum = bit::synthesize_spectrum(design, grid, noise, rng);
    bit::write_spectrum_file(spectrum, output_path);
    return kExitOk;
}

int cmd_experiment(int number, const bit::ExperimentOptions& options,
                   const std::string& csv_path) {
    bit::ExperimentReport report;
    switch (number) {
        case 1: report = bit::run_experiment1(options); break;
        case 2: report = bit::run_experiment2(options); break;
        case 3: report = bit::run_experiment3(options); break;
        default: throw std::runtime_error("experiment number must be 1, 2 or 3");
    }
    if (!csv_path.empty()) bit::write_report(report, csv_path);
    std::cout << bit::summarize_report(report);
    return kExitOk;
}

int cmd_validate_design(const std::string& design_path) {
    const bit::InterfaceDesign design = bit::load_design(design_path);

    struct Rule {
        std::string name;
        std::string status;  // "pass", "FAIL", "warn"
        std::string detail;
    };
    std::vector<Rule> rules;
    auto add = [&](const std::string& name, bool ok, const std::string& detail) {
        rules.push_back({name, ok ? "pass" : "FAIL", detail});
    };

    try {
        design.validate();
        add("parameters", true, "all component values in range");
    } catch (const std::exception& error) {
        add("parameters", false, error.what());
    }

    std::size_t references = 0;
    for (const auto& branch : design.branches)
        if (branch.role == bit::BranchRole::Reference) ++references;
    add("single-reference", references == 1,
        std::to_string(references) + " reference branch(es), need exactly 1");

    std::vector<double> resonances;
    double reference_resonance = 0.0;
    for (const auto& branch : design.branches) {
        if (branch.role == bit::BranchRole::ResistiveSensor) continue;
        if (branch.inductance <= 0.0 || branch.capacitance <= 0.0) continue;
        const double f = bit::branch_resonant_frequency(branch.inductance,
                                                        branch.capacitance);
        resonances.push_back(f);
        if (branch.role == bit::BranchRole::Reference) reference_resonance = f;
    }
    {
        char detail[96];
        std::snprintf(detail, sizeof detail, "reference resonates at %.2f MHz, want >= 10 MHz",
                      reference_resonance / 1e6);
        add("reference-frequency", reference_resonance >= 10e6, detail);
    }

    std::sort(resonances.begin(), resonances.end());
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < resonances.size(); ++i)
        min_gap = std::min(min_gap, resonances[i] - resonances[i - 1]);
    {
        char detail[96];
        if (resonances.size() < 2) {
            std::snprintf(detail, sizeof detail, "fewer than two resonant branches");
            add("resonance-gap", true, detail);
        } else {
            std::snprintf(detail, sizeof detail,
                          "smallest gap %.2f MHz, want >= 1 MHz", min_gap / 1e6);
            add("resonance-gap", min_gap >= 1e6, detail);
        }
    }

    for (std::size_t i = 0; i < design.branches.size(); ++i) {
        const auto& branch = design.branches[i];
        if (branch.line.length <= 0.75) continue;
        if (branch.inductance <= 0.0 || branch.capacitance <= 0.0) continue;
        const double f = bit::branch_resonant_frequency(branch.inductance,
                                                        branch.capacitance);
        if (f <= 20e6) continue;
        char detail[128];
        std::snprintf(detail, sizeof detail,
                      "branch %zu: %.0f cm line with a %.1f MHz resonance degrades accuracy",
                      i, branch.line.length * 100.0, f / 1e6);
        rules.push_back({"line-length", "warn", detail});
    }

    bool failed = false;
    for (const auto& rule : rules) {
        std::cout << rule.status << "  " << rule.name << ": " << rule.detail << "\n";
        if (rule.status == "FAIL") failed = true;
    }
    std::cout << (failed ? "design invalid\n" : "design valid\n");
    return failed ? kExitEstimationFailure : kExitOk;
}

int cmd_peaks(const std::string& spectrum_path, bool as_impedance, double r0) {
    bit::Spectrum spectrum = bit::read_spectrum_file(spectrum_path);
    if (as_impedance) spectrum = bit::to_impedance(spectrum, r0);
    std::cout << "frequency_hz,magnitude\n";
    char line[64];
    for (const auto& minimum : bit::find_minima(spectrum)) {
        std::snprintf(line, sizeof line, "%.9e,%.9e\n", minimum.frequency,
                      minimum.magnitude);
        std::cout << line;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wireless multi-resonant textile interface toolkit"};
    app.require_subcommand(1);

    std::string design_path, spectrum_path, output_path;
    bool csv_output = false;

    auto* estimate = app.add_subcommand(
        "estimate", "Estimate sensor values from a measured S11 spectrum");
    estimate->add_option("design", design_path, "design JSON file")->required();
    estimate->add_option("spectrum", spectrum_path, "spectrum file (.s1p or .csv)")
        ->required();
    estimate->add_option("-o,--output", output_path, "write result here instead of stdout");
    estimate->add_flag("--csv", csv_output, "emit CSV instead of JSON");

    std::uint64_t seed = 1;
    bit::NoiseModel noise;
    double grid_start_mhz = 1.0, grid_stop_mhz = 30.0;
    std::size_t grid_points = 101;
    int quantize_decimals = 3;
    bool no_quantize = false;

    auto* simulate = app.add_subcommand(
        "simulate", "Synthesize an S11 spectrum from a ground-truth design");
    simulate->add_option("design", design_path, "design JSON file")->required();
    simulate->add_option("-o,--output", output_path, "output spectrum (.s1p or .csv)")
        ->required();
    simulate->add_option("--seed", seed, "noise RNG seed");
    simulate->add_option("--sigma", noise.gaussian_sigma, "Gaussian noise sigma per component");
    simulate->add_option("--decimals", quantize_decimals, "round S11 to this many decimals");
    simulate->add_flag("--no-quantize", no_quantize, "skip rounding entirely");
    simulate->add_option("--grid-start", grid_start_mhz, "grid start, MHz");
    simulate->add_option("--grid-stop", grid_stop_mhz, "grid stop, MHz");
    simulate->add_option("--grid-points", grid_points, "number of grid points");

    int experiment_number = 0;
    bit::ExperimentOptions experiment_options;

    auto* experiment = app.add_subcommand(
        "experiment", "Run one of the simulated accuracy experiments");
    experiment->add_option("number", experiment_number, "experiment number (1-3)")
        ->required()
        ->check(CLI::Range(1, 3));
    experiment->add_option("--reps", experiment_options.repetitions,
                           "repetitions per condition");
    experiment->add_option("--steps", experiment_options.sweep_steps,
                           "frequency sweep steps");
    experiment->add_option("--seed", experiment_options.seed, "base RNG seed");
    experiment->add_option("--sigma", experiment_options.noise.gaussian_sigma,
                           "noise sigma per S11 component");
    experiment->add_option("--threads", experiment_options.threads,
                           "worker threads (0: all cores)");
    experiment->add_option("-o,--output", output_path, "write the CSV report here");

    auto* validate = app.add_subcommand(
        "validate-design", "Check a design against the operating-region rules");
    validate->add_option("design", design_path, "design JSON file")->required();

    bool peaks_impedance = false;
    double peaks_r0 = 50.0;
    auto* peaks = app.add_subcommand("peaks", "List local magnitude minima of a spectrum");
    peaks->add_option("spectrum", spectrum_path, "spectrum file (.s1p or .csv)")->required();
    peaks->add_flag("--impedance", peaks_impedance, "convert S11 to impedance first");
    peaks->add_option("--r0", peaks_r0, "reference impedance for conversion, ohms");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        const int code = app.exit(error);
        return code == 0 ? kExitOk : kExitIoError;
    }

    try {
        if (*estimate) return cmd_estimate(design_path, spectrum_path, output_path, csv_output);
        if (*simulate) {
            noise.quantization_decimals =
                no_quantize ? std::nullopt : std::optional<int>(quantize_decimals);
            const bit::FrequencyGrid grid{grid_start_mhz * 1e6, grid_stop_mhz * 1e6,
                                          grid_points};
            return cmd_simulate(design_path, output_path, seed, noise, grid);
        }
        if (*experiment) return cmd_experiment(experiment_number, experiment_options, output_path);
        if (*validate) return cmd_validate_design(design_path);
        if (*peaks) return cmd_peaks(spectrum_path, peaks_impedance, peaks_r0);
    } catch (const bit::EstimationError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitEstimationFailure;
    } catch (const std::domain_error& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitEstimationFailure;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitIoError;
    }
    return kExitIoError;
}

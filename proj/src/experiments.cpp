#include "bit/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "bit/estimator.hpp"

namespace bit {

double symmetric_ratio_accuracy(double estimated, double truth) {
    if (estimated <= 0.0 || truth <= 0.0) return 0.0;
    const double ratio = estimated / truth;
    return std::min(ratio, 1.0 / ratio);
}

const char* to_string(AccuracyMetric metric) {
    switch (metric) {
        case AccuracyMetric::CouplingFactor: return "k-accuracy";
        case AccuracyMetric::Capacitance: return "c-accuracy";
        case AccuracyMetric::Resistance: return "r-accuracy";
        case AccuracyMetric::LineCapacitance: return "C_line-accuracy";
    }
    return "k-accuracy";
}

namespace {

struct LineRange {
    const char* label;
    double min_m;
    double max_m;
};

constexpr LineRange kLineRanges[] = {
    {"0-25cm", 0.0, 0.25},
    {"25-50cm", 0.25, 0.50},
    {"50-75cm", 0.50, 0.75},
    {"75-100cm", 0.75, 1.00},
};

struct Accumulator {
    double sum = 0.0;
    double sum_squares = 0.0;
    std::size_t count = 0;
    std::size_t failures = 0;

    void add(double accuracy) {
        sum += accuracy;
        sum_squares += accuracy * accuracy;
        ++count;
    }
    void fail() { ++failures; }

    ReportRow row(AccuracyMetric metric, double frequency_mhz,
                  const std::string& condition, double gap_mhz) const {
        ReportRow r;
        r.metric = metric;
        r.frequency_mhz = frequency_mhz;
        r.condition = condition;
        r.gap_mhz = gap_mhz;
        r.count = count;
        r.failures = failures;
        if (count > 0) {
            r.mean_accuracy = sum / static_cast<double>(count);
            const double variance =
                std::max(0.0, sum_squares / static_cast<double>(count) -
                                  r.mean_accuracy * r.mean_accuracy);
            r.std_accuracy = std::sqrt(variance);
        }
        return r;
    }
};

double sweep_frequency(double start_mhz, double stop_mhz, int steps, int index) {
    return start_mhz +
           (stop_mhz - start_mhz) * static_cast<double>(index) /
               static_cast<double>(steps - 1);
}

/// Runs fn(cell) for every cell index, optionally across worker threads.
/// Results land at their cell index, so aggregation order is fixed no
/// matter how cells are scheduled.
std::vector<std::vector<ReportRow>> map_cells(
    std::size_t cells, int threads,
    const std::function<std::vector<ReportRow>(std::size_t)>& fn) {
    std::vector<std::vector<ReportRow>> results(cells);
    unsigned worker_count = threads > 0
                                ? static_cast<unsigned>(threads)
                                : std::max(1u, std::thread::hardware_concurrency());
    worker_count = std::min<unsigned>(worker_count, cells == 0 ? 1 : cells);
    if (worker_count <= 1) {
        for (std::size_t i = 0; i < cells; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) {
        workers.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < cells; i = next.fetch_add(1))
                results[i] = fn(i);
        });
    }
    for (auto& worker : workers) worker.join();
    return results;
}

std::uint64_t stream_index(int experiment, std::size_t cell, int reps, int rep) {
    return (static_cast<std::uint64_t>(experiment) << 48) |
           (cell * static_cast<std::uint64_t>(reps) + static_cast<std::uint64_t>(rep));
}

ScenarioSpec base_scenario(const ExperimentOptions& options) {
    ScenarioSpec spec;
    spec.noise = options.noise;
    return spec;
}

}  // namespace

ExperimentReport run_experiment1(const ExperimentOptions& options) {
    constexpr int kRangeCount = 4;
    const int steps = options.sweep_steps;
    const std::size_t cells = static_cast<std::size_t>(kRangeCount) * steps;

    auto run_cell = [&](std::size_t cell) {
        const auto range = kLineRanges[cell / steps];
        const int freq_index = static_cast<int>(cell % steps);
        const double f_mhz = sweep_frequency(1.0, 30.0, steps, freq_index);

        ScenarioSpec spec = base_scenario(options);
        spec.line_length_min = range.min_m;
        spec.line_length_max = range.max_m;
        spec.reference_frequency = f_mhz * 1e6;

        Accumulator accuracy;
        for (int rep = 0; rep < options.repetitions; ++rep) {
            Rng rng = Rng::stream(options.seed, stream_index(1, cell, options.repetitions, rep));
            const SampledDesign sampled = sample_design(spec, rng);
            const Spectrum spectrum =
                synthesize_spectrum(sampled.truth, spec.grid, spec.noise, rng);
            try {
                const double k = step1_coupling_factor(spectrum, sampled.known);
                accuracy.add(symmetric_ratio_accuracy(k, sampled.truth.coupling_factor));
            } catch (const EstimationError&) {
                accuracy.fail();
            }
        }
        return std::vector<ReportRow>{
            accuracy.row(AccuracyMetric::CouplingFactor, f_mhz, range.label, 0.0)};
    };

    ExperimentReport report;
    report.experiment = 1;
    report.seed = options.seed;
    report.repetitions = options.repetitions;
    for (auto& rows : map_cells(cells, options.threads, run_cell))
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    return report;
}

namespace {

struct PipelineOutcome {
    bool capacitance_ok = false;
    double capacitance_accuracy = 0.0;
    bool resistance_ok = false;
    double resistance_accuracy = 0.0;
    bool lines_ok = false;
    double line_accuracy = 0.0;  // averaged over branches
};

/// One full pipeline run on a single sampled design. The truth design
/// carries resistive sensors (r deviates from nominal each repetition);
/// capacitive values are recovered first, treating each scored branch as a
/// capacitive sensor, then the resistive values and line capacitances are
/// fitted with the recovered capacitances substituted in.
PipelineOutcome run_pipeline(const ScenarioSpec& spec, Rng& rng,
                             std::size_t scored_branch) {
    PipelineOutcome outcome;
    const SampledDesign sampled = sample_design(spec, rng);
    const Spectrum spectrum = synthesize_spectrum(sampled.truth, spec.grid, spec.noise, rng);

    // Capacitive pass: every sensing branch becomes a capacitive sensor, so
    // steps 1-2 recover all series capacitances from the dip positions.
    KnownDesign capacitive_pass = sampled.known;
    for (auto& branch : capacitive_pass.nominal.branches)
        if (branch.role == BranchRole::ResistiveSensor)
            branch.role = BranchRole::CapacitiveSensor;

    std::vector<ReactiveEstimate> reactive;
    try {
        const double k = step1_coupling_factor(spectrum, capacitive_pass);
        reactive = step2_reactive_values(spectrum, capacitive_pass, k);
    } catch (const std::exception&) {
        return outcome;  // nothing recoverable without the coupling factor
    }

    // Resistive pass: branches keep their unknown resistances, but carry the
    // recovered series capacitances instead of the fabrication nominals.
    KnownDesign resistive_pass = sampled.known;
    for (const auto& estimate : reactive) {
        if (estimate.branch_index == scored_branch && estimate.ok) {
            outcome.capacitance_ok = true;
            outcome.capacitance_accuracy = symmetric_ratio_accuracy(
                estimate.sensor_value,
                sampled.truth.branches[scored_branch].capacitance);
        }
        if (estimate.ok)
            resistive_pass.nominal.branches[estimate.branch_index].capacitance =
                estimate.sensor_value;
    }

    EstimationResult result;
    try {
        result = estimate(spectrum, resistive_pass);
    } catch (const std::exception&) {
        return outcome;
    }

    const auto& entry = result.branches[scored_branch];
    if (entry.ok && result.solver_converged) {
        outcome.resistance_ok = true;
        outcome.resistance_accuracy = symmetric_ratio_accuracy(
            entry.sensor_value, sampled.truth.branches[scored_branch].resistance);
    }

    double line_sum = 0.0;
    std::size_t line_count = 0;
    for (std::size_t b = 0; b < sampled.truth.branches.size(); ++b) {
        const double truth_cap = sampled.truth.branches[b].line.capacitance;
        if (truth_cap <= 0.0) continue;
        line_sum += symmetric_ratio_accuracy(result.branches[b].line_capacitance, truth_cap);
        ++line_count;
    }
    if (line_count > 0) {
        outcome.lines_ok = true;
        outcome.line_accuracy = line_sum / static_cast<double>(line_count);
    }
    return outcome;
}

}  // namespace

ExperimentReport run_experiment2(const ExperimentOptions& options) {
    constexpr int kRangeCount = 4;
    const int steps = options.sweep_steps;
    // Cells 0..4*steps-1: the four line ranges; the final block repeats the
    // 50-75 cm range with the l/c ratio capped at 0.5 (resistive metric only).
    const std::size_t cells = static_cast<std::size_t>(kRangeCount + 1) * steps;

    auto run_cell = [&](std::size_t cell) {
        const std::size_t condition = cell / steps;
        const bool capped_ratio = condition == kRangeCount;
        const auto range = kLineRanges[capped_ratio ? 2 : condition];
        const int freq_index = static_cast<int>(cell % steps);
        const double f_mhz = sweep_frequency(1.0, 25.0, steps, freq_index);

        ScenarioSpec spec = base_scenario(options);
        spec.line_length_min = range.min_m;
        spec.line_length_max = range.max_m;
        spec.line_cap_fluctuation = options.line_cap_fluctuation;
        spec.sensor_frequencies = {f_mhz * 1e6};
        spec.sensor_roles = {BranchRole::ResistiveSensor};
        if (capped_ratio) spec.ratio_max = 0.5;

        const std::string label =
            capped_ratio ? std::string(range.label) + "|ratio<=0.5" : range.label;

        Accumulator capacitive, resistive, line;
        for (int rep = 0; rep < options.repetitions; ++rep) {
            Rng rng = Rng::stream(options.seed, stream_index(2, cell, options.repetitions, rep));
            const auto outcome = run_pipeline(spec, rng, 1);
            outcome.resistance_ok ? resistive.add(outcome.resistance_accuracy)
                                  : resistive.fail();
            if (capped_ratio) continue;  // this block reports resistive only
            outcome.capacitance_ok ? capacitive.add(outcome.capacitance_accuracy)
                                   : capacitive.fail();
            outcome.lines_ok ? line.add(outcome.line_accuracy) : line.fail();
        }

        std::vector<ReportRow> rows;
        if (!capped_ratio) {
            rows.push_back(capacitive.row(AccuracyMetric::Capacitance, f_mhz, label, 0.0));
            rows.push_back(line.row(AccuracyMetric::LineCapacitance, f_mhz, label, 0.0));
        }
        rows.push_back(resistive.row(AccuracyMetric::Resistance, f_mhz, label, 0.0));
        return rows;
    };

    ExperimentReport report;
    report.experiment = 2;
    report.seed = options.seed;
    report.repetitions = options.repetitions;
    for (auto& rows : map_cells(cells, options.threads, run_cell))
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    return report;
}

ExperimentReport run_experiment3(const ExperimentOptions& options) {
    constexpr int kGapCount = 5;
    const int steps = options.sweep_steps;
    const std::size_t cells = static_cast<std::size_t>(kGapCount) * steps;

    auto run_cell = [&](std::size_t cell) {
        const double gap_mhz = static_cast<double>(cell / steps + 1);
        const int freq_index = static_cast<int>(cell % steps);
        const double f_mhz = sweep_frequency(5.0, 20.0, steps, freq_index);
        // Neighbors sit one gap to each side, clamped into the 1-25 MHz band.
        const double lower_mhz = std::max(f_mhz - gap_mhz, 1.0);
        const double upper_mhz = std::min(f_mhz + gap_mhz, 25.0);

        ScenarioSpec spec = base_scenario(options);
        spec.line_length_min = 0.0;
        spec.line_length_max = 0.25;
        spec.line_cap_fluctuation = options.line_cap_fluctuation;
        spec.sensor_frequencies = {lower_mhz * 1e6, f_mhz * 1e6, upper_mhz * 1e6};
        // Only the middle branch carries an unknown resistance; the neighbors
        // are capacitive sensors whose resistances match fabrication.
        spec.sensor_roles = {BranchRole::CapacitiveSensor, BranchRole::ResistiveSensor,
                             BranchRole::CapacitiveSensor};

        const std::string label = "gap-" + std::to_string(static_cast<int>(gap_mhz)) + "MHz";

        Accumulator capacitive, resistive;
        for (int rep = 0; rep < options.repetitions; ++rep) {
            Rng rng = Rng::stream(options.seed, stream_index(3, cell, options.repetitions, rep));
            const auto outcome = run_pipeline(spec, rng, 2);
            outcome.capacitance_ok ? capacitive.add(outcome.capacitance_accuracy)
                                   : capacitive.fail();
            outcome.resistance_ok ? resistive.add(outcome.resistance_accuracy)
                                  : resistive.fail();
        }

        return std::vector<ReportRow>{
            capacitive.row(AccuracyMetric::Capacitance, f_mhz, label, gap_mhz),
            resistive.row(AccuracyMetric::Resistance, f_mhz, label, gap_mhz)};
    };

    ExperimentReport report;
    report.experiment = 3;
    report.seed = options.seed;
    report.repetitions = options.repetitions;
    for (auto& rows : map_cells(cells, options.threads, run_cell))
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    return report;
}

void write_report(const ExperimentReport& report, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open " + csv_path + " for writing");
    out << "experiment,metric,frequency_mhz,condition,gap_mhz,mean_accuracy,"
           "std_accuracy,count,failures\n";
    char buffer[64];
    for (const auto& row : report.rows) {
        std::snprintf(buffer, sizeof buffer, "%.4f", row.frequency_mhz);
        out << report.experiment << "," << to_string(row.metric) << "," << buffer << ","
            << row.condition << ",";
        std::snprintf(buffer, sizeof buffer, "%.1f", row.gap_mhz);
        out << buffer << ",";
        std::snprintf(buffer, sizeof buffer, "%.6f,%.6f", row.mean_accuracy,
                      row.std_accuracy);
        out << buffer << "," << row.count << "," << row.failures << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + csv_path);
}

std::string summarize_report(const ExperimentReport& report) {
    std::ostringstream out;
    out.precision(4);
    out << "experiment " << report.experiment << " (seed " << report.seed << ", "
        << report.repetitions << " repetitions per condition)\n";

    auto in_range = [](const ReportRow& row, double lo_mhz, double hi_mhz) {
        return row.frequency_mhz >= lo_mhz && row.frequency_mhz <= hi_mhz;
    };

    switch (report.experiment) {
        case 1: {
            out << "  coupling factor, reference >= 10 MHz: "
                << report.mean_over(AccuracyMetric::CouplingFactor,
                                    [&](const ReportRow& r) { return r.frequency_mhz >= 10.0; })
                << "\n";
            double lo = 1.0, hi = 0.0;
            for (const auto& row : report.rows) {
                if (row.frequency_mhz >= 10.0 || row.count == 0) continue;
                lo = std::min(lo, row.mean_accuracy);
                hi = std::max(hi, row.mean_accuracy);
            }
            out << "  coupling factor below 10 MHz: bin means " << lo << " to " << hi
                << "\n";
            break;
        }
        case 2: {
            auto short_lines = [&](const ReportRow& r) {
                return r.condition == "0-25cm" && in_range(r, 5.0, 25.0);
            };
            out << "  capacitive value, 5-25 MHz, lines < 25 cm: "
                << report.mean_over(AccuracyMetric::Capacitance, short_lines) << "\n";
            out << "  resistive value, 5-24 MHz, lines < 25 cm: "
                << report.mean_over(AccuracyMetric::Resistance,
                                    [&](const ReportRow& r) {
                                        return r.condition == "0-25cm" && in_range(r, 5.0, 24.0);
                                    })
                << "\n";
            out << "  line capacitance, all conditions: "
                << report.mean_over(AccuracyMetric::LineCapacitance,
                                    [](const ReportRow&) { return true; })
                << "\n";
            out << "  resistive value, 50-75 cm lines: "
                << report.mean_over(AccuracyMetric::Resistance,
                                    [](const ReportRow& r) { return r.condition == "50-75cm"; })
                << " uncapped vs "
                << report.mean_over(AccuracyMetric::Resistance,
                                    [](const ReportRow& r) {
                                        return r.condition == "50-75cm|ratio<=0.5";
                                    })
                << " with l/c ratio <= 0.5\n";
            break;
        }
        case 3: {
            for (int gap = 1; gap <= 5; ++gap) {
                auto with_gap = [gap](const ReportRow& r) {
                    return r.gap_mhz == static_cast<double>(gap);
                };
                out << "  gap " << gap << " MHz: capacitive "
                    << report.mean_over(AccuracyMetric::Capacitance, with_gap)
                    << ", resistive "
                    << report.mean_over(AccuracyMetric::Resistance, with_gap)
                    << ", resistive above 10 MHz "
                    << report.mean_over(AccuracyMetric::Resistance,
                                        [&](const ReportRow& r) {
                                            return with_gap(r) && r.frequency_mhz > 10.0;
                                        })
                    << "\n";
            }
            break;
        }
        default:
            break;
    }

    std::size_t failures = 0;
    for (const auto& row : report.rows) failures += row.failures;
    out << "  failed estimations (reported separately, excluded from means): "
        << failures << "\n";
    return out.str();
}

}  // namespace bit

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bit/simulator.hpp"

namespace bit {

/// Scoring metric: symmetric ratio accuracy min(est/true, true/est), so a
/// perfect estimate scores 1 and over/under-estimates score alike.
double symmetric_ratio_accuracy(double estimated, double truth);

enum class AccuracyMetric { CouplingFactor, Capacitance, Resistance, LineCapacitance };

const char* to_string(AccuracyMetric metric);

/// One aggregation cell of an experiment: a swept-frequency bin under one
/// condition (line-length range or resonance gap), for one metric.
struct ReportRow {
    AccuracyMetric metric = AccuracyMetric::CouplingFactor;
    double frequency_mhz = 0.0;   // swept resonant frequency of this bin
    std::string condition;        // line-range label or gap label
    double gap_mhz = 0.0;         // 0 when not applicable
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::size_t count = 0;     // successful estimations in the bin
    std::size_t failures = 0;  // estimations that produced no value
};

struct ExperimentReport {
    int experiment = 0;
    std::uint64_t seed = 0;
    int repetitions = 0;
    std::vector<ReportRow> rows;

    /// Mean of mean_accuracy over rows matching metric and predicate.
    template <typename Predicate>
    double mean_over(AccuracyMetric metric, Predicate&& predicate) const {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& row : rows) {
            if (row.metric != metric || !predicate(row)) continue;
            sum += row.mean_accuracy;
            ++n;
        }
        return n == 0 ? 0.0 : sum / static_cast<double>(n);
    }
};

struct ExperimentOptions {
    int repetitions = 100;
    int sweep_steps = 100;
    std::uint64_t seed = 1;
    NoiseModel noise;               // sigma 5e-4, 3 decimals by default
    double line_cap_fluctuation = 0.2;  // experiments 2 and 3 only
    int threads = 0;                // 0: hardware concurrency
};

/// Coupling-factor accuracy vs. reference resonance (1-30 MHz) and line
/// length range, reference-only interface.
ExperimentReport run_experiment1(const ExperimentOptions& options = {});

/// Single-sensor accuracy (capacitive, resistive, line capacitance) vs.
/// sensor resonance (1-25 MHz) and line range, reference fixed at 27 MHz.
/// Includes an extra 50-75 cm condition with the l/c ratio capped at 0.5.
ExperimentReport run_experiment2(const ExperimentOptions& options = {});

/// Three-sensor interference: middle-branch accuracy vs. its resonance
/// (5-20 MHz) and the gap to its neighbors (1-5 MHz), lines 0-25 cm.
ExperimentReport run_experiment3(const ExperimentOptions& options = {});

/// CSV table plus a plain-text summary of the headline bins.
void write_report(const ExperimentReport& report, const std::string& csv_path);
std::string summarize_report(const ExperimentReport& report);

}  // namespace bit

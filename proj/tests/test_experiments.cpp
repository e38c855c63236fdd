#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "bit/experiments.hpp"
#include "bit/rng.hpp"

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bit::ExperimentOptions smoke_options() {
    bit::ExperimentOptions options;
    options.repetitions = 2;
    options.sweep_steps = 6;
    options.seed = 5;
    return options;
}

}  // namespace

TEST_CASE("symmetric ratio accuracy properties") {
    CHECK(bit::symmetric_ratio_accuracy(10.0, 10.0) == 1.0);

    // Symmetric in over- and under-estimation.
    CHECK(bit::symmetric_ratio_accuracy(8.0, 10.0) ==
          doctest::Approx(bit::symmetric_ratio_accuracy(12.5, 10.0)));
    CHECK(bit::symmetric_ratio_accuracy(8.0, 10.0) == doctest::Approx(0.8));

    // Scale invariant and bounded by (0, 1].
    bit::Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const double truth = rng.uniform(1e-12, 1e-6);
        const double estimated = truth * rng.uniform(0.1, 10.0);
        const double accuracy = bit::symmetric_ratio_accuracy(estimated, truth);
        CHECK(accuracy > 0.0);
        CHECK(accuracy <= 1.0);
        const double scaled =
            bit::symmetric_ratio_accuracy(1e9 * estimated, 1e9 * truth);
        CHECK(accuracy == doctest::Approx(scaled).epsilon(1e-12));
    }
}

TEST_CASE("experiment 1 smoke run has the expected shape") {
    const bit::ExperimentOptions options = smoke_options();
    const bit::ExperimentReport report = bit::run_experiment1(options);

    CHECK(report.experiment == 1);
    CHECK(report.seed == options.seed);
    CHECK(report.repetitions == options.repetitions);

    // One coupling-factor row per (line range, swept frequency) cell.
    CHECK(report.rows.size() == 4 * static_cast<std::size_t>(options.sweep_steps));
    std::set<std::string> conditions;
    for (const auto& row : report.rows) {
        CHECK(row.metric == bit::AccuracyMetric::CouplingFactor);
        CHECK(row.count + row.failures ==
              static_cast<std::size_t>(options.repetitions));
        CHECK(row.frequency_mhz >= 1.0);
        CHECK(row.frequency_mhz <= 30.0);
        if (row.count > 0) {
            CHECK(row.mean_accuracy > 0.0);
            CHECK(row.mean_accuracy <= 1.0);
        }
        conditions.insert(row.condition);
    }
    CHECK(conditions ==
          std::set<std::string>{"0-25cm", "25-50cm", "50-75cm", "75-100cm"});

    // Short lines at readable frequencies score essentially perfectly.
    for (const auto& row : report.rows)
        if (row.condition == "0-25cm" && row.frequency_mhz >= 10.0 && row.count > 0)
            CHECK(row.mean_accuracy > 0.97);
}

TEST_CASE("experiment 2 smoke run covers all metrics and conditions") {
    const bit::ExperimentOptions options = smoke_options();
    const bit::ExperimentReport report = bit::run_experiment2(options);

    CHECK(report.experiment == 2);
    std::set<std::string> conditions;
    bool saw_capacitance = false, saw_resistance = false, saw_lines = false;
    for (const auto& row : report.rows) {
        conditions.insert(row.condition);
        CHECK(row.count + row.failures <=
              static_cast<std::size_t>(options.repetitions));
        if (row.metric == bit::AccuracyMetric::Capacitance) saw_capacitance = true;
        if (row.metric == bit::AccuracyMetric::Resistance) saw_resistance = true;
        if (row.metric == bit::AccuracyMetric::LineCapacitance) saw_lines = true;
    }
    CHECK(saw_capacitance);
    CHECK(saw_resistance);
    CHECK(saw_lines);
    // Four line ranges plus the ratio-capped long-line condition.
    CHECK(conditions.count("0-25cm") == 1);
    CHECK(conditions.count("75-100cm") == 1);
    CHECK(conditions.count("50-75cm|ratio<=0.5") == 1);
}

TEST_CASE("experiment 3 smoke run sweeps the resonance gap") {
    bit::ExperimentOptions options = smoke_options();
    options.sweep_steps = 4;
    const bit::ExperimentReport report = bit::run_experiment3(options);

    CHECK(report.experiment == 3);
    std::set<double> gaps;
    for (const auto& row : report.rows) {
        gaps.insert(row.gap_mhz);
        CHECK(row.frequency_mhz >= 5.0);
        CHECK(row.frequency_mhz <= 20.0);
        CHECK(row.condition == "gap-" + std::to_string(static_cast<int>(row.gap_mhz)) +
                                   "MHz");
    }
    CHECK(gaps == std::set<double>{1.0, 2.0, 3.0, 4.0, 5.0});
}

TEST_CASE("reports are deterministic for a fixed seed") {
    const bit::ExperimentOptions options = smoke_options();
    const std::string path_a = temp_path("report_a.csv");
    const std::string path_b = temp_path("report_b.csv");
    bit::write_report(bit::run_experiment1(options), path_a);
    bit::write_report(bit::run_experiment1(options), path_b);
    CHECK(slurp(path_a) == slurp(path_b));

    bit::ExperimentOptions reseeded = options;
    reseeded.seed = options.seed + 1;
    const std::string path_c = temp_path("report_c.csv");
    bit::write_report(bit::run_experiment1(reseeded), path_c);
    CHECK(slurp(path_a) != slurp(path_c));

    std::filesystem::remove(path_a);
    std::filesystem::remove(path_b);
    std::filesystem::remove(path_c);
}

TEST_CASE("report CSV carries the documented header and row count") {
    const bit::ExperimentReport report = bit::run_experiment1(smoke_options());
    const std::string path = temp_path("report_header.csv");
    bit::write_report(report, path);

    std::ifstream in(path);
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header ==
          "experiment,metric,frequency_mhz,condition,gap_mhz,mean_accuracy,"
          "std_accuracy,count,failures");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == report.rows.size());
    std::filesystem::remove(path);

    const std::string summary = summarize_report(report);
    CHECK(summary.find("experiment 1") != std::string::npos);
}

TEST_CASE("mean_over aggregates only matching rows") {
    bit::ExperimentReport report;
    bit::ReportRow row;
    row.metric = bit::AccuracyMetric::Capacitance;
    row.frequency_mhz = 10.0;
    row.mean_accuracy = 0.9;
    report.rows.push_back(row);
    row.frequency_mhz = 20.0;
    row.mean_accuracy = 0.7;
    report.rows.push_back(row);
    row.metric = bit::AccuracyMetric::Resistance;
    row.mean_accuracy = 0.1;
    report.rows.push_back(row);

    const double all = report.mean_over(bit::AccuracyMetric::Capacitance,
                                        [](const bit::ReportRow&) { return true; });
    CHECK(all == doctest::Approx(0.8));
    const double high = report.mean_over(
        bit::AccuracyMetric::Capacitance,
        [](const bit::ReportRow& r) { return r.frequency_mhz > 15.0; });
    CHECK(high == doctest::Approx(0.7));
    const double none = report.mean_over(
        bit::AccuracyMetric::LineCapacitance,
        [](const bit::ReportRow&) { return true; });
    CHECK(none == 0.0);
}

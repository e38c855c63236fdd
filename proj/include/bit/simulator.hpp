#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bit/circuit_model.hpp"
#include "bit/estimator.hpp"
#include "bit/rng.hpp"
#include "bit/spectrum.hpp"

namespace bit {

enum class LineStyle { Twisted, Parallel10mm, Parallel5mm, Parallel2_5mm };

const char* to_string(LineStyle style);
LineStyle line_style_from_string(const std::string& s);

/// Per-length lumped parameters of a transmission line style.
struct LineModel {
    LineStyle style = LineStyle::Twisted;
    double capacitance_per_meter = 0.0;  // F/m
    double inductance_per_meter = 0.0;   // H/m
    double resistance_per_meter = 0.0;   // ohm/m

    static LineModel twisted();
    static LineModel parallel_10mm();
    static LineModel parallel_5mm();
    static LineModel parallel_2_5mm();
    static LineModel for_style(LineStyle style);
};

/// Linear per-length scaling of the line parasitics.
LineParams line_from_length(const LineModel& model, double length_meters);

/// Measurement imperfections applied to a synthesized S11 spectrum:
/// additive Gaussian noise per component, then rounding to a fixed number
/// of decimals (round-half-even). No decimals value means no rounding.
struct NoiseModel {
    double gaussian_sigma = 5e-4;
    std::optional<int> quantization_decimals = 3;
    std::uint64_t rng_seed = 0;
};

/// Randomized-design protocol for one simulated measurement. Sensor branch
/// resonances are set explicitly (experiments sweep them); everything else
/// is drawn per repetition.
struct ScenarioSpec {
    FrequencyGrid grid{1e6, 30e6, 101};
    NoiseModel noise;

    ReaderParams reader{0.6e-6, 10e-12, 50.0};
    double receiver_inductance = 4.54e-6;

    double coupling_min = 0.25;
    double coupling_max = 0.29;

    LineModel line_model = LineModel::twisted();
    double line_length_min = 0.0;   // meters
    double line_length_max = 0.25;  // meters
    double line_cap_fluctuation = 0.0;  // true C_line = nominal * (1 +/- this)

    // l/c ratio drawn per sensor branch, in uH per pF.
    double ratio_min = 0.1;
    double ratio_max = 2.0;

    // Nominal sensor-circuit resistance range; the true value of a resistive
    // sensor varies by +/- resistance_variation around the nominal.
    double resistance_min = 10.0;
    double resistance_max = 60.0;
    double resistance_variation = 0.5;

    double reference_frequency = 27e6;        // hertz
    double reference_ratio = 1.0;             // uH per pF
    std::vector<double> sensor_frequencies;   // hertz, one per sensor branch
    std::vector<BranchRole> sensor_roles;     // role per sensor branch
};

/// Series l and c realizing a resonance with the given l[uH]/c[pF] ratio.
void components_from_ratio(double resonant_frequency, double ratio_uh_per_pf,
                           double& inductance, double& capacitance);

struct SampledDesign {
    InterfaceDesign truth;  // what the simulator evaluates
    KnownDesign known;      // what the estimator is told
};

/// Draws one randomized (ground truth, known) design pair.
SampledDesign sample_design(const ScenarioSpec& spec, Rng& rng);

/// Evaluates the circuit model over the grid, converts to S11, then applies
/// the noise model.
Spectrum synthesize_spectrum(const InterfaceDesign& design, const FrequencyGrid& grid,
                             const NoiseModel& noise, Rng& rng);

}  // namespace bit

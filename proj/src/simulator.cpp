#include "bit/simulator.hpp"

#include <cmath>
#include <stdexcept>

namespace bit {

const char* to_string(LineStyle style) {
    switch (style) {
        case LineStyle::Twisted: return "twisted";
        case LineStyle::Parallel10mm: return "parallel-10mm";
        case LineStyle::Parallel5mm: return "parallel-5mm";
        case LineStyle::Parallel2_5mm: return "parallel-2.5mm";
    }
    return "twisted";
}

LineStyle line_style_from_string(const std::string& s) {
    if (s == "twisted") return LineStyle::Twisted;
    if (s == "parallel-10mm") return LineStyle::Parallel10mm;
    if (s == "parallel-5mm") return LineStyle::Parallel5mm;
    if (s == "parallel-2.5mm") return LineStyle::Parallel2_5mm;
    throw std::domain_error("unknown line style: " + s);
}

// Twisted-pair capacitance is anchored at 113.5 pF for a 1.2 m line; the
// inductance coefficient is consistent with a 40 cm line self-resonating
// near 112 MHz. Parallel styles are scaled from bench measurements of a
// 0.62 m test line.
LineModel LineModel::twisted() {
    return {LineStyle::Twisted, 94.583e-12, 0.1334e-6, 1.25};
}

LineModel LineModel::parallel_10mm() {
    return {LineStyle::Parallel10mm, 7.72e-12, 1.978e-6, 1.25};
}

LineModel LineModel::parallel_5mm() {
    return {LineStyle::Parallel5mm, 10.04e-12, 1.865e-6, 1.25};
}

LineModel LineModel::parallel_2_5mm() {
    return {LineStyle::Parallel2_5mm, 12.16e-12, 1.54e-6, 1.25};
}

LineModel LineModel::for_style(LineStyle style) {
    switch (style) {
        case LineStyle::Twisted: return twisted();
        case LineStyle::Parallel10mm: return parallel_10mm();
        case LineStyle::Parallel5mm: return parallel_5mm();
        case LineStyle::Parallel2_5mm: return parallel_2_5mm();
    }
    return twisted();
}

LineParams line_from_length(const LineModel& model, double length_meters) {
    if (length_meters < 0.0) throw std::domain_error("line length must be >= 0");
    LineParams params;
    params.capacitance = model.capacitance_per_meter * length_meters;
    params.inductance = model.inductance_per_meter * length_meters;
    params.resistance = model.resistance_per_meter * length_meters;
    params.length = length_meters;
    return params;
}

void components_from_ratio(double resonant_frequency, double ratio_uh_per_pf,
                           double& inductance, double& capacitance) {
    if (resonant_frequency <= 0.0) throw std::domain_error("resonant frequency must be > 0");
    if (ratio_uh_per_pf <= 0.0) throw std::domain_error("l/c ratio must be > 0");
    const double w = kTwoPi * resonant_frequency;
    const double lc_product = 1.0 / (w * w);
    // l[H] = ratio * c[F] * 1e6 when the ratio is expressed in uH per pF.
    capacitance = std::sqrt(lc_product / (ratio_uh_per_pf * 1e6));
    inductance = lc_product / capacitance;
}

SampledDesign sample_design(const ScenarioSpec& spec, Rng& rng) {
    if (spec.sensor_frequencies.size() != spec.sensor_roles.size())
        throw std::domain_error("sensor frequency/role counts must match");

    SampledDesign sampled;
    InterfaceDesign& truth = sampled.truth;
    truth.reader = spec.reader;
    truth.receiver_inductance = spec.receiver_inductance;
    truth.coupling_factor = rng.uniform(spec.coupling_min, spec.coupling_max);

    auto draw_line = [&]() {
        const double length = rng.uniform(spec.line_length_min, spec.line_length_max);
        return line_from_length(spec.line_model, length);
    };
    auto fluctuate_line = [&](const LineParams& nominal) {
        LineParams actual = nominal;
        if (spec.line_cap_fluctuation > 0.0)
            actual.capacitance *= 1.0 + rng.uniform(-spec.line_cap_fluctuation,
                                                    spec.line_cap_fluctuation);
        return actual;
    };

    InterfaceDesign nominal = truth;

    {
        SensorBranch reference;
        reference.role = BranchRole::Reference;
        reference.resistance = 0.0;
        components_from_ratio(spec.reference_frequency, spec.reference_ratio,
                              reference.inductance, reference.capacitance);
        reference.line = draw_line();
        nominal.branches.push_back(reference);
        reference.line = fluctuate_line(reference.line);
        truth.branches.push_back(reference);
    }

    for (std::size_t s = 0; s < spec.sensor_frequencies.size(); ++s) {
        SensorBranch branch;
        branch.role = spec.sensor_roles[s];
        const double ratio = rng.uniform(spec.ratio_min, spec.ratio_max);
        components_from_ratio(spec.sensor_frequencies[s], ratio, branch.inductance,
                              branch.capacitance);
        branch.resistance = rng.uniform(spec.resistance_min, spec.resistance_max);
        branch.line = draw_line();

        SensorBranch actual = branch;
        if (branch.role == BranchRole::ResistiveSensor) {
            // Only the unknown component deviates from its fabrication value.
            actual.resistance =
                branch.resistance *
                (1.0 + rng.uniform(-spec.resistance_variation, spec.resistance_variation));
        }
        actual.line = fluctuate_line(branch.line);

        nominal.branches.push_back(branch);
        truth.branches.push_back(actual);
    }

    sampled.known.nominal = std::move(nominal);
    return sampled;
}

namespace {

double quantize(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::nearbyint(value * scale) / scale;  // round-half-even
}

}  // namespace

Spectrum synthesize_spectrum(const InterfaceDesign& design, const FrequencyGrid& grid,
                             const NoiseModel& noise, Rng& rng) {
    grid.validate();
    Spectrum spectrum;
    spectrum.grid = grid;
    spectrum.kind = SpectrumKind::S11;
    spectrum.values.reserve(grid.points);
    const double r0 = design.reader.reference_impedance;
    for (std::size_t i = 0; i < grid.points; ++i) {
        const Complex z = system_impedance(design, grid.frequency(i));
        Complex s11 = s11_from_impedance(z, r0);
        if (noise.gaussian_sigma > 0.0) {
            s11 += Complex{rng.gaussian(0.0, noise.gaussian_sigma),
                           rng.gaussian(0.0, noise.gaussian_sigma)};
        }
        if (noise.quantization_decimals) {
            s11 = Complex{quantize(s11.real(), *noise.quantization_decimals),
                          quantize(s11.imag(), *noise.quantization_decimals)};
        }
        spectrum.values.push_back(s11);
    }
    return spectrum;
}

}  // namespace bit

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bit/circuit_model.hpp"

namespace bit {

/// Uniform linear frequency grid.
struct FrequencyGrid {
    double start = 0.0;  // hertz
    double stop = 0.0;   // hertz
    std::size_t points = 0;

    void validate() const;
    double spacing() const { return (stop - start) / static_cast<double>(points - 1); }
    double frequency(std::size_t i) const {
        return start + spacing() * static_cast<double>(i);
    }
    bool operator==(const FrequencyGrid&) const = default;
};

enum class SpectrumKind { S11, Impedance };

/// Sampled complex S11 or impedance values over a frequency grid.
struct Spectrum {
    FrequencyGrid grid;
    std::vector<Complex> values;
    SpectrumKind kind = SpectrumKind::S11;

    void validate() const;
};

/// Piecewise-linear interpolation, applied to the real and imaginary parts
/// independently. f must lie within the grid.
Complex interpolate(const Spectrum& spectrum, double frequency);

/// Element-wise conversion between S11 and impedance (and back).
Spectrum to_impedance(const Spectrum& spectrum, double reference_impedance);
Spectrum to_s11(const Spectrum& spectrum, double reference_impedance);

struct SpectrumMinimum {
    double frequency = 0.0;
    double magnitude = 0.0;
};

/// Strict local minima of |value| over the grid, optionally refined by a
/// parabola through the three surrounding samples. Sorted by frequency.
std::vector<SpectrumMinimum> find_minima(const Spectrum& spectrum,
                                         bool parabolic_refinement = true);

/// Touchstone v1 one-port files, RI format. The writer emits "# Hz S RI R 50";
/// the parser also accepts kHz/MHz/GHz unit headers and comment lines.
Spectrum read_touchstone(const std::string& path);
void write_touchstone(const Spectrum& spectrum, const std::string& path);

/// CSV with header "frequency_hz,s11_real,s11_imag".
Spectrum read_csv(const std::string& path);
void write_csv(const Spectrum& spectrum, const std::string& path);

/// Dispatch on file extension (.s1p vs .csv).
Spectrum read_spectrum_file(const std::string& path);
void write_spectrum_file(const Spectrum& spectrum, const std::string& path);

}  // namespace bit

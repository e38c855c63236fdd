#include "bit/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bit {

namespace {

void require(bool condition, const std::string& message) {
    if (!condition) throw std::domain_error(message);
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

void FrequencyGrid::validate() const {
    require(start > 0.0, "grid start must be > 0");
    require(stop > start, "grid stop must exceed start");
    require(points >= 2, "grid needs at least 2 points");
}

void Spectrum::validate() const {
    grid.validate();
    require(values.size() == grid.points, "value count must match grid points");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
            throw std::domain_error("non-finite spectrum value at index " +
                                    std::to_string(i));
    }
}

Complex interpolate(const Spectrum& spectrum, double frequency) {
    const auto& grid = spectrum.grid;
    if (frequency < grid.start || frequency > grid.stop)
        throw std::out_of_range("frequency outside spectrum grid");
    const double position = (frequency - grid.start) / grid.spacing();
    auto lower = static_cast<std::size_t>(position);
    if (lower >= grid.points - 1) lower = grid.points - 2;
    const double t = position - static_cast<double>(lower);
    const Complex a = spectrum.values[lower];
    const Complex b = spectrum.values[lower + 1];
    return a + t * (b - a);
}

Spectrum to_impedance(const Spectrum& spectrum, double reference_impedance) {
    if (spectrum.kind == SpectrumKind::Impedance) return spectrum;
    Spectrum out;
    out.grid = spectrum.grid;
    out.kind = SpectrumKind::Impedance;
    out.values.reserve(spectrum.values.size());
    for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
        try {
            out.values.push_back(impedance_from_s11(spectrum.values[i], reference_impedance));
        } catch (const SingularityError&) {
            throw SingularityError("S11 = 1 at index " + std::to_string(i));
        }
    }
    return out;
}

Spectrum to_s11(const Spectrum& spectrum, double reference_impedance) {
    if (spectrum.kind == SpectrumKind::S11) return spectrum;
    Spectrum out;
    out.grid = spectrum.grid;
    out.kind = SpectrumKind::S11;
    out.values.reserve(spectrum.values.size());
    for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
        try {
            out.values.push_back(s11_from_impedance(spectrum.values[i], reference_impedance));
        } catch (const SingularityError&) {
            throw SingularityError("impedance = -R0 at index " + std::to_string(i));
        }
    }
    return out;
}

std::vector<SpectrumMinimum> find_minima(const Spectrum& spectrum,
                                         bool parabolic_refinement) {
    std::vector<SpectrumMinimum> minima;
    const auto& grid = spectrum.grid;
    for (std::size_t i = 1; i + 1 < grid.points; ++i) {
        const double prev = std::abs(spectrum.values[i - 1]);
        const double mid = std::abs(spectrum.values[i]);
        const double next = std::abs(spectrum.values[i + 1]);
        if (!(mid < prev && mid < next)) continue;

        double f = grid.frequency(i);
        double magnitude = mid;
        if (parabolic_refinement) {
            // Vertex of the parabola through the three samples.
            const double denom = prev - 2.0 * mid + next;
            if (denom > 0.0) {
                const double offset = 0.5 * (prev - next) / denom;
                f += offset * grid.spacing();
                magnitude = mid - 0.25 * (prev - next) * offset;
            }
        }
        minima.push_back({f, magnitude});
    }
    return minima;
}

namespace {

double unit_scale(const std::string& unit) {
    const std::string u = lowercase(unit);
    if (u == "hz") return 1.0;
    if (u == "khz") return 1e3;
    if (u == "mhz") return 1e6;
    if (u == "ghz") return 1e9;
    throw std::runtime_error("unsupported Touchstone frequency unit: " + unit);
}

[[noreturn]] void parse_error(const std::string& path, std::size_t line_number,
                              const std::string& message) {
    throw std::runtime_error(path + ":" + std::to_string(line_number) + ": " + message);
}

Spectrum spectrum_from_samples(std::vector<double> frequencies,
                               std::vector<Complex> values,
                               const std::string& path) {
    if (frequencies.size() < 2)
        throw std::runtime_error(path + ": fewer than 2 data rows");
    Spectrum spectrum;
    spectrum.kind = SpectrumKind::S11;
    spectrum.grid.start = frequencies.front();
    spectrum.grid.stop = frequencies.back();
    spectrum.grid.points = frequencies.size();
    spectrum.values = std::move(values);
    spectrum.grid.validate();
    // Tolerate representation-level jitter in the stored grid.
    const double spacing = spectrum.grid.spacing();
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        if (std::abs(frequencies[i] - spectrum.grid.frequency(i)) > 1e-6 * spacing + 1e-3)
            throw std::runtime_error(path + ": frequency samples are not uniformly spaced");
    }
    return spectrum;
}

}  // namespace

Spectrum read_touchstone(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    double scale = 1e9;  // Touchstone default unit is GHz
    bool saw_header = false;
    std::vector<double> frequencies;
    std::vector<Complex> values;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (auto pos = line.find('!'); pos != std::string::npos) line.erase(pos);
        std::istringstream row(line);
        std::string first;
        if (!(row >> first)) continue;
        if (first == "#") {
            std::string unit, parameter, format, r_token;
            double r0 = 50.0;
            if (!(row >> unit >> parameter >> format >> r_token >> r0))
                parse_error(path, line_number, "malformed option line");
            if (lowercase(parameter) != "s")
                parse_error(path, line_number, "only S-parameter files are supported");
            if (lowercase(format) != "ri")
                parse_error(path, line_number, "only RI format is supported");
            scale = unit_scale(unit);
            saw_header = true;
            continue;
        }
        double frequency = 0.0, real = 0.0, imag = 0.0;
        try {
            frequency = std::stod(first);
        } catch (const std::exception&) {
            parse_error(path, line_number, "expected a numeric frequency");
        }
        if (!(row >> real >> imag))
            parse_error(path, line_number, "expected 3 columns (freq, real, imag)");
        double extra;
        if (row >> extra)
            parse_error(path, line_number, "too many columns for a one-port file");
        frequencies.push_back(frequency * scale);
        values.emplace_back(real, imag);
    }
    if (!saw_header) throw std::runtime_error(path + ": missing '#' option line");
    return spectrum_from_samples(std::move(frequencies), std::move(values), path);
}

void write_touchstone(const Spectrum& spectrum, const std::string& path) {
    const Spectrum s11 = to_s11(spectrum, 50.0);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "# Hz S RI R 50\n";
    char buffer[96];
    for (std::size_t i = 0; i < s11.grid.points; ++i) {
        std::snprintf(buffer, sizeof buffer, "%.9e %.9e %.9e\n",
                      s11.grid.frequency(i), s11.values[i].real(), s11.values[i].imag());
        out << buffer;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Spectrum read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t line_number = 0;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    ++line_number;
    if (line.ends_with("\r")) line.pop_back();
    if (line != "frequency_hz,s11_real,s11_imag")
        parse_error(path, line_number, "expected header 'frequency_hz,s11_real,s11_imag'");

    std::vector<double> frequencies;
    std::vector<Complex> values;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.ends_with("\r")) line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        double columns[3];
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(row, field, ','))
                parse_error(path, line_number, "expected 3 comma-separated columns");
            try {
                columns[c] = std::stod(field);
            } catch (const std::exception&) {
                parse_error(path, line_number, "non-numeric field '" + field + "'");
            }
        }
        if (std::getline(row, field, ','))
            parse_error(path, line_number, "expected 3 comma-separated columns");
        frequencies.push_back(columns[0]);
        values.emplace_back(columns[1], columns[2]);
    }
    return spectrum_from_samples(std::move(frequencies), std::move(values), path);
}

void write_csv(const Spectrum& spectrum, const std::string& path) {
    const Spectrum s11 = to_s11(spectrum, 50.0);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "frequency_hz,s11_real,s11_imag\n";
    char buffer[96];
    for (std::size_t i = 0; i < s11.grid.points; ++i) {
        std::snprintf(buffer, sizeof buffer, "%.9e,%.9e,%.9e\n",
                      s11.grid.frequency(i), s11.values[i].real(), s11.values[i].imag());
        out << buffer;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Spectrum read_spectrum_file(const std::string& path) {
    if (path.ends_with(".csv")) return read_csv(path);
    return read_touchstone(path);
}

void write_spectrum_file(const Spectrum& spectrum, const std::string& path) {
    if (path.ends_with(".csv"))
        write_csv(spectrum, path);
    else
        write_touchstone(spectrum, path);
}

}  // namespace bit

#include "bit/circuit_model.hpp"

#include <cmath>

namespace bit {

namespace {

constexpr Complex kJ{0.0, 1.0};

bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

void require(bool condition, const char* message) {
    if (!condition) throw std::domain_error(message);
}

}  // namespace

void LineParams::validate() const {
    require(resistance >= 0.0, "line resistance must be >= 0");
    require(inductance >= 0.0, "line inductance must be >= 0");
    require(capacitance >= 0.0, "line capacitance must be >= 0");
    require(length >= 0.0, "line length must be >= 0");
}

const char* to_string(BranchRole role) {
    switch (role) {
        case BranchRole::CapacitiveSensor: return "capacitive-sensor";
        case BranchRole::InductiveSensor: return "inductive-sensor";
        case BranchRole::ResistiveSensor: return "resistive-sensor";
        case BranchRole::Reference: return "reference";
        case BranchRole::Fixed: return "fixed";
    }
    return "fixed";
}

BranchRole branch_role_from_string(const std::string& s) {
    if (s == "capacitive-sensor") return BranchRole::CapacitiveSensor;
    if (s == "inductive-sensor") return BranchRole::InductiveSensor;
    if (s == "resistive-sensor") return BranchRole::ResistiveSensor;
    if (s == "reference") return BranchRole::Reference;
    if (s == "fixed") return BranchRole::Fixed;
    throw std::domain_error("unknown branch role: " + s);
}

void SensorBranch::validate() const {
    require(resistance >= 0.0, "branch resistance must be >= 0");
    require(inductance > 0.0, "branch inductance must be > 0");
    require(capacitance > 0.0, "branch capacitance must be > 0");
    line.validate();
}

void ReaderParams::validate() const {
    require(transmitter_inductance > 0.0, "transmitter inductance must be > 0");
    require(parasitic_capacitance >= 0.0, "parasitic capacitance must be >= 0");
    require(reference_impedance > 0.0, "reference impedance must be > 0");
}

void InterfaceDesign::validate() const {
    reader.validate();
    require(receiver_inductance > 0.0, "receiver inductance must be > 0");
    require(coupling_factor >= 0.0 && coupling_factor <= 1.0,
            "coupling factor must be in [0, 1]");
    require(!branches.empty(), "design needs at least one branch");
    for (const auto& branch : branches) branch.validate();
    for (std::size_t i = 0; i < branches.size(); ++i) {
        double fi = branch_resonant_frequency(branches[i].inductance, branches[i].capacitance);
        for (std::size_t j = i + 1; j < branches.size(); ++j) {
            double fj = branch_resonant_frequency(branches[j].inductance, branches[j].capacitance);
            require(std::abs(fi - fj) > 1.0, "branch resonant frequencies must be distinct");
        }
    }
}

double branch_resonant_frequency(double inductance, double capacitance) {
    require(inductance > 0.0, "inductance must be > 0");
    require(capacitance > 0.0, "capacitance must be > 0");
    return 1.0 / (kTwoPi * std::sqrt(inductance * capacitance));
}

Complex branch_impedance(const SensorBranch& branch, double frequency) {
    require(frequency > 0.0, "frequency must be > 0");
    const double w = kTwoPi * frequency;

    const Complex series_rlc =
        branch.resistance + kJ * (w * branch.inductance - 1.0 / (w * branch.capacitance));
    Complex inner;
    if (branch.line.capacitance > 0.0) {
        if (series_rlc == Complex{0.0, 0.0}) {
            // RLC short: the parallel line capacitance is shorted out too.
            inner = Complex{0.0, 0.0};
        } else {
            inner = 1.0 / (1.0 / series_rlc + kJ * w * branch.line.capacitance);
        }
    } else {
        inner = series_rlc;
    }
    const Complex z = inner + kJ * w * branch.line.inductance + branch.line.resistance;
    if (!is_finite(z)) throw std::domain_error("branch impedance is non-finite");
    return z;
}

Complex mutual_impedance(double frequency, double coupling_factor,
                         double transmitter_inductance, double receiver_inductance) {
    const double w = kTwoPi * frequency;
    return kJ * w * coupling_factor *
           std::sqrt(transmitter_inductance * receiver_inductance);
}

Complex system_impedance(const InterfaceDesign& design, double frequency) {
    require(frequency > 0.0, "frequency must be > 0");
    const double w = kTwoPi * frequency;
    const Complex jwlt = kJ * w * design.reader.transmitter_inductance;

    Complex reader_branch;
    if (design.coupling_factor == 0.0) {
        reader_branch = jwlt;
    } else {
        Complex admittance_sum{0.0, 0.0};
        for (const auto& branch : design.branches) {
            const Complex zi = branch_impedance(branch, frequency);
            if (zi == Complex{0.0, 0.0})
                throw SingularityError("sensor branch impedance is exactly zero");
            admittance_sum += 1.0 / zi;
        }
        if (admittance_sum == Complex{0.0, 0.0})
            throw SingularityError("interface branch admittances sum to zero");
        const Complex interface_z =
            1.0 / admittance_sum + kJ * w * design.receiver_inductance;
        if (interface_z == Complex{0.0, 0.0})
            throw SingularityError("interface impedance is exactly zero");
        const Complex zm = mutual_impedance(frequency, design.coupling_factor,
                                            design.reader.transmitter_inductance,
                                            design.receiver_inductance);
        reader_branch = jwlt - zm * zm / interface_z;
    }

    if (reader_branch == Complex{0.0, 0.0})
        throw SingularityError("reader branch impedance is exactly zero");
    const Complex z =
        1.0 / (1.0 / reader_branch + kJ * w * design.reader.parasitic_capacitance);
    if (!is_finite(z)) throw SingularityError("system impedance is non-finite");
    return z;
}

Complex s11_from_impedance(Complex impedance, double reference_impedance) {
    if (!is_finite(impedance)) throw std::domain_error("impedance must be finite");
    const Complex denom = impedance + reference_impedance;
    if (denom == Complex{0.0, 0.0})
        throw SingularityError("impedance equals -R0: reflection undefined");
    return (impedance - reference_impedance) / denom;
}

Complex impedance_from_s11(Complex s11, double reference_impedance) {
    const Complex denom = 1.0 - s11;
    if (denom == Complex{0.0, 0.0})
        throw SingularityError("S11 = 1: open circuit has no finite impedance");
    return reference_impedance * (1.0 + s11) / denom;
}

double approx_impedance_magnitude(double frequency, double coupling_factor,
                                  double transmitter_inductance,
                                  double receiver_inductance,
                                  double parasitic_capacitance,
                                  double line_inductance) {
    require(frequency > 0.0, "frequency must be > 0");
    const double w = kTwoPi * frequency;
    const Complex jwlt = kJ * w * transmitter_inductance;
    const Complex zm = mutual_impedance(frequency, coupling_factor,
                                        transmitter_inductance, receiver_inductance);
    const Complex interface_z = kJ * w * (line_inductance + receiver_inductance);
    const Complex reader_branch = jwlt - zm * zm / interface_z;
    if (reader_branch == Complex{0.0, 0.0})
        throw SingularityError("approximate reader branch impedance is exactly zero");
    const Complex z = 1.0 / (1.0 / reader_branch + kJ * w * parasitic_capacitance);
    if (!is_finite(z))
        throw SingularityError("approximate impedance is non-finite");
    return std::abs(z);
}

double approx_impedance_at_branch_resonance(const InterfaceDesign& design,
                                            std::size_t branch_index,
                                            double frequency) {
    if (branch_index >= design.branches.size())
        throw std::out_of_range("branch index out of range");
    return approx_impedance_magnitude(
        frequency, design.coupling_factor, design.reader.transmitter_inductance,
        design.receiver_inductance, design.reader.parasitic_capacitance,
        design.branches[branch_index].line.inductance);
}

}  // namespace bit

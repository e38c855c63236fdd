#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bit {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Thrown when a formula hits an exact pole (zero denominator) at the
/// requested frequency. The message names the offending term.
class SingularityError : public std::domain_error {
public:
    explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

/// Lumped parasitics of one transmission line. `length` is metadata only;
/// the electrical behaviour is fully described by R/L/C.
struct LineParams {
    double resistance = 0.0;   // ohms
    double inductance = 0.0;   // henries
    double capacitance = 0.0;  // farads
    double length = 0.0;       // meters

    void validate() const;
};

enum class BranchRole {
    CapacitiveSensor,  // c is the unknown sensor value
    InductiveSensor,   // l is the unknown sensor value
    ResistiveSensor,   // r is the unknown sensor value
    Reference,         // fully known LC anchor circuit
    Fixed,             // fully known, no sensing function
};

const char* to_string(BranchRole role);
BranchRole branch_role_from_string(const std::string& s);

/// One series-RLC sensor circuit attached through a transmission line.
struct SensorBranch {
    double resistance = 0.0;   // ohms
    double inductance = 0.0;   // henries
    double capacitance = 0.0;  // farads
    LineParams line;
    BranchRole role = BranchRole::Fixed;

    void validate() const;
};

struct ReaderParams {
    double transmitter_inductance = 0.0;   // henries
    double parasitic_capacitance = 0.0;    // farads
    double reference_impedance = 50.0;     // ohms

    void validate() const;
};

/// Full reader + interface parameterization.
struct InterfaceDesign {
    ReaderParams reader;
    double receiver_inductance = 0.0;  // henries
    double coupling_factor = 0.0;      // dimensionless, [0, 1]
    std::vector<SensorBranch> branches;

    void validate() const;
};

/// Resonant frequency of a series RLC branch, 1/(2*pi*sqrt(l*c)).
double branch_resonant_frequency(double inductance, double capacitance);

/// Complex impedance of one sensor branch at frequency f: the series RLC in
/// parallel with the line capacitance, in series with the line inductance
/// and resistance.
Complex branch_impedance(const SensorBranch& branch, double frequency);

/// Complex impedance of the whole system at frequency f: parallel branches
/// plus the receiver coil, reflected through the mutual inductance into the
/// reader loop, in parallel with the connector parasitic capacitance.
Complex system_impedance(const InterfaceDesign& design, double frequency);

/// Mutual impedance j*w*k*sqrt(Lt*Lr) linking the reader and interface loops.
Complex mutual_impedance(double frequency, double coupling_factor,
                         double transmitter_inductance, double receiver_inductance);

/// Reflection coefficient (Z - R0) / (Z + R0).
Complex s11_from_impedance(Complex impedance, double reference_impedance);

/// Inverse of s11_from_impedance: R0 * (1 + S) / (1 - S).
Complex impedance_from_s11(Complex s11, double reference_impedance);

/// |Z(f)| of the resonance approximation: the resonating branch is treated
/// as a short so only L_t, C_SMA, k, L_r and that branch's line inductance
/// remain. Validity (low branch resistance, short line) is the caller's
/// concern; the value is returned regardless.
double approx_impedance_magnitude(double frequency, double coupling_factor,
                                  double transmitter_inductance,
                                  double receiver_inductance,
                                  double parasitic_capacitance,
                                  double line_inductance);

/// approx_impedance_magnitude with the branch's line inductance looked up
/// from the design.
double approx_impedance_at_branch_resonance(const InterfaceDesign& design,
                                            std::size_t branch_index,
                                            double frequency);

}  // namespace bit

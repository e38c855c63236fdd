#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bit/circuit_model.hpp"
#include "bit/spectrum.hpp"

namespace bit {

/// Raised when an estimation step cannot produce a usable value.
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

struct BranchEstimate {
    std::size_t branch_index = 0;
    BranchRole role = BranchRole::Fixed;
    bool ok = true;
    std::string failure;                  // set when ok is false
    double resonant_frequency = 0.0;      // hertz
    double sensor_value = 0.0;            // farads / henries / ohms per role
    double line_capacitance = 0.0;        // farads
    std::size_t intersection_candidates = 0;
};

struct EstimationResult {
    double coupling_factor = 0.0;
    std::vector<BranchEstimate> branches;
    double fit_residual = 0.0;  // sqrt of sum of squared S11 residuals
    int solver_iterations = 0;
    bool solver_converged = true;
};

/// A design with its per-branch unknowns carried as nominal values. The
/// component picked by each branch's role is the unknown; everything else is
/// treated as known from fabrication.
struct KnownDesign {
    InterfaceDesign nominal;

    void validate() const;
    std::size_t reference_index() const;
    /// Unknown sensor value of the branch per its role (nominal).
    double nominal_sensor_value(std::size_t branch_index) const;
};

struct EstimatorOptions {
    double resistance_lower_bound = 0.0;    // ohms
    double resistance_upper_bound = 200.0;  // ohms
    double line_scan_fraction = 0.3;        // coarse C_line scan, +/- of nominal
    int line_scan_steps = 61;
    double line_fit_fraction = 0.5;         // C_line fit bounds, +/- of nominal
};

/// Step 1: coupling factor from the interpolated impedance magnitude at the
/// reference branch's resonant frequency, solved in closed form.
double step1_coupling_factor(const Spectrum& spectrum, const KnownDesign& design);

struct ReactiveEstimate {
    std::size_t branch_index = 0;
    bool ok = true;
    std::string failure;
    double resonant_frequency = 0.0;
    double sensor_value = 0.0;
    std::size_t intersection_candidates = 0;
};

/// Step 2: per capacitive/inductive branch, intersect the measured impedance
/// magnitude with the resonance approximation curve to locate the branch
/// resonance, then invert the resonance formula for the unknown component.
std::vector<ReactiveEstimate> step2_reactive_values(
    const Spectrum& spectrum, const KnownDesign& design, double coupling_factor,
    const EstimationResult* last_estimate = nullptr);

/// Step 3: coarse per-line capacitance scan aligning predicted and measured
/// S11 minima, then bounded trust-region least squares over all resistive
/// sensor values and line capacitances against the full S11 spectrum.
EstimationResult step3_resistive_and_lines(
    const Spectrum& spectrum, const KnownDesign& design, double coupling_factor,
    const std::vector<ReactiveEstimate>& reactive,
    const EstimationResult* last_estimate = nullptr,
    const EstimatorOptions& options = {});

/// Full pipeline: steps 1 -> 2 -> 3. Pass the previous result to track
/// slowly drifting sensors over repeated measurements.
EstimationResult estimate(const Spectrum& spectrum, const KnownDesign& design,
                          const EstimationResult* last_estimate = nullptr,
                          const EstimatorOptions& options = {});

}  // namespace bit

#pragma once

// Shared synthetic designs for the tests. The "shirt" design mirrors a
// plausible garment: one reference anchor plus a resistive, a capacitive,
// and an inductive sensor spread across the 1-30 MHz band.

#include "bit/circuit_model.hpp"
#include "bit/simulator.hpp"

namespace fixtures {

inline bit::SensorBranch branch_at(double frequency_hz, double ratio_uh_per_pf,
                                   double resistance_ohm, double line_length_m,
                                   bit::BranchRole role) {
    bit::SensorBranch branch;
    bit::components_from_ratio(frequency_hz, ratio_uh_per_pf, branch.inductance,
                               branch.capacitance);
    branch.resistance = resistance_ohm;
    branch.line = bit::line_from_length(bit::LineModel::twisted(), line_length_m);
    branch.role = role;
    return branch;
}

inline bit::InterfaceDesign shirt_design() {
    bit::InterfaceDesign design;
    design.reader = {0.6e-6, 10e-12, 50.0};
    design.receiver_inductance = 4.54e-6;
    design.coupling_factor = 0.27;
    design.branches.push_back(
        branch_at(27e6, 1.0, 0.0, 0.10, bit::BranchRole::Reference));
    design.branches.push_back(
        branch_at(7e6, 0.8, 33.0, 0.20, bit::BranchRole::ResistiveSensor));
    design.branches.push_back(
        branch_at(12e6, 1.2, 4.0, 0.15, bit::BranchRole::CapacitiveSensor));
    design.branches.push_back(
        branch_at(22e6, 0.6, 3.0, 0.10, bit::BranchRole::InductiveSensor));
    return design;
}

inline bit::FrequencyGrid standard_grid() { return {1e6, 30e6, 101}; }

}  // namespace fixtures

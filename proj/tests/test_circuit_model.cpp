#include <doctest.h>

#include <cmath>
#include <complex>

#include "bit/circuit_model.hpp"
#include "bit/rng.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using bit::Complex;

namespace {

bit::SensorBranch bare_branch(double r, double l, double c) {
    bit::SensorBranch branch;
    branch.resistance = r;
    branch.inductance = l;
    branch.capacitance = c;
    return branch;
}

}  // namespace

TEST_CASE("series RLC impedance collapses to the resistance at resonance") {
    const double l = 23.9e-6, c = 19.1e-12;
    const double f = bit::branch_resonant_frequency(l, c);

    const Complex shorted = bit::branch_impedance(bare_branch(0.0, l, c), f);
    CHECK(std::abs(shorted) < 1e-9);

    const Complex resistive = bit::branch_impedance(bare_branch(10.0, l, c), f);
    CHECK(resistive.real() == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(std::abs(resistive.imag()) < 1e-9);
}

TEST_CASE("branch impedance matches a term-by-term hand evaluation") {
    bit::SensorBranch branch = bare_branch(5.0, 1e-6, 100e-12);
    branch.line = {0.5, 0.21e-6, 58.33e-12, 0.0};
    const double f = 10e6;

    const Complex expected = oracle::branch_impedance(branch, f);
    const Complex actual = bit::branch_impedance(branch, f);
    CHECK(std::abs(actual - expected) <= 1e-12 * std::abs(expected));
}

TEST_CASE("zero coupling removes the interface from the system impedance") {
    bit::InterfaceDesign design = fixtures::shirt_design();
    design.coupling_factor = 0.0;
    const Complex j{0.0, 1.0};
    for (double f = 1e6; f <= 30e6; f += 0.7e6) {
        const double w = oracle::kPi * 2.0 * f;
        const Complex reader_only =
            1.0 / (1.0 / (j * w * design.reader.transmitter_inductance) +
                   j * w * design.reader.parasitic_capacitance);
        const Complex z = bit::system_impedance(design, f);
        CHECK(std::abs(z - reader_only) <= 1e-12 * std::abs(reader_only));
    }
}

TEST_CASE("reflection coefficient basics") {
    CHECK(std::abs(bit::s11_from_impedance({50.0, 0.0}, 50.0)) < 1e-15);
    CHECK(std::abs(bit::s11_from_impedance({0.0, 0.0}, 50.0) - Complex{-1.0, 0.0}) <
          1e-15);

    // Purely reactive load: (-50+100j)/(50+100j) has unit magnitude.
    const Complex reactive = bit::s11_from_impedance({0.0, 100.0}, 50.0);
    const Complex expected = Complex{-50.0, 100.0} / Complex{50.0, 100.0};
    CHECK(std::abs(reactive - expected) < 1e-15);
    CHECK(std::abs(reactive) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("impedance and S11 conversions invert each other") {
    CHECK(bit::impedance_from_s11({0.0, 0.0}, 50.0).real() ==
          doctest::Approx(50.0).epsilon(1e-15));
    CHECK(std::abs(bit::impedance_from_s11({-1.0, 0.0}, 50.0)) < 1e-15);

    bit::Rng rng(2024);
    for (int i = 0; i < 500; ++i) {
        const Complex z{rng.uniform(0.0, 5000.0), rng.uniform(-5000.0, 5000.0)};
        const Complex round_trip =
            bit::impedance_from_s11(bit::s11_from_impedance(z, 50.0), 50.0);
        CHECK(std::abs(round_trip - z) <= 1e-12 * std::abs(z));
    }
}

TEST_CASE("conversion singularities are reported") {
    CHECK_THROWS_AS(bit::s11_from_impedance({-50.0, 0.0}, 50.0), bit::SingularityError);
    CHECK_THROWS_AS(bit::impedance_from_s11({1.0, 0.0}, 50.0), bit::SingularityError);
}

TEST_CASE("resonant frequency formula and scaling") {
    CHECK(bit::branch_resonant_frequency(23.9e-6, 19.1e-12) ==
          doctest::Approx(7.449e6).epsilon(1e-3));
    CHECK(bit::branch_resonant_frequency(5.4e-6, 9.9e-12) ==
          doctest::Approx(21.77e6).epsilon(1e-3));

    const double f1 = bit::branch_resonant_frequency(2e-6, 30e-12);
    const double f2 = bit::branch_resonant_frequency(2e-6, 120e-12);
    CHECK(f2 == doctest::Approx(0.5 * f1).epsilon(1e-12));
}

TEST_CASE("series branch reactance crosses zero exactly at resonance") {
    const bit::SensorBranch branch = bare_branch(7.0, 11e-6, 40e-12);
    const double f_res =
        bit::branch_resonant_frequency(branch.inductance, branch.capacitance);

    // Bisection on Im(Z) over a bracket around the analytic resonance.
    double lo = 0.5 * f_res, hi = 1.5 * f_res;
    REQUIRE(bit::branch_impedance(branch, lo).imag() < 0.0);
    REQUIRE(bit::branch_impedance(branch, hi).imag() > 0.0);
    while (hi - lo > 0.5) {
        const double mid = 0.5 * (lo + hi);
        (bit::branch_impedance(branch, mid).imag() < 0.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(0.5 * (lo + hi) - f_res) <= 1.0);
}

TEST_CASE("mutual impedance is linear in coupling factor and frequency") {
    const double lt = 0.6e-6, lr = 4.54e-6;
    const double base = std::abs(bit::mutual_impedance(10e6, 0.1, lt, lr));
    CHECK(std::abs(bit::mutual_impedance(10e6, 0.3, lt, lr)) ==
          doctest::Approx(3.0 * base).epsilon(1e-12));
    CHECK(std::abs(bit::mutual_impedance(20e6, 0.1, lt, lr)) ==
          doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("system is passive: |S11| never exceeds 1") {
    bit::Rng rng(7);
    for (int draw = 0; draw < 50; ++draw) {
        bit::InterfaceDesign design = fixtures::shirt_design();
        design.coupling_factor = rng.uniform(0.0, 1.0);
        for (auto& branch : design.branches)
            branch.resistance = rng.uniform(0.0, 100.0);
        for (double f = 1e6; f <= 30e6; f += 0.31e6) {
            const Complex s =
                bit::s11_from_impedance(bit::system_impedance(design, f), 50.0);
            CHECK(std::abs(s) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("approximation with zero coupling equals the reader-only magnitude") {
    for (double f = 2e6; f <= 30e6; f += 1.1e6) {
        const double approx =
            bit::approx_impedance_magnitude(f, 0.0, 0.6e-6, 4.54e-6, 10e-12, 0.05e-6);
        bit::InterfaceDesign reader_only = fixtures::shirt_design();
        reader_only.coupling_factor = 0.0;
        CHECK(approx == doctest::Approx(std::abs(bit::system_impedance(reader_only, f)))
                            .epsilon(1e-12));
    }
}

TEST_CASE("approximation magnitude matches the staged oracle") {
    const bit::InterfaceDesign design = fixtures::shirt_design();
    for (std::size_t b = 0; b < design.branches.size(); ++b) {
        const double f = bit::branch_resonant_frequency(
            design.branches[b].inductance, design.branches[b].capacitance);
        CHECK(bit::approx_impedance_at_branch_resonance(design, b, f) ==
              doctest::Approx(oracle::approx_magnitude(design, b, f)).epsilon(1e-12));
    }
}

TEST_CASE("approximation tracks the full model at low-resistance resonances") {
    // Randomized designs inside the approximation's validity region:
    // r + R_line <= 15 ohms, twisted lines <= 40 cm, resonances >= 3 MHz
    // apart, 5-30 MHz. The 2% bound holds in at least 99% of draws.
    bit::Rng rng(11);
    int total = 0, within = 0;
    for (int draw = 0; draw < 1000; ++draw) {
        bit::InterfaceDesign design;
        design.reader = {0.6e-6, 10e-12, 50.0};
        design.receiver_inductance = 4.54e-6;
        design.coupling_factor = rng.uniform(0.25, 0.29);

        const int branches = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
        double f_next = rng.uniform(5e6, 10e6);
        for (int b = 0; b < branches; ++b) {
            const double length = rng.uniform(0.0, 0.40);
            bit::SensorBranch branch = fixtures::branch_at(
                f_next, rng.uniform(0.1, 2.0), 0.0, length, bit::BranchRole::Fixed);
            branch.resistance =
                std::max(0.0, rng.uniform(0.0, 15.0) - branch.line.resistance);
            design.branches.push_back(branch);
            f_next += rng.uniform(3e6, 8e6);
            if (f_next > 30e6) break;
        }

        for (std::size_t b = 0; b < design.branches.size(); ++b) {
            const double f = bit::branch_resonant_frequency(
                design.branches[b].inductance, design.branches[b].capacitance);
            const double full = std::abs(bit::system_impedance(design, f));
            const double approx = bit::approx_impedance_at_branch_resonance(design, b, f);
            ++total;
            if (std::abs(approx - full) <= 0.02 * full) ++within;
        }
    }
    CHECK(total >= 1000);
    CHECK(static_cast<double>(within) >= 0.99 * static_cast<double>(total));
}

TEST_CASE("high branch resistance breaks the approximation but still evaluates") {
    bit::InterfaceDesign design;
    design.reader = {0.6e-6, 10e-12, 50.0};
    design.receiver_inductance = 4.54e-6;
    design.coupling_factor = 0.27;
    design.branches.push_back(
        fixtures::branch_at(7e6, 1.0, 200.0, 0.10, bit::BranchRole::Fixed));

    const double f = bit::branch_resonant_frequency(
        design.branches[0].inductance, design.branches[0].capacitance);
    const double full = std::abs(bit::system_impedance(design, f));
    const double approx = bit::approx_impedance_at_branch_resonance(design, 0, f);
    CHECK(std::abs(approx - full) > 0.02 * full);
}

TEST_CASE("validation rejects out-of-range parameters") {
    bit::InterfaceDesign design = fixtures::shirt_design();
    design.coupling_factor = 1.5;
    CHECK_THROWS_AS(design.validate(), std::domain_error);

    design = fixtures::shirt_design();
    design.branches[1].inductance = 0.0;
    CHECK_THROWS_AS(design.validate(), std::domain_error);

    design = fixtures::shirt_design();
    design.branches[2] = design.branches[1];  // duplicate resonance
    CHECK_THROWS_AS(design.validate(), std::domain_error);

    CHECK_THROWS_AS(bit::branch_impedance(bare_branch(1.0, 1e-6, 1e-12), 0.0),
                    std::domain_error);
}

TEST_CASE("role names round-trip through their string forms") {
    using bit::BranchRole;
    for (BranchRole role :
         {BranchRole::CapacitiveSensor, BranchRole::InductiveSensor,
          BranchRole::ResistiveSensor, BranchRole::Reference, BranchRole::Fixed})
        CHECK(bit::branch_role_from_string(bit::to_string(role)) == role);
    CHECK_THROWS_AS(bit::branch_role_from_string("varicap"), std::domain_error);
}

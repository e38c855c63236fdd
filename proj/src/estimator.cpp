#include "bit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bit/least_squares.hpp"

namespace bit {

namespace {

double magnitude_at(const Spectrum& impedance_spectrum, double frequency) {
    return std::abs(interpolate(impedance_spectrum, frequency));
}

/// Unknown component recovered from the branch resonance.
double invert_resonance(const SensorBranch& branch, double resonant_frequency) {
    const double w = kTwoPi * resonant_frequency;
    if (branch.role == BranchRole::CapacitiveSensor)
        return 1.0 / (w * w * branch.inductance);
    return 1.0 / (w * w * branch.capacitance);  // inductive
}

struct Step3Setup {
    InterfaceDesign design;                  // k and step-2 values applied
    std::vector<std::size_t> resistive;      // branch indices with unknown r
    std::vector<double> nominal_line_caps;   // per branch
};

/// System S11 over a fixed grid with per-branch admittance caching, so that
/// changing one branch's resistance or line capacitance only recomputes that
/// branch's column. Step 3 evaluates the model thousands of times with
/// single-parameter changes; this keeps the fit within its runtime budget.
class CachedSystem {
public:
    CachedSystem(InterfaceDesign design, FrequencyGrid grid)
        : design_(std::move(design)), grid_(grid) {
        const std::size_t branches = design_.branches.size();
        admittance_.assign(branches, std::vector<Complex>(grid_.points));
        total_.assign(grid_.points, Complex{0.0, 0.0});

        // Per-branch constants: only r and C_line vary during a fit, so the
        // series reactance and the line's series impedance are fixed.
        static constexpr Complex kJ{0.0, 1.0};
        omega_.resize(grid_.points);
        for (std::size_t i = 0; i < grid_.points; ++i)
            omega_[i] = kTwoPi * grid_.frequency(i);
        series_reactance_.assign(branches, std::vector<Complex>(grid_.points));
        line_series_.assign(branches, std::vector<Complex>(grid_.points));
        for (std::size_t b = 0; b < branches; ++b) {
            const auto& branch = design_.branches[b];
            for (std::size_t i = 0; i < grid_.points; ++i) {
                const double w = omega_[i];
                series_reactance_[b][i] =
                    kJ * (w * branch.inductance - 1.0 / (w * branch.capacitance));
                line_series_[b][i] =
                    Complex{branch.line.resistance, w * branch.line.inductance};
            }
        }
        for (std::size_t b = 0; b < branches; ++b) recompute(b);

        // Everything outside the fitted parameters is fixed per grid point.
        // With Y the interface admittance sum, Z_M^2 = -w^2 k^2 L_t L_r, and
        // the SMA/reflection transform cleared of inner fractions, S11 is a
        // Moebius function of Y:
        //   Z_S = 1/Y + jwL_r                  -> d = 1 + jwL_r*Y
        //   Z_rb = jwL_t - Z_M^2/Z_S           -> e = jwL_t*d + w^2 M^2 * Y
        //   S11 = ((1-jwC R0) e - R0 d) / ((1+jwC R0) e + R0 d)
        const double r0 = design_.reader.reference_impedance;
        points_.resize(grid_.points);
        for (std::size_t i = 0; i < grid_.points; ++i) {
            const double w = kTwoPi * grid_.frequency(i);
            auto& point = points_[i];
            const Complex jwl_t = kJ * w * design_.reader.transmitter_inductance;
            const double mutual_sq =
                w * w * design_.coupling_factor * design_.coupling_factor *
                design_.reader.transmitter_inductance * design_.receiver_inductance;
            const Complex jwc = kJ * w * design_.reader.parasitic_capacitance;
            const Complex sma_minus = 1.0 - jwc * r0;
            const Complex sma_plus = 1.0 + jwc * r0;
            point.jw_receiver = kJ * w * design_.receiver_inductance;
            point.num_d = sma_minus * jwl_t - r0;
            point.num_y = sma_minus * mutual_sq;
            point.den_d = sma_plus * jwl_t + r0;
            point.den_y = sma_plus * mutual_sq;
        }
    }

    void set_line_capacitance(std::size_t b, double value) {
        design_.branches[b].line.capacitance = value;
        recompute(b);
    }

    void set_resistance(std::size_t b, double value) {
        design_.branches[b].resistance = value;
        recompute(b);
    }

    const InterfaceDesign& design() const { return design_; }

    Complex s11_at(std::size_t i) const {
        const auto& point = points_[i];
        const Complex y = total_[i];
        const Complex d = 1.0 + point.jw_receiver * y;
        return (point.num_d * d + point.num_y * y) /
               (point.den_d * d + point.den_y * y);
    }

    Spectrum s11_spectrum() const {
        Spectrum spectrum;
        spectrum.grid = grid_;
        spectrum.kind = SpectrumKind::S11;
        spectrum.values.resize(grid_.points);
        for (std::size_t i = 0; i < grid_.points; ++i)
            spectrum.values[i] = s11_at(i);
        return spectrum;
    }

private:
    void recompute(std::size_t b) {
        // Branch admittance with the inner fractions cleared: with
        // s = j(wl - 1/(wc)) + r and t = 1 + jwC_line*s,
        //   Z = 1/(1/s + jwC_line) + Z_line  =>  Y = t/(s + Z_line*t),
        // which also stays finite when s -> 0 at the branch resonance.
        const auto& branch = design_.branches[b];
        auto& column = admittance_[b];
        for (std::size_t i = 0; i < grid_.points; ++i) {
            const Complex s = series_reactance_[b][i] + branch.resistance;
            const Complex t =
                1.0 + Complex{0.0, omega_[i] * branch.line.capacitance} * s;
            const Complex denominator = s + line_series_[b][i] * t;
            // An exactly-short branch contributes an effectively infinite
            // admittance; keep it finite so the composition stays evaluable.
            const Complex y = (denominator == Complex{0.0, 0.0})
                                  ? Complex{1e30, 0.0}
                                  : t / denominator;
            total_[i] += y - column[i];
            column[i] = y;
        }
    }

    struct PointConstants {
        Complex jw_receiver;
        Complex num_d, num_y;  // S11 numerator coefficients in (d, Y)
        Complex den_d, den_y;  // S11 denominator coefficients in (d, Y)
    };

    InterfaceDesign design_;
    FrequencyGrid grid_;
    std::vector<std::vector<Complex>> admittance_;
    std::vector<Complex> total_;
    std::vector<PointConstants> points_;
    std::vector<double> omega_;
    std::vector<std::vector<Complex>> series_reactance_;  // j(wl - 1/(wc)) per branch
    std::vector<std::vector<Complex>> line_series_;       // R_line + jwL_line per branch
};

Step3Setup make_step3_setup(const KnownDesign& known, double coupling_factor,
                            const std::vector<ReactiveEstimate>& reactive) {
    Step3Setup setup;
    setup.design = known.nominal;
    setup.design.coupling_factor = coupling_factor;
    for (const auto& estimate : reactive) {
        if (!estimate.ok) continue;
        auto& branch = setup.design.branches[estimate.branch_index];
        if (branch.role == BranchRole::CapacitiveSensor)
            branch.capacitance = estimate.sensor_value;
        else if (branch.role == BranchRole::InductiveSensor)
            branch.inductance = estimate.sensor_value;
    }
    for (std::size_t i = 0; i < setup.design.branches.size(); ++i) {
        if (setup.design.branches[i].role == BranchRole::ResistiveSensor)
            setup.resistive.push_back(i);
        setup.nominal_line_caps.push_back(setup.design.branches[i].line.capacitance);
    }
    return setup;
}

/// Keeps only minima that dip meaningfully below the spectrum's median
/// magnitude, discarding shallow blips carved out by measurement noise.
/// The deepest minimum always survives.
std::vector<SpectrumMinimum> significant_minima(const Spectrum& spectrum) {
    const auto minima = find_minima(spectrum);
    if (minima.empty()) return minima;

    std::vector<double> magnitudes(spectrum.values.size());
    for (std::size_t i = 0; i < magnitudes.size(); ++i)
        magnitudes[i] = std::abs(spectrum.values[i]);
    std::nth_element(magnitudes.begin(), magnitudes.begin() + magnitudes.size() / 2,
                     magnitudes.end());
    const double baseline = magnitudes[magnitudes.size() / 2];

    double max_depth = 0.0;
    for (const auto& minimum : minima)
        max_depth = std::max(max_depth, baseline - minimum.magnitude);

    const double threshold = std::max(0.005, 0.05 * max_depth);
    std::vector<SpectrumMinimum> kept;
    for (const auto& minimum : minima)
        if (baseline - minimum.magnitude >= threshold) kept.push_back(minimum);
    if (kept.empty()) {
        const auto deepest = std::min_element(
            minima.begin(), minima.end(),
            [](const auto& a, const auto& b) { return a.magnitude < b.magnitude; });
        kept.push_back(*deepest);
    }
    return kept;
}

/// Frequency misalignment between two sorted minima lists: pairwise in
/// frequency order, each unmatched minimum penalized by half the grid span.
double minima_mismatch(const std::vector<SpectrumMinimum>& predicted,
                       const std::vector<SpectrumMinimum>& measured,
                       double grid_span) {
    const std::size_t paired = std::min(predicted.size(), measured.size());
    double cost = 0.0;
    for (std::size_t i = 0; i < paired; ++i) {
        const double diff = predicted[i].frequency - measured[i].frequency;
        cost += diff * diff;
    }
    const double penalty = 0.5 * grid_span;
    const std::size_t unmatched = predicted.size() + measured.size() - 2 * paired;
    cost += static_cast<double>(unmatched) * penalty * penalty;
    return cost;
}

}  // namespace

void KnownDesign::validate() const {
    nominal.validate();
    std::size_t references = 0;
    for (const auto& branch : nominal.branches)
        if (branch.role == BranchRole::Reference) ++references;
    if (references != 1)
        throw std::domain_error("design must contain exactly one reference branch");
}

std::size_t KnownDesign::reference_index() const {
    for (std::size_t i = 0; i < nominal.branches.size(); ++i)
        if (nominal.branches[i].role == BranchRole::Reference) return i;
    throw std::domain_error("design has no reference branch");
}

double KnownDesign::nominal_sensor_value(std::size_t branch_index) const {
    const auto& branch = nominal.branches.at(branch_index);
    switch (branch.role) {
        case BranchRole::CapacitiveSensor: return branch.capacitance;
        case BranchRole::InductiveSensor: return branch.inductance;
        case BranchRole::ResistiveSensor: return branch.resistance;
        default: throw std::domain_error("branch has no unknown sensor value");
    }
}

double step1_coupling_factor(const Spectrum& spectrum, const KnownDesign& design) {
    const auto& reference = design.nominal.branches[design.reference_index()];
    const double f_ref =
        branch_resonant_frequency(reference.inductance, reference.capacitance);
    if (f_ref < spectrum.grid.start || f_ref > spectrum.grid.stop)
        throw EstimationError("reference resonance lies outside the measured spectrum");

    const double r0 = design.nominal.reader.reference_impedance;
    double magnitude;
    if (spectrum.kind == SpectrumKind::S11)
        magnitude = std::abs(impedance_from_s11(interpolate(spectrum, f_ref), r0));
    else
        magnitude = std::abs(interpolate(spectrum, f_ref));

    // At the reference resonance the interface reduces to a pure reactance
    // X = w*Lt*(1 - k^2*Lr/(Lline+Lr)) in parallel with C_SMA, so
    // |Z| = |X| / |1 - w*C*X| has at most two positive roots in X.
    const double w = kTwoPi * f_ref;
    const double lt = design.nominal.reader.transmitter_inductance;
    const double lr = design.nominal.receiver_inductance;
    const double line_l = reference.line.inductance;
    const double wc = w * design.nominal.reader.parasitic_capacitance;

    std::vector<double> roots;
    roots.push_back(magnitude / (1.0 + magnitude * wc));
    if (magnitude * wc > 1.0) roots.push_back(magnitude / (magnitude * wc - 1.0));

    double best_k = -1.0;
    for (double x : roots) {
        const double k_squared = (1.0 - x / (w * lt)) * (line_l + lr) / lr;
        if (k_squared <= 0.0 || k_squared > 1.0) continue;
        const double k = std::sqrt(k_squared);
        if (best_k < 0.0 || k < best_k) best_k = k;
    }
    if (best_k < 0.0)
        throw EstimationError("reference resonance not observable");
    return best_k;
}

std::vector<ReactiveEstimate> step2_reactive_values(
    const Spectrum& spectrum, const KnownDesign& design, double coupling_factor,
    const EstimationResult* last_estimate) {
    const double r0 = design.nominal.reader.reference_impedance;
    const Spectrum impedance = to_impedance(spectrum, r0);
    const auto& grid = impedance.grid;
    const double spacing = grid.spacing();

    std::vector<ReactiveEstimate> estimates;
    for (std::size_t b = 0; b < design.nominal.branches.size(); ++b) {
        const auto& branch = design.nominal.branches[b];
        if (branch.role != BranchRole::CapacitiveSensor &&
            branch.role != BranchRole::InductiveSensor)
            continue;

        ReactiveEstimate estimate;
        estimate.branch_index = b;

        auto approx = [&](double f) {
            return approx_impedance_magnitude(
                f, coupling_factor, design.nominal.reader.transmitter_inductance,
                design.nominal.receiver_inductance,
                design.nominal.reader.parasitic_capacitance, branch.line.inductance);
        };

        // Sign changes of measured |Z| minus the approximation curve.
        std::vector<double> candidates;
        std::vector<double> difference(grid.points);
        for (std::size_t i = 0; i < grid.points; ++i)
            difference[i] = std::abs(impedance.values[i]) - approx(grid.frequency(i));
        for (std::size_t i = 0; i + 1 < grid.points; ++i) {
            double crossing;
            if (difference[i] == 0.0) {
                crossing = grid.frequency(i);
            } else if (difference[i] * difference[i + 1] < 0.0) {
                const double t = difference[i] / (difference[i] - difference[i + 1]);
                crossing = grid.frequency(i) + t * spacing;
            } else {
                continue;
            }
            // Keep only crossings where the measured impedance trend rises
            // over the next full grid step: the system is heading into the
            // branch's own resonance there.
            const double ahead = std::min(crossing + spacing, grid.stop);
            if (ahead <= crossing) continue;
            if (magnitude_at(impedance, ahead) > magnitude_at(impedance, crossing))
                candidates.push_back(crossing);
        }
        estimate.intersection_candidates = candidates.size();

        double target =
            branch_resonant_frequency(branch.inductance, branch.capacitance);
        if (last_estimate != nullptr) {
            for (const auto& previous : last_estimate->branches) {
                if (previous.branch_index == b && previous.ok &&
                    previous.resonant_frequency > 0.0)
                    target = previous.resonant_frequency;
            }
        }

        if (candidates.empty()) {
            estimate.ok = false;
            estimate.failure = "no qualifying intersection with the approximation curve";
        } else {
            const auto closest = std::min_element(
                candidates.begin(), candidates.end(), [target](double a, double c) {
                    return std::abs(a - target) < std::abs(c - target);
                });
            estimate.resonant_frequency = *closest;
            estimate.sensor_value = invert_resonance(branch, *closest);
        }
        estimates.push_back(estimate);
    }
    return estimates;
}

EstimationResult step3_resistive_and_lines(
    const Spectrum& spectrum, const KnownDesign& design, double coupling_factor,
    const std::vector<ReactiveEstimate>& reactive,
    const EstimationResult* last_estimate, const EstimatorOptions& options) {
    const double r0 = design.nominal.reader.reference_impedance;
    const Spectrum measured = to_s11(spectrum, r0);
    const auto& grid = measured.grid;

    Step3Setup setup = make_step3_setup(design, coupling_factor, reactive);
    const std::size_t branch_count = setup.design.branches.size();

    // (a) Coarse per-line capacitance scan aligning the lowest |S11| peaks,
    // sequential in branch order: each line keeps its best value applied
    // while later lines are scanned. Skipped when a previous estimate seeds
    // the solver.
    std::vector<double> line_caps = setup.nominal_line_caps;
    if (last_estimate == nullptr) {
        const auto measured_minima = significant_minima(measured);
        const double span = grid.stop - grid.start;
        CachedSystem scan_system(setup.design, grid);
        for (std::size_t b = 0; b < branch_count; ++b) {
            const double nominal_cap = setup.nominal_line_caps[b];
            if (nominal_cap <= 0.0) continue;
            double best_cap = nominal_cap;
            double best_cost = std::numeric_limits<double>::infinity();
            for (int s = 0; s < options.line_scan_steps; ++s) {
                const double fraction =
                    -options.line_scan_fraction +
                    2.0 * options.line_scan_fraction * static_cast<double>(s) /
                        static_cast<double>(options.line_scan_steps - 1);
                const double cap = nominal_cap * (1.0 + fraction);
                scan_system.set_line_capacitance(b, cap);
                const double cost = minima_mismatch(
                    significant_minima(scan_system.s11_spectrum()), measured_minima,
                    span);
                if (cost < best_cost) {
                    best_cost = cost;
                    best_cap = cap;
                }
            }
            scan_system.set_line_capacitance(b, best_cap);
            line_caps[b] = best_cap;
        }
    } else {
        for (const auto& previous : last_estimate->branches) {
            if (previous.branch_index < branch_count && previous.line_capacitance > 0.0)
                line_caps[previous.branch_index] = previous.line_capacitance;
        }
    }

    const std::size_t resistive_count = setup.resistive.size();

    // (b) Coarse per-branch resistance scan against the full spectrum so the
    // joint fit starts inside the right basin; the dip depth is a strongly
    // nonconvex function of r. Skipped when a previous estimate seeds it.
    std::vector<double> start_resistances(resistive_count);
    for (std::size_t i = 0; i < resistive_count; ++i)
        start_resistances[i] = setup.design.branches[setup.resistive[i]].resistance;
    if (last_estimate == nullptr && resistive_count > 0) {
        CachedSystem scan_system(setup.design, grid);
        for (std::size_t b = 0; b < branch_count; ++b)
            if (setup.nominal_line_caps[b] > 0.0)
                scan_system.set_line_capacitance(b, line_caps[b]);
        auto spectrum_cost = [&]() {
            double cost = 0.0;
            for (std::size_t i = 0; i < grid.points; ++i)
                cost += std::norm(scan_system.s11_at(i) - measured.values[i]);
            return cost;
        };
        constexpr int kResistanceSteps = 41;
        for (std::size_t i = 0; i < resistive_count; ++i) {
            const std::size_t branch = setup.resistive[i];
            double best_r = start_resistances[i];
            double best_cost = std::numeric_limits<double>::infinity();
            for (int s = 0; s < kResistanceSteps; ++s) {
                const double r = options.resistance_lower_bound +
                                 (options.resistance_upper_bound -
                                  options.resistance_lower_bound) *
                                     static_cast<double>(s) / (kResistanceSteps - 1);
                scan_system.set_resistance(branch, r);
                const double cost = spectrum_cost();
                if (cost < best_cost) {
                    best_cost = cost;
                    best_r = r;
                }
            }
            scan_system.set_resistance(
                branch, setup.design.branches[branch].resistance);  // independent scans
            start_resistances[i] = best_r;
        }
    }

    // (c) Bounded trust-region fit of resistive sensor values and all line
    // capacitances against the stacked real/imaginary S11 residuals.
    const auto parameter_count =
        static_cast<Eigen::Index>(resistive_count + branch_count);
    Eigen::VectorXd x0(parameter_count), lower(parameter_count), upper(parameter_count);
    for (std::size_t i = 0; i < resistive_count; ++i) {
        double r = start_resistances[i];
        if (last_estimate != nullptr) {
            for (const auto& previous : last_estimate->branches)
                if (previous.branch_index == setup.resistive[i] && previous.ok)
                    r = previous.sensor_value;
        }
        x0[static_cast<Eigen::Index>(i)] = r;
        lower[static_cast<Eigen::Index>(i)] = options.resistance_lower_bound;
        upper[static_cast<Eigen::Index>(i)] = options.resistance_upper_bound;
    }
    for (std::size_t b = 0; b < branch_count; ++b) {
        const auto p = static_cast<Eigen::Index>(resistive_count + b);
        x0[p] = line_caps[b];
        lower[p] = setup.nominal_line_caps[b] * (1.0 - options.line_fit_fraction);
        upper[p] = setup.nominal_line_caps[b] * (1.0 + options.line_fit_fraction);
    }

    auto apply_parameters = [&](InterfaceDesign& target, const Eigen::VectorXd& x) {
        for (std::size_t i = 0; i < resistive_count; ++i)
            target.branches[setup.resistive[i]].resistance =
                x[static_cast<Eigen::Index>(i)];
        for (std::size_t b = 0; b < branch_count; ++b)
            target.branches[b].line.capacitance =
                x[static_cast<Eigen::Index>(resistive_count + b)];
    };

    CachedSystem fit_system(setup.design, grid);
    Eigen::VectorXd cached_x = Eigen::VectorXd::Constant(parameter_count,
                                                         std::numeric_limits<double>::quiet_NaN());
    auto residuals = [&](const Eigen::VectorXd& x) {
        for (Eigen::Index p = 0; p < parameter_count; ++p) {
            if (x[p] == cached_x[p]) continue;
            const auto idx = static_cast<std::size_t>(p);
            if (idx < resistive_count)
                fit_system.set_resistance(setup.resistive[idx], x[p]);
            else
                fit_system.set_line_capacitance(idx - resistive_count, x[p]);
            cached_x[p] = x[p];
        }
        Eigen::VectorXd r(2 * static_cast<Eigen::Index>(grid.points));
        for (std::size_t i = 0; i < grid.points; ++i) {
            const Complex delta = fit_system.s11_at(i) - measured.values[i];
            r[2 * static_cast<Eigen::Index>(i)] = delta.real();
            r[2 * static_cast<Eigen::Index>(i) + 1] = delta.imag();
        }
        return r;
    };

    const auto fit = fit_bounded(residuals, x0, lower, upper);

    EstimationResult result;
    result.coupling_factor = coupling_factor;
    result.fit_residual = std::sqrt(2.0 * fit.cost);
    result.solver_iterations = fit.iterations;
    result.solver_converged = fit.converged;

    InterfaceDesign fitted = setup.design;
    apply_parameters(fitted, fit.parameters);

    for (std::size_t b = 0; b < branch_count; ++b) {
        const auto& branch = fitted.branches[b];
        BranchEstimate entry;
        entry.branch_index = b;
        entry.role = branch.role;
        entry.line_capacitance = branch.line.capacitance;
        entry.resonant_frequency =
            branch_resonant_frequency(branch.inductance, branch.capacitance);
        switch (branch.role) {
            case BranchRole::CapacitiveSensor:
            case BranchRole::InductiveSensor: {
                entry.ok = false;
                entry.failure = "missing step-2 estimate";
                for (const auto& estimate : reactive) {
                    if (estimate.branch_index != b) continue;
                    entry.ok = estimate.ok;
                    entry.failure = estimate.failure;
                    entry.intersection_candidates = estimate.intersection_candidates;
                    if (estimate.ok) {
                        entry.resonant_frequency = estimate.resonant_frequency;
                        entry.sensor_value = estimate.sensor_value;
                    }
                }
                break;
            }
            case BranchRole::ResistiveSensor:
                entry.sensor_value = branch.resistance;
                entry.ok = fit.converged;
                if (!fit.converged) entry.failure = "solver did not converge";
                break;
            default:
                break;
        }
        result.branches.push_back(entry);
    }
    return result;
}

EstimationResult estimate(const Spectrum& spectrum, const KnownDesign& design,
                          const EstimationResult* last_estimate,
                          const EstimatorOptions& options) {
    design.validate();
    spectrum.validate();

    // Canonicalize branch order by nominal resonance so that results are
    // bit-identical under branch permutation.
    const std::size_t branch_count = design.nominal.branches.size();
    std::vector<std::size_t> order(branch_count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ba = design.nominal.branches[a];
        const auto& bb = design.nominal.branches[b];
        return branch_resonant_frequency(ba.inductance, ba.capacitance) <
               branch_resonant_frequency(bb.inductance, bb.capacitance);
    });
    std::vector<std::size_t> inverse(branch_count);
    for (std::size_t i = 0; i < branch_count; ++i) inverse[order[i]] = i;

    KnownDesign canonical = design;
    for (std::size_t i = 0; i < branch_count; ++i)
        canonical.nominal.branches[i] = design.nominal.branches[order[i]];

    EstimationResult canonical_last;
    const EstimationResult* last = nullptr;
    if (last_estimate != nullptr) {
        canonical_last = *last_estimate;
        for (auto& entry : canonical_last.branches)
            entry.branch_index = inverse.at(entry.branch_index);
        std::sort(canonical_last.branches.begin(), canonical_last.branches.end(),
                  [](const BranchEstimate& a, const BranchEstimate& b) {
                      return a.branch_index < b.branch_index;
                  });
        last = &canonical_last;
    }

    const double coupling_factor = step1_coupling_factor(spectrum, canonical);
    const auto reactive = step2_reactive_values(spectrum, canonical, coupling_factor, last);
    EstimationResult result =
        step3_resistive_and_lines(spectrum, canonical, coupling_factor, reactive, last, options);

    for (auto& entry : result.branches) entry.branch_index = order[entry.branch_index];
    std::sort(result.branches.begin(), result.branches.end(),
              [](const BranchEstimate& a, const BranchEstimate& b) {
                  return a.branch_index < b.branch_index;
              });
    return result;
}

}  // namespace bit

#include "bit/design_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bit {

using nlohmann::json;

namespace {

// Canonical file units; values are SI internally.
constexpr double kHenriesPerUnit = 1e-6;   // uH
constexpr double kFaradsPerUnit = 1e-12;   // pF
constexpr double kHertzPerUnit = 1e6;      // MHz

double inductance_scale(const std::string& unit) {
    if (unit == "uH") return 1e-6;
    if (unit == "nH") return 1e-9;
    if (unit == "H") return 1.0;
    throw std::runtime_error("unsupported inductance unit: " + unit);
}

double capacitance_scale(const std::string& unit) {
    if (unit == "pF") return 1e-12;
    if (unit == "nF") return 1e-9;
    if (unit == "F") return 1.0;
    throw std::runtime_error("unsupported capacitance unit: " + unit);
}

double frequency_scale(const std::string& unit) {
    if (unit == "MHz") return 1e6;
    if (unit == "kHz") return 1e3;
    if (unit == "Hz") return 1.0;
    throw std::runtime_error("unsupported frequency unit: " + unit);
}

struct Units {
    double inductance = 1e-6;
    double capacitance = 1e-12;
    double frequency = 1e6;
};

Units parse_units(const json& document) {
    Units units;
    if (!document.contains("units")) return units;
    const json& u = document.at("units");
    if (u.contains("inductance")) units.inductance = inductance_scale(u.at("inductance"));
    if (u.contains("capacitance")) units.capacitance = capacitance_scale(u.at("capacitance"));
    if (u.contains("frequency")) units.frequency = frequency_scale(u.at("frequency"));
    return units;
}

json line_to_json(const LineParams& line) {
    return json{{"resistance", line.resistance},
                {"inductance", line.inductance / kHenriesPerUnit},
                {"capacitance", line.capacitance / kFaradsPerUnit},
                {"length", line.length}};
}

LineParams line_from_json(const json& document, const Units& units) {
    LineParams line;
    line.resistance = document.value("resistance", 0.0);
    line.inductance = document.value("inductance", 0.0) * units.inductance;
    line.capacitance = document.value("capacitance", 0.0) * units.capacitance;
    line.length = document.value("length", 0.0);
    return line;
}

}  // namespace

json design_to_json(const InterfaceDesign& design) {
    json branches = json::array();
    for (const auto& branch : design.branches) {
        branches.push_back(json{{"role", to_string(branch.role)},
                                {"resistance", branch.resistance},
                                {"inductance", branch.inductance / kHenriesPerUnit},
                                {"capacitance", branch.capacitance / kFaradsPerUnit},
                                {"line", line_to_json(branch.line)}});
    }
    return json{
        {"schema", 1},
        {"units",
         {{"inductance", "uH"}, {"capacitance", "pF"}, {"resistance", "ohm"},
          {"length", "m"}, {"frequency", "MHz"}}},
        {"reader",
         {{"transmitter_inductance", design.reader.transmitter_inductance / kHenriesPerUnit},
          {"parasitic_capacitance", design.reader.parasitic_capacitance / kFaradsPerUnit},
          {"reference_impedance", design.reader.reference_impedance}}},
        {"receiver_inductance", design.receiver_inductance / kHenriesPerUnit},
        {"coupling_factor", design.coupling_factor},
        {"branches", branches}};
}

InterfaceDesign design_from_json(const json& document) {
    if (document.value("schema", 0) != 1)
        throw std::runtime_error("design document must declare \"schema\": 1");
    const Units units = parse_units(document);

    InterfaceDesign design;
    const json& reader = document.at("reader");
    design.reader.transmitter_inductance =
        reader.at("transmitter_inductance").get<double>() * units.inductance;
    design.reader.parasitic_capacitance =
        reader.at("parasitic_capacitance").get<double>() * units.capacitance;
    design.reader.reference_impedance = reader.value("reference_impedance", 50.0);
    design.receiver_inductance =
        document.at("receiver_inductance").get<double>() * units.inductance;
    design.coupling_factor = document.at("coupling_factor").get<double>();

    for (const json& entry : document.at("branches")) {
        SensorBranch branch;
        branch.role = branch_role_from_string(entry.at("role").get<std::string>());
        branch.resistance = entry.value("resistance", 0.0);
        branch.inductance = entry.at("inductance").get<double>() * units.inductance;
        branch.capacitance = entry.at("capacitance").get<double>() * units.capacitance;
        if (entry.contains("line")) branch.line = line_from_json(entry.at("line"), units);
        design.branches.push_back(branch);
    }
    design.validate();
    return design;
}

InterfaceDesign load_design(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json document;
    in >> document;
    return design_from_json(document);
}

void save_design(const InterfaceDesign& design, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << design_to_json(design).dump(2) << "\n";
}

KnownDesign load_known_design(const std::string& path) {
    KnownDesign design;
    design.nominal = load_design(path);
    design.validate();
    return design;
}

json estimation_result_to_json(const EstimationResult& result) {
    json branches = json::array();
    for (const auto& entry : result.branches) {
        json row{{"branch", entry.branch_index},
                 {"role", to_string(entry.role)},
                 {"ok", entry.ok},
                 {"resonant_frequency", entry.resonant_frequency / kHertzPerUnit},
                 {"line_capacitance", entry.line_capacitance / kFaradsPerUnit}};
        switch (entry.role) {
            case BranchRole::CapacitiveSensor:
                row["sensor_value"] = entry.sensor_value / kFaradsPerUnit;
                row["sensor_unit"] = "pF";
                break;
            case BranchRole::InductiveSensor:
                row["sensor_value"] = entry.sensor_value / kHenriesPerUnit;
                row["sensor_unit"] = "uH";
                break;
            case BranchRole::ResistiveSensor:
                row["sensor_value"] = entry.sensor_value;
                row["sensor_unit"] = "ohm";
                break;
            default:
                break;
        }
        if (!entry.ok) row["failure"] = entry.failure;
        branches.push_back(row);
    }
    return json{{"schema", 1},
                {"units", {{"frequency", "MHz"}, {"capacitance", "pF"}}},
                {"coupling_factor", result.coupling_factor},
                {"fit_residual", result.fit_residual},
                {"solver_iterations", result.solver_iterations},
                {"solver_converged", result.solver_converged},
                {"branches", branches}};
}

std::string estimation_result_csv_header() {
    return "coupling_factor,fit_residual,solver_converged,"
           "branch,role,ok,resonant_frequency_mhz,sensor_value,sensor_unit,"
           "line_capacitance_pf";
}

std::string estimation_result_csv_row(const EstimationResult& result) {
    std::ostringstream out;
    out.precision(9);
    for (std::size_t i = 0; i < result.branches.size(); ++i) {
        const auto& entry = result.branches[i];
        if (i > 0) out << "\n";
        out << result.coupling_factor << "," << result.fit_residual << ","
            << (result.solver_converged ? 1 : 0) << "," << entry.branch_index << ","
            << to_string(entry.role) << "," << (entry.ok ? 1 : 0) << ","
            << entry.resonant_frequency / kHertzPerUnit << ",";
        switch (entry.role) {
            case BranchRole::CapacitiveSensor:
                out << entry.sensor_value / kFaradsPerUnit << ",pF";
                break;
            case BranchRole::InductiveSensor:
                out << entry.sensor_value / kHenriesPerUnit << ",uH";
                break;
            case BranchRole::ResistiveSensor:
                out << entry.sensor_value << ",ohm";
                break;
            default:
                out << ",";
                break;
        }
        out << "," << entry.line_capacitance / kFaradsPerUnit;
    }
    return out.str();
}

json scenario_to_json(const ScenarioSpec& spec) {
    json roles = json::array();
    json frequencies = json::array();
    for (std::size_t i = 0; i < spec.sensor_roles.size(); ++i) {
        roles.push_back(to_string(spec.sensor_roles[i]));
        frequencies.push_back(spec.sensor_frequencies[i] / kHertzPerUnit);
    }
    return json{
        {"schema", 1},
        {"units", {{"frequency", "MHz"}, {"length", "m"}}},
        {"grid",
         {{"start", spec.grid.start / kHertzPerUnit},
          {"stop", spec.grid.stop / kHertzPerUnit},
          {"points", spec.grid.points}}},
        {"noise",
         {{"gaussian_sigma", spec.noise.gaussian_sigma},
          {"quantization_decimals",
           spec.noise.quantization_decimals ? json(*spec.noise.quantization_decimals)
                                            : json(nullptr)},
          {"rng_seed", spec.noise.rng_seed}}},
        {"reader",
         {{"transmitter_inductance", spec.reader.transmitter_inductance / 1e-6},
          {"parasitic_capacitance", spec.reader.parasitic_capacitance / 1e-12},
          {"reference_impedance", spec.reader.reference_impedance}}},
        {"receiver_inductance", spec.receiver_inductance / 1e-6},
        {"coupling_min", spec.coupling_min},
        {"coupling_max", spec.coupling_max},
        {"line_style", to_string(spec.line_model.style)},
        {"line_length_min", spec.line_length_min},
        {"line_length_max", spec.line_length_max},
        {"line_cap_fluctuation", spec.line_cap_fluctuation},
        {"ratio_min", spec.ratio_min},
        {"ratio_max", spec.ratio_max},
        {"resistance_min", spec.resistance_min},
        {"resistance_max", spec.resistance_max},
        {"resistance_variation", spec.resistance_variation},
        {"reference_frequency", spec.reference_frequency / kHertzPerUnit},
        {"reference_ratio", spec.reference_ratio},
        {"sensor_frequencies", frequencies},
        {"sensor_roles", roles}};
}

ScenarioSpec scenario_from_json(const json& document) {
    if (document.value("schema", 0) != 1)
        throw std::runtime_error("scenario document must declare \"schema\": 1");
    ScenarioSpec spec;
    const json& grid = document.at("grid");
    spec.grid.start = grid.at("start").get<double>() * kHertzPerUnit;
    spec.grid.stop = grid.at("stop").get<double>() * kHertzPerUnit;
    spec.grid.points = grid.at("points").get<std::size_t>();
    if (document.contains("noise")) {
        const json& noise = document.at("noise");
        spec.noise.gaussian_sigma = noise.value("gaussian_sigma", 5e-4);
        if (noise.contains("quantization_decimals") &&
            !noise.at("quantization_decimals").is_null())
            spec.noise.quantization_decimals = noise.at("quantization_decimals").get<int>();
        else if (noise.contains("quantization_decimals"))
            spec.noise.quantization_decimals.reset();
        spec.noise.rng_seed = noise.value("rng_seed", std::uint64_t{0});
    }
    if (document.contains("reader")) {
        const json& reader = document.at("reader");
        spec.reader.transmitter_inductance =
            reader.at("transmitter_inductance").get<double>() * 1e-6;
        spec.reader.parasitic_capacitance =
            reader.at("parasitic_capacitance").get<double>() * 1e-12;
        spec.reader.reference_impedance = reader.value("reference_impedance", 50.0);
    }
    if (document.contains("receiver_inductance"))
        spec.receiver_inductance = document.at("receiver_inductance").get<double>() * 1e-6;
    spec.coupling_min = document.value("coupling_min", spec.coupling_min);
    spec.coupling_max = document.value("coupling_max", spec.coupling_max);
    if (document.contains("line_style"))
        spec.line_model =
            LineModel::for_style(line_style_from_string(document.at("line_style")));
    spec.line_length_min = document.value("line_length_min", spec.line_length_min);
    spec.line_length_max = document.value("line_length_max", spec.line_length_max);
    spec.line_cap_fluctuation =
        document.value("line_cap_fluctuation", spec.line_cap_fluctuation);
    spec.ratio_min = document.value("ratio_min", spec.ratio_min);
    spec.ratio_max = document.value("ratio_max", spec.ratio_max);
    spec.resistance_min = document.value("resistance_min", spec.resistance_min);
    spec.resistance_max = document.value("resistance_max", spec.resistance_max);
    spec.resistance_variation =
        document.value("resistance_variation", spec.resistance_variation);
    if (document.contains("reference_frequency"))
        spec.reference_frequency =
            document.at("reference_frequency").get<double>() * kHertzPerUnit;
    spec.reference_ratio = document.value("reference_ratio", spec.reference_ratio);
    if (document.contains("sensor_frequencies")) {
        for (const json& f : document.at("sensor_frequencies"))
            spec.sensor_frequencies.push_back(f.get<double>() * kHertzPerUnit);
        for (const json& r : document.at("sensor_roles"))
            spec.sensor_roles.push_back(branch_role_from_string(r.get<std::string>()));
    }
    return spec;
}

}  // namespace bit

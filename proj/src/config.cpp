#include "contagion/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace contagion {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& message) {
    throw std::runtime_error("config line " + std::to_string(line) + ": " + message);
}

double parse_number(int line, const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(value, &used);
    } catch (const std::exception&) {
        fail(line, key + ": not a number: '" + value + "'");
    }
    if (used != value.size()) fail(line, key + ": trailing characters in '" + value + "'");
    return x;
}

long long parse_integer(int line, const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(value, &used);
    } catch (const std::exception&) {
        fail(line, key + ": not an integer: '" + value + "'");
    }
    if (used != value.size()) fail(line, key + ": trailing characters in '" + value + "'");
    return x;
}

std::vector<double> parse_grid(int line, const std::string& value) {
    std::vector<double> grid;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(line, "grid: empty entry");
        grid.push_back(parse_number(line, "grid", item));
    }
    if (grid.empty()) fail(line, "grid: no values");
    return grid;
}

} // namespace

const char* topology_kind_name(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::RandomMixing: return "random_mixing";
        case TopologyKind::AssetCorrelated: return "asset_correlated";
        case TopologyKind::Layered: return "layered";
    }
    return "unknown";
}

RunSpec parse_run_spec(const std::string& text) {
    RunSpec spec;
    enum class Section { None, Experiment, Sweep } section = Section::None;
    bool saw_sweep_section = false;
    bool saw_topology = false;
    bool saw_f = false;
    bool saw_q = false;
    bool saw_n_banks = false;
    bool saw_n_per_layer = false;
    std::string sweep_variable;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name == "experiment")
                section = Section::Experiment;
            else if (name == "sweep") {
                section = Section::Sweep;
                saw_sweep_section = true;
            } else
                fail(line_no, "unknown section [" + name + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (value.empty()) fail(line_no, key + ": empty value");

        if (section == Section::Experiment) {
            if (key == "name") {
                spec.name = value;
            } else if (key == "topology") {
                saw_topology = true;
                if (value == "random_mixing")
                    spec.config.kind = TopologyKind::RandomMixing;
                else if (value == "asset_correlated")
                    spec.config.kind = TopologyKind::AssetCorrelated;
                else if (value == "layered")
                    spec.config.kind = TopologyKind::Layered;
                else
                    fail(line_no, "topology: expected random_mixing, asset_correlated or layered");
            } else if (key == "n_banks") {
                saw_n_banks = true;
                spec.config.n_banks = static_cast<int>(parse_integer(line_no, key, value));
            } else if (key == "n_per_layer") {
                saw_n_per_layer = true;
                spec.config.n_banks = static_cast<int>(parse_integer(line_no, key, value));
            } else if (key == "n_assets") {
                spec.config.n_assets = static_cast<int>(parse_integer(line_no, key, value));
            } else if (key == "interbank_ratio") {
                spec.config.params.interbank_ratio = parse_number(line_no, key, value);
            } else if (key == "gamma_shadow") {
                spec.config.params.gamma_shadow = parse_number(line_no, key, value);
            } else if (key == "gamma_regulated") {
                spec.config.params.gamma_regulated = parse_number(line_no, key, value);
            } else if (key == "denseness") {
                spec.config.denseness = parse_number(line_no, key, value);
            } else if (key == "concentration") {
                spec.config.concentration = parse_number(line_no, key, value);
            } else if (key == "concentration_tolerance") {
                spec.config.concentration_tolerance = parse_number(line_no, key, value);
            } else if (key == "samples") {
                spec.config.samples = static_cast<int>(parse_integer(line_no, key, value));
            } else if (key == "seed") {
                spec.config.master_seed =
                    static_cast<Seed>(parse_integer(line_no, key, value));
            } else if (key == "shock_scale") {
                if (value == "auto") {
                    spec.auto_scale = true;
                } else {
                    spec.auto_scale = false;
                    spec.config.shock_scale = parse_number(line_no, key, value);
                }
            } else if (key == "shock_dof") {
                spec.config.shock_dof = parse_number(line_no, key, value);
            } else if (key == "calibration_gamma") {
                spec.calibration_gamma = parse_number(line_no, key, value);
            } else if (key == "calibration_p") {
                spec.calibration_p = parse_number(line_no, key, value);
            } else if (key == "homogeneous_baseline") {
                if (value == "true")
                    spec.config.homogeneous_gamma = true;
                else if (value == "false")
                    spec.config.homogeneous_gamma = false;
                else
                    fail(line_no, "homogeneous_baseline: expected true or false");
            } else if (key == "f") {
                saw_f = true;
                spec.config.mix_value = parse_number(line_no, key, value);
            } else if (key == "q") {
                saw_q = true;
                spec.config.mix_value = parse_number(line_no, key, value);
            } else {
                fail(line_no, "unknown key '" + key + "' in [experiment]");
            }
        } else if (section == Section::Sweep) {
            if (key == "variable") {
                if (value != "f" && value != "q") fail(line_no, "sweep variable must be f or q");
                sweep_variable = value;
            } else if (key == "grid") {
                spec.grid = parse_grid(line_no, value);
            } else {
                fail(line_no, "unknown key '" + key + "' in [sweep]");
            }
        } else {
            fail(line_no, "key outside of a section");
        }
    }

    if (!saw_topology) throw std::runtime_error("config: [experiment] topology is required");
    const bool layered = spec.config.kind == TopologyKind::Layered;
    if (layered && saw_n_banks)
        throw std::runtime_error("config: layered topology sizes banks with n_per_layer, not n_banks");
    if (!layered && saw_n_per_layer)
        throw std::runtime_error("config: n_per_layer applies to the layered topology only");
    if (layered && saw_f)
        throw std::runtime_error("config: f does not apply to the layered topology (use q)");
    if (!layered && saw_q)
        throw std::runtime_error("config: q applies to the layered topology only (use f)");

    if (saw_sweep_section) {
        if (sweep_variable.empty())
            throw std::runtime_error("config: [sweep] requires variable = f or q");
        if (spec.grid.empty()) throw std::runtime_error("config: [sweep] requires a grid");
        if (saw_f || saw_q)
            throw std::runtime_error("config: fixed f/q and a sweep grid are mutually exclusive");
        if (sweep_variable == "f") {
            if (layered) throw std::runtime_error("config: f sweeps need a mixing topology");
            spec.mode = RunSpec::Mode::SweepF;
        } else {
            if (!layered) throw std::runtime_error("config: q sweeps need the layered topology");
            spec.mode = RunSpec::Mode::SweepQ;
        }
        for (const double v : spec.grid)
            if (v < 0.0 || v > 1.0)
                throw std::runtime_error("config: sweep grid values must lie in [0,1]");
    } else {
        spec.mode = RunSpec::Mode::Ensemble;
        if (!layered && !saw_f)
            throw std::runtime_error("config: single runs on a mixing topology require f");
        if (layered && !saw_q)
            throw std::runtime_error("config: single runs on the layered topology require q");
    }
    return spec;
}

RunSpec load_run_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_run_spec(buffer.str());
}

} // namespace contagion

#pragma once

#include <string>
#include <vector>

#include "contagion/ensemble.hpp"

namespace contagion {

// A parsed experiment file: flat key/value text with [experiment] and optional
// [sweep] sections. Unknown sections or keys are errors, never silent defaults.
struct RunSpec {
    enum class Mode { Ensemble, SweepF, SweepQ };
    Mode mode = Mode::Ensemble;
    std::string name = "experiment";
    ExperimentConfig config;
    std::vector<double> grid; // sweep modes

    bool auto_scale = true; // shock_scale = auto -> calibrate (or use the cache)
    double calibration_gamma = 0.07;
    double calibration_p = 1e-3;
};

RunSpec parse_run_spec(const std::string& text);
RunSpec load_run_spec(const std::string& path);

const char* topology_kind_name(TopologyKind kind);

} // namespace contagion

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "contagion/config.hpp"
#include "contagion/report.hpp"
#include "contagion/svg.hpp"

namespace fs = std::filesystem;
using namespace contagion;

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string cache_directory() {
    if (const char* env = std::getenv("CONTAGION_CACHE_DIR")) return env;
    return ".contagion-cache";
}

std::string utc_stamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

fs::path executable_dir() {
    std::error_code ec;
    const fs::path exe = fs::read_symlink("/proc/self/exe", ec);
    if (ec) return fs::current_path();
    return exe.parent_path();
}

fs::path find_preset(const std::string& name) {
    std::vector<fs::path> roots;
    if (const char* env = std::getenv("CONTAGION_PRESET_DIR")) roots.emplace_back(env);
    roots.emplace_back("presets");
    const fs::path exe_dir = executable_dir();
    roots.push_back(exe_dir / "presets");
    roots.push_back(exe_dir / ".." / "presets");
    roots.push_back(exe_dir / ".." / ".." / "presets");
    for (const fs::path& root : roots) {
        const fs::path candidate = root / (name + ".ini");
        if (fs::exists(candidate)) return candidate;
    }
    throw std::runtime_error("preset '" + name + "' not found (searched CONTAGION_PRESET_DIR, "
                             "./presets and the executable's presets directories)");
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("short write to " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

double resolve_shock_scale(RunSpec& spec, bool quiet) {
    if (!spec.auto_scale) return spec.config.shock_scale;
    const CalibrationKey key{spec.config.n_assets, spec.calibration_gamma, spec.calibration_p,
                             spec.config.shock_dof};
    const std::string dir = cache_directory();
    if (const auto cached = load_cached_scale(dir, key)) {
        spec.config.shock_scale = *cached;
        if (!quiet) std::cerr << "calibration: cached scale " << *cached << "\n";
        return *cached;
    }
    CalibrationSettings settings;
    settings.n_assets = key.n_assets;
    settings.gamma = key.gamma;
    settings.target_p = key.target_p;
    settings.dof = key.dof;
    if (!quiet)
        std::cerr << "calibration: solving for the shock amplitude (" << settings.trials
                  << " trials per evaluation)...\n";
    const CalibrationResult result = calibrate_amplitude(settings);
    store_cached_scale(dir, key, result);
    spec.config.shock_scale = result.scale;
    if (!quiet) std::cerr << "calibration: scale " << result.scale << " cached under " << dir << "\n";
    return result.scale;
}

struct RunOptions {
    std::string config_path;
    std::string preset;
    std::string out_dir = ".";
    std::string label;
    std::optional<long long> samples;
    std::optional<long long> seed;
    std::optional<long long> n_override;
    int workers = 0;
};

RunSpec load_spec_for(const RunOptions& opt) {
    if (opt.config_path.empty() && opt.preset.empty())
        throw std::runtime_error("pass --config FILE or --preset NAME");
    if (!opt.config_path.empty() && !opt.preset.empty())
        throw std::runtime_error("--config and --preset are mutually exclusive");
    RunSpec spec;
    if (!opt.preset.empty()) {
        spec = load_run_spec(find_preset(opt.preset).string());
        if (spec.name == "experiment") spec.name = opt.preset;
    } else {
        spec = load_run_spec(opt.config_path);
        if (spec.name == "experiment") spec.name = fs::path(opt.config_path).stem().string();
    }
    if (opt.samples) spec.config.samples = static_cast<int>(*opt.samples);
    if (opt.seed) spec.config.master_seed = static_cast<Seed>(*opt.seed);
    if (opt.n_override) spec.config.n_banks = static_cast<int>(*opt.n_override);
    spec.config.workers = opt.workers;
    return spec;
}

int execute_run(const RunOptions& opt, bool require_sweep) {
    RunSpec spec = load_spec_for(opt);
    if (require_sweep && spec.mode == RunSpec::Mode::Ensemble)
        throw std::runtime_error("this config has no [sweep] section; use `run` for single "
                                 "ensembles");
    const auto wall_start = std::chrono::steady_clock::now();
    const double scale = resolve_shock_scale(spec, false);

    std::string csv;
    std::string json;
    switch (spec.mode) {
        case RunSpec::Mode::Ensemble: {
            const EnsembleResult result = run_ensemble(spec.config);
            csv = ensemble_to_csv(spec.config.mix_value, result);
            json = ensemble_to_json(spec, spec.config.mix_value, result);
            break;
        }
        case RunSpec::Mode::SweepF: {
            const SweepResult result = sweep_f(spec.config, spec.grid);
            csv = sweep_to_csv(result);
            json = sweep_to_json(spec, result);
            break;
        }
        case RunSpec::Mode::SweepQ: {
            const SweepResult result = sweep_q(spec.config, spec.grid);
            csv = sweep_to_csv(result);
            json = sweep_to_json(spec, result);
            break;
        }
    }

    fs::create_directories(opt.out_dir);
    const std::string stamp = opt.label.empty() ? utc_stamp() : opt.label;
    const fs::path csv_path = fs::path(opt.out_dir) / (spec.name + "_" + stamp + ".csv");
    const fs::path json_path = fs::path(opt.out_dir) / (spec.name + "_" + stamp + ".json");
    const fs::path manifest_path =
        fs::path(opt.out_dir) / (spec.name + "_" + stamp + "_manifest.json");
    write_file(csv_path, csv);
    write_file(json_path, json);

    const double wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    nlohmann::json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["config"] = nlohmann::json::parse(run_spec_json(spec));
    manifest["calibration_scale_used"] = scale;
    manifest["workers"] = spec.config.workers;
    manifest["artifacts"] = {csv_path.string(), json_path.string()};
    manifest["wall_time_seconds"] = wall_seconds;
    write_file(manifest_path, manifest.dump(2) + "\n");

    std::cout << csv_path.string() << "\n" << json_path.string() << "\n"
              << manifest_path.string() << "\n";
    return 0;
}

int execute_export(const RunOptions& opt, long long sample_index, const std::string& out_path,
                   bool network_mode) {
    RunSpec spec = load_spec_for(opt);
    if (spec.auto_scale) spec.config.shock_scale = 0.0; // shock is irrelevant to these dumps
    if (spec.mode != RunSpec::Mode::Ensemble && !spec.grid.empty())
        spec.config.mix_value = spec.grid.front();
    const SampleSystem sys = build_sample(spec.config, sample_index);
    if (network_mode) {
        write_file(out_path, network_to_edge_list(sys.network));
    } else {
        write_file(out_path, sheets_to_csv(sys.sheets, sys.network.topology.bank_class));
    }
    std::cout << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"interbank contagion simulator"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    RunOptions opt;
    long long sample_index = 0;
    std::string csv_in;
    std::string out_path;
    int calib_assets = 2;
    double calib_gamma = 0.07;
    double calib_p = 1e-3;
    double calib_dof = 1.5;
    long long calib_trials = 10'000'000;
    long long calib_seed = 0x5CA1E5EED;

    auto add_run_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", opt.config_path, "experiment config file");
        cmd->add_option("--preset", opt.preset, "preset name (fig4, fig5, fig6)");
        cmd->add_option("--samples", opt.samples, "override sample count");
        cmd->add_option("--seed", opt.seed, "override master seed");
        cmd->add_option("--workers", opt.workers, "worker threads (0 = hardware)");
        cmd->add_option("--out-dir", opt.out_dir, "output directory");
        cmd->add_option("--label", opt.label, "artifact label (default: UTC timestamp)");
        cmd->add_option("--n", opt.n_override, "override bank count (per layer when layered)");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "execute the experiment a config describes");
    add_run_options(run_cmd);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "execute a sweep config");
    add_run_options(sweep_cmd);

    CLI::App* calibrate_cmd =
        app.add_subcommand("calibrate", "solve for the shock amplitude and cache it");
    calibrate_cmd->add_option("--assets", calib_assets, "number of external asset classes");
    calibrate_cmd->add_option("--gamma", calib_gamma, "standalone equity ratio");
    calibrate_cmd->add_option("--p", calib_p, "target standalone failure probability");
    calibrate_cmd->add_option("--dof", calib_dof, "Student t degrees of freedom");
    calibrate_cmd->add_option("--trials", calib_trials, "Monte Carlo trials per evaluation");
    calibrate_cmd->add_option("--seed", calib_seed, "calibration seed");

    CLI::App* plot_cmd = app.add_subcommand("plot", "render a result CSV as an SVG line chart");
    plot_cmd->add_option("--csv", csv_in, "input CSV")->required();
    plot_cmd->add_option("--out", out_path, "output SVG path")->required();

    CLI::App* export_net_cmd =
        app.add_subcommand("export-network", "dump one sample's weighted edge list");
    add_run_options(export_net_cmd);
    export_net_cmd->add_option("--sample", sample_index, "sample index");
    export_net_cmd->add_option("--out", out_path, "output path")->required();

    CLI::App* export_sheets_cmd =
        app.add_subcommand("export-sheets", "dump one sample's balance sheets as CSV");
    add_run_options(export_sheets_cmd);
    export_sheets_cmd->add_option("--sample", sample_index, "sample index");
    export_sheets_cmd->add_option("--out", out_path, "output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return execute_run(opt, false);
        if (sweep_cmd->parsed()) return execute_run(opt, true);
        if (calibrate_cmd->parsed()) {
            const CalibrationKey key{calib_assets, calib_gamma, calib_p, calib_dof};
            const std::string dir = cache_directory();
            if (const auto cached = load_cached_scale(dir, key)) {
                std::cout << *cached << "\n";
                std::cerr << "cached (" << dir << "/" << calibration_cache_filename(key) << ")\n";
                return 0;
            }
            CalibrationSettings settings;
            settings.n_assets = calib_assets;
            settings.gamma = calib_gamma;
            settings.target_p = calib_p;
            settings.dof = calib_dof;
            settings.trials = calib_trials;
            settings.seed = static_cast<Seed>(calib_seed);
            const CalibrationResult result = calibrate_amplitude(settings);
            store_cached_scale(dir, key, result);
            std::cout << result.scale << "\n";
            std::cerr << "estimated standalone failure probability "
                      << result.estimated_probability << ", cached under " << dir << "\n";
            return 0;
        }
        if (plot_cmd->parsed()) {
            const std::string text = read_file(csv_in);
            const std::vector<Curve> curves = curves_from_csv(text);
            const std::string x_label = text.substr(0, text.find(','));
            write_file(out_path, render_line_chart(curves, x_label, "banks"));
            std::cout << out_path << "\n";
            return 0;
        }
        if (export_net_cmd->parsed()) return execute_export(opt, sample_index, out_path, true);
        if (export_sheets_cmd->parsed()) return execute_export(opt, sample_index, out_path, false);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include "contagion/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace contagion {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

constexpr const char* kCsvHeader =
    "f_or_q,crisis_F,crisis_F_shadow,crisis_F_regulated,baseline_b,baseline_c\n";

void append_row(std::string& out, double value, int crisis, int shadow, int regulated,
                const std::optional<int>& baseline_b, const std::optional<double>& baseline_c) {
    out += fmt(value);
    out += ',';
    out += std::to_string(crisis);
    out += ',';
    out += std::to_string(shadow);
    out += ',';
    out += std::to_string(regulated);
    out += ',';
    if (baseline_b) out += std::to_string(*baseline_b);
    out += ',';
    if (baseline_c) out += fmt(*baseline_c);
    out += '\n';
}

nlohmann::json histogram_json(const std::map<int, long long>& histogram) {
    nlohmann::json h = nlohmann::json::object();
    for (const auto& [failures, count] : histogram) h[std::to_string(failures)] = count;
    return h;
}

nlohmann::json optional_json(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

nlohmann::json point_json(const SweepPoint& point) {
    nlohmann::json j;
    j["value"] = point.value;
    j["crisis_F"] = point.crisis_total;
    j["crisis_F_shadow"] = point.crisis_shadow;
    j["crisis_F_regulated"] = point.crisis_regulated;
    if (point.homogeneous_total) j["baseline_b"] = *point.homogeneous_total;
    if (point.linear_baseline) j["baseline_c"] = *point.linear_baseline;
    if (point.r_total || point.r_shadow || point.r_regulated) {
        j["R_total"] = optional_json(point.r_total);
        j["R_shadow"] = optional_json(point.r_shadow);
        j["R_regulated"] = optional_json(point.r_regulated);
    }
    j["histogram"] = histogram_json(point.histogram);
    return j;
}

nlohmann::json spec_json_impl(const RunSpec& spec) {
    nlohmann::json j;
    switch (spec.mode) {
        case RunSpec::Mode::Ensemble: j["mode"] = "ensemble"; break;
        case RunSpec::Mode::SweepF: j["mode"] = "sweep_f"; break;
        case RunSpec::Mode::SweepQ: j["mode"] = "sweep_q"; break;
    }
    j["name"] = spec.name;
    j["topology"] = topology_kind_name(spec.config.kind);
    if (spec.config.kind == TopologyKind::Layered)
        j["n_per_layer"] = spec.config.n_banks;
    else
        j["n_banks"] = spec.config.n_banks;
    j["n_assets"] = spec.config.n_assets;
    j["interbank_ratio"] = spec.config.params.interbank_ratio;
    j["gamma_shadow"] = spec.config.params.gamma_shadow;
    j["gamma_regulated"] = spec.config.params.gamma_regulated;
    j["denseness"] = spec.config.denseness;
    j["concentration"] = spec.config.concentration;
    j["concentration_tolerance"] = spec.config.concentration_tolerance;
    j["samples"] = spec.config.samples;
    j["seed"] = spec.config.master_seed;
    j["shock_scale"] = spec.config.shock_scale;
    j["shock_dof"] = spec.config.shock_dof;
    j["shock_scale_auto"] = spec.auto_scale;
    if (spec.auto_scale) {
        j["calibration_gamma"] = spec.calibration_gamma;
        j["calibration_p"] = spec.calibration_p;
    }
    if (spec.mode == RunSpec::Mode::Ensemble) {
        j[spec.config.kind == TopologyKind::Layered ? "q" : "f"] = spec.config.mix_value;
        if (spec.config.homogeneous_gamma) j["homogeneous_baseline"] = true;
    } else {
        j["grid"] = spec.grid;
    }
    return j;
}

} // namespace

std::string sweep_to_csv(const SweepResult& sweep) {
    std::string out = kCsvHeader;
    for (const SweepPoint& p : sweep.points)
        append_row(out, p.value, p.crisis_total, p.crisis_shadow, p.crisis_regulated,
                   p.homogeneous_total, p.linear_baseline);
    return out;
}

std::string ensemble_to_csv(double value, const EnsembleResult& result) {
    std::string out = kCsvHeader;
    append_row(out, value, result.crisis_total, result.crisis_shadow, result.crisis_regulated,
               std::nullopt, std::nullopt);
    return out;
}

std::string sweep_to_json(const RunSpec& spec, const SweepResult& sweep) {
    nlohmann::json j;
    j["config"] = spec_json_impl(spec);
    j["total_banks"] = sweep.total_banks;
    j["variable"] = sweep.variable == SweepVariable::ShadowFraction ? "f" : "q";
    j["points"] = nlohmann::json::array();
    for (const SweepPoint& p : sweep.points) j["points"].push_back(point_json(p));
    return j.dump(2) + "\n";
}

std::string ensemble_to_json(const RunSpec& spec, double value, const EnsembleResult& result) {
    nlohmann::json j;
    j["config"] = spec_json_impl(spec);
    j["total_banks"] = result.total_banks;
    j["value"] = value;
    j["samples_run"] = result.samples_run;
    j["crisis_F"] = result.crisis_total;
    j["crisis_F_shadow"] = result.crisis_shadow;
    j["crisis_F_regulated"] = result.crisis_regulated;
    j["histogram"] = histogram_json(result.histogram);
    return j.dump(2) + "\n";
}

std::string run_spec_json(const RunSpec& spec) { return spec_json_impl(spec).dump(2); }

std::string network_to_edge_list(const WeightedNetwork& network) {
    const Topology& topo = network.topology;
    std::string out = "# N=" + std::to_string(topo.n_banks) + " classes=";
    for (int i = 0; i < topo.n_banks; ++i) {
        if (i) out += ',';
        out += topo.bank_class[static_cast<std::size_t>(i)] == BankClass::Shadow ? 'S' : 'R';
    }
    out += " layers=";
    for (int i = 0; i < topo.n_banks; ++i) {
        if (i) out += ',';
        switch (topo.layer[static_cast<std::size_t>(i)]) {
            case LayerTag::None: out += 'N'; break;
            case LayerTag::ShadowLayer: out += 'S'; break;
            case LayerTag::RegulatedLayer: out += 'R'; break;
        }
    }
    out += '\n';
    char buf[96];
    for (std::size_t i = 0; i < topo.edges.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%u,%u,%.17g\n", topo.edges[i].creditor,
                      topo.edges[i].debtor, network.weights[i]);
        out += buf;
    }
    return out;
}

std::string sheets_to_csv(std::span<const BalanceSheet> sheets,
                          std::span<const BankClass> classes) {
    std::string out = "bank,class,a,l,e,c,b,d,gamma\n";
    char buf[256];
    for (std::size_t i = 0; i < sheets.size(); ++i) {
        const BalanceSheet& s = sheets[i];
        std::snprintf(buf, sizeof(buf), "%zu,%c,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i,
                      classes[i] == BankClass::Shadow ? 'S' : 'R', s.assets, s.interbank_loans,
                      s.external_assets, s.equity, s.interbank_borrowings, s.deposits,
                      s.equity_ratio);
        out += buf;
    }
    return out;
}

} // namespace contagion

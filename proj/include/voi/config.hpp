#pragma once

// YAML run configuration: strict parsing with defaults, a resolved-config echo
// as JSON, and a commented schema dump of every key with its default.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include <json.hpp>

#include "voi/campaign.hpp"
#include "voi/error.hpp"

namespace voi {

enum class Scale { Desk, Paper };

inline Scale scale_from(const std::string& s) {
    if (s == "desk") return Scale::Desk;
    if (s == "paper") return Scale::Paper;
    throw ConfigError("scale must be 'desk' or 'paper', got '" + s + "'");
}

inline const char* to_string(Scale s) noexcept { return s == Scale::Desk ? "desk" : "paper"; }

/// Sample sizes of a scale; explicit keys in the file override them.
inline void apply_scale(CampaignConfig& c, Scale s) {
    if (s == Scale::Desk) {
        c.n_prior = 100;
        c.n_post = 1000;
        c.mcmc.warmup = 1000;
        c.mcmc.draws = 1000;
    } else {
        c.n_prior = 1000;
        c.n_post = 2000;
        c.mcmc.warmup = 2000;
        c.mcmc.draws = 2000;
    }
}

struct RunConfig {
    CampaignConfig campaign;
    Scale scale = Scale::Desk;
};

namespace detail {

inline std::string join_key(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

/// Mapping node whose keys must all be consumed; leftovers are unknown keys.
class MapReader {
public:
    MapReader(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap()) {
            throw ConfigError("config key '" + (path_.empty() ? std::string("<root>") : path_) + "' must be a mapping");
        }
    }

    [[nodiscard]] bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

    [[nodiscard]] std::string key(const std::string& k) const { return join_key(path_, k); }

    YAML::Node child(const std::string& k) {
        seen_.insert(k);
        return has(k) ? node_[k] : YAML::Node();
    }

    template <class T>
    void get(const std::string& k, T& out) {
        if (!has(k)) {
            seen_.insert(k);
            return;
        }
        out = convert<T>(child(k), key(k));
    }

    /// Integer key that must be >= lo, read signed so negative input is reported as such.
    void get_count(const std::string& k, std::size_t& out, long long lo) {
        if (!has(k)) {
            seen_.insert(k);
            return;
        }
        const auto v = convert<long long>(child(k), key(k));
        if (v < lo) {
            throw ConfigError("invalid value for '" + key(k) + "': must be >= " + std::to_string(lo));
        }
        out = static_cast<std::size_t>(v);
    }

    void finish() const {
        if (!node_ || !node_.IsMap()) {
            return;
        }
        for (const auto& kv : node_) {
            const auto k = kv.first.as<std::string>();
            if (!seen_.count(k)) {
                throw ConfigError("unknown config key '" + key(k) + "'");
            }
        }
    }

    [[nodiscard]] std::vector<std::string> keys() const {
        std::vector<std::string> out;
        if (node_ && node_.IsMap()) {
            for (const auto& kv : node_) {
                out.push_back(kv.first.as<std::string>());
            }
        }
        return out;
    }

    template <class T>
    static T convert(const YAML::Node& n, const std::string& key) {
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError("invalid value for '" + key + "'");
        }
    }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

inline void read_uniform(MapReader& parent, const std::string& k, UniformBounds& b) {
    MapReader r(parent.child(k), parent.key(k));
    r.get("lo", b.lo);
    r.get("hi", b.hi);
    r.finish();
}

inline void read_thresholds(MapReader& r, const std::string& k, std::vector<double>& out) {
    if (!r.has(k)) {
        r.child(k);
        return;
    }
    const auto node = r.child(k);
    if (node.IsSequence()) {
        out = MapReader::convert<std::vector<double>>(node, r.key(k));
        return;
    }
    MapReader range(node, r.key(k));
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    range.get("start", lo);
    range.get("stop", hi);
    range.get("step", step);
    range.finish();
    require<ConfigError>(step > 0.0 && hi >= lo, "invalid value for '" + r.key(k) + "': need stop >= start and step > 0");
    out = arange_inclusive(lo, hi, step);
}

inline void read_range(MapReader& r, const std::string& k, double& lo, double& hi) {
    if (!r.has(k)) {
        r.child(k);
        return;
    }
    const auto v = MapReader::convert<std::vector<double>>(r.child(k), r.key(k));
    require<ConfigError>(v.size() == 2, "invalid value for '" + r.key(k) + "': expected [lo, hi]");
    lo = v[0];
    hi = v[1];
}

inline void read_strategy(MapReader& parent, const std::string& id, CampaignConfig& c, double t0) {
    MapReader r(parent.child(id), parent.key(id));
    StrategySpec* target = nullptr;
    for (auto& s : c.strategies) {
        if (s.id == id) {
            target = &s;
        }
    }
    if (!target) {
        require<ConfigError>(r.has("kind"), "strategy '" + id + "' is not predefined and needs a kind");
        c.strategies.push_back(StrategySpec{id, StrategyKind::StrainTheta, 50, 15.0, {}});
        target = &c.strategies.back();
    }
    if (r.has("kind")) {
        std::string kind;
        r.get("kind", kind);
        target->kind = strategy_kind_from(kind);
    } else {
        r.child("kind");
    }
    r.get_count("obs_per_step", target->obs_per_step, 1);
    r.get("t_insp", target->t_insp);
    r.get("install", target->intrinsic.install);
    r.get("oandm_annual", target->intrinsic.oandm_annual);
    std::size_t years = target->intrinsic.oandm_times.size();
    r.get_count("oandm_years", years, 0);
    r.finish();
    target->intrinsic = IntrinsicCosts::annual(target->intrinsic.install, target->intrinsic.oandm_annual, t0, years);
}

inline InspectionExtrinsic extrinsic_from(const std::string& s) {
    if (s == "lifecycle") return InspectionExtrinsic::Lifecycle;
    if (s == "inspection_time") return InspectionExtrinsic::InspectionTime;
    throw ConfigError("inspection_comparison.extrinsic must be 'lifecycle' or 'inspection_time'");
}

inline const char* to_string(InspectionExtrinsic e) noexcept {
    return e == InspectionExtrinsic::Lifecycle ? "lifecycle" : "inspection_time";
}

}  // namespace detail

/// Parses YAML text. `base_dir` resolves relative file references; `scale_override`
/// (from the command line) takes precedence over the file's `scale` key.
inline RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {},
                                   std::optional<Scale> scale_override = std::nullopt) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    using detail::MapReader;
    MapReader top(root, "");
    RunConfig run;
    auto& c = run.campaign;

    std::string scale = "desk";
    top.get("scale", scale);
    run.scale = scale_override ? *scale_override : scale_from(scale);
    apply_scale(c, run.scale);

    top.get("seed", c.seed);
    top.get_count("n_prior", c.n_prior, 1);
    top.get_count("n_post", c.n_post, 1);
    top.get_count("workers", c.workers, 0);

    {
        MapReader r(top.child("prior"), "prior");
        detail::read_uniform(r, "alpha", c.prior.alpha);
        MapReader beta(r.child("beta"), "prior.beta");
        beta.get("mean", c.prior.beta.mean);
        beta.get("sd", c.prior.beta.sd);
        beta.finish();
        detail::read_uniform(r, "gamma", c.prior.gamma);
        r.finish();
    }
    {
        MapReader r(top.child("grid"), "grid");
        double t0 = c.grid.t0;
        double horizon = c.grid.horizon;
        double step = c.grid.step;
        r.get("t0", t0);
        r.get("horizon", horizon);
        r.get("step", step);
        r.finish();
        c.grid = TimeGrid::regular(t0, horizon, step);
    }
    {
        MapReader r(top.child("surrogate"), "surrogate");
        if (r.has("training_csv")) {
            require<ConfigError>(!r.has("intercepts") && !r.has("slopes"),
                                 "surrogate.training_csv cannot be combined with intercepts/slopes");
            std::string file;
            r.get("training_csv", file);
            std::filesystem::path p(file);
            if (p.is_relative() && !base_dir.empty()) {
                p = base_dir / p;
            }
            c.surrogate = fit_surrogate(read_training_pairs(p.string()));
        } else {
            r.child("training_csv");
        }
        r.get("intercepts", c.surrogate.intercepts);
        r.get("slopes", c.surrogate.slopes);
        r.finish();
    }
    {
        MapReader r(top.child("noise"), "noise");
        r.get("strain_sd", c.noise.strain_sd);
        r.get("inspection_cov", c.noise.inspection_cov);
        r.finish();
    }
    {
        MapReader r(top.child("threshold"), "threshold");
        r.get("mean", c.threshold.mean);
        r.get("cov", c.threshold.cov);
        r.finish();
    }
    {
        MapReader r(top.child("costs"), "costs");
        bool clamp = c.presets.front().clamp_negative;
        r.get("clamp_negative", clamp);
        if (r.has("presets")) {
            const auto seq = r.child("presets");
            require<ConfigError>(seq.IsSequence(), "config key 'costs.presets' must be a list");
            c.presets.clear();
            for (std::size_t i = 0; i < seq.size(); ++i) {
                MapReader p(seq[i], "costs.presets[" + std::to_string(i) + "]");
                CostFunctionSpec spec;
                p.get("name", spec.name);
                p.get("min_repair_cost", spec.min_repair_cost);
                p.get("p_ex_threshold", spec.p_ex_threshold);
                p.finish();
                c.presets.push_back(spec);
            }
        } else {
            r.child("presets");
        }
        for (auto& p : c.presets) {
            p.clamp_negative = clamp;
        }
        r.finish();
    }
    {
        MapReader r(top.child("economics"), "economics");
        r.get("inflation_rate", c.economics.inflation_rate);
        r.finish();
    }
    {
        MapReader r(top.child("inference"), "inference");
        detail::read_uniform(r, "pointwise_prior", c.inference.pointwise);
        r.get("sigma_scale", c.inference.sigma_scale);
        r.finish();
    }
    {
        MapReader r(top.child("mcmc"), "mcmc");
        r.get_count("warmup", c.mcmc.warmup, 1);
        r.get_count("draws", c.mcmc.draws, 1);
        r.get_count("thin", c.mcmc.thin, 1);
        r.get_count("chains", c.mcmc.chains, 1);
        r.get("target_acceptance", c.mcmc.target_acceptance);
        r.finish();
    }
    {
        MapReader r(top.child("diagnostics"), "diagnostics");
        r.get("enabled", c.gate.enabled);
        r.get("rhat_max", c.gate.rhat_max);
        r.get("max_exclusion_fraction", c.gate.max_exclusion_fraction);
        r.finish();
    }
    c.strategies = default_strategies(c.grid.t0);
    {
        MapReader r(top.child("strategies"), "strategies");
        for (const auto& id : r.keys()) {
            detail::read_strategy(r, id, c, c.grid.t0);
        }
        r.finish();
    }
    {
        MapReader r(top.child("threshold_sweep"), "threshold_sweep");
        r.get("strategies", c.sweep.strategies);
        detail::read_thresholds(r, "means", c.sweep.means);
        r.finish();
    }
    {
        MapReader r(top.child("cost_grid"), "cost_grid");
        r.get("strategies", c.cost_grid.strategies);
        detail::read_range(r, "install_range", c.cost_grid.install_lo, c.cost_grid.install_hi);
        r.get("oandm_ratio", c.cost_grid.oandm_ratio);
        r.get_count("grid_n", c.cost_grid.grid_n, 2);
        detail::read_thresholds(r, "thresholds", c.cost_grid.thresholds);
        r.get("preset", c.cost_grid.preset);
        r.finish();
    }
    {
        MapReader r(top.child("inspection_comparison"), "inspection_comparison");
        r.get("baseline", c.inspection.baseline);
        r.get("strategies", c.inspection.strategies);
        detail::read_range(r, "c_insp_range", c.inspection.c_insp_lo, c.inspection.c_insp_hi);
        r.get_count("n", c.inspection.n, 1);
        detail::read_thresholds(r, "thresholds", c.inspection.thresholds);
        std::string extrinsic = detail::to_string(c.inspection.extrinsic);
        r.get("extrinsic", extrinsic);
        c.inspection.extrinsic = detail::extrinsic_from(extrinsic);
        r.finish();
    }
    top.finish();
    c.validate();
    return run;
}

inline RunConfig parse_config(const std::string& path, std::optional<Scale> scale_override = std::nullopt) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config file not found: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), std::filesystem::path(path).parent_path(), scale_override);
}

/// Resolved configuration in file layout; feeding its YAML form back to the parser
/// reproduces the same configuration.
inline nlohmann::ordered_json to_json(const RunConfig& run) {
    using nlohmann::ordered_json;
    const auto& c = run.campaign;
    ordered_json j;
    j["scale"] = to_string(run.scale);
    j["seed"] = c.seed;
    j["n_prior"] = c.n_prior;
    j["n_post"] = c.n_post;
    j["prior"] = {{"alpha", {{"lo", c.prior.alpha.lo}, {"hi", c.prior.alpha.hi}}},
                  {"beta", {{"mean", c.prior.beta.mean}, {"sd", c.prior.beta.sd}}},
                  {"gamma", {{"lo", c.prior.gamma.lo}, {"hi", c.prior.gamma.hi}}}};
    j["grid"] = {{"t0", c.grid.t0}, {"horizon", c.grid.horizon}, {"step", c.grid.step}};
    j["surrogate"] = {{"intercepts", c.surrogate.intercepts}, {"slopes", c.surrogate.slopes}};
    j["noise"] = {{"strain_sd", c.noise.strain_sd}, {"inspection_cov", c.noise.inspection_cov}};
    j["threshold"] = {{"mean", c.threshold.mean}, {"cov", c.threshold.cov}};
    ordered_json presets = ordered_json::array();
    for (const auto& p : c.presets) {
        presets.push_back({{"name", p.name}, {"min_repair_cost", p.min_repair_cost}, {"p_ex_threshold", p.p_ex_threshold}});
    }
    j["costs"] = {{"clamp_negative", c.presets.front().clamp_negative}, {"presets", presets}};
    j["economics"] = {{"inflation_rate", c.economics.inflation_rate}};
    j["inference"] = {{"pointwise_prior", {{"lo", c.inference.pointwise.lo}, {"hi", c.inference.pointwise.hi}}},
                      {"sigma_scale", c.inference.sigma_scale}};
    j["mcmc"] = {{"warmup", c.mcmc.warmup},
                 {"draws", c.mcmc.draws},
                 {"thin", c.mcmc.thin},
                 {"chains", c.mcmc.chains},
                 {"target_acceptance", c.mcmc.target_acceptance}};
    j["diagnostics"] = {{"enabled", c.gate.enabled},
                        {"rhat_max", c.gate.rhat_max},
                        {"max_exclusion_fraction", c.gate.max_exclusion_fraction}};
    ordered_json strategies = ordered_json::object();
    for (const auto& s : c.strategies) {
        strategies[s.id] = {{"kind", to_string(s.kind)},
                            {"obs_per_step", s.obs_per_step},
                            {"t_insp", s.t_insp},
                            {"install", s.intrinsic.install},
                            {"oandm_annual", s.intrinsic.oandm_annual},
                            {"oandm_years", s.intrinsic.oandm_times.size()}};
    }
    j["strategies"] = strategies;
    j["threshold_sweep"] = {{"strategies", c.sweep.strategies}, {"means", c.sweep.means}};
    j["cost_grid"] = {{"strategies", c.cost_grid.strategies},
                      {"install_range", {c.cost_grid.install_lo, c.cost_grid.install_hi}},
                      {"oandm_ratio", c.cost_grid.oandm_ratio},
                      {"grid_n", c.cost_grid.grid_n},
                      {"thresholds", c.cost_grid.thresholds},
                      {"preset", c.cost_grid.preset}};
    j["inspection_comparison"] = {{"baseline", c.inspection.baseline},
                                  {"strategies", c.inspection.strategies},
                                  {"c_insp_range", {c.inspection.c_insp_lo, c.inspection.c_insp_hi}},
                                  {"n", c.inspection.n},
                                  {"thresholds", c.inspection.thresholds},
                                  {"extrinsic", detail::to_string(c.inspection.extrinsic)}};
    return j;
}

namespace detail {

inline const std::map<std::string, std::string>& schema_comments() {
    static const std::map<std::string, std::string> m{
        {"scale", "desk | paper; sets n_prior, n_post, mcmc.warmup, mcmc.draws (desk 100/1000/1000/1000, paper 1000/2000/2000/2000)"},
        {"seed", "master seed; every random stream is derived from it"},
        {"n_prior", "prior realizations (outer Monte Carlo loop)"},
        {"n_post", "posterior thickness samples per realization, taken from the pooled chains"},
        {"workers", "realization workers, 0 = available parallelism (does not change results)"},
        {"prior", "alpha ~ U(lo, hi), beta ~ N(mean, sd) truncated to beta > 0, gamma ~ U(lo, hi) [mm]"},
        {"grid", "decision times t0 + k*step for k = 1..horizon/step [years]"},
        {"surrogate", "strain_i = intercepts[i] + slopes[i] * delta_tau [microstrain]; or training_csv: <path>"},
        {"noise", "strain noise sd [microstrain]; inspection reading sd = inspection_cov * delta_tau"},
        {"threshold", "maintenance threshold ~ N(mean, (cov*mean)^2) [mm]"},
        {"costs", "repair cost min_repair_cost + (1 - min_repair_cost/p_ex_threshold)*p_ex, floored at 0 when clamp_negative"},
        {"economics", "costs at absolute time t are scaled by (1 + inflation_rate)^t"},
        {"inference", "pointwise delta_tau prior U(lo, hi) [mm]; sigma ~ HalfNormal(sigma_scale)"},
        {"mcmc", "adaptive Metropolis; thin = transitions per retained draw"},
        {"diagnostics", "exclude realizations with R-hat >= rhat_max; fail above max_exclusion_fraction"},
        {"strategies", "kind: inspection_theta | strain_pointwise | strain_theta; O&M paid at t0+1..t0+oandm_years"},
        {"threshold_sweep", "means: list or {start, stop, step} [mm]"},
        {"cost_grid", "grid_n x grid_n cells of install x annual O&M (O&M range = oandm_ratio * install_range)"},
        {"inspection_comparison", "extrinsic: lifecycle | inspection_time (decision times counted for the baseline)"},
    };
    return m;
}

inline void emit_yaml(YAML::Emitter& out, const nlohmann::ordered_json& j, bool top) {
    if (j.is_object()) {
        out << YAML::BeginMap;
        for (const auto& [k, v] : j.items()) {
            if (top) {
                const auto it = schema_comments().find(k);
                if (it != schema_comments().end()) {
                    out << YAML::Newline << YAML::Comment(it->second);
                }
            }
            out << YAML::Key << k << YAML::Value;
            emit_yaml(out, v, false);
        }
        out << YAML::EndMap;
    } else if (j.is_array()) {
        const bool flat = std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_primitive(); });
        out << (flat ? YAML::Flow : YAML::Block) << YAML::BeginSeq;
        for (const auto& v : j) {
            emit_yaml(out, v, false);
        }
        out << YAML::EndSeq;
    } else if (j.is_string()) {
        out << j.get<std::string>();
    } else if (j.is_boolean()) {
        out << j.get<bool>();
    } else if (j.is_number_unsigned()) {
        out << j.get<std::uint64_t>();
    } else if (j.is_number_integer()) {
        out << j.get<std::int64_t>();
    } else {
        out << csv::format(j.get<double>());
    }
}

}  // namespace detail

inline std::string to_yaml(const RunConfig& run) {
    YAML::Emitter out;
    detail::emit_yaml(out, to_json(run), true);
    return std::string(out.c_str()) + "\n";
}

/// Every key with its default value and a short description.
inline std::string config_schema() {
    return "# voi configuration: every key is optional; unknown keys are rejected.\n" + to_yaml(RunConfig{});
}

}  // namespace voi

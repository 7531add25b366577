// voi: batch front end for the value-of-information campaign.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "voi/artifacts.hpp"
#include "voi/campaign.hpp"
#include "voi/config.hpp"
#include "voi/error.hpp"

namespace fs = std::filesystem;
using namespace voi;

namespace {

enum Exit { kOk = 0, kConfigError = 2, kRuntimeError = 3, kGateError = 4 };

struct Options {
    std::string config;
    std::string out = "results";
    std::optional<std::uint64_t> seed;
    std::string scale;
    bool diagnostics = false;
    std::optional<std::size_t> workers;
};

class Runner {
public:
    Runner(RunConfig run, fs::path out, std::string command)
        : run_(std::move(run)), out_(std::move(out)), command_(std::move(command)), campaign_(run_.campaign) {}

    void prior() {
        write_csv("prior_exceedance.csv", artifacts::prior_csv(campaign_.prior()));
    }

    void preposterior() {
        const auto& c = campaign_.config();
        for (const auto& s : c.strategies) {
            const auto& bank = campaign_.bank(s.id);
            write_csv("preposterior_" + s.id + ".csv",
                      artifacts::preposterior_csv(bank, campaign_.prior().process, c.threshold.mean));
            if (c.gate.enabled) {
                write_csv("diagnostics_" + s.id + ".csv", artifacts::diagnostics_csv(bank));
            }
        }
        const auto reports = campaign_.reports();
        write_csv("voi_summary.csv", artifacts::summary_csv(reports, c.inspection.baseline));
        write_json("voi_report.json", artifacts::report_json(reports));
    }

    void threshold_sweep() {
        const auto& c = campaign_.config();
        const auto& banks = campaign_.banks(c.sweep.strategies);
        write_csv("threshold_sweep.csv", artifacts::sweep_csv(voi::threshold_sweep(banks, c, campaign_.prior().process)));
    }

    void cost_grid() {
        const auto& c = campaign_.config();
        for (const auto& id : c.cost_grid.strategies) {
            const auto cells = cost_grid_sweep(campaign_.bank(id), c.strategy(id), c, campaign_.prior().process);
            write_csv("cost_grid_" + id + ".csv", artifacts::cost_grid_csv(id, c.cost_grid.preset, cells));
        }
    }

    void compare_inspection() {
        const auto& c = campaign_.config();
        auto ids = c.inspection.strategies;
        ids.push_back(c.inspection.baseline);
        const auto& banks = campaign_.banks(ids);
        write_csv("chi_table.csv", artifacts::chi_csv(inspection_comparison(banks, c, campaign_.prior().process),
                                                     c.inspection.baseline));
    }

    void manifest() {
        nlohmann::ordered_json j;
        j["command"] = command_;
        j["seed"] = run_.campaign.seed;
        j["config_hash"] = artifacts::config_hash(run_);
        j["artifacts"] = written_;
        auto& sums = j["posterior_checksums"] = nlohmann::ordered_json::object();
        for (const auto& s : run_.campaign.strategies) {
            if (const auto* b = campaign_.cached_bank(s.id)) {
                sums[s.id] = artifacts::hex(b->checksum);
            }
        }
        j["config"] = to_json(run_);
        artifacts::save_json(out_ / "run_manifest.json", j);
    }

private:
    void write_csv(const std::string& name, const csv::Writer& w) {
        artifacts::save_text(out_ / name, w.str());
        written_.push_back(name);
    }
    void write_json(const std::string& name, const nlohmann::ordered_json& j) {
        artifacts::save_json(out_ / name, j);
        written_.push_back(name);
    }

    RunConfig run_;
    fs::path out_;
    std::string command_;
    Campaign campaign_;
    std::vector<std::string> written_;
};

RunConfig load(const Options& o) {
    std::optional<Scale> scale;
    if (!o.scale.empty()) {
        scale = scale_from(o.scale);
    }
    RunConfig run = o.config.empty() ? parse_config_text("", {}, scale) : parse_config(o.config, scale);
    if (o.seed) {
        run.campaign.seed = *o.seed;
    }
    if (o.workers) {
        run.campaign.workers = *o.workers;
    }
    if (o.diagnostics) {
        run.campaign.gate.enabled = true;
    }
    run.campaign.validate();
    return run;
}

int execute(const std::string& command, const Options& o) {
    const RunConfig run = load(o);
    const fs::path out(o.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) {
        throw Error("output directory " + out.string() + " is not writable");
    }
    Runner r(run, out, command);
    if (command == "prior" || command == "all") r.prior();
    if (command == "preposterior" || command == "all") r.preposterior();
    if (command == "threshold-sweep" || command == "all") r.threshold_sweep();
    if (command == "cost-grid" || command == "all") r.cost_grid();
    if (command == "compare-inspection" || command == "all") r.compare_inspection();
    r.manifest();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pre-posterior value of information for corrosion monitoring strategies"};
    app.require_subcommand(1);
    Options o;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"prior", "prior exceedance and decisions"},
        {"preposterior", "posterior inference for every strategy, VoI summary and report"},
        {"threshold-sweep", "lambda over threshold means"},
        {"cost-grid", "lambda over install x O&M cost grids"},
        {"compare-inspection", "chi of strain strategies against inspection"},
        {"all", "every study above"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "YAML configuration file");
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
        sub->add_option("--seed", o.seed, "master seed override");
        sub->add_option("--scale", o.scale, "desk | paper")->check(CLI::IsMember({"desk", "paper"}));
        sub->add_flag("--diagnostics", o.diagnostics, "enforce the R-hat gate and write diagnostics tables");
        sub->add_option("--workers", o.workers, "realization workers (0 = available parallelism)");
    }
    app.add_subcommand("config-schema", "print every configuration key with its default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        if (sub->get_name() == "config-schema") {
            std::cout << config_schema();
            return kOk;
        }
        return execute(sub->get_name(), o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DiagnosticsGateError& e) {
        std::cerr << "diagnostics gate failed: " << e.what() << "\n";
        return kGateError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
}

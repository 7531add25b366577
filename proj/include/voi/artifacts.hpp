#pragma once

// CSV and JSON result tables. Column layouts here are the interface consumed by
// the plotting scripts.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "voi/campaign.hpp"
#include "voi/config.hpp"
#include "voi/csv.hpp"

namespace voi::artifacts {

inline const std::vector<std::string> kPriorColumns{"t_years", "p_interval", "p_cumulative"};
inline const std::vector<std::string> kPreposteriorColumns{
    "realization", "excluded", "t_years", "true_delta_tau_mm", "post_mean_mm", "ci_lo_mm", "ci_hi_mm",
    "p_interval", "p_cumulative"};
inline const std::vector<std::string> kSummaryColumns{"strategy", "preset", "threshold_mean", "n_used", "n_excluded",
                                                      "prior_loss", "preposterior_loss", "cost_savings", "evoi",
                                                      "lambda", "chi"};
inline const std::vector<std::string> kSweepColumns{"strategy", "preset", "threshold_mean", "prior_loss",
                                                    "extrinsic_loss", "intrinsic_total", "cost_savings", "evoi",
                                                    "lambda", "posterior_checksum"};
inline const std::vector<std::string> kCostGridColumns{"strategy", "preset", "threshold_mean", "install",
                                                       "oandm_annual", "intrinsic_total", "cost_savings", "lambda",
                                                       "feasible"};
inline const std::vector<std::string> kChiColumns{"strategy", "baseline", "preset", "threshold_mean", "c_insp",
                                                  "lambda_baseline", "lambda_strategy", "chi"};
inline const std::vector<std::string> kDiagnosticsColumns{"realization", "max_rhat", "min_ess", "acceptance",
                                                          "boundary_warning", "excluded"};

inline std::string hex(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline csv::Writer prior_csv(const PriorResult& prior) { return exceedance_csv(prior.series); }

inline csv::Writer preposterior_csv(const PosteriorBank& bank, const PriorProcess& prior, double threshold_mean) {
    csv::Writer w(kPreposteriorColumns);
    const std::size_t t = bank.threshold_index(threshold_mean);
    for (std::size_t i = 0; i < bank.realizations.size(); ++i) {
        const auto& r = bank.realizations[i];
        const auto series = cumulative_exceedance(r.interval[t], bank.times);
        for (std::size_t k = 0; k < bank.times.size(); ++k) {
            w.row(i, r.excluded ? 1 : 0, bank.times[k], prior.trajectories(i, k), r.mean[k], r.ci_lo[k], r.ci_hi[k],
                  series.interval[k], series.cumulative[k]);
        }
    }
    return w;
}

inline csv::Writer diagnostics_csv(const PosteriorBank& bank) {
    csv::Writer w(kDiagnosticsColumns);
    for (std::size_t i = 0; i < bank.realizations.size(); ++i) {
        const auto& r = bank.realizations[i];
        w.row(i, r.max_rhat, r.min_ess, r.acceptance, r.boundary_warning ? 1 : 0, r.excluded ? 1 : 0);
    }
    return w;
}

/// chi of every report against the baseline report with the same preset and threshold.
inline csv::Writer summary_csv(const std::vector<VoIReport>& reports, const std::string& baseline) {
    csv::Writer w(kSummaryColumns);
    for (const auto& r : reports) {
        double x = kNaN;
        for (const auto& b : reports) {
            if (b.strategy == baseline && b.preset == r.preset && b.threshold_mean == r.threshold_mean && b.lambda &&
                r.lambda && *b.lambda != 1.0) {
                x = chi(*b.lambda, *r.lambda);
            }
        }
        w.row(r.strategy, r.preset, r.threshold_mean, r.n_used, r.n_excluded, r.prior_loss, r.preposterior_loss,
              r.cost_savings, r.evoi, r.lambda.value_or(kNaN), x);
    }
    return w;
}

inline csv::Writer sweep_csv(const std::vector<SweepRow>& rows) {
    csv::Writer w(kSweepColumns);
    for (const auto& r : rows) {
        w.row(r.strategy, r.preset, r.threshold_mean, r.prior_loss, r.extrinsic_loss, r.intrinsic_total,
              r.cost_savings, r.evoi, r.lambda, hex(r.posterior_checksum));
    }
    return w;
}

inline csv::Writer cost_grid_csv(const std::string& strategy, const std::string& preset,
                                 const std::vector<CostGridCell>& cells) {
    csv::Writer w(kCostGridColumns);
    for (const auto& c : cells) {
        w.row(strategy, preset, c.threshold_mean, c.install, c.oandm_annual, c.intrinsic_total, c.cost_savings,
              c.lambda, c.feasible ? 1 : 0);
    }
    return w;
}

inline csv::Writer chi_csv(const std::vector<ChiRow>& rows, const std::string& baseline) {
    csv::Writer w(kChiColumns);
    for (const auto& r : rows) {
        w.row(r.strategy, baseline, r.preset, r.threshold_mean, r.c_insp, r.lambda_baseline, r.lambda_candidate,
              r.chi.value_or(kNaN));
    }
    return w;
}

inline nlohmann::ordered_json number(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json to_json(const VoIReport& r) {
    nlohmann::ordered_json j;
    j["strategy"] = r.strategy;
    j["preset"] = r.preset;
    j["threshold_mean"] = number(r.threshold_mean);
    j["prior_loss"] = number(r.prior_loss);
    j["preposterior_loss"] = number(r.preposterior_loss);
    j["extrinsic_loss"] = number(r.extrinsic_loss);
    j["intrinsic_total"] = number(r.intrinsic_total);
    j["cost_savings"] = number(r.cost_savings);
    j["evoi"] = number(r.evoi);
    j["lambda"] = r.lambda ? number(*r.lambda) : nlohmann::ordered_json(nullptr);
    j["n_used"] = r.n_used;
    j["n_excluded"] = r.n_excluded;
    j["posterior_checksum"] = hex(r.posterior_checksum);
    auto& d = j["decisions"] = nlohmann::ordered_json::array();
    for (const auto& rec : r.decisions) {
        d.push_back({{"t_years", number(rec.t_years)},
                     {"prior_p_cumulative", number(rec.prior_p_cumulative)},
                     {"prior_decision", to_string(rec.prior_decision)},
                     {"repair_fraction", number(rec.repair_fraction)}});
    }
    return j;
}

inline nlohmann::ordered_json report_json(const std::vector<VoIReport>& reports) {
    nlohmann::ordered_json j;
    j["reports"] = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        j["reports"].push_back(to_json(r));
    }
    return j;
}

inline std::string config_hash(const RunConfig& run) {
    const auto text = to_json(run).dump();
    return hex(fnv1a(text.data(), text.size()));
}

inline void save_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

inline void save_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    save_text(path, j.dump(2) + "\n");
}

}  // namespace voi::artifacts

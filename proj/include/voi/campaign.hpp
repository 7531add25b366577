#pragma once

// Prior and pre-posterior analyses per monitoring strategy, and the threshold,
// intrinsic-cost and inspection-cost studies built on them.
//
// Every prior realization is inferred once per strategy. Its pooled posterior
// thickness samples are reduced immediately to interval exceedance probabilities
// for every threshold mean any study needs, so sweeps reuse the same posterior
// sample sets without re-running inference.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voi/decision.hpp"
#include "voi/deterioration.hpp"
#include "voi/error.hpp"
#include "voi/inference/inference.hpp"
#include "voi/matrix.hpp"
#include "voi/observation.hpp"
#include "voi/parallel.hpp"
#include "voi/random.hpp"
#include "voi/reliability.hpp"
#include "voi/stats.hpp"

namespace voi {

enum class StrategyKind { InspectionTheta, StrainPointwise, StrainTheta };

inline const char* to_string(StrategyKind k) noexcept {
    switch (k) {
        case StrategyKind::InspectionTheta: return "inspection_theta";
        case StrategyKind::StrainPointwise: return "strain_pointwise";
        case StrategyKind::StrainTheta: return "strain_theta";
    }
    return "?";
}

inline StrategyKind strategy_kind_from(const std::string& s) {
    if (s == "inspection_theta") return StrategyKind::InspectionTheta;
    if (s == "strain_pointwise") return StrategyKind::StrainPointwise;
    if (s == "strain_theta") return StrategyKind::StrainTheta;
    throw ConfigError("unknown strategy kind '" + s + "'");
}

inline constexpr std::size_t kOandmYears = 8;

struct StrategySpec {
    std::string id;
    StrategyKind kind = StrategyKind::StrainTheta;
    std::size_t obs_per_step = 50;
    double t_insp = 15.0;  // inspection strategies only; must be a grid point
    IntrinsicCosts intrinsic;

    /// Single inspection with a dedicated cost and no O&M stream.
    static StrategySpec z0(double c_insp = 0.1) {
        return {"z0", StrategyKind::InspectionTheta, 50, 15.0, IntrinsicCosts{c_insp, 0.0, {}}};
    }
    static StrategySpec z1(double t0) {
        return {"z1", StrategyKind::StrainPointwise, 50, 15.0, IntrinsicCosts::annual(0.11, 0.002, t0, kOandmYears)};
    }
    static StrategySpec z2(double t0) {
        return {"z2", StrategyKind::StrainTheta, 1, 15.0, IntrinsicCosts::annual(0.1, 0.001, t0, kOandmYears)};
    }
    static StrategySpec z3(double t0) {
        return {"z3", StrategyKind::StrainTheta, 50, 15.0, IntrinsicCosts::annual(0.11, 0.005, t0, kOandmYears)};
    }

    void validate(const TimeGrid& grid) const {
        const std::string key = "strategies." + id;
        require<ConfigError>(!id.empty(), "strategy id must not be empty");
        require<ConfigError>(obs_per_step >= 1, key + ".obs_per_step must be >= 1");
        if (kind == StrategyKind::InspectionTheta) {
            require<ConfigError>(grid.index_of(t_insp) < grid.size(), key + ".t_insp must be a decision time of the grid");
        }
        intrinsic.validate();
    }
};

inline std::vector<StrategySpec> default_strategies(double t0) {
    return {StrategySpec::z0(), StrategySpec::z1(t0), StrategySpec::z2(t0), StrategySpec::z3(t0)};
}

enum class InspectionExtrinsic {
    Lifecycle,       // decision costs summed over the whole grid
    InspectionTime,  // the single decision at the inspection time
};

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

/// lo, lo + step, ... up to hi inclusive (values rounded to 1e-12 to keep labels clean).
inline std::vector<double> arange_inclusive(double lo, double hi, double step) {
    require<ConfigError>(step > 0.0, "sweep step must be > 0");
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        v.push_back(std::round((lo + step * static_cast<double>(i)) * 1e12) / 1e12);
    }
    return v;
}

struct ThresholdSweepSpec {
    std::vector<std::string> strategies{"z1", "z2", "z3"};
    std::vector<double> means = arange_inclusive(0.8, 1.8, 0.1);
};

struct CostGridSpec {
    std::vector<std::string> strategies{"z1", "z2", "z3"};
    double install_lo = 0.1;
    double install_hi = 0.5;
    double oandm_ratio = 0.01;  // annual O&M range is oandm_ratio times the install range
    std::size_t grid_n = 100;
    std::vector<double> thresholds{1.2, 1.6};
    std::string preset = "R2";
};

struct InspectionComparisonSpec {
    std::string baseline = "z0";
    std::vector<std::string> strategies{"z1", "z2", "z3"};
    double c_insp_lo = 0.05;
    double c_insp_hi = 0.15;
    std::size_t n = 11;
    std::vector<double> thresholds{1.2, 1.4, 1.6};
    InspectionExtrinsic extrinsic = InspectionExtrinsic::Lifecycle;
};

struct DiagnosticsGate {
    bool enabled = false;
    double rhat_max = 1.01;
    double max_exclusion_fraction = 0.05;
};

struct CampaignConfig {
    PriorSpec prior;
    TimeGrid grid = TimeGrid::regular(10.0, 8.0, 0.25);
    SurrogateModel surrogate = SurrogateModel::default_model();
    NoiseSpec noise;
    ThresholdSpec threshold;
    std::vector<CostFunctionSpec> presets{CostFunctionSpec::r1(), CostFunctionSpec::r2()};
    EconomicSpec economics;
    InferencePriors inference;  // theta prior is always taken from `prior`
    std::size_t n_prior = 100;
    std::size_t n_post = 1000;
    McmcConfig mcmc = default_mcmc();
    std::uint64_t seed = 0;
    std::size_t workers = 0;  // 0 = available parallelism
    std::vector<StrategySpec> strategies = default_strategies(10.0);
    ThresholdSweepSpec sweep;
    CostGridSpec cost_grid;
    InspectionComparisonSpec inspection;
    DiagnosticsGate gate;

    static McmcConfig default_mcmc() {
        McmcConfig m;
        m.warmup = 1000;
        m.draws = 1000;
        m.chains = 2;
        return m;
    }

    [[nodiscard]] InferencePriors inference_priors() const {
        InferencePriors p = inference;
        p.theta = prior;
        return p;
    }

    [[nodiscard]] const StrategySpec& strategy(const std::string& id) const {
        for (const auto& s : strategies) {
            if (s.id == id) {
                return s;
            }
        }
        throw ConfigError("unknown strategy '" + id + "'");
    }

    [[nodiscard]] const CostFunctionSpec& preset(const std::string& name) const {
        for (const auto& p : presets) {
            if (p.name == name) {
                return p;
            }
        }
        throw ConfigError("unknown cost preset '" + name + "'");
    }

    void validate() const {
        prior.validate();
        grid.validate();
        require<ConfigError>(grid.size() >= 1, "grid must contain at least one decision time");
        surrogate.validate();
        require<ConfigError>(noise.strain_sd > 0.0, "noise.strain_sd must be > 0");
        require<ConfigError>(noise.inspection_cov > 0.0, "noise.inspection_cov must be > 0");
        threshold.validate();
        require<ConfigError>(!presets.empty(), "costs.presets must not be empty");
        for (const auto& p : presets) {
            p.validate();
        }
        economics.validate();
        inference_priors().validate();
        mcmc.validate();
        require<ConfigError>(n_prior >= 1, "n_prior must be >= 1");
        require<ConfigError>(n_post >= 1, "n_post must be >= 1");
        require<ConfigError>(n_post <= mcmc.draws * mcmc.chains,
                             "n_post must not exceed mcmc.draws * mcmc.chains");
        require<ConfigError>(!gate.enabled || mcmc.chains >= 2, "diagnostics need mcmc.chains >= 2");
        require<ConfigError>(gate.rhat_max > 1.0, "diagnostics.rhat_max must be > 1");
        require<ConfigError>(gate.max_exclusion_fraction >= 0.0 && gate.max_exclusion_fraction <= 1.0,
                             "diagnostics.max_exclusion_fraction must lie in [0, 1]");
        require<ConfigError>(!strategies.empty(), "strategies must not be empty");
        for (std::size_t i = 0; i < strategies.size(); ++i) {
            strategies[i].validate(grid);
            for (std::size_t j = 0; j < i; ++j) {
                require<ConfigError>(strategies[i].id != strategies[j].id, "duplicate strategy '" + strategies[i].id + "'");
            }
        }
        for (const auto& id : sweep.strategies) {
            (void)strategy(id);
        }
        require<ConfigError>(!sweep.means.empty(), "threshold_sweep.means must not be empty");
        for (double m : sweep.means) {
            require<ConfigError>(m > 0.0, "threshold_sweep.means must be > 0");
        }
        for (const auto& id : cost_grid.strategies) {
            (void)strategy(id);
        }
        (void)preset(cost_grid.preset);
        require<ConfigError>(cost_grid.grid_n >= 2, "cost_grid.grid_n must be >= 2");
        require<ConfigError>(cost_grid.install_lo >= 0.0 && cost_grid.install_lo < cost_grid.install_hi,
                             "cost_grid.install_range must satisfy 0 <= lo < hi");
        require<ConfigError>(cost_grid.oandm_ratio >= 0.0, "cost_grid.oandm_ratio must be >= 0");
        for (double m : cost_grid.thresholds) {
            require<ConfigError>(m > 0.0, "cost_grid.thresholds must be > 0");
        }
        require<ConfigError>(strategy(inspection.baseline).kind == StrategyKind::InspectionTheta,
                             "inspection_comparison.baseline must be an inspection strategy");
        for (const auto& id : inspection.strategies) {
            (void)strategy(id);
        }
        require<ConfigError>(inspection.n >= 1, "inspection_comparison.n must be >= 1");
        require<ConfigError>(inspection.c_insp_lo > 0.0 && inspection.c_insp_lo <= inspection.c_insp_hi,
                             "inspection_comparison.c_insp_range must satisfy 0 < lo <= hi");
        for (double m : inspection.thresholds) {
            require<ConfigError>(m > 0.0, "inspection_comparison.thresholds must be > 0");
        }
    }
};

// ---------------------------------------------------------------------------
// Prior analysis

struct PriorProcess {
    std::vector<DeteriorationParams> params;
    Matrix trajectories;                        // n_prior x K, mm
    std::vector<std::vector<double>> deviates;  // per time, n_prior threshold deviates
    std::vector<double> times;

    [[nodiscard]] ExceedanceSeries series(const ThresholdSpec& threshold) const {
        return exceedance_series(trajectories, times, threshold, deviates);
    }
};

inline PriorProcess sample_prior_process(const CampaignConfig& config) {
    PriorProcess p;
    p.params = sample_prior(config.prior, config.n_prior, derive_seed(config.seed, Stream::PriorParams));
    p.trajectories = generate_trajectories(p.params, config.grid);
    p.times = config.grid.points;
    p.deviates.reserve(config.grid.size());
    for (std::size_t k = 0; k < config.grid.size(); ++k) {
        p.deviates.push_back(threshold_deviates(config.threshold.cov, config.n_prior,
                                                derive_seed(config.seed, Stream::PriorThreshold, {k})));
    }
    return p;
}

struct PriorResult {
    PriorProcess process;
    ExceedanceSeries series;            // at the configured threshold
    std::vector<LifecycleLoss> losses;  // per cost preset
};

inline PriorResult run_prior_analysis(const CampaignConfig& config) {
    config.validate();
    PriorResult r;
    r.process = sample_prior_process(config);
    r.series = r.process.series(config.threshold);
    for (const auto& preset : config.presets) {
        r.losses.push_back(lifecycle_prior_loss(r.series, preset, config.economics));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Posterior inference per realization

inline std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t strategy_stream(const std::string& id) noexcept { return fnv1a(id.data(), id.size()); }

struct PosteriorStates {
    Matrix states;  // n_post x K posterior thickness loss samples
    double max_rhat = std::numeric_limits<double>::quiet_NaN();
    double min_ess = std::numeric_limits<double>::quiet_NaN();
    double acceptance = std::numeric_limits<double>::quiet_NaN();
    bool boundary_warning = false;
    bool rhat_unavailable = false;
};

namespace detail {

inline void absorb(PosteriorStates& out, const PosteriorSamples& s) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t p = 0; p < s.dim(); ++p) {
        // An unavailable R-hat anywhere makes the realization's maximum unavailable.
        if (out.rhat_unavailable || std::isnan(s.rhat[p])) {
            out.rhat_unavailable = true;
            out.max_rhat = nan;
        } else {
            out.max_rhat = std::isnan(out.max_rhat) ? s.rhat[p] : std::max(out.max_rhat, s.rhat[p]);
        }
        if (!std::isnan(s.ess[p])) {
            out.min_ess = std::isnan(out.min_ess) ? s.ess[p] : std::min(out.min_ess, s.ess[p]);
        }
    }
    double acc = 0.0;
    for (double a : s.acceptance) {
        acc += a;
    }
    acc /= static_cast<double>(s.acceptance.size());
    out.acceptance = std::isnan(out.acceptance) ? acc : std::min(out.acceptance, acc);
    out.boundary_warning = out.boundary_warning || s.boundary_warning;
}

/// Indices of n evenly strided draws out of `total` pooled draws.
inline std::size_t strided(std::size_t j, std::size_t n, std::size_t total) noexcept { return j * total / n; }

}  // namespace detail

/// Synthetic observations for one realization, inference with the strategy's
/// model variant, and n_post posterior thickness loss samples at every decision time.
inline PosteriorStates posterior_states(const StrategySpec& strategy, const CampaignConfig& config,
                                        std::span<const double> truth, std::size_t realization) {
    const auto& grid = config.grid;
    require(truth.size() == grid.size(), "posterior_states: true trajectory does not match the grid");
    const auto priors = config.inference_priors();
    McmcConfig mcmc = config.mcmc;
    mcmc.seed = derive_seed(config.seed, Stream::Mcmc, {strategy_stream(strategy.id), realization});
    const std::size_t n_post = config.n_post;
    PosteriorStates out;
    out.states = Matrix(n_post, grid.size());

    auto strain_data = [&] {
        std::vector<ObservationSet> sets;
        sets.reserve(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            auto set = generate_strain_obs(config.surrogate, truth[k], strategy.obs_per_step, config.noise,
                                           derive_seed(config.seed, Stream::Observations, {realization, k}));
            set.time_index = k;
            set.t_years = grid.points[k];
            sets.push_back(std::move(set));
        }
        return sets;
    };
    auto push_forward = [&](const PosteriorSamples& s) {
        const std::size_t total = s.total();
        for (std::size_t j = 0; j < n_post; ++j) {
            const std::size_t r = detail::strided(j, n_post, total);
            const auto p = params_of(s, r / s.draws, r % s.draws);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                out.states(j, k) = evaluate_deterioration(p, grid.points[k], grid.t0);
            }
        }
    };

    switch (strategy.kind) {
        case StrategyKind::InspectionTheta: {
            const std::size_t k = grid.index_of(strategy.t_insp);
            require<ConfigError>(k < grid.size(), "strategies." + strategy.id + ".t_insp must be a decision time of the grid");
            auto obs = generate_inspection_obs(truth[k], strategy.obs_per_step, config.noise.inspection_cov,
                                               derive_seed(config.seed, Stream::Observations, {realization, k}));
            obs.time_index = k;
            obs.t_years = grid.points[k];
            const auto s = infer_theta_from_inspection(obs, priors, mcmc, grid.t0);
            detail::absorb(out, s);
            push_forward(s);
            break;
        }
        case StrategyKind::StrainTheta: {
            const auto sets = strain_data();
            const auto s = infer_theta_from_strain(sets, config.surrogate, priors, mcmc, grid.t0);
            detail::absorb(out, s);
            push_forward(s);
            break;
        }
        case StrategyKind::StrainPointwise: {
            const auto sets = strain_data();
            const auto per_time = infer_thickness_pointwise(sets, config.surrogate, priors, mcmc);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const auto& s = per_time[k];
                detail::absorb(out, s);
                const std::size_t total = s.total();
                for (std::size_t j = 0; j < n_post; ++j) {
                    const std::size_t r = detail::strided(j, n_post, total);
                    out.states(j, k) = s.at(r / s.draws, r % s.draws, 0);
                }
            }
            break;
        }
    }
    return out;
}

struct RealizationPosterior {
    bool excluded = false;
    double max_rhat = std::numeric_limits<double>::quiet_NaN();
    double min_ess = std::numeric_limits<double>::quiet_NaN();
    double acceptance = std::numeric_limits<double>::quiet_NaN();
    bool boundary_warning = false;
    std::uint64_t checksum = 0;
    std::vector<double> mean;                   // posterior mean thickness loss per time
    std::vector<double> ci_lo;                  // 2.5% quantile per time
    std::vector<double> ci_hi;                  // 97.5% quantile per time
    std::vector<std::vector<double>> interval;  // [threshold][time] interval exceedance
};

struct PosteriorBank {
    std::string strategy;
    std::vector<double> threshold_means;
    std::vector<double> times;
    std::vector<RealizationPosterior> realizations;
    std::uint64_t checksum = 0;  // over every realization's posterior samples

    [[nodiscard]] std::size_t threshold_index(double mean) const {
        for (std::size_t i = 0; i < threshold_means.size(); ++i) {
            if (std::abs(threshold_means[i] - mean) <= 1e-12 * std::max(1.0, std::abs(mean))) {
                return i;
            }
        }
        throw ContractError("posterior bank for " + strategy + " has no threshold " + csv::format(mean));
    }

    [[nodiscard]] std::size_t excluded() const noexcept {
        return static_cast<std::size_t>(std::count_if(realizations.begin(), realizations.end(),
                                                      [](const auto& r) { return r.excluded; }));
    }
    [[nodiscard]] std::size_t used() const noexcept { return realizations.size() - excluded(); }

    /// Cumulative exceedance series of every non-excluded realization.
    [[nodiscard]] std::vector<ExceedanceSeries> series(double threshold_mean) const {
        const std::size_t t = threshold_index(threshold_mean);
        std::vector<ExceedanceSeries> out;
        out.reserve(used());
        for (const auto& r : realizations) {
            if (!r.excluded) {
                out.push_back(cumulative_exceedance(r.interval[t], times));
            }
        }
        return out;
    }
};

/// Sorted, de-duplicated threshold means needed by every configured study.
inline std::vector<double> required_thresholds(const CampaignConfig& config) {
    std::vector<double> t{config.threshold.mean};
    t.insert(t.end(), config.sweep.means.begin(), config.sweep.means.end());
    t.insert(t.end(), config.cost_grid.thresholds.begin(), config.cost_grid.thresholds.end());
    t.insert(t.end(), config.inspection.thresholds.begin(), config.inspection.thresholds.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }), t.end());
    return t;
}

inline RealizationPosterior summarize_realization(const PosteriorStates& post, const CampaignConfig& config,
                                                  std::span<const double> threshold_means, std::size_t realization) {
    const std::size_t K = config.grid.size();
    const std::size_t n = post.states.rows();
    RealizationPosterior r;
    r.max_rhat = post.max_rhat;
    r.min_ess = post.min_ess;
    r.acceptance = post.acceptance;
    r.boundary_warning = post.boundary_warning;
    r.checksum = fnv1a(post.states.data().data(), sizeof(double) * n * K);
    r.mean.resize(K);
    r.ci_lo.resize(K);
    r.ci_hi.resize(K);
    r.interval.assign(threshold_means.size(), std::vector<double>(K));
    std::vector<double> col(n);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            col[j] = post.states(j, k);
        }
        r.mean[k] = stats::mean(col);
        r.ci_lo[k] = stats::quantile(col, 0.025);
        r.ci_hi[k] = stats::quantile(col, 0.975);
        const auto z = threshold_deviates(config.threshold.cov, n,
                                          derive_seed(config.seed, Stream::PosteriorThreshold, {realization, k}));
        for (std::size_t t = 0; t < threshold_means.size(); ++t) {
            std::size_t hits = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (col[j] > threshold_means[t] * (1.0 + config.threshold.cov * z[j])) {
                    ++hits;
                }
            }
            r.interval[t][k] = static_cast<double>(hits) / static_cast<double>(n);
        }
    }
    return r;
}

/// Runs inference for every prior realization under one strategy. With the
/// diagnostics gate enabled, realizations whose R-hat fails are excluded; more
/// than the allowed fraction of exclusions is a campaign error.
inline PosteriorBank build_posterior_bank(const StrategySpec& strategy, const CampaignConfig& config,
                                          const PriorProcess& prior, std::vector<double> threshold_means) {
    strategy.validate(config.grid);
    require(prior.trajectories.rows() == config.n_prior && prior.trajectories.cols() == config.grid.size(),
            "posterior bank: prior process does not match the configuration");
    PosteriorBank bank;
    bank.strategy = strategy.id;
    bank.threshold_means = std::move(threshold_means);
    bank.times = config.grid.points;
    bank.realizations.resize(config.n_prior);
    parallel_for(config.n_prior, config.workers, [&](std::size_t i) {
        const auto post = posterior_states(strategy, config, prior.trajectories.row(i), i);
        bank.realizations[i] = summarize_realization(post, config, bank.threshold_means, i);
    });
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto& r : bank.realizations) {
        h = fnv1a(&r.checksum, sizeof r.checksum, h);
        if (config.gate.enabled) {
            r.excluded = !(r.max_rhat < config.gate.rhat_max);
        }
    }
    bank.checksum = h;
    const double fraction = static_cast<double>(bank.excluded()) / static_cast<double>(config.n_prior);
    if (config.gate.enabled && (fraction > config.gate.max_exclusion_fraction || bank.used() == 0)) {
        throw DiagnosticsGateError("strategy " + strategy.id + ": " + std::to_string(bank.excluded()) + " of " +
                                   std::to_string(config.n_prior) + " realizations failed the R-hat gate");
    }
    return bank;
}

// ---------------------------------------------------------------------------
// Losses and reports

/// Prior and pre-posterior extrinsic losses for one (bank, preset, threshold).
struct LossPair {
    LifecycleLoss prior;
    PreposteriorLoss preposterior;  // intrinsic part zero; add per intrinsic assignment

    [[nodiscard]] double cost_savings() const { return expected_cost_savings(prior.total, preposterior.extrinsic); }
};

namespace detail {

inline ExceedanceSeries slice(const ExceedanceSeries& s, std::size_t k) {
    return {{s.times[k]}, {s.interval[k]}, {s.cumulative[k]}};
}

}  // namespace detail

inline LossPair loss_pair(const PosteriorBank& bank, const PriorProcess& prior, const CostFunctionSpec& preset,
                          double threshold_mean, const CampaignConfig& config,
                          std::optional<std::size_t> only_time = std::nullopt) {
    const ThresholdSpec threshold{threshold_mean, config.threshold.cov};
    auto prior_series = prior.series(threshold);
    auto posterior = bank.series(threshold_mean);
    if (only_time) {
        prior_series = detail::slice(prior_series, *only_time);
        for (auto& s : posterior) {
            s = detail::slice(s, *only_time);
        }
    }
    LossPair out;
    out.prior = lifecycle_prior_loss(prior_series, preset, config.economics);
    out.preposterior = lifecycle_preposterior_loss(posterior, preset, config.economics, IntrinsicCosts{});
    return out;
}

/// Decision time restriction for an inspection strategy under the configured extrinsic mode.
inline std::optional<std::size_t> extrinsic_times(const StrategySpec& strategy, const CampaignConfig& config) {
    if (strategy.kind == StrategyKind::InspectionTheta &&
        config.inspection.extrinsic == InspectionExtrinsic::InspectionTime) {
        return config.grid.index_of(strategy.t_insp);
    }
    return std::nullopt;
}

inline VoIReport make_report(const PosteriorBank& bank, const StrategySpec& strategy, const PriorProcess& prior,
                             const CostFunctionSpec& preset, double threshold_mean, const CampaignConfig& config) {
    const auto losses = loss_pair(bank, prior, preset, threshold_mean, config, extrinsic_times(strategy, config));
    VoIReport r;
    r.strategy = strategy.id;
    r.preset = preset.name;
    r.threshold_mean = threshold_mean;
    r.prior_loss = losses.prior.total;
    r.extrinsic_loss = losses.preposterior.extrinsic;
    r.intrinsic_total = strategy.intrinsic.total(config.economics);
    r.preposterior_loss = r.intrinsic_total + r.extrinsic_loss;
    r.cost_savings = losses.cost_savings();
    r.evoi = evoi(r.cost_savings, strategy.intrinsic, config.economics);
    if (r.intrinsic_total > 0.0) {
        r.lambda = lambda_ratio(r.cost_savings, strategy.intrinsic, config.economics);
    }
    r.n_used = bank.used();
    r.n_excluded = bank.excluded();
    r.posterior_checksum = bank.checksum;
    const auto& pre = losses.preposterior.per_realization;
    for (std::size_t k = 0; k < losses.prior.decisions.size(); ++k) {
        TimeDecisionRecord rec;
        rec.prior_decision = losses.prior.decisions[k];
        std::size_t repairs = 0;
        for (const auto& l : pre) {
            repairs += l.decisions[k] == Decision::Repair ? 1 : 0;
        }
        rec.repair_fraction = static_cast<double>(repairs) / static_cast<double>(pre.size());
        r.decisions.push_back(rec);
    }
    // Attach times and prior probabilities of the retained decision times.
    const ThresholdSpec threshold{threshold_mean, config.threshold.cov};
    auto prior_series = prior.series(threshold);
    if (const auto only = extrinsic_times(strategy, config)) {
        prior_series = detail::slice(prior_series, *only);
    }
    for (std::size_t k = 0; k < r.decisions.size(); ++k) {
        r.decisions[k].t_years = prior_series.times[k];
        r.decisions[k].prior_p_cumulative = prior_series.cumulative[k];
    }
    return r;
}

inline VoIReport run_preposterior(const StrategySpec& strategy, const CampaignConfig& config,
                                  const PriorProcess& prior, const CostFunctionSpec& preset) {
    const auto bank = build_posterior_bank(strategy, config, prior, {config.threshold.mean});
    return make_report(bank, strategy, prior, preset, config.threshold.mean, config);
}

// ---------------------------------------------------------------------------
// Studies

struct SweepRow {
    std::string strategy;
    std::string preset;
    double threshold_mean = 0.0;
    double prior_loss = 0.0;
    double extrinsic_loss = 0.0;
    double intrinsic_total = 0.0;
    double cost_savings = 0.0;
    double evoi = 0.0;
    double lambda = 0.0;
    std::uint64_t posterior_checksum = 0;
};

/// lambda per (strategy, threshold mean, preset), reusing each strategy's posterior bank.
inline std::vector<SweepRow> threshold_sweep(const std::map<std::string, PosteriorBank>& banks,
                                             const CampaignConfig& config, const PriorProcess& prior) {
    std::vector<SweepRow> rows;
    for (const auto& id : config.sweep.strategies) {
        const auto& strategy = config.strategy(id);
        const auto& bank = banks.at(id);
        for (const auto& preset : config.presets) {
            for (double m : config.sweep.means) {
                const auto r = make_report(bank, strategy, prior, preset, m, config);
                rows.push_back({id, preset.name, m, r.prior_loss, r.extrinsic_loss, r.intrinsic_total, r.cost_savings,
                                r.evoi, r.lambda.value_or(std::numeric_limits<double>::quiet_NaN()), bank.checksum});
            }
        }
    }
    return rows;
}

struct CostGridCell {
    double threshold_mean = 0.0;
    double install = 0.0;
    double oandm_annual = 0.0;
    double intrinsic_total = 0.0;
    double cost_savings = 0.0;
    double lambda = 0.0;
    bool feasible = false;
};

/// lambda over an install x annual-O&M grid; the cost savings are computed once per threshold.
inline std::vector<CostGridCell> cost_grid_sweep(const PosteriorBank& bank, const StrategySpec& strategy,
                                                 const CampaignConfig& config, const PriorProcess& prior) {
    const auto& spec = config.cost_grid;
    const auto& preset = config.preset(spec.preset);
    const auto installs = linspace(spec.install_lo, spec.install_hi, spec.grid_n);
    const auto oandm = linspace(spec.oandm_ratio * spec.install_lo, spec.oandm_ratio * spec.install_hi, spec.grid_n);
    std::vector<CostGridCell> cells;
    cells.reserve(spec.thresholds.size() * spec.grid_n * spec.grid_n);
    for (double m : spec.thresholds) {
        const double cs = loss_pair(bank, prior, preset, m, config).cost_savings();
        for (double install : installs) {
            for (double om : oandm) {
                IntrinsicCosts c = strategy.intrinsic;
                c.install = install;
                c.oandm_annual = om;
                const double total = c.total(config.economics);
                const double lambda = total > 0.0 ? cs / total : std::numeric_limits<double>::quiet_NaN();
                cells.push_back({m, install, om, total, cs, lambda, cs > total});
            }
        }
    }
    return cells;
}

struct ChiRow {
    std::string strategy;
    std::string preset;
    double threshold_mean = 0.0;
    double c_insp = 0.0;
    double lambda_baseline = 0.0;
    double lambda_candidate = 0.0;
    std::optional<double> chi;  // empty when the baseline lambda equals 1
};

/// chi of each strain strategy against the inspection baseline over a range of inspection costs.
inline std::vector<ChiRow> inspection_comparison(const std::map<std::string, PosteriorBank>& banks,
                                                 const CampaignConfig& config, const PriorProcess& prior) {
    const auto& spec = config.inspection;
    const auto& base = config.strategy(spec.baseline);
    const auto only = extrinsic_times(base, config);
    const auto costs = linspace(spec.c_insp_lo, spec.c_insp_hi, spec.n);
    std::vector<ChiRow> rows;
    for (const auto& preset : config.presets) {
        for (double m : spec.thresholds) {
            const double cs0 = loss_pair(banks.at(base.id), prior, preset, m, config, only).cost_savings();
            for (const auto& id : spec.strategies) {
                const auto& s = config.strategy(id);
                const double cs = loss_pair(banks.at(id), prior, preset, m, config).cost_savings();
                const double lambda_i = lambda_ratio(cs, s.intrinsic, config.economics);
                for (double c : costs) {
                    ChiRow row{id, preset.name, m, c, lambda_ratio(cs0, IntrinsicCosts{c, 0.0, {}}, config.economics),
                               lambda_i, std::nullopt};
                    try {
                        row.chi = chi(row.lambda_baseline, row.lambda_candidate);
                    } catch (const UndefinedRatioError&) {
                    }
                    rows.push_back(row);
                }
            }
        }
    }
    return rows;
}

/// Lazily built prior process and posterior banks shared by every study of one run.
class Campaign {
public:
    explicit Campaign(CampaignConfig config) : config_(std::move(config)) { config_.validate(); }

    [[nodiscard]] const CampaignConfig& config() const noexcept { return config_; }

    const PriorResult& prior() {
        if (!prior_) {
            prior_ = run_prior_analysis(config_);
        }
        return *prior_;
    }

    const PosteriorBank& bank(const std::string& id) {
        auto it = banks_.find(id);
        if (it == banks_.end()) {
            const auto& process = prior().process;
            it = banks_.emplace(id, build_posterior_bank(config_.strategy(id), config_, process,
                                                         required_thresholds(config_))).first;
        }
        return it->second;
    }

    const std::map<std::string, PosteriorBank>& banks(const std::vector<std::string>& ids) {
        for (const auto& id : ids) {
            (void)bank(id);
        }
        return banks_;
    }

    [[nodiscard]] const PosteriorBank* cached_bank(const std::string& id) const {
        const auto it = banks_.find(id);
        return it == banks_.end() ? nullptr : &it->second;
    }

    /// One report per (strategy, preset) at the configured threshold.
    std::vector<VoIReport> reports() {
        std::vector<VoIReport> out;
        for (const auto& s : config_.strategies) {
            const auto& b = bank(s.id);
            for (const auto& preset : config_.presets) {
                out.push_back(make_report(b, s, prior().process, preset, config_.threshold.mean, config_));
            }
        }
        return out;
    }

private:
    CampaignConfig config_;
    std::optional<PriorResult> prior_;
    std::map<std::string, PosteriorBank> banks_;
};

}  // namespace voi

#pragma once

// Consequence costs of the binary repair decision, prior and pre-posterior
// lifecycle losses, and the value-of-information metrics built on them.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voi/error.hpp"
#include "voi/reliability.hpp"

namespace voi {

enum class Decision { NoRepair, Repair };  // d0, d1

inline const char* to_string(Decision d) noexcept { return d == Decision::NoRepair ? "d0" : "d1"; }

struct CostFunctionSpec {
    std::string name = "R1";
    double min_repair_cost = 0.33;  // false-alarm cost of repairing at p_ex = 0
    double p_ex_threshold = 0.2;    // exceedance probability above which repair is always chosen
    /// Floors the repair cost at zero, keeping consequence costs on the normalized [0, 1] scale.
    bool clamp_negative = true;

    static CostFunctionSpec r1() { return {"R1", 0.33, 0.2, true}; }
    static CostFunctionSpec r2() { return {"R2", 0.15, 0.1, true}; }

    void validate() const {
        require<ConfigError>(min_repair_cost >= 0.0 && min_repair_cost < 1.0,
                             "cost preset " + name + ": min_repair_cost must lie in [0, 1)");
        require<ConfigError>(p_ex_threshold > 0.0 && p_ex_threshold <= 1.0,
                             "cost preset " + name + ": p_ex_threshold must lie in (0, 1]");
    }
};

struct EconomicSpec {
    double inflation_rate = 0.02;

    void validate() const {
        require<ConfigError>(inflation_rate > -1.0 && std::isfinite(inflation_rate),
                             "economics.inflation_rate must be > -1");
    }
};

inline void require_probability(double p, const char* what) {
    require(p >= 0.0 && p <= 1.0, std::string(what) + ": probability outside [0, 1]");
}

inline double cost_no_repair(double p_ex) {
    require_probability(p_ex, "cost_no_repair");
    return p_ex;
}

/// Linear repair cost through (0, min_repair_cost) and (p_ex_threshold, p_ex_threshold).
/// Written as p + m (1 - p / p_th) so the intersection with cost_no_repair is exact.
inline double cost_repair(double p_ex, const CostFunctionSpec& spec) {
    require_probability(p_ex, "cost_repair");
    if (!(spec.p_ex_threshold > 0.0)) {
        throw ConfigError("cost preset " + spec.name + ": p_ex_threshold must be > 0");
    }
    const double raw = p_ex + spec.min_repair_cost * (1.0 - p_ex / spec.p_ex_threshold);
    return spec.clamp_negative && raw < 0.0 ? 0.0 : raw;
}

struct DecisionOutcome {
    Decision decision = Decision::NoRepair;
    double cost = 0.0;
};

/// Cheaper of the two decisions; ties go to no repair.
inline DecisionOutcome optimal_decision(double p_ex, const CostFunctionSpec& spec) {
    const double keep = cost_no_repair(p_ex);
    const double repair = cost_repair(p_ex, spec);
    if (repair < keep) {
        return {Decision::Repair, repair};
    }
    return {Decision::NoRepair, keep};
}

inline double inflation_factor(double t_years, double rate) {
    require<DomainError>(t_years >= 0.0, "inflation_factor: t must be >= 0");
    return std::pow(1.0 + rate, t_years);
}

/// Installation cost paid now plus an annual O&M stream compounded at absolute times t_m.
struct IntrinsicCosts {
    double install = 0.0;
    double oandm_annual = 0.0;
    std::vector<double> oandm_times;  // years

    /// O&M at t0 + 1, ..., t0 + years.
    static IntrinsicCosts annual(double install, double oandm_annual, double t0, std::size_t years) {
        IntrinsicCosts c{install, oandm_annual, {}};
        for (std::size_t m = 1; m <= years; ++m) {
            c.oandm_times.push_back(t0 + static_cast<double>(m));
        }
        return c;
    }

    void validate() const {
        require<ConfigError>(install >= 0.0 && oandm_annual >= 0.0, "intrinsic costs must be >= 0");
        for (double t : oandm_times) {
            require<ConfigError>(t >= 0.0, "intrinsic O&M times must be >= 0");
        }
    }

    [[nodiscard]] double oandm_total(const EconomicSpec& econ) const {
        double s = 0.0;
        for (double t : oandm_times) {
            s += oandm_annual * inflation_factor(t, econ.inflation_rate);
        }
        return s;
    }

    [[nodiscard]] double total(const EconomicSpec& econ) const { return install + oandm_total(econ); }
};

struct LifecycleLoss {
    double total = 0.0;
    std::vector<Decision> decisions;  // per time
    std::vector<double> costs;        // inflated per-time cost of the chosen decision
};

/// Sum over decision times of the optimal consequence cost at the prior cumulative
/// exceedance, inflated to each absolute time.
inline LifecycleLoss lifecycle_prior_loss(const ExceedanceSeries& series, const CostFunctionSpec& spec,
                                          const EconomicSpec& econ) {
    require(series.times.size() == series.cumulative.size(), "lifecycle loss needs a time for every probability");
    LifecycleLoss out;
    out.decisions.reserve(series.size());
    out.costs.reserve(series.size());
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto d = optimal_decision(series.cumulative[k], spec);
        const double c = d.cost * inflation_factor(series.times[k], econ.inflation_rate);
        out.decisions.push_back(d.decision);
        out.costs.push_back(c);
        out.total += c;
    }
    return out;
}

struct PreposteriorLoss {
    double total = 0.0;      // intrinsic + extrinsic
    double extrinsic = 0.0;  // Monte Carlo mean over realizations of the lifecycle decision cost
    double intrinsic = 0.0;
    std::vector<LifecycleLoss> per_realization;
};

inline PreposteriorLoss lifecycle_preposterior_loss(std::span<const ExceedanceSeries> per_realization,
                                                    const CostFunctionSpec& spec, const EconomicSpec& econ,
                                                    const IntrinsicCosts& intrinsic) {
    require(!per_realization.empty(), "lifecycle_preposterior_loss: no realizations");
    PreposteriorLoss out;
    out.per_realization.reserve(per_realization.size());
    // Running mean: equal losses average to exactly that loss.
    double mean = 0.0;
    for (const auto& series : per_realization) {
        out.per_realization.push_back(lifecycle_prior_loss(series, spec, econ));
        mean += (out.per_realization.back().total - mean) / static_cast<double>(out.per_realization.size());
    }
    out.extrinsic = mean;
    out.intrinsic = intrinsic.total(econ);
    out.total = out.intrinsic + out.extrinsic;
    return out;
}

inline double expected_cost_savings(double prior_extrinsic, double preposterior_extrinsic) {
    return prior_extrinsic - preposterior_extrinsic;
}

inline double evoi(double cost_savings, const IntrinsicCosts& intrinsic, const EconomicSpec& econ) {
    return cost_savings - intrinsic.total(econ);
}

inline double lambda_ratio(double cost_savings, const IntrinsicCosts& intrinsic, const EconomicSpec& econ) {
    const double denom = intrinsic.total(econ);
    if (!(denom > 0.0)) {
        throw UndefinedRatioError("lambda: intrinsic cost total is zero");
    }
    return cost_savings / denom;
}

/// Relative risk-adjusted reward of a candidate against a baseline strategy.
inline double chi(double lambda_baseline, double lambda_candidate) {
    if (lambda_baseline == 1.0) {
        throw UndefinedRatioError("chi: baseline lambda equals 1");
    }
    return (lambda_candidate - 1.0) / (lambda_baseline - 1.0);
}

struct TimeDecisionRecord {
    double t_years = 0.0;
    double prior_p_cumulative = 0.0;
    Decision prior_decision = Decision::NoRepair;
    double repair_fraction = 0.0;  // share of realizations choosing repair under the posterior
};

struct VoIReport {
    std::string strategy;
    std::string preset;
    double threshold_mean = 0.0;
    double prior_loss = 0.0;
    double preposterior_loss = 0.0;
    double extrinsic_loss = 0.0;
    double intrinsic_total = 0.0;
    double cost_savings = 0.0;
    double evoi = 0.0;
    std::optional<double> lambda;
    std::size_t n_used = 0;
    std::size_t n_excluded = 0;
    std::uint64_t posterior_checksum = 0;
    std::vector<TimeDecisionRecord> decisions;
};

}  // namespace voi

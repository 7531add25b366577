#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "voi/csv.hpp"
#include "voi/deterioration.hpp"
#include "voi/inference/diagnostics.hpp"
#include "voi/inference/problem.hpp"
#include "voi/inference/sampler.hpp"

namespace voi {

/// Retained MCMC draws in constrained coordinates, laid out [chain][draw][parameter].
struct PosteriorSamples {
    std::vector<std::string> names;
    std::size_t chains = 0;
    std::size_t draws = 0;
    std::vector<double> values;
    std::vector<double> acceptance;     // per chain
    std::vector<double> rhat;           // per parameter; NaN when unavailable
    std::vector<double> ess;            // per parameter bulk ESS; NaN when unavailable
    std::vector<double> boundary_mass;  // per parameter; NaN for unbounded parameters
    bool boundary_warning = false;

    [[nodiscard]] std::size_t dim() const noexcept { return names.size(); }
    [[nodiscard]] std::size_t total() const noexcept { return chains * draws; }

    [[nodiscard]] double at(std::size_t chain, std::size_t draw, std::size_t p) const noexcept {
        return values[(chain * draws + draw) * dim() + p];
    }

    /// Pooled draws of parameter p (chain-major).
    [[nodiscard]] std::vector<double> parameter(std::size_t p) const {
        std::vector<double> out;
        out.reserve(total());
        for (std::size_t c = 0; c < chains; ++c) {
            for (std::size_t d = 0; d < draws; ++d) {
                out.push_back(at(c, d, p));
            }
        }
        return out;
    }

    [[nodiscard]] diagnostics::Chains chains_of(std::size_t p) const {
        diagnostics::Chains out(chains);
        for (std::size_t c = 0; c < chains; ++c) {
            out[c].reserve(draws);
            for (std::size_t d = 0; d < draws; ++d) {
                out[c].push_back(at(c, d, p));
            }
        }
        return out;
    }

    /// True when every parameter has R-hat below rhat_max and ESS at least ess_min.
    /// Chains without an available diagnostic never pass.
    [[nodiscard]] bool passes_gate(double rhat_max = 1.01, double ess_min = 400.0) const noexcept {
        for (std::size_t p = 0; p < dim(); ++p) {
            if (!(rhat[p] < rhat_max) || !(ess[p] >= ess_min)) {
                return false;
            }
        }
        return true;
    }
};

/// Fraction of draws within this relative distance of a uniform bound counts as boundary mass.
inline constexpr double kBoundaryBand = 0.01;
inline constexpr double kBoundaryWarningMass = 0.25;

namespace detail {

inline double boundary_fraction(std::span<const double> xs, const UniformBounds& b) {
    const double band = kBoundaryBand * b.width();
    std::size_t hits = 0;
    for (double x : xs) {
        if (x - b.lo < band || b.hi - x < band) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(xs.size());
}

inline void fill_diagnostics(PosteriorSamples& s, const InferencePriors& priors, InferenceVariant variant) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.rhat.assign(s.dim(), nan);
    s.ess.assign(s.dim(), nan);
    s.boundary_mass.assign(s.dim(), nan);
    for (std::size_t p = 0; p < s.dim(); ++p) {
        const auto chains = s.chains_of(p);
        if (s.chains >= 2 && s.draws >= 4) {
            try {
                s.rhat[p] = diagnostics::rhat(chains);
            } catch (const DiagnosticUnavailableError&) {
            }
        }
        if (s.draws >= 4) {
            try {
                s.ess[p] = diagnostics::ess_bulk(chains);
            } catch (const DiagnosticUnavailableError&) {
            }
        }
    }
    auto mark = [&](std::size_t p, const UniformBounds& b) {
        s.boundary_mass[p] = boundary_fraction(s.parameter(p), b);
        if (s.boundary_mass[p] > kBoundaryWarningMass) {
            s.boundary_warning = true;
        }
    };
    if (is_theta_variant(variant)) {
        mark(0, priors.theta.alpha);
        mark(2, priors.theta.gamma);
    } else {
        mark(0, priors.pointwise);
    }
}

}  // namespace detail

inline PosteriorSamples run_mcmc(const InferenceProblem& problem, const McmcConfig& config) {
    problem.priors.validate();
    const CompiledProblem compiled(problem);
    const std::size_t dim = compiled.dim();
    auto log_density = [&compiled](std::span<const double> y) { return compiled.log_posterior_unconstrained(y); };
    auto initializer = [&compiled](Rng& rng) { return compiled.draw_prior_unconstrained(rng); };
    const auto chains = adaptive_metropolis(log_density, initializer, dim, config);

    PosteriorSamples out;
    out.names = problem.parameter_names();
    out.chains = chains.size();
    out.draws = config.draws;
    out.values.resize(out.chains * out.draws * dim);
    for (std::size_t c = 0; c < chains.size(); ++c) {
        out.acceptance.push_back(chains[c].acceptance);
        for (std::size_t d = 0; d < config.draws; ++d) {
            compiled.to_constrained(chains[c].draws.row(d),
                                    std::span<double>(out.values.data() + (c * out.draws + d) * dim, dim));
        }
    }
    detail::fill_diagnostics(out, problem.priors, problem.variant);
    return out;
}

/// Deterioration parameters and sigma from inspection thickness readings (identity observation model).
inline PosteriorSamples infer_theta_from_inspection(const ObservationSet& obs, const InferencePriors& priors,
                                                    const McmcConfig& config, double t0) {
    InferenceProblem problem;
    problem.variant = InferenceVariant::ThetaFromInspection;
    problem.observations = {obs};
    problem.priors = priors;
    problem.t0 = t0;
    return run_mcmc(problem, config);
}

/// One independent (delta_tau, sigma) posterior per acquisition time.
inline std::vector<PosteriorSamples> infer_thickness_pointwise(std::span<const ObservationSet> per_time,
                                                               const SurrogateModel& surrogate,
                                                               const InferencePriors& priors,
                                                               const McmcConfig& config) {
    std::vector<PosteriorSamples> out;
    out.reserve(per_time.size());
    for (std::size_t k = 0; k < per_time.size(); ++k) {
        InferenceProblem problem;
        problem.variant = InferenceVariant::ThicknessPointwise;
        problem.observations = {per_time[k]};
        problem.surrogate = surrogate;
        problem.priors = priors;
        McmcConfig cfg = config;
        cfg.seed = derive_seed(config.seed, Stream::Mcmc, {k});
        out.push_back(run_mcmc(problem, cfg));
    }
    return out;
}

/// Deterioration parameters and sigma from strain observations spanning the acquisition grid.
inline PosteriorSamples infer_theta_from_strain(std::span<const ObservationSet> per_time,
                                                const SurrogateModel& surrogate, const InferencePriors& priors,
                                                const McmcConfig& config, double t0) {
    InferenceProblem problem;
    problem.variant = InferenceVariant::ThetaFromStrain;
    problem.observations.assign(per_time.begin(), per_time.end());
    problem.surrogate = surrogate;
    problem.priors = priors;
    problem.t0 = t0;
    return run_mcmc(problem, config);
}

inline DeteriorationParams params_of(const PosteriorSamples& s, std::size_t chain, std::size_t draw) {
    return {s.at(chain, draw, 0), s.at(chain, draw, 1), s.at(chain, draw, 2)};
}

/// Every pooled posterior draw of (alpha, beta, gamma) pushed through the deterioration model.
inline Matrix posterior_trajectories(const PosteriorSamples& samples, const TimeGrid& grid) {
    require(samples.dim() == 4 && samples.names.front() == "alpha",
            "posterior_trajectories needs deterioration-parameter samples");
    Matrix out(samples.total(), grid.size());
    std::size_t r = 0;
    for (std::size_t c = 0; c < samples.chains; ++c) {
        for (std::size_t d = 0; d < samples.draws; ++d, ++r) {
            const auto p = params_of(samples, c, d);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                out(r, k) = evaluate_deterioration(p, grid.points[k], grid.t0);
            }
        }
    }
    return out;
}

/// Trace dump with columns `param,chain,draw,value`.
inline csv::Writer trace_csv(const PosteriorSamples& samples) {
    csv::Writer w({"param", "chain", "draw", "value"});
    for (std::size_t p = 0; p < samples.dim(); ++p) {
        for (std::size_t c = 0; c < samples.chains; ++c) {
            for (std::size_t d = 0; d < samples.draws; ++d) {
                w.row(samples.names[p], c, d, samples.at(c, d, p));
            }
        }
    }
    return w;
}

}  // namespace voi

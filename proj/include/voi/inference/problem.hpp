#pragma once

// Bayesian model-updating problems: Gaussian prediction-error likelihood,
// parameter priors, and the transforms to an unconstrained sampling space.

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "voi/deterioration.hpp"
#include "voi/error.hpp"
#include "voi/observation.hpp"

namespace voi {

enum class InferenceVariant {
    ThetaFromInspection,  // (alpha, beta, gamma, sigma) from direct thickness readings
    ThicknessPointwise,   // (delta_tau, sigma) at a single time from strains
    ThetaFromStrain,      // (alpha, beta, gamma, sigma) from strains over the grid
};

inline bool is_theta_variant(InferenceVariant v) noexcept { return v != InferenceVariant::ThicknessPointwise; }

struct InferencePriors {
    PriorSpec theta;
    UniformBounds pointwise{0.0, 2.0};  // mm
    double sigma_scale = 1.0;           // half-normal scale of the prediction-error sd

    void validate() const {
        theta.validate();
        pointwise.validate("inference.pointwise_prior");
        require<ConfigError>(sigma_scale > 0.0, "inference.sigma_scale must be > 0");
    }
};

struct InferenceProblem {
    InferenceVariant variant = InferenceVariant::ThetaFromStrain;
    std::vector<ObservationSet> observations;
    SurrogateModel surrogate;  // used when observations are strains
    InferencePriors priors;
    double t0 = 10.0;

    [[nodiscard]] std::size_t dim() const noexcept { return is_theta_variant(variant) ? 4 : 2; }

    [[nodiscard]] std::vector<std::string> parameter_names() const {
        if (is_theta_variant(variant)) {
            return {"alpha", "beta", "gamma", "sigma"};
        }
        return {"delta_tau", "sigma"};
    }
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Observations reduced to per-(time, feature) count, mean and centered sum of squares.
class CompiledProblem {
public:
    explicit CompiledProblem(const InferenceProblem& problem)
        : variant_(problem.variant), priors_(problem.priors), t0_(problem.t0) {
        for (const auto& set : problem.observations) {
            if (set.count() == 0) {
                continue;
            }
            Block block;
            block.elapsed = set.t_years - problem.t0;
            if (is_theta_variant(variant_) && !(block.elapsed >= 0.0)) {
                throw DomainError("observation time precedes corrosion onset");
            }
            block.strain = set.kind == ObservationKind::Strain;
            if (block.strain) {
                require(set.features() == problem.surrogate.sensors(),
                        "strain observations do not match the surrogate sensor count");
            } else {
                require(set.features() == 1, "thickness observations must have one feature");
            }
            for (std::size_t i = 0; i < set.features(); ++i) {
                Feature f;
                const auto n = static_cast<double>(set.count());
                double s = 0.0;
                for (std::size_t j = 0; j < set.count(); ++j) {
                    s += set.values(j, i);
                }
                f.mean = s / n;
                for (std::size_t j = 0; j < set.count(); ++j) {
                    const double d = set.values(j, i) - f.mean;
                    f.m2 += d * d;
                }
                f.count = n;
                if (block.strain) {
                    f.intercept = problem.surrogate.intercepts[i];
                    f.slope = problem.surrogate.slopes[i];
                }
                block.features.push_back(f);
                total_count_ += n;
            }
            blocks_.push_back(std::move(block));
        }
    }

    [[nodiscard]] InferenceVariant variant() const noexcept { return variant_; }
    [[nodiscard]] const InferencePriors& priors() const noexcept { return priors_; }
    [[nodiscard]] double observation_count() const noexcept { return total_count_; }

    [[nodiscard]] bool in_support(std::span<const double> x) const noexcept {
        if (is_theta_variant(variant_)) {
            const auto& th = priors_.theta;
            return x.size() == 4 && th.alpha.contains(x[0]) && x[1] > 0.0 && std::isfinite(x[1]) &&
                   th.gamma.contains(x[2]) && x[3] > 0.0 && std::isfinite(x[3]);
        }
        return x.size() == 2 && priors_.pointwise.contains(x[0]) && x[1] > 0.0 && std::isfinite(x[1]);
    }

    [[nodiscard]] double log_likelihood(std::span<const double> x) const noexcept {
        if (!in_support(x)) {
            return kNegInf;
        }
        const double sigma = is_theta_variant(variant_) ? x[3] : x[1];
        double ss = 0.0;
        for (const auto& block : blocks_) {
            const double state =
                is_theta_variant(variant_) ? x[2] / (x[0] + x[1] * std::exp(-block.elapsed)) : x[0];
            for (const auto& f : block.features) {
                const double predicted = block.strain ? f.intercept + f.slope * state : state;
                const double d = f.mean - predicted;
                ss += f.m2 + f.count * d * d;
            }
        }
        const double ll = -0.5 * total_count_ * std::log(2.0 * std::numbers::pi * sigma * sigma) -
                          ss / (2.0 * sigma * sigma);
        return std::isnan(ll) ? kNegInf : ll;
    }

    [[nodiscard]] double log_prior(std::span<const double> x) const noexcept {
        if (!in_support(x)) {
            return kNegInf;
        }
        const double log_half_normal = [&] {
            const double sigma = is_theta_variant(variant_) ? x[3] : x[1];
            const double s = priors_.sigma_scale;
            return std::log(2.0) - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi) -
                   0.5 * (sigma / s) * (sigma / s);
        }();
        if (is_theta_variant(variant_)) {
            const auto& th = priors_.theta;
            const double zb = (x[1] - th.beta.mean) / th.beta.sd;
            return -std::log(th.alpha.width()) - 0.5 * zb * zb - std::log(th.beta.sd) -
                   0.5 * std::log(2.0 * std::numbers::pi) - std::log(th.gamma.width()) + log_half_normal;
        }
        return -std::log(priors_.pointwise.width()) + log_half_normal;
    }

    /// Maps unconstrained coordinates to parameters. Theta variants use log for every
    /// coordinate (box bounds on alpha and gamma are enforced as hard support);
    /// the pointwise state uses a logit onto its bounds and sigma a log.
    void to_constrained(std::span<const double> y, std::span<double> x) const noexcept {
        if (is_theta_variant(variant_)) {
            for (std::size_t d = 0; d < 4; ++d) {
                x[d] = std::exp(y[d]);
            }
        } else {
            const auto& b = priors_.pointwise;
            x[0] = b.lo + b.width() / (1.0 + std::exp(-y[0]));
            x[1] = std::exp(y[1]);
        }
    }

    void to_unconstrained(std::span<const double> x, std::span<double> y) const noexcept {
        if (is_theta_variant(variant_)) {
            for (std::size_t d = 0; d < 4; ++d) {
                y[d] = std::log(x[d]);
            }
        } else {
            const auto& b = priors_.pointwise;
            const double u = (x[0] - b.lo) / b.width();
            y[0] = std::log(u) - std::log1p(-u);
            y[1] = std::log(x[1]);
        }
    }

    /// log |dx/dy| of to_constrained.
    [[nodiscard]] double log_jacobian(std::span<const double> y) const noexcept {
        if (is_theta_variant(variant_)) {
            return y[0] + y[1] + y[2] + y[3];
        }
        const double log_w = std::log(priors_.pointwise.width());
        // log sigmoid(y) + log(1 - sigmoid(y)) = -|y| - 2 log1p(exp(-|y|))
        const double a = std::abs(y[0]);
        return log_w - a - 2.0 * std::log1p(std::exp(-a)) + y[1];
    }

    [[nodiscard]] double log_posterior_unconstrained(std::span<const double> y) const noexcept {
        double x[4];
        const std::span<double> xs(x, dim());
        to_constrained(y, xs);
        const double lp = log_prior(xs);
        if (!std::isfinite(lp)) {
            return kNegInf;
        }
        const double ll = log_likelihood(xs);
        if (!std::isfinite(ll)) {
            return kNegInf;
        }
        const double total = lp + ll + log_jacobian(y);
        return std::isfinite(total) ? total : kNegInf;
    }

    [[nodiscard]] std::size_t dim() const noexcept { return is_theta_variant(variant_) ? 4 : 2; }

    /// Draw from the prior, returned in unconstrained coordinates.
    [[nodiscard]] std::vector<double> draw_prior_unconstrained(Rng& rng) const {
        std::vector<double> x(dim());
        if (is_theta_variant(variant_)) {
            const auto p = sample_prior_one(priors_.theta, rng);
            x = {p.alpha, p.beta, p.gamma, 0.0};
        } else {
            // Keep clear of the exact bounds so the logit stays finite.
            double u = 0.0;
            do {
                u = uniform(rng, 0.0, 1.0);
            } while (u <= 0.0 || u >= 1.0);
            x[0] = priors_.pointwise.lo + u * priors_.pointwise.width();
        }
        double sigma = 0.0;
        do {
            sigma = std::abs(priors_.sigma_scale * standard_normal(rng));
        } while (!(sigma > 0.0));
        x.back() = sigma;
        std::vector<double> y(dim());
        to_unconstrained(x, y);
        return y;
    }

private:
    struct Feature {
        double count = 0.0;
        double mean = 0.0;
        double m2 = 0.0;
        double intercept = 0.0;
        double slope = 1.0;
    };
    struct Block {
        double elapsed = 0.0;
        bool strain = false;
        std::vector<Feature> features;
    };

    InferenceVariant variant_;
    InferencePriors priors_;
    double t0_;
    std::vector<Block> blocks_;
    double total_count_ = 0.0;
};

/// Gaussian prediction-error log-likelihood of a parameter vector
/// ((alpha, beta, gamma, sigma) or (delta_tau, sigma)); -inf outside the prior support.
inline double log_likelihood(std::span<const double> candidate, const InferenceProblem& problem) {
    return CompiledProblem(problem).log_likelihood(candidate);
}

}  // namespace voi

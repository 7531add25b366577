#pragma once

// Adaptive random-walk Metropolis on an unconstrained parameter space.
//
// Warmup runs an initial scale-only phase, then a sequence of doubling windows
// at the end of each of which the proposal covariance is re-estimated from the
// window's draws, and a terminal scale-only phase. Adaptation is frozen once
// warmup ends, so retained draws come from a fixed Markov kernel.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "voi/error.hpp"
#include "voi/matrix.hpp"
#include "voi/random.hpp"

namespace voi {

struct McmcConfig {
    std::size_t warmup = 2000;
    std::size_t draws = 2000;
    /// Transitions per retained draw, during warmup as well as sampling.
    std::size_t thin = 10;
    std::size_t chains = 1;
    std::uint64_t seed = 0;
    double target_acceptance = 0.234;

    void validate() const {
        require<ConfigError>(warmup >= 1, "mcmc.warmup must be >= 1");
        require<ConfigError>(draws >= 1, "mcmc.draws must be >= 1");
        require<ConfigError>(thin >= 1, "mcmc.thin must be >= 1");
        require<ConfigError>(chains >= 1, "mcmc.chains must be >= 1");
        require<ConfigError>(target_acceptance > 0.0 && target_acceptance < 1.0,
                             "mcmc.target_acceptance must lie in (0, 1)");
    }
};

struct ChainResult {
    Matrix draws;  // draws x dim, unconstrained coordinates
    double acceptance = 0.0;
    double proposal_scale = 0.0;
};

inline constexpr int kMaxInitAttempts = 100;

namespace detail {

/// Stan-style schedule: 15% initial buffer, doubling windows, 10% terminal buffer.
inline std::vector<std::size_t> adaptation_window_ends(std::size_t warmup_iters) {
    std::vector<std::size_t> ends;
    if (warmup_iters < 20) {
        return ends;
    }
    const auto init_buffer = static_cast<std::size_t>(0.15 * static_cast<double>(warmup_iters));
    const auto term_buffer = static_cast<std::size_t>(0.10 * static_cast<double>(warmup_iters));
    const std::size_t slow_end = warmup_iters - term_buffer;
    std::size_t window = std::max<std::size_t>(
        static_cast<std::size_t>(0.025 * static_cast<double>(warmup_iters)), 5);
    std::size_t start = init_buffer;
    while (start < slow_end) {
        std::size_t end = start + window;
        if (end + 2 * window > slow_end) {
            end = slow_end;
        }
        ends.push_back(end);
        start = end;
        window *= 2;
    }
    return ends;
}

}  // namespace detail

/// Runs `config.chains` independent chains targeting `log_density` (unnormalized,
/// returns -inf outside the support). `initializer(rng)` proposes starting points;
/// non-finite starts are retried up to kMaxInitAttempts times.
template <class LogDensity, class Initializer>
std::vector<ChainResult> adaptive_metropolis(LogDensity&& log_density, Initializer&& initializer, std::size_t dim,
                                             const McmcConfig& config) {
    config.validate();
    require(dim >= 1, "sampler: dimension must be >= 1");
    using Vec = Eigen::VectorXd;
    using Mat = Eigen::MatrixXd;

    const std::size_t warmup_iters = config.warmup * config.thin;
    const auto window_ends = detail::adaptation_window_ends(warmup_iters);
    const double base_scale = 2.38 / std::sqrt(static_cast<double>(dim));

    std::vector<ChainResult> results;
    results.reserve(config.chains);
    for (std::size_t c = 0; c < config.chains; ++c) {
        Rng rng = make_rng(derive_seed(config.seed, Stream::Chain, {c}));

        // Initial proposal shape from the spread of initializer draws.
        Vec spread = Vec::Ones(static_cast<Eigen::Index>(dim));
        {
            std::vector<std::vector<double>> probe;
            for (int i = 0; i < 64; ++i) {
                probe.push_back(initializer(rng));
            }
            for (std::size_t d = 0; d < dim; ++d) {
                double m = 0.0;
                for (const auto& p : probe) {
                    m += p[d];
                }
                m /= static_cast<double>(probe.size());
                double v = 0.0;
                for (const auto& p : probe) {
                    v += (p[d] - m) * (p[d] - m);
                }
                v /= static_cast<double>(probe.size() - 1);
                spread(static_cast<Eigen::Index>(d)) = v > 0.0 && std::isfinite(v) ? std::sqrt(v) : 1.0;
            }
        }

        std::vector<double> current;
        double current_lp = -std::numeric_limits<double>::infinity();
        for (int attempt = 0; attempt < kMaxInitAttempts; ++attempt) {
            current = initializer(rng);
            require(current.size() == dim, "sampler: initializer returned wrong dimension");
            current_lp = log_density(std::span<const double>(current));
            if (std::isfinite(current_lp)) {
                break;
            }
        }
        if (!std::isfinite(current_lp)) {
            throw InitializationError("sampler: no finite log-posterior after " +
                                      std::to_string(kMaxInitAttempts) + " prior draws");
        }

        Mat chol = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        chol.diagonal() = spread;
        double log_scale = std::log(0.1 * base_scale);
        std::size_t rm_step = 0;

        std::vector<double> proposal(dim);
        Vec z(static_cast<Eigen::Index>(dim));
        Vec step(static_cast<Eigen::Index>(dim));

        std::vector<Vec> window_draws;
        std::size_t next_window = 0;
        std::size_t window_start = window_ends.empty() ? warmup_iters
                                                       : static_cast<std::size_t>(0.15 * static_cast<double>(warmup_iters));

        ChainResult result;
        result.draws = Matrix(config.draws, dim);
        std::size_t accepted_sampling = 0;
        const std::size_t total_iters = warmup_iters + config.draws * config.thin;

        for (std::size_t it = 0; it < total_iters; ++it) {
            for (std::size_t d = 0; d < dim; ++d) {
                z(static_cast<Eigen::Index>(d)) = standard_normal(rng);
            }
            step.noalias() = chol * z;
            const double scale = std::exp(log_scale);
            for (std::size_t d = 0; d < dim; ++d) {
                proposal[d] = current[d] + scale * step(static_cast<Eigen::Index>(d));
            }
            const double proposal_lp = log_density(std::span<const double>(proposal));
            double accept_prob = 0.0;
            if (std::isfinite(proposal_lp)) {
                accept_prob = proposal_lp >= current_lp ? 1.0 : std::exp(proposal_lp - current_lp);
            }
            const bool accept = accept_prob >= 1.0 || uniform(rng, 0.0, 1.0) < accept_prob;
            if (accept) {
                current.swap(proposal);
                current_lp = proposal_lp;
            }

            if (it < warmup_iters) {
                ++rm_step;
                const double gain = std::pow(static_cast<double>(rm_step), -0.6);
                log_scale += gain * (accept_prob - config.target_acceptance);
                log_scale = std::clamp(log_scale, -30.0, 10.0);

                if (next_window < window_ends.size() && it >= window_start) {
                    window_draws.emplace_back(Eigen::Map<const Vec>(current.data(), static_cast<Eigen::Index>(dim)));
                    if (it + 1 == window_ends[next_window]) {
                        const auto n = static_cast<double>(window_draws.size());
                        Vec mean = Vec::Zero(static_cast<Eigen::Index>(dim));
                        for (const auto& v : window_draws) {
                            mean += v;
                        }
                        mean /= n;
                        Mat cov = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
                        for (const auto& v : window_draws) {
                            cov.noalias() += (v - mean) * (v - mean).transpose();
                        }
                        cov /= std::max(n - 1.0, 1.0);
                        // Shrink toward the diagonal and keep it positive definite.
                        const double w = n / (n + 5.0);
                        Mat reg = w * cov;
                        reg.diagonal() += (1.0 - w) * 1e-3 * cov.diagonal() +
                                          Vec::Constant(static_cast<Eigen::Index>(dim), 1e-14);
                        Eigen::LLT<Mat> llt(reg);
                        if (llt.info() == Eigen::Success && reg.diagonal().maxCoeff() > 0.0) {
                            chol = llt.matrixL();
                            log_scale = std::log(base_scale);
                            rm_step = 0;
                        }
                        window_draws.clear();
                        window_start = it + 1;
                        ++next_window;
                    }
                }
            } else {
                if (accept) {
                    ++accepted_sampling;
                }
                const std::size_t s = it - warmup_iters;
                if ((s + 1) % config.thin == 0) {
                    auto row = result.draws.row(s / config.thin);
                    std::copy(current.begin(), current.end(), row.begin());
                }
            }
        }
        result.acceptance = static_cast<double>(accepted_sampling) / static_cast<double>(config.draws * config.thin);
        result.proposal_scale = std::exp(log_scale);
        results.push_back(std::move(result));
    }
    return results;
}

}  // namespace voi

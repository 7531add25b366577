#pragma once

// MCMC convergence diagnostics: rank-normalized split R-hat (bulk and folded)
// and effective sample size with Geyer's initial monotone sequence.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "voi/error.hpp"
#include "voi/stats.hpp"

namespace voi::diagnostics {

using Chains = std::vector<std::vector<double>>;

namespace detail {

inline void check_rectangular(const Chains& chains) {
    require(!chains.empty(), "diagnostics: no chains");
    for (const auto& c : chains) {
        require(c.size() == chains.front().size(), "diagnostics: chains differ in length");
    }
}

/// Splits every chain into its first and second half (the middle draw of an odd chain is dropped).
inline Chains split(const Chains& chains) {
    Chains out;
    for (const auto& c : chains) {
        const std::size_t half = c.size() / 2;
        out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
        out.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
    }
    return out;
}

/// Replaces draws by normal scores of their pooled average ranks.
inline Chains rank_normalize(const Chains& chains) {
    std::vector<std::pair<double, std::size_t>> pooled;
    for (std::size_t j = 0; j < chains.size(); ++j) {
        for (std::size_t i = 0; i < chains[j].size(); ++i) {
            pooled.emplace_back(chains[j][i], j * chains[j].size() + i);
        }
    }
    std::sort(pooled.begin(), pooled.end());
    const double total = static_cast<double>(pooled.size());
    std::vector<double> rank(pooled.size());
    for (std::size_t a = 0; a < pooled.size();) {
        std::size_t b = a;
        while (b + 1 < pooled.size() && pooled[b + 1].first == pooled[a].first) {
            ++b;
        }
        const double avg = 0.5 * static_cast<double>(a + b) + 1.0;
        for (std::size_t c = a; c <= b; ++c) {
            rank[pooled[c].second] = avg;
        }
        a = b + 1;
    }
    Chains out = chains;
    for (std::size_t j = 0; j < chains.size(); ++j) {
        for (std::size_t i = 0; i < chains[j].size(); ++i) {
            const double r = rank[j * chains[j].size() + i];
            out[j][i] = stats::normal_quantile((r - 0.375) / (total + 0.25));
        }
    }
    return out;
}

inline double potential_scale_reduction(const Chains& chains) {
    const auto m = static_cast<double>(chains.size());
    const auto n = static_cast<double>(chains.front().size());
    std::vector<double> means;
    double within = 0.0;
    for (const auto& c : chains) {
        means.push_back(stats::mean(c));
        within += stats::variance(c);
    }
    within /= m;
    if (!(within > 0.0)) {
        throw DiagnosticUnavailableError("R-hat: within-chain variance is zero");
    }
    const double between = n * stats::variance(means);
    const double var_plus = (n - 1.0) / n * within + between / n;
    return std::sqrt(var_plus / within);
}

inline Chains fold(const Chains& chains) {
    std::vector<double> all;
    for (const auto& c : chains) {
        all.insert(all.end(), c.begin(), c.end());
    }
    const double med = stats::quantile(all, 0.5);
    Chains out = chains;
    for (auto& c : out) {
        for (double& x : c) {
            x = std::abs(x - med);
        }
    }
    return out;
}

/// ESS of (already transformed) chains following the multi-chain autocorrelation estimator.
inline double effective_size(const Chains& chains) {
    const std::size_t m = chains.size();
    const std::size_t n = chains.front().size();
    std::vector<double> means(m);
    std::vector<std::vector<double>> centered(m);
    for (std::size_t j = 0; j < m; ++j) {
        means[j] = stats::mean(chains[j]);
        centered[j].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            centered[j][i] = chains[j][i] - means[j];
        }
    }
    auto mean_acov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double a = 0.0;
            for (std::size_t i = 0; i + lag < n; ++i) {
                a += centered[j][i] * centered[j][i + lag];
            }
            s += a / static_cast<double>(n);
        }
        return s / static_cast<double>(m);
    };
    const double nd = static_cast<double>(n);
    const double acov0 = mean_acov(0);
    const double mean_var = acov0 * nd / (nd - 1.0);
    double var_plus = mean_var * (nd - 1.0) / nd;
    if (m > 1) {
        var_plus += stats::variance(means);
    }
    if (!(var_plus > 0.0)) {
        throw DiagnosticUnavailableError("ESS: draws have zero variance");
    }
    auto rho = [&](std::size_t lag) { return 1.0 - (mean_var - mean_acov(lag)) / var_plus; };

    double sum_pairs = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t + 1 < n; t += 2) {
        double pair = (t == 0 ? 1.0 : rho(t)) + rho(t + 1);
        if (!(pair > 0.0)) {
            break;
        }
        pair = std::min(pair, previous);
        previous = pair;
        sum_pairs += pair;
    }
    const double tau = std::max(-1.0 + 2.0 * sum_pairs, 1.0 / std::log10(static_cast<double>(m * n)));
    return static_cast<double>(m * n) / tau;
}

}  // namespace detail

/// Rank-normalized split R-hat: the larger of the bulk and folded (tail) statistics.
/// Needs at least two chains of at least four draws.
inline double rhat(const Chains& chains) {
    detail::check_rectangular(chains);
    if (chains.size() < 2) {
        throw DiagnosticUnavailableError("R-hat needs at least two chains");
    }
    require(chains.front().size() >= 4, "R-hat needs at least four draws per chain");
    const auto halves = detail::split(chains);
    const double bulk = detail::potential_scale_reduction(detail::rank_normalize(halves));
    const double tail = detail::potential_scale_reduction(detail::rank_normalize(detail::fold(halves)));
    return std::max(bulk, tail);
}

/// Bulk effective sample size (rank-normalized split chains).
inline double ess_bulk(const Chains& chains) {
    detail::check_rectangular(chains);
    require(chains.front().size() >= 4, "ESS needs at least four draws per chain");
    return detail::effective_size(detail::rank_normalize(detail::split(chains)));
}

/// Effective sample size on the raw draws (no split or rank transform).
inline double ess_basic(const Chains& chains) {
    detail::check_rectangular(chains);
    require(chains.front().size() >= 4, "ESS needs at least four draws per chain");
    return detail::effective_size(chains);
}

}  // namespace voi::diagnostics

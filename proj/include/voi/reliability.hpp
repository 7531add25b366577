#pragma once

// Interval and cumulative probabilities of exceeding a stochastic
// maintenance threshold, estimated from thickness loss samples.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "voi/csv.hpp"
#include "voi/error.hpp"
#include "voi/random.hpp"
#include "voi/stats.hpp"

namespace voi {

/// Threshold thickness loss ~ Normal(mean, (cov * mean)^2), restricted to positive values.
struct ThresholdSpec {
    double mean = 1.2;  // mm
    double cov = 0.05;

    void validate() const {
        require<ConfigError>(mean > 0.0 && std::isfinite(mean), "threshold.mean must be > 0");
        require<ConfigError>(cov > 0.0 && std::isfinite(cov), "threshold.cov must be > 0");
    }
};

struct ExceedanceSeries {
    std::vector<double> times;       // years
    std::vector<double> interval;    // P(loss at t_k > threshold)
    std::vector<double> cumulative;  // 1 - prod_{j<=k} (1 - interval_j)

    [[nodiscard]] std::size_t size() const noexcept { return cumulative.size(); }
};

/// Standardized threshold deviates z with 1 + cov * z > 0; a draw is mean * (1 + cov * z).
/// Keeping the deviates separate lets sweeps over the mean reuse the same random numbers.
inline std::vector<double> threshold_deviates(double cov, std::size_t n, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::vector<double> z(n);
    for (auto& v : z) {
        do {
            v = standard_normal(rng);
        } while (!(1.0 + cov * v > 0.0));
    }
    return z;
}

inline std::vector<double> thresholds_from_deviates(const ThresholdSpec& spec, std::span<const double> deviates) {
    std::vector<double> out(deviates.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = spec.mean * (1.0 + spec.cov * deviates[i]);
    }
    return out;
}

/// n i.i.d. threshold draws; non-positive draws are rejected and redrawn.
/// cov = 0 is accepted here and yields the deterministic threshold.
inline std::vector<double> sample_threshold(const ThresholdSpec& spec, std::size_t n, std::uint64_t seed) {
    require<ConfigError>(spec.mean > 0.0, "threshold.mean must be > 0");
    require<ConfigError>(spec.cov >= 0.0, "threshold.cov must be >= 0");
    require<ConfigError>(n >= 1, "sample_threshold: n must be >= 1");
    return thresholds_from_deviates(spec, threshold_deviates(spec.cov, n, seed));
}

/// Fraction of pairs whose state exceeds its paired threshold draw.
inline double interval_exceedance(std::span<const double> states, std::span<const double> thresholds) {
    require(states.size() == thresholds.size(), "interval_exceedance: sample vectors differ in length");
    require(!states.empty(), "interval_exceedance: no samples");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] > thresholds[i]) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(states.size());
}

/// Cumulative exceedance assuming independent non-exceedance events between times.
inline ExceedanceSeries cumulative_exceedance(std::span<const double> interval_probs,
                                              std::span<const double> times = {}) {
    require(times.empty() || times.size() == interval_probs.size(),
            "cumulative_exceedance: times and probabilities differ in length");
    ExceedanceSeries s;
    s.times.assign(times.begin(), times.end());
    s.interval.assign(interval_probs.begin(), interval_probs.end());
    s.cumulative.reserve(interval_probs.size());
    double survive = 1.0;
    for (double p : interval_probs) {
        require(p >= 0.0 && p <= 1.0, "cumulative_exceedance: interval probability outside [0, 1]");
        survive *= 1.0 - p;
        s.cumulative.push_back(std::clamp(1.0 - survive, 0.0, 1.0));
    }
    return s;
}

/// Exceedance series of a [samples x times] matrix of thickness loss, with one
/// independent set of threshold deviates per time (deviates[k] pairs with column k).
template <class SampleMatrix>
ExceedanceSeries exceedance_series(const SampleMatrix& samples, std::span<const double> times,
                                   const ThresholdSpec& threshold,
                                   const std::vector<std::vector<double>>& deviates) {
    require(samples.cols() == times.size(), "exceedance_series: sample columns do not match times");
    require(deviates.size() == times.size(), "exceedance_series: one deviate set per time is required");
    std::vector<double> interval(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        require(deviates[k].size() == samples.rows(), "exceedance_series: deviate count differs from samples");
        std::size_t hits = 0;
        for (std::size_t n = 0; n < samples.rows(); ++n) {
            if (samples(n, k) > threshold.mean * (1.0 + threshold.cov * deviates[k][n])) {
                ++hits;
            }
        }
        interval[k] = static_cast<double>(hits) / static_cast<double>(samples.rows());
    }
    return cumulative_exceedance(interval, times);
}

/// Columns `t_years,p_interval,p_cumulative`.
inline csv::Writer exceedance_csv(const ExceedanceSeries& s) {
    csv::Writer w({"t_years", "p_interval", "p_cumulative"});
    for (std::size_t k = 0; k < s.size(); ++k) {
        w.row(s.times.empty() ? static_cast<double>(k) : s.times[k], s.interval[k], s.cumulative[k]);
    }
    return w;
}

struct LogNormalFit {
    double mu = 0.0;     // mean of log values
    double sigma = 0.0;  // sd of log values
};

/// Maximum-likelihood log-normal fit to positive samples.
inline LogNormalFit fit_lognormal(std::span<const double> samples) {
    require(samples.size() >= 2, "fit_lognormal: needs at least two samples");
    double s = 0.0;
    for (double x : samples) {
        require<DomainError>(x > 0.0, "fit_lognormal: samples must be positive");
        s += std::log(x);
    }
    const double n = static_cast<double>(samples.size());
    const double mu = s / n;
    double v = 0.0;
    for (double x : samples) {
        v += (std::log(x) - mu) * (std::log(x) - mu);
    }
    return {mu, std::sqrt(v / n)};
}

/// P(X > T) for X ~ fitted log-normal and T ~ threshold spec, by quadrature over T.
/// A diagnostic for comparing tail exceedance of pooled prior and posterior samples.
inline double lognormal_exceedance(const LogNormalFit& fit, const ThresholdSpec& threshold) {
    const double sd_t = threshold.cov * threshold.mean;
    const int nodes = 2001;
    const double lo = std::max(threshold.mean - 8.0 * sd_t, 1e-12);
    const double hi = threshold.mean + 8.0 * sd_t;
    const double h = (hi - lo) / (nodes - 1);
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double t = lo + i * h;
        const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
        const double dens = std::exp(-0.5 * ((t - threshold.mean) / sd_t) * ((t - threshold.mean) / sd_t));
        const double tail = 1.0 - stats::normal_cdf((std::log(t) - fit.mu) / fit.sigma);
        num += w * dens * tail;
        den += w * dens;
    }
    return num / den;
}

}  // namespace voi

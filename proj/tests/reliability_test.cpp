#include <gtest/gtest.h>

#include <cmath>

#include "voi/matrix.hpp"
#include "voi/reliability.hpp"
#include "voi/stats.hpp"

using namespace voi;

namespace {

std::vector<double> normal_draws(double mean, double sd, std::size_t n, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = mean + sd * standard_normal(rng);
    }
    return v;
}

// P(X > T) for independent X ~ N(mx, sx^2), T ~ N(mt, st^2).
double gaussian_difference(double mx, double sx, double mt, double st) {
    return stats::normal_cdf((mx - mt) / std::sqrt(sx * sx + st * st));
}

}  // namespace

TEST(SampleThreshold, SpreadMatchesCov) {
    const auto t = sample_threshold({1.2, 0.05}, 200'000, 1);
    EXPECT_NEAR(stats::stddev(t), 0.06, 0.001);
    EXPECT_NEAR(stats::mean(t), 1.2, 0.001);
}

TEST(SampleThreshold, ZeroCovIsDeterministic) {
    for (double v : sample_threshold({1.4, 0.0}, 100, 2)) {
        EXPECT_EQ(v, 1.4);
    }
}

TEST(SampleThreshold, ReproducibleAndPositive) {
    EXPECT_EQ(sample_threshold({1.2, 0.05}, 50, 3), sample_threshold({1.2, 0.05}, 50, 3));
    for (double v : sample_threshold({0.1, 0.8}, 20'000, 4)) {
        ASSERT_GT(v, 0.0);
    }
}

TEST(SampleThreshold, InvalidSpec) {
    EXPECT_THROW(sample_threshold({0.0, 0.05}, 10, 1), ConfigError);
    EXPECT_THROW(sample_threshold({1.2, -0.1}, 10, 1), ConfigError);
    EXPECT_THROW(sample_threshold({1.2, 0.05}, 0, 1), ConfigError);
    EXPECT_THROW((ThresholdSpec{1.2, 0.0}.validate()), ConfigError);
}

TEST(IntervalExceedance, AllBelow) {
    const std::vector<double> s{0.1, 0.2, 0.3};
    const std::vector<double> t{1.0, 1.0, 1.0};
    EXPECT_EQ(interval_exceedance(s, t), 0.0);
}

TEST(IntervalExceedance, DirectCount) {
    const std::vector<double> s{0.5, 1.5};
    const std::vector<double> t{1.0, 1.0};
    EXPECT_EQ(interval_exceedance(s, t), 0.5);
}

TEST(IntervalExceedance, GaussianDifferenceOracle) {
    const double p = gaussian_difference(1.3, 0.1, 1.2, 0.06);
    EXPECT_NEAR(p, 0.804, 0.001);
    const auto s = normal_draws(1.3, 0.1, 2000, 5);
    const auto t = sample_threshold({1.2, 0.05}, 2000, 6);
    EXPECT_NEAR(interval_exceedance(s, t), p, 0.03);
}

TEST(IntervalExceedance, ConsistencyOverRepeatedTrials) {
    // Absolute error within 3 binomial standard errors in at least 99% of trials.
    const double p = gaussian_difference(1.3, 0.1, 1.2, 0.06);
    const std::size_t n = 2000;
    const double bound = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    int within = 0;
    const int trials = 500;
    for (int r = 0; r < trials; ++r) {
        const auto s = normal_draws(1.3, 0.1, n, derive_seed(7, Stream::Test, {static_cast<std::uint64_t>(r), 0}));
        const auto t = sample_threshold({1.2, 0.05}, n, derive_seed(7, Stream::Test, {static_cast<std::uint64_t>(r), 1}));
        within += std::abs(interval_exceedance(s, t) - p) <= bound ? 1 : 0;
    }
    EXPECT_GE(within, static_cast<int>(0.99 * trials));
}

TEST(IntervalExceedance, LengthMismatch) {
    const std::vector<double> s{1.0, 2.0};
    const std::vector<double> t{1.0};
    EXPECT_THROW(interval_exceedance(s, t), ContractError);
}

TEST(CumulativeExceedance, DirectEvaluation) {
    const std::vector<double> p{0.0, 0.5, 0.5};
    const auto s = cumulative_exceedance(p);
    EXPECT_EQ(s.cumulative, (std::vector<double>{0.0, 0.5, 0.75}));
    EXPECT_EQ(s.interval, p);
}

TEST(CumulativeExceedance, AbsorbingAtOne) {
    const std::vector<double> p{0.1, 1.0, 0.0, 0.3};
    const auto s = cumulative_exceedance(p);
    EXPECT_LT(s.cumulative[0], 1.0);
    for (std::size_t k = 1; k < p.size(); ++k) {
        EXPECT_EQ(s.cumulative[k], 1.0);
    }
}

TEST(CumulativeExceedance, AllZero) {
    const std::vector<double> p(5, 0.0);
    for (double v : cumulative_exceedance(p).cumulative) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(CumulativeExceedance, RejectsOutOfRange) {
    const std::vector<double> a{0.2, 1.2};
    const std::vector<double> b{-0.1};
    EXPECT_THROW(cumulative_exceedance(a), ContractError);
    EXPECT_THROW(cumulative_exceedance(b), ContractError);
}

TEST(CumulativeExceedance, MonotoneAndDominatesInterval) {
    Rng rng = make_rng(8);
    std::vector<double> p(40);
    for (auto& v : p) {
        v = uniform(rng, 0.0, 0.2);
    }
    const auto s = cumulative_exceedance(p);
    for (std::size_t k = 0; k < p.size(); ++k) {
        EXPECT_GE(s.cumulative[k], s.interval[k] - 1e-15);
        if (k > 0) {
            EXPECT_GE(s.cumulative[k], s.cumulative[k - 1]);
        }
    }
}

TEST(ExceedanceSeries, RaisingThresholdNeverIncreasesExceedance) {
    const std::size_t n = 500;
    const std::size_t K = 6;
    Matrix states(n, K);
    Rng rng = make_rng(9);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            states(i, k) = 0.8 + 0.1 * static_cast<double>(k) + 0.2 * standard_normal(rng);
        }
    }
    std::vector<double> times(K);
    std::vector<std::vector<double>> dev;
    for (std::size_t k = 0; k < K; ++k) {
        times[k] = 10.0 + static_cast<double>(k);
        dev.push_back(threshold_deviates(0.05, n, derive_seed(9, Stream::PosteriorThreshold, {k})));
    }
    ExceedanceSeries prev = exceedance_series(states, times, {0.8, 0.05}, dev);
    for (double m = 0.85; m <= 2.0; m += 0.05) {
        const auto cur = exceedance_series(states, times, {m, 0.05}, dev);
        for (std::size_t k = 0; k < K; ++k) {
            EXPECT_LE(cur.interval[k], prev.interval[k]);
        }
        prev = cur;
    }
}

TEST(ExceedanceSeries, PairsDeviatesWithSamples) {
    Matrix states(2, 1);
    states(0, 0) = 1.0;
    states(1, 0) = 1.0;
    const std::vector<double> times{11.0};
    // Thresholds 1.0 * (1 + 0.5 * z) = {0.5, 1.5}: exactly one exceedance.
    const std::vector<std::vector<double>> dev{{-1.0, 1.0}};
    const auto s = exceedance_series(states, times, {1.0, 0.5}, dev);
    EXPECT_EQ(s.interval[0], 0.5);
    EXPECT_EQ(exceedance_csv(s).str(), "t_years,p_interval,p_cumulative\n11,0.5,0.5\n");
}

TEST(LogNormalTail, MatchesSampleEstimate) {
    Rng rng = make_rng(10);
    std::vector<double> x(50'000);
    for (auto& v : x) {
        v = std::exp(std::log(1.0) + 0.25 * standard_normal(rng));
    }
    const auto fit = fit_lognormal(x);
    EXPECT_NEAR(fit.mu, 0.0, 0.01);
    EXPECT_NEAR(fit.sigma, 0.25, 0.01);
    const ThresholdSpec th{1.3, 0.05};
    const auto t = sample_threshold(th, x.size(), 11);
    EXPECT_NEAR(lognormal_exceedance(fit, th), interval_exceedance(x, t), 0.01);
}

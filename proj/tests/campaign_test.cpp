#include <gtest/gtest.h>

#include <cmath>

#include "voi/campaign.hpp"

using namespace voi;

namespace {

CampaignConfig small(std::size_t n_prior = 6) {
    CampaignConfig c;
    c.n_prior = n_prior;
    c.n_post = 200;
    c.mcmc.warmup = 300;
    c.mcmc.draws = 150;
    c.mcmc.thin = 5;
    c.mcmc.chains = 2;
    c.seed = 11;
    c.workers = 1;
    c.sweep.means = {1.0, 1.2, 1.4};
    c.cost_grid.grid_n = 10;
    c.inspection.n = 3;
    return c;
}

/// A bank whose every realization carries exactly the prior interval exceedance.
PosteriorBank prior_copy_bank(const CampaignConfig& c, const PriorProcess& prior, std::vector<double> means) {
    PosteriorBank bank;
    bank.strategy = "copy";
    bank.threshold_means = means;
    bank.times = prior.times;
    RealizationPosterior r;
    for (double m : means) {
        r.interval.push_back(prior.series({m, c.threshold.cov}).interval);
    }
    bank.realizations.assign(c.n_prior, r);
    return bank;
}

}  // namespace

TEST(Strategies, Defaults) {
    const auto z = default_strategies(10.0);
    ASSERT_EQ(z.size(), 4u);
    EXPECT_EQ(z[0].id, "z0");
    EXPECT_EQ(z[0].kind, StrategyKind::InspectionTheta);
    EXPECT_EQ(z[0].obs_per_step, 50u);
    EXPECT_EQ(z[0].t_insp, 15.0);
    EXPECT_EQ(z[0].intrinsic.oandm_total(EconomicSpec{}), 0.0);
    EXPECT_EQ(z[1].kind, StrategyKind::StrainPointwise);
    EXPECT_EQ(z[1].obs_per_step, 50u);
    EXPECT_EQ(z[2].obs_per_step, 1u);
    EXPECT_EQ(z[3].obs_per_step, 50u);
    EXPECT_EQ(z[1].intrinsic.install, 0.11);
    EXPECT_EQ(z[1].intrinsic.oandm_annual, 0.002);
    EXPECT_EQ(z[2].intrinsic.install, 0.1);
    EXPECT_EQ(z[2].intrinsic.oandm_annual, 0.001);
    EXPECT_EQ(z[3].intrinsic.install, 0.11);
    EXPECT_EQ(z[3].intrinsic.oandm_annual, 0.005);
    EXPECT_EQ(z[3].intrinsic.oandm_times.size(), kOandmYears);
}

TEST(CampaignConfig, Validation) {
    auto c = small();
    EXPECT_NO_THROW(c.validate());
    c.n_post = c.mcmc.draws * c.mcmc.chains + 1;
    EXPECT_THROW(c.validate(), ConfigError);
    c = small();
    c.n_prior = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = small();
    c.sweep.strategies = {"z9"};
    EXPECT_THROW(c.validate(), ConfigError);
    c = small();
    c.inspection.baseline = "z3";
    EXPECT_THROW(c.validate(), ConfigError);
    c = small();
    c.gate.enabled = true;
    c.mcmc.chains = 1;
    c.n_post = 100;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(PriorAnalysis, UnreachableThresholdHasZeroLoss) {
    auto c = small(200);
    c.threshold.mean = 3.0;
    const auto r = run_prior_analysis(c);
    for (double p : r.series.cumulative) {
        EXPECT_EQ(p, 0.0);
    }
    for (const auto& l : r.losses) {
        EXPECT_EQ(l.total, 0.0);
    }
}

TEST(PriorAnalysis, ExceedanceAppearsLateInTheWindow) {
    auto c = small(2000);
    const auto r = run_prior_analysis(c);
    ASSERT_EQ(r.series.size(), c.grid.size());
    for (std::size_t k = 1; k < r.series.size(); ++k) {
        EXPECT_GE(r.series.cumulative[k], r.series.cumulative[k - 1]);
    }
    EXPECT_EQ(r.series.cumulative[c.grid.index_of(12.0)], 0.0);
    EXPECT_LT(r.series.cumulative[c.grid.index_of(13.0)], 0.01);
    EXPECT_GT(r.series.cumulative.back(), 0.1);
}

TEST(PriorAnalysis, SingleRealizationIsIndicatorPath) {
    auto c = small(1);
    c.threshold.mean = 1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        c.seed = seed;
        const auto r = run_prior_analysis(c);
        for (double p : r.series.interval) {
            EXPECT_TRUE(p == 0.0 || p == 1.0);
        }
        for (double p : r.series.cumulative) {
            EXPECT_TRUE(p == 0.0 || p == 1.0);
        }
    }
}

TEST(PriorAnalysis, Deterministic) {
    const auto a = run_prior_analysis(small(50));
    const auto b = run_prior_analysis(small(50));
    EXPECT_EQ(a.series.cumulative, b.series.cumulative);
    EXPECT_EQ(a.losses[0].total, b.losses[0].total);
}

TEST(Posterior, StatesShapeForEveryKind) {
    const auto c = small(2);
    const auto prior = sample_prior_process(c);
    for (const auto& s : c.strategies) {
        const auto post = posterior_states(s, c, prior.trajectories.row(0), 0);
        EXPECT_EQ(post.states.rows(), c.n_post) << s.id;
        EXPECT_EQ(post.states.cols(), c.grid.size()) << s.id;
        EXPECT_TRUE(std::isfinite(post.max_rhat)) << s.id;
    }
}

TEST(Posterior, DenseStrainPathsAreSharp) {
    auto c = small(8);
    const auto prior = sample_prior_process(c);
    const auto bank = build_posterior_bank(c.strategy("z3"), c, prior, {1.2});
    std::size_t sharp = 0;
    std::size_t total = 0;
    for (const auto& s : bank.series(1.2)) {
        for (double p : s.cumulative) {
            sharp += (p <= 0.05 || p >= 0.95) ? 1 : 0;
            ++total;
        }
    }
    EXPECT_GE(static_cast<double>(sharp), 0.75 * static_cast<double>(total));
}

TEST(Preposterior, DeterministicReport) {
    const auto c = small(4);
    const auto prior = sample_prior_process(c);
    const auto a = run_preposterior(c.strategy("z2"), c, prior, c.presets[0]);
    const auto b = run_preposterior(c.strategy("z2"), c, prior, c.presets[0]);
    EXPECT_EQ(a.posterior_checksum, b.posterior_checksum);
    EXPECT_EQ(a.preposterior_loss, b.preposterior_loss);
    EXPECT_EQ(a.cost_savings, b.cost_savings);
    EXPECT_EQ(a.n_used, 4u);
    EXPECT_EQ(a.n_excluded, 0u);
    ASSERT_EQ(a.decisions.size(), c.grid.size());
}

TEST(Preposterior, WorkerCountDoesNotChangeResults) {
    auto c = small(4);
    const auto prior = sample_prior_process(c);
    const auto serial = build_posterior_bank(c.strategy("z3"), c, prior, {1.2});
    c.workers = 3;
    const auto threaded = build_posterior_bank(c.strategy("z3"), c, prior, {1.2});
    EXPECT_EQ(serial.checksum, threaded.checksum);
}

TEST(Preposterior, ZeroSlopeSurrogateCarriesNoInformation) {
    auto c = small(200);
    for (auto& b : c.surrogate.slopes) {
        b = 0.0;
    }
    c.n_post = 300;
    c.threshold.mean = 1.0;
    const auto prior = sample_prior_process(c);
    for (const auto& preset : c.presets) {
        const auto r = run_preposterior(c.strategy("z3"), c, prior, preset);
        EXPECT_GT(r.prior_loss, 0.2);
        EXPECT_LT(std::abs(r.cost_savings), 0.1 * r.prior_loss) << preset.name;
    }
}

TEST(Preposterior, NoInformationLimitIsExact) {
    const auto c = small(20);
    const auto prior = sample_prior_process(c);
    const auto bank = prior_copy_bank(c, prior, {1.2});
    for (const auto& preset : c.presets) {
        EXPECT_EQ(loss_pair(bank, prior, preset, 1.2, c).cost_savings(), 0.0);
    }
}

TEST(Preposterior, GateExcludesAndFails) {
    auto c = small(4);
    c.gate.enabled = true;
    c.gate.rhat_max = 1.0000001;
    const auto prior = sample_prior_process(c);
    EXPECT_THROW(build_posterior_bank(c.strategy("z3"), c, prior, {1.2}), DiagnosticsGateError);
    c.gate.rhat_max = 100.0;
    const auto bank = build_posterior_bank(c.strategy("z3"), c, prior, {1.2});
    EXPECT_EQ(bank.used(), c.n_prior);
    EXPECT_EQ(bank.excluded(), 0u);
}

TEST(Preposterior, ExclusionsReduceUsedCount) {
    const auto c = small(10);
    const auto prior = sample_prior_process(c);
    auto bank = prior_copy_bank(c, prior, {1.2});
    bank.realizations[3].excluded = true;
    bank.realizations[7].excluded = true;
    EXPECT_EQ(bank.used(), 8u);
    EXPECT_EQ(bank.series(1.2).size(), 8u);
    const auto r = make_report(bank, c.strategy("z3"), prior, c.presets[0], 1.2, c);
    EXPECT_EQ(r.n_used + r.n_excluded, c.n_prior);
}

TEST(Studies, SweepReusesOnePosteriorSet) {
    Campaign camp(small(4));
    const auto& c = camp.config();
    const auto& banks = camp.banks(c.sweep.strategies);
    const PosteriorBank* z2 = camp.cached_bank("z2");
    ASSERT_NE(z2, nullptr);
    const auto rows = threshold_sweep(banks, c, camp.prior().process);
    EXPECT_EQ(rows.size(), c.sweep.strategies.size() * c.presets.size() * c.sweep.means.size());
    for (const auto& r : rows) {
        EXPECT_EQ(r.posterior_checksum, banks.at(r.strategy).checksum);
    }
    (void)camp.reports();
    EXPECT_EQ(camp.cached_bank("z2"), z2);
    // The same posterior samples regardless of which thresholds are summarized.
    const auto alone = build_posterior_bank(c.strategy("z2"), c, camp.prior().process, {1.4});
    EXPECT_EQ(alone.checksum, z2->checksum);
    EXPECT_EQ(alone.realizations[0].interval[0], z2->realizations[0].interval[z2->threshold_index(1.4)]);
}

TEST(Studies, SweepRowsMatchReports) {
    Campaign camp(small(3));
    const auto& c = camp.config();
    const auto rows = threshold_sweep(camp.banks(c.sweep.strategies), c, camp.prior().process);
    const auto& r = rows.front();
    const auto report = make_report(*camp.cached_bank(r.strategy), c.strategy(r.strategy), camp.prior().process,
                                    c.preset(r.preset), r.threshold_mean, c);
    EXPECT_EQ(r.lambda, *report.lambda);
    EXPECT_EQ(r.cost_savings, report.cost_savings);
    EXPECT_EQ(r.evoi, report.evoi);
}

TEST(Studies, CostGridMatchesAnalyticalLine) {
    Campaign camp(small(4));
    const auto& c = camp.config();
    const auto& bank = camp.bank("z2");
    const auto cells = cost_grid_sweep(bank, c.strategy("z2"), c, camp.prior().process);
    EXPECT_EQ(cells.size(), c.cost_grid.thresholds.size() * c.cost_grid.grid_n * c.cost_grid.grid_n);
    for (const auto& cell : cells) {
        IntrinsicCosts ic = c.strategy("z2").intrinsic;
        ic.install = cell.install;
        ic.oandm_annual = cell.oandm_annual;
        EXPECT_EQ(cell.feasible, cell.install + ic.oandm_total(c.economics) < cell.cost_savings);
        EXPECT_EQ(cell.feasible, cell.lambda > 1.0);
    }
}

TEST(Studies, CostGridInfeasibleWithoutSavings) {
    const auto c = small(10);
    const auto prior = sample_prior_process(c);
    const auto bank = prior_copy_bank(c, prior, c.cost_grid.thresholds);
    for (const auto& cell : cost_grid_sweep(bank, c.strategy("z2"), c, prior)) {
        EXPECT_EQ(cell.cost_savings, 0.0);
        EXPECT_FALSE(cell.feasible);
    }
}

TEST(Studies, ChiUndefinedWhenBaselineBreaksEven) {
    auto c = small(40);
    c.inspection.strategies = {"z2"};
    c.inspection.thresholds = {1.2};
    Campaign probe(c);
    const auto& prior = probe.prior().process;
    const double cs0 = loss_pair(probe.bank("z0"), prior, c.presets[0], 1.2, c, extrinsic_times(c.strategy("z0"), c))
                           .cost_savings();
    ASSERT_GT(cs0, 0.0);
    c.inspection.c_insp_lo = c.inspection.c_insp_hi = cs0;
    c.inspection.n = 1;
    const auto rows = inspection_comparison(probe.banks({"z0", "z2"}), c, prior);
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows[0].lambda_baseline, 1.0);
    EXPECT_FALSE(rows[0].chi.has_value());
}

TEST(Studies, ChiRowsCoverTheSweep) {
    Campaign camp(small(4));
    const auto& c = camp.config();
    std::vector<std::string> ids{c.inspection.baseline};
    ids.insert(ids.end(), c.inspection.strategies.begin(), c.inspection.strategies.end());
    const auto rows = inspection_comparison(camp.banks(ids), c, camp.prior().process);
    EXPECT_EQ(rows.size(), c.presets.size() * c.inspection.thresholds.size() * c.inspection.strategies.size() *
                               c.inspection.n);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].strategy == rows[i - 1].strategy && rows[i].threshold_mean == rows[i - 1].threshold_mean &&
            rows[i].preset == rows[i - 1].preset && rows[i - 1].lambda_baseline > 0.0) {
            EXPECT_LT(rows[i].lambda_baseline, rows[i - 1].lambda_baseline);
        }
    }
}

TEST(Studies, InspectionTimeExtrinsicUsesOneDecision) {
    auto c = small(3);
    c.inspection.extrinsic = InspectionExtrinsic::InspectionTime;
    Campaign camp(c);
    const auto& z0 = camp.bank("z0");
    const auto r = make_report(z0, c.strategy("z0"), camp.prior().process, c.presets[0], 1.2, c);
    ASSERT_EQ(r.decisions.size(), 1u);
    EXPECT_EQ(r.decisions[0].t_years, 15.0);
}

TEST(Studies, RequiredThresholdsAreUnique) {
    const auto t = required_thresholds(small());
    for (std::size_t i = 1; i < t.size(); ++i) {
        EXPECT_LT(t[i - 1], t[i]);
    }
    PosteriorBank bank;
    bank.threshold_means = t;
    EXPECT_NO_THROW((void)bank.threshold_index(1.6));
    EXPECT_THROW((void)bank.threshold_index(1.65), ContractError);
}

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "voi/config.hpp"

using namespace voi;

namespace {

std::string error_of(const std::string& text) {
    try {
        (void)parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST(ParseConfig, EmptyGivesDefaults) {
    const auto run = parse_config_text("");
    const auto& c = run.campaign;
    EXPECT_EQ(run.scale, Scale::Desk);
    EXPECT_EQ(c.n_prior, 100u);
    EXPECT_EQ(c.n_post, 1000u);
    EXPECT_EQ(c.mcmc.warmup, 1000u);
    EXPECT_EQ(c.mcmc.draws, 1000u);
    EXPECT_EQ(c.mcmc.thin, 10u);
    EXPECT_EQ(c.prior.alpha.lo, 4.0);
    EXPECT_EQ(c.prior.alpha.hi, 13.0);
    EXPECT_EQ(c.prior.beta.mean, 250.0);
    EXPECT_EQ(c.prior.beta.sd, 50.0);
    EXPECT_EQ(c.prior.gamma.lo, 4.0);
    EXPECT_EQ(c.prior.gamma.hi, 8.5);
    EXPECT_EQ(c.grid.size(), 32u);
    EXPECT_EQ(c.threshold.mean, 1.2);
    EXPECT_EQ(c.threshold.cov, 0.05);
    ASSERT_EQ(c.presets.size(), 2u);
    EXPECT_EQ(c.presets[0].name, "R1");
    EXPECT_EQ(c.presets[0].min_repair_cost, 0.33);
    EXPECT_EQ(c.presets[0].p_ex_threshold, 0.2);
    EXPECT_EQ(c.presets[1].name, "R2");
    EXPECT_EQ(c.presets[1].min_repair_cost, 0.15);
    EXPECT_EQ(c.presets[1].p_ex_threshold, 0.1);
    EXPECT_EQ(c.economics.inflation_rate, 0.02);
    EXPECT_EQ(c.strategies.size(), 4u);
    EXPECT_EQ(c.sweep.means.size(), 11u);
    EXPECT_EQ(c.cost_grid.grid_n, 100u);
}

TEST(ParseConfig, PaperScale) {
    const auto c = parse_config_text("scale: paper\n").campaign;
    EXPECT_EQ(c.n_prior, 1000u);
    EXPECT_EQ(c.n_post, 2000u);
    EXPECT_EQ(c.mcmc.warmup, 2000u);
    EXPECT_EQ(c.mcmc.draws, 2000u);
}

TEST(ParseConfig, ScaleOverrideKeepsExplicitKeys) {
    const auto run = parse_config_text("scale: desk\nn_prior: 7\n", {}, Scale::Paper);
    EXPECT_EQ(run.scale, Scale::Paper);
    EXPECT_EQ(run.campaign.n_prior, 7u);
    EXPECT_EQ(run.campaign.n_post, 2000u);
}

TEST(ParseConfig, NegativeCountNamesKey) {
    const auto msg = error_of("n_prior: -1\n");
    EXPECT_NE(msg.find("n_prior"), std::string::npos) << msg;
    EXPECT_NE(error_of("mcmc:\n  draws: 0\n").find("mcmc.draws"), std::string::npos);
}

TEST(ParseConfig, UnknownKeyIsRejected) {
    const auto msg = error_of("n_priors: 10\n");
    EXPECT_NE(msg.find("unknown config key 'n_priors'"), std::string::npos) << msg;
    EXPECT_NE(error_of("threshold:\n  means: 1.2\n").find("'threshold.means'"), std::string::npos);
    EXPECT_NE(error_of("strategies:\n  z1:\n    obs: 3\n").find("'strategies.z1.obs'"), std::string::npos);
}

TEST(ParseConfig, MalformedSyntax) {
    const auto msg = error_of("threshold: [1.2\n");
    EXPECT_NE(msg.find("malformed"), std::string::npos) << msg;
}

TEST(ParseConfig, WrongTypeNamesKey) {
    EXPECT_NE(error_of("threshold:\n  mean: high\n").find("threshold.mean"), std::string::npos);
    EXPECT_NE(error_of("prior: 3\n").find("'prior' must be a mapping"), std::string::npos);
}

TEST(ParseConfig, InvariantViolationsNameKey) {
    EXPECT_NE(error_of("threshold:\n  mean: -1\n").find("threshold.mean"), std::string::npos);
    EXPECT_NE(error_of("n_post: 5000\n").find("n_post"), std::string::npos);
    EXPECT_NE(error_of("prior:\n  alpha: {lo: 5, hi: 4}\n").find("alpha"), std::string::npos);
    EXPECT_NE(error_of("scale: huge\n").find("scale"), std::string::npos);
    EXPECT_NE(error_of("cost_grid:\n  preset: R9\n").find("R9"), std::string::npos);
}

TEST(ParseConfig, MissingFile) {
    try {
        (void)parse_config("/nonexistent/voi.yaml");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("not found"), std::string::npos);
    }
}

TEST(ParseConfig, ThresholdRangeAndList) {
    auto c = parse_config_text("threshold_sweep:\n  means: {start: 1.0, stop: 1.5, step: 0.25}\n").campaign;
    EXPECT_EQ(c.sweep.means, (std::vector<double>{1.0, 1.25, 1.5}));
    c = parse_config_text("threshold_sweep:\n  means: [0.9, 1.1]\n").campaign;
    EXPECT_EQ(c.sweep.means, (std::vector<double>{0.9, 1.1}));
}

TEST(ParseConfig, StrategyOverridesAndAdditions) {
    const auto c = parse_config_text(
                       "strategies:\n"
                       "  z2:\n    install: 0.2\n    oandm_annual: 0.003\n"
                       "  z4:\n    kind: strain_theta\n    obs_per_step: 10\n    install: 0.1\n")
                       .campaign;
    EXPECT_EQ(c.strategy("z2").intrinsic.install, 0.2);
    EXPECT_EQ(c.strategy("z2").intrinsic.oandm_annual, 0.003);
    EXPECT_EQ(c.strategy("z2").obs_per_step, 1u);
    EXPECT_EQ(c.strategy("z4").obs_per_step, 10u);
    EXPECT_EQ(c.strategy("z4").kind, StrategyKind::StrainTheta);
    EXPECT_NE(error_of("strategies:\n  z5:\n    install: 0.1\n").find("needs a kind"), std::string::npos);
}

TEST(ParseConfig, ClampSwitchAppliesToAllPresets) {
    const auto c = parse_config_text("costs:\n  clamp_negative: false\n").campaign;
    for (const auto& p : c.presets) {
        EXPECT_FALSE(p.clamp_negative);
    }
}

TEST(ParseConfig, SurrogateFromTrainingCsv) {
    const auto csv = temp_file("voi_training.csv", "delta_tau_mm,s1,s2\n0,200,300\n1,180,290\n2,160,280\n");
    const auto yaml = temp_file("voi_training.yaml", "surrogate:\n  training_csv: voi_training.csv\n");
    const auto c = parse_config(yaml.string()).campaign;
    ASSERT_EQ(c.surrogate.sensors(), 2u);
    EXPECT_NEAR(c.surrogate.intercepts[0], 200.0, 1e-9);
    EXPECT_NEAR(c.surrogate.slopes[0], -20.0, 1e-9);
    EXPECT_NEAR(c.surrogate.slopes[1], -10.0, 1e-9);
}

TEST(ConfigEcho, RoundTrips) {
    auto run = parse_config_text("seed: 42\nn_prior: 12\nthreshold: {mean: 1.4}\ninspection_comparison: {extrinsic: inspection_time}\n");
    const auto again = parse_config_text(to_yaml(run));
    EXPECT_EQ(to_json(again).dump(), to_json(run).dump());
    EXPECT_EQ(again.campaign.seed, 42u);
    EXPECT_EQ(again.campaign.inspection.extrinsic, InspectionExtrinsic::InspectionTime);
}

TEST(ConfigSchema, ParsesToDefaults) {
    const auto schema = config_schema();
    EXPECT_NE(schema.find("n_prior"), std::string::npos);
    EXPECT_EQ(to_json(parse_config_text(schema)).dump(), to_json(parse_config_text("")).dump());
}

TEST(ShippedConfigs, Parse) {
    const std::filesystem::path dir = std::filesystem::path(VOI_SOURCE_DIR) / "configs";
    EXPECT_EQ(parse_config((dir / "desk.yaml").string()).campaign.n_prior, 100u);
    EXPECT_EQ(parse_config((dir / "paper.yaml").string()).campaign.n_prior, 1000u);
    EXPECT_EQ(parse_config((dir / "quick.yaml").string()).campaign.n_prior, 5u);
}

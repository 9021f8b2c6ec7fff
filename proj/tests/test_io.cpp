#include "loclace/data_io.hpp"
#include "loclace/error.hpp"
#include "loclace/json_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace loclace;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> x(n);
    for (auto& v : x) v = nd(rng);
    return x;
}

Json round_trip(const Json& j) { return parse_json(dump_json(j)); }

}  // namespace

TEST(JsonTest, NonFiniteRealsAsStrings) {
    Json j;
    j["a"] = kInf;
    j["b"] = -kInf;
    j["c"] = std::nan("");
    j["d"] = 0.1;
    const std::string text = dump_json(j, -1);
    EXPECT_EQ(text, R"({"a":"inf","b":"-inf","c":"nan","d":0.10000000000000001})");
    const Json back = parse_json(text);
    EXPECT_EQ(json_real(back["a"]), kInf);
    EXPECT_EQ(json_real(back["b"]), -kInf);
    EXPECT_TRUE(std::isnan(json_real(back["c"])));
    EXPECT_EQ(json_real(back["d"]), 0.1);
    EXPECT_THROW(json_real(Json("infinity")), Error);
    EXPECT_THROW(parse_json("{"), Error);
}

TEST(JsonTest, FitRoundTripIsExact) {
    const auto fit = fit_weighted_logconcave(empirical_sample(gaussian(60, 1)));
    const auto back = fit_from_json(round_trip(to_json(fit)));
    EXPECT_EQ(back.knots(), fit.knots());
    EXPECT_EQ(back.logvals(), fit.logvals());
    Json bad = to_json(fit);
    bad["knots"][0] = 100.0;
    EXPECT_THROW(fit_from_json(bad), Error);
}

TEST(JsonTest, ScoreEstimateRoundTrip) {
    const auto x = gaussian(70, 2);
    for (auto kind : {ScoreKind::PartialMLE, ScoreKind::GeoSym, ScoreKind::SymSmoothed}) {
        const auto est = build_score_estimate(kind, x, 0.1);
        const auto back = score_estimate_from_json(round_trip(to_json(est)));
        EXPECT_EQ(back.kind(), kind);
        EXPECT_EQ(back.center(), est.center());
        for (double z : {-1.0, -0.2, 0.0, 0.5, 1.3}) {
            EXPECT_EQ(back.pdf(z), est.pdf(z));
            EXPECT_EQ(back.score(z), est.score(z));
        }
    }
}

TEST(JsonTest, LocationEstimateRoundTrip) {
    OneStepConfig cfg;
    const auto est = onestep_estimate(gaussian(50, 3), cfg);
    ASSERT_EQ(est.xi, kInf);
    const auto back = location_estimate_from_json(round_trip(to_json(est)));
    EXPECT_EQ(back.theta, est.theta);
    EXPECT_EQ(back.xi, kInf);
    EXPECT_EQ(back.ci_low, est.ci_low);
    EXPECT_EQ(back.n, est.n);
}

TEST(JsonTest, MleEstimateRoundTrip) {
    GridConfig g;
    g.coarse_points = 11;
    g.refine_rounds = 1;
    const auto est = fit_full_mle(gaussian(20, 4), g);
    const auto back = mle_estimate_from_json(round_trip(to_json(est)));
    EXPECT_EQ(back.theta, est.theta);
    EXPECT_EQ(back.criterion, est.criterion);
    EXPECT_EQ(back.grid_trace, est.grid_trace);
    EXPECT_EQ(back.fit.knots(), est.fit.knots());
}

TEST(JsonTest, ExperimentConfigRoundTrip) {
    ExperimentConfig cfg;
    cfg.families = {"gaussian", "symbeta:4.5"};
    cfg.sample_sizes = {40, 100};
    cfg.replications = 17;
    cfg.seed = 12345678901234ULL;
    cfg.level = 0.9;
    cfg.parallel_workers = 3;
    EstimatorSpec a;
    a.onestep.score_kind = ScoreKind::GeoSym;
    a.onestep.eta = 0.01;
    a.onestep.preliminary = Preliminary::trimmed(0.1);
    a.onestep.info_variant = InfoVariant::Smoothed;
    EstimatorSpec b;
    b.type = EstimatorSpec::Type::Stone;
    b.stone = StoneConfig{20, 0.3};
    EstimatorSpec c;
    c.type = EstimatorSpec::Type::Beran;
    c.regime = Regime::NonOptimal;
    c.label = "custom";
    cfg.estimators = {a, b, c};
    const auto back = experiment_config_from_json(round_trip(to_json(cfg)));
    EXPECT_EQ(dump_json(to_json(back)), dump_json(to_json(cfg)));
    EXPECT_EQ(back.estimators[0].display_label(), a.display_label());
    EXPECT_EQ(back.estimators[1].stone, b.stone);
    EXPECT_EQ(back.estimators[2].display_label(), "custom");
    EXPECT_EQ(back.seed, cfg.seed);
}

TEST(JsonTest, ExperimentConfigDefaultsAndErrors) {
    const auto cfg = experiment_config_from_json(parse_json(
        R"({"families": ["laplace"], "sample_sizes": [30], "estimators": [{"type": "oracle-mean"}]})"));
    EXPECT_EQ(cfg.replications, 100u);
    EXPECT_EQ(cfg.level, 0.95);
    EXPECT_EQ(cfg.estimators[0].type, EstimatorSpec::Type::OracleMean);
    EXPECT_THROW(experiment_config_from_json(parse_json(R"({"families": ["laplace"]})")), Error);
    EXPECT_THROW(experiment_config_from_json(parse_json(
                     R"({"families": ["laplace"], "sample_sizes": [30], "estimators": [{"type": "magic"}]})")),
                 Error);
}

TEST(CsvTest, ReadsWithAndWithoutHeader) {
    std::istringstream a("x\n1.5\n-2\n\n3e-1\r\n");
    EXPECT_EQ(read_sample_csv(a), (std::vector<double>{1.5, -2.0, 0.3}));
    std::istringstream b("  4\n+5\n");
    EXPECT_EQ(read_sample_csv(b), (std::vector<double>{4.0, 5.0}));
    std::istringstream c("");
    EXPECT_TRUE(read_sample_csv(c).empty());
}

TEST(CsvTest, RejectsGarbage) {
    std::istringstream a("x\n1\nabc\n");
    EXPECT_THROW(read_sample_csv(a), Error);
    std::istringstream b("1,2\n");
    EXPECT_THROW(read_sample_csv(b), Error);
    std::istringstream c("nan\n");
    EXPECT_THROW(read_sample_csv(c), Error);
    EXPECT_THROW(read_sample_csv(std::filesystem::path("/nonexistent/file.csv")), Error);
}

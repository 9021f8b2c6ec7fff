#include "loclace/error.hpp"
#include "loclace/simharness.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

using namespace loclace;

namespace {

EstimatorSpec oracle_mean() {
    EstimatorSpec e;
    e.type = EstimatorSpec::Type::OracleMean;
    return e;
}

EstimatorSpec onestep(ScoreKind kind, double eta = 0.0) {
    EstimatorSpec e;
    e.type = EstimatorSpec::Type::OneStep;
    e.onestep.score_kind = kind;
    e.onestep.eta = eta;
    return e;
}

EstimatorSpec comparator(EstimatorSpec::Type type, Regime regime) {
    EstimatorSpec e;
    e.type = type;
    e.regime = regime;
    return e;
}

ExperimentConfig small_config(unsigned workers) {
    ExperimentConfig cfg;
    cfg.families = {"gaussian", "laplace"};
    cfg.sample_sizes = {40, 60};
    cfg.replications = 12;
    cfg.estimators = {oracle_mean(), onestep(ScoreKind::SymSmoothed), onestep(ScoreKind::GeoSym, 0.01),
                      comparator(EstimatorSpec::Type::Stone, Regime::Optimal),
                      comparator(EstimatorSpec::Type::Beran, Regime::NonOptimal)};
    cfg.estimators.push_back(EstimatorSpec{});
    cfg.estimators.back().type = EstimatorSpec::Type::Mle;
    cfg.estimators.back().grid.coarse_points = 21;
    cfg.estimators.back().grid.refine_rounds = 2;
    cfg.seed = 99;
    cfg.parallel_workers = workers;
    return cfg;
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST(SimulationTest, OracleMeanEfficiencyAndCoverage) {
    ExperimentConfig cfg;
    cfg.families = {"gaussian"};
    cfg.sample_sizes = {500};
    cfg.replications = 3000;
    cfg.estimators = {oracle_mean()};
    cfg.seed = 2024;
    cfg.parallel_workers = 4;
    const auto report = run_experiment(cfg);
    ASSERT_EQ(report.rows.size(), 1u);
    const auto& row = report.rows[0];
    EXPECT_NEAR(row.efficiency, 1.0, 0.08);
    EXPECT_NEAR(row.coverage, 0.95, 0.012);
    EXPECT_NEAR(row.mean_ci_length, 2.0 * 1.959963984540054 / std::sqrt(500.0), 1e-12);
    EXPECT_EQ(row.successes, 3000u);
    EXPECT_EQ(row.failures, 0u);
    EXPECT_NEAR(row.coverage_se, std::sqrt(row.coverage * (1 - row.coverage) / 3000.0), 1e-12);
    EXPECT_GT(row.efficiency_se, 0.0);
    EXPECT_NEAR(row.mse, 1.0 / 500.0, 0.2 / 500.0);
}

TEST(SimulationTest, ByteIdenticalAcrossWorkerCounts) {
    const auto a = run_experiment(small_config(1));
    const auto b = run_experiment(small_config(8));
    const auto c = run_experiment(small_config(3));
    EXPECT_EQ(report_csv(a), report_csv(b));
    EXPECT_EQ(report_csv(a), report_csv(c));
    EXPECT_EQ(plot_csvs(a), plot_csvs(b));
}

TEST(SimulationTest, ReportShape) {
    const auto cfg = small_config(2);
    const auto report = run_experiment(cfg);
    EXPECT_EQ(report.rows.size(), cfg.families.size() * cfg.sample_sizes.size() * cfg.estimators.size());
    for (const auto& row : report.rows) {
        EXPECT_EQ(row.successes + row.failures, cfg.replications);
        if (row.has_interval) {
            EXPECT_GE(row.coverage, 0.0);
            EXPECT_LE(row.coverage, 1.0);
        }
        EXPECT_GT(row.efficiency, 0.0) << row.estimator;
    }
    const auto lines = split_lines(report_csv(report));
    EXPECT_EQ(lines.front(), "family,n,estimator,metric,value,mc_stderr");
    std::set<std::string> labels;
    for (const auto& row : report.rows) labels.insert(row.estimator);
    EXPECT_TRUE(labels.count("oracle-mean"));
    EXPECT_TRUE(labels.count("onestep:sym-smoothed:eta=0"));
    EXPECT_TRUE(labels.count("onestep:geo-sym:eta=0.01"));
    EXPECT_TRUE(labels.count("stone:optimal"));
    EXPECT_TRUE(labels.count("beran:non_optimal"));
    EXPECT_TRUE(labels.count("mle"));

    std::set<std::string> files;
    for (const auto& [name, body] : plot_csvs(report)) {
        files.insert(name);
        EXPECT_EQ(split_lines(body).front(), "family,n,estimator,value,lower,upper");
    }
    EXPECT_TRUE(files.count("fig_efficiency.csv"));
    EXPECT_TRUE(files.count("fig_coverage.csv"));
}

TEST(SimulationTest, FailuresAreCounted) {
    // At n = 2 the partial MLE is uniform, its score vanishes, and the one-step
    // update has no information.
    ExperimentConfig cfg;
    cfg.families = {"gaussian"};
    cfg.sample_sizes = {2};
    cfg.replications = 5;
    cfg.estimators = {onestep(ScoreKind::PartialMLE), oracle_mean()};
    const auto report = run_experiment(cfg);
    EXPECT_EQ(report.rows[0].failures, 5u);
    EXPECT_EQ(report.rows[0].successes, 0u);
    EXPECT_EQ(report.rows[1].failures, 0u);
}

TEST(SimulationTest, InfiniteInformationRejected) {
    ExperimentConfig cfg;
    cfg.families = {"symbeta:2"};
    cfg.sample_sizes = {20};
    cfg.replications = 5;
    cfg.estimators = {oracle_mean()};
    try {
        run_experiment(cfg);
        FAIL() << "expected InfiniteInformation";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InfiniteInformation);
    }
}

TEST(SimulationTest, ConfigValidation) {
    auto cfg = small_config(1);
    cfg.replications = 1;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = small_config(1);
    cfg.level = 1.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = small_config(1);
    cfg.families = {"cauchy"};
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(SimulationTest, ReplicationSeedsDistinct) {
    std::set<std::uint64_t> seen;
    for (const std::string fam : {"gaussian", "laplace"}) {
        for (std::size_t n : {40u, 100u}) {
            for (std::size_t r = 0; r < 50; ++r) seen.insert(replication_seed(7, fam, n, r));
        }
    }
    EXPECT_EQ(seen.size(), 200u);
    EXPECT_EQ(replication_seed(7, "gaussian", 40, 3), replication_seed(7, "gaussian", 40, 3));
    EXPECT_NE(replication_seed(7, "gaussian", 40, 3), replication_seed(8, "gaussian", 40, 3));
}

TEST(SimulationTest, FullScaleDesign) {
    ExperimentConfig base;
    base.seed = 5;
    base.parallel_workers = 3;
    const auto cfg = paper_scale_config(base);
    EXPECT_EQ(cfg.replications, 3000u);
    EXPECT_EQ(cfg.sample_sizes, (std::vector<std::size_t>{40, 100, 200, 500}));
    EXPECT_EQ(cfg.families.size(), 5u);
    EXPECT_EQ(cfg.seed, 5u);
    EXPECT_EQ(cfg.parallel_workers, 3u);
    std::set<std::string> labels;
    for (const auto& e : cfg.estimators) labels.insert(e.display_label());
    EXPECT_EQ(labels.size(), cfg.estimators.size());
    EXPECT_TRUE(labels.count("mle"));
    EXPECT_TRUE(labels.count("onestep:sym-smoothed:eta=1e-05"));
    EXPECT_TRUE(labels.count("stone:non_optimal"));
    EXPECT_NO_THROW(cfg.validate());
}

TEST(TuneTest, SingletonAndDeterminism) {
    const auto g = ReferenceDistribution::gaussian();
    EXPECT_EQ(tune_grid_search(g, 40, std::vector<StoneConfig>{{30, 0.4}}, 10, 1), (StoneConfig{30, 0.4}));
    EXPECT_EQ(tune_grid_search(g, 40, std::vector<BeranConfig>{{20, 0.9}}, 10, 1), (BeranConfig{20, 0.9}));
    const std::vector<StoneConfig> grid{{10, 0.2}, {40, 0.5}, {80, 0.6}};
    EXPECT_EQ(tune_grid_search(g, 40, grid, 30, 3), tune_grid_search(g, 40, grid, 30, 3));
}

TEST(TuneTest, OracleCandidateWinsWithManyReplications) {
    // theta = median + k (mean - median): k = 1 is the sample mean, the
    // efficient estimator for Gaussian data.
    std::vector<std::function<double(std::span<const double>)>> candidates;
    for (double k : {0.0, 0.5, 1.0}) {
        candidates.push_back([k](std::span<const double> x) {
            const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
            const double med = preliminary(x, Preliminary::median());
            return med + k * (mean - med);
        });
    }
    EXPECT_EQ(tune_grid_search(candidates, ReferenceDistribution::gaussian(), 30, 10000, 11), 2u);
}

TEST(TuneTest, DefaultGrids) {
    const auto s = default_stone_grid();
    EXPECT_EQ(s.size(), 48u);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end(), [](const StoneConfig& a, const StoneConfig& b) {
        return std::tie(a.d, a.t) < std::tie(b.d, b.t);
    }));
    EXPECT_EQ(s.front(), (StoneConfig{10, 0.1}));
    EXPECT_EQ(s.back(), (StoneConfig{80, 0.6}));
    const auto b = default_beran_grid();
    EXPECT_EQ(b.size(), 75u);
    EXPECT_EQ(b.front(), (BeranConfig{10, 0.1}));
    EXPECT_EQ(b.back(), (BeranConfig{50, 1.5}));
}

TEST(FormatTest, Doubles) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(kInf), "inf");
    EXPECT_EQ(format_double(-kInf), "-inf");
    EXPECT_EQ(format_double(std::nan("")), "nan");
}

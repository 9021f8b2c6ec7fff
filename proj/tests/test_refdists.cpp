#include "loclace/error.hpp"
#include "loclace/numeric.hpp"
#include "loclace/refdists.hpp"

#include "oracles.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace loclace;

namespace {

// I(r) = r B(3/2, r/2 - 1) / B(1/2, r/2 + 1): substitute t = x / sqrt(r) so
// that t has density proportional to (1 - t^2)^(r/2) and the score squared is
// r t^2 / (1 - t^2)^2.
double symbeta_info_oracle(double r) {
    return r * boost::math::beta(1.5, r / 2.0 - 1.0) / boost::math::beta(0.5, r / 2.0 + 1.0);
}

double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, f - i / n, (i + 1) / n - f});
    }
    return d;
}

std::vector<ReferenceDistribution> all_families() {
    return {ReferenceDistribution::gaussian(), ReferenceDistribution::laplace(), ReferenceDistribution::logistic(),
            ReferenceDistribution::symbeta(2.1), ReferenceDistribution::symbeta(4.5)};
}

}  // namespace

TEST(RefEvalTest, Examples) {
    const auto g = ref_eval(ReferenceDistribution::gaussian(), 1.0);
    EXPECT_NEAR(g.pdf, std::exp(-0.5) / std::sqrt(2.0 * M_PI), 1e-15);
    EXPECT_DOUBLE_EQ(g.score, -1.0);
    const double r = 4.5;
    for (double x : {std::sqrt(r), -std::sqrt(r)}) {
        const auto e = ref_eval(ReferenceDistribution::symbeta(r), x);
        EXPECT_EQ(e.pdf, 0.0);
        EXPECT_EQ(e.score, 0.0);
    }
    EXPECT_DOUBLE_EQ(ref_eval(ReferenceDistribution::laplace(), -2.0).score, 1.0);
    EXPECT_DOUBLE_EQ(ref_eval(ReferenceDistribution::laplace(), 0.0).score, -1.0);
    EXPECT_NEAR(ref_eval(ReferenceDistribution::gaussian(3.0), 4.0).score, -1.0, 1e-15);
}

TEST(RefEvalTest, DensitiesIntegrateToOne) {
    for (const auto& d : all_families()) {
        const double lim = d.family == Family::SymBeta ? std::sqrt(d.r) : 40.0;
        const double mass = oracle::quad([&](double x) { return ref_eval(d, x).pdf; }, -lim, lim, {0.0});
        EXPECT_NEAR(mass, 1.0, 1e-8) << d.name();
    }
}

TEST(RefEvalTest, ScoreIsLogDerivative) {
    for (const auto& d : all_families()) {
        for (double x : {-1.3, -0.6, 0.25, 0.9, 1.4}) {
            const double h = 1e-6;
            const double fd = (std::log(ref_eval(d, x + h).pdf) - std::log(ref_eval(d, x - h).pdf)) / (2 * h);
            EXPECT_NEAR(ref_eval(d, x).score, fd, 1e-6) << d.name() << " x=" << x;
        }
    }
}

TEST(RefEvalTest, CdfMatchesQuadrature) {
    for (const auto& d : all_families()) {
        const double lo = d.family == Family::SymBeta ? -std::sqrt(d.r) : -40.0;
        for (double x : {-1.2, 0.0, 0.7}) {
            const double num = oracle::quad([&](double t) { return ref_eval(d, t).pdf; }, lo, x, {0.0});
            EXPECT_NEAR(ref_cdf(d, x), num, 1e-9) << d.name();
        }
    }
}

TEST(RefEvalTest, SymBetaScoreDerivative) {
    const double r = 3.0;
    for (double x : {-1.2, 0.3, 1.5}) {
        const double h = 1e-6;
        const auto d = ReferenceDistribution::symbeta(r);
        const double fd = (ref_eval(d, x + h).score - ref_eval(d, x - h).score) / (2 * h);
        EXPECT_NEAR(symbeta_score_derivative(r, x), fd, 1e-5);
    }
    EXPECT_EQ(symbeta_score_derivative(r, 2.0), 0.0);
}

TEST(FisherInfoTruthTest, ClassicalFamilies) {
    EXPECT_NEAR(ref_fisher_info(ReferenceDistribution::gaussian()), 1.0, 1e-8);
    EXPECT_NEAR(ref_fisher_info(ReferenceDistribution::laplace()), 1.0, 1e-8);
    EXPECT_NEAR(ref_fisher_info(ReferenceDistribution::logistic()), 1.0 / 3.0, 1e-8);
    EXPECT_NEAR(ref_fisher_info(ReferenceDistribution::logistic(5.0)), 1.0 / 3.0, 1e-8);
}

TEST(FisherInfoTruthTest, SymBeta) {
    for (double r : {2.1, 2.5, 3.0, 4.5, 10.0}) {
        const auto d = ReferenceDistribution::symbeta(r);
        const double tol = r < 2.5 ? 1e-6 * symbeta_info_oracle(r) : 1e-8 * symbeta_info_oracle(r);
        EXPECT_NEAR(ref_fisher_info(d), symbeta_info_oracle(r), tol) << r;
        EXPECT_NEAR(ref_fisher_info_exact(d), symbeta_info_oracle(r), 1e-10 * symbeta_info_oracle(r)) << r;
    }
    EXPECT_GT(ref_fisher_info(ReferenceDistribution::symbeta(2.1)), ref_fisher_info(ReferenceDistribution::symbeta(3.0)));
    EXPECT_GT(ref_fisher_info(ReferenceDistribution::symbeta(3.0)), ref_fisher_info(ReferenceDistribution::symbeta(4.5)));
    EXPECT_EQ(ref_fisher_info(ReferenceDistribution::symbeta(2.0)), kInf);
    EXPECT_EQ(ref_fisher_info(ReferenceDistribution::symbeta(1.0)), kInf);
}

TEST(SamplerTest, DeterministicGivenSeed) {
    for (const auto& d : all_families()) {
        EXPECT_EQ(ref_sample(d, 100, 42), ref_sample(d, 100, 42));
        EXPECT_NE(ref_sample(d, 100, 42), ref_sample(d, 100, 43));
    }
}

TEST(SamplerTest, KolmogorovSmirnov) {
    // Critical value of the KS statistic at level 0.001 is about 1.95 / sqrt(n).
    const std::size_t n = 100000;
    for (const auto& d : all_families()) {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto x = ref_sample(d, n, seed);
            EXPECT_LT(ks_statistic(x, [&](double t) { return ref_cdf(d, t); }), 1.95 / std::sqrt(double(n)))
                << d.name() << " seed " << seed;
        }
    }
    const auto lg = ReferenceDistribution::logistic();
    EXPECT_LT(ks_statistic(ref_sample(lg, n, 7), [&](double t) { return ref_cdf(lg, t); }), 0.006);
}

TEST(SamplerTest, SymBetaMeanAndSupport) {
    const auto d = ReferenceDistribution::symbeta(4.5, 1.0);
    const auto x = ref_sample(d, 1000000, 9);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    EXPECT_NEAR(mean, 1.0, 0.01);
    for (double v : x) {
        EXPECT_GE(v, 1.0 - std::sqrt(4.5));
        EXPECT_LE(v, 1.0 + std::sqrt(4.5));
    }
}

TEST(NamingTest, ParseAndName) {
    for (const auto& d : all_families()) {
        const auto back = ReferenceDistribution::parse(d.name());
        EXPECT_EQ(back.family, d.family);
        EXPECT_EQ(back.r, d.r);
    }
    EXPECT_EQ(ReferenceDistribution::symbeta(2.1).name(), "symbeta:2.1");
    EXPECT_THROW(ReferenceDistribution::parse("cauchy"), Error);
    EXPECT_THROW(ReferenceDistribution::parse("symbeta:-1"), Error);
    EXPECT_THROW(ReferenceDistribution::parse("symbeta:x"), Error);
}

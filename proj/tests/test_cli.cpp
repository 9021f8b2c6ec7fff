#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code;
    std::string out;
};

// Runs the CLI with stderr folded into stdout.
RunResult run(const std::string& args) {
    const std::string cmd = std::string("'") + LOCLACE_CLI_PATH + "' " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return {-1, ""};
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("loclace_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& body) const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << body;
        return p.string();
    }

    std::string gaussian_csv(std::size_t n, std::uint64_t seed) const {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd(2.0, 1.0);
        std::ostringstream s;
        s << "x\n";
        s.precision(17);
        for (std::size_t i = 0; i < n; ++i) s << nd(rng) << "\n";
        return write("sample.csv", s.str());
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, InfoGaussian) {
    const auto r = run("info --family gaussian");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["family"], "gaussian");
    EXPECT_NEAR(j["fisher_info"].get<double>(), 1.0, 1e-12);
}

TEST_F(CliTest, InfoHumanReadable) {
    const auto r = run("--human info --family laplace");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("fisher_info: 1"), std::string::npos) << r.out;
}

TEST_F(CliTest, DegenerateSampleExitsOne) {
    const auto path = write("one.csv", "x\n1.0\n");
    const auto r = run("estimate '" + path + "'");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("DegenerateSample"), std::string::npos) << r.out;
}

TEST_F(CliTest, UsageErrorsExitTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("bogus").code, 2);
    EXPECT_EQ(run("info").code, 2);
    EXPECT_EQ(run("estimate '" + (dir_ / "missing.csv").string() + "'").code, 2);
    const auto path = gaussian_csv(20, 1);
    EXPECT_EQ(run("estimate '" + path + "' --score magic").code, 2);
}

TEST_F(CliTest, EstimateOneStep) {
    const auto path = gaussian_csv(80, 2);
    const auto r = run("estimate '" + path + "' --score geo-sym --eta 0.01 --level 0.9");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    const double theta = j["theta"].get<double>();
    EXPECT_NEAR(theta, 2.0, 0.5);
    EXPECT_LE(j["ci_low"].get<double>(), theta);
    EXPECT_GE(j["ci_high"].get<double>(), theta);
}

TEST_F(CliTest, EstimateComparators) {
    const auto path = gaussian_csv(100, 3);
    for (const std::string m : {"stone", "beran"}) {
        const auto r = run("estimate '" + path + "' --method " + m + " --tuning-family gaussian");
        ASSERT_EQ(r.code, 0) << m << ": " << r.out;
        EXPECT_NEAR(nlohmann::json::parse(r.out)["theta"].get<double>(), 2.0, 0.5);
    }
}

TEST_F(CliTest, FitAndMle) {
    const auto path = gaussian_csv(30, 4);
    const auto fit = run("fit '" + path + "'");
    ASSERT_EQ(fit.code, 0) << fit.out;
    EXPECT_TRUE(nlohmann::json::parse(fit.out).contains("knots"));

    const auto sym = run("fit '" + path + "' --center 2");
    ASSERT_EQ(sym.code, 0) << sym.out;

    const auto mle = run("mle '" + path + "' --coarse-points 11 --refine-rounds 1 --trace");
    ASSERT_EQ(mle.code, 0) << mle.out;
    const auto j = nlohmann::json::parse(mle.out);
    EXPECT_TRUE(j.contains("theta"));
    EXPECT_TRUE(j.contains("criterion"));
}

TEST_F(CliTest, Tune) {
    const auto r = run("tune --family gaussian --n 40 --method stone --reps 5 --seed 1");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["best"].contains("d"));
    EXPECT_TRUE(j["best"].contains("t"));
}

TEST_F(CliTest, SimulateIsReproducible) {
    const auto cfg = write("cfg.json", R"({"families": ["gaussian", "laplace"], "sample_sizes": [30],
        "replications": 8, "seed": 3,
        "estimators": [{"type": "oracle-mean"}, {"type": "onestep"}, {"type": "stone"}]})");
    const fs::path a = dir_ / "a";
    const fs::path b = dir_ / "b";
    const fs::path c = dir_ / "c";
    ASSERT_EQ(run("simulate '" + cfg + "' -o '" + a.string() + "' --workers 1").code, 0);
    ASSERT_EQ(run("simulate '" + cfg + "' -o '" + b.string() + "' --workers 4").code, 0);
    ASSERT_EQ(run("simulate '" + cfg + "' -o '" + c.string() + "' --workers 1").code, 0);
    for (const char* f : {"report.csv", "fig_efficiency.csv", "fig_coverage.csv"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
    }
}

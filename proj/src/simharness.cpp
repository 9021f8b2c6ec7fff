#include "loclace/simharness.hpp"

#include "loclace/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

namespace loclace {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string format_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct Outcome {
    bool ok = false;
    double theta = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// Runs `body(i)` for i in [0, count) on `workers` threads. Exceptions escaping
// `body` are rethrown after all threads finish.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

Outcome run_one(const EstimatorSpec& spec, std::span<const double> sample, const std::string& family,
                double true_info, double level) {
    Outcome out;
    try {
        switch (spec.type) {
            case EstimatorSpec::Type::OneStep: {
                const LocationEstimate e = onestep_estimate(sample, spec.onestep, level);
                out = {true, e.theta, e.ci_low, e.ci_high};
                break;
            }
            case EstimatorSpec::Type::Mle: {
                const MleEstimate e = fit_full_mle(sample, spec.grid, spec.onestep.fit);
                out = {true, e.theta, 0.0, 0.0};
                break;
            }
            case EstimatorSpec::Type::Stone: {
                const StoneConfig c = spec.stone ? *spec.stone
                                                 : tuning_lookup_stone(TuningTable::builtin(), family,
                                                                       nearest_tabulated_n(TuningTable::builtin(), family,
                                                                                           static_cast<int>(sample.size())),
                                                                       spec.regime);
                const LocationEstimate e = stone_estimate(sample, c, level);
                out = {true, e.theta, e.ci_low, e.ci_high};
                break;
            }
            case EstimatorSpec::Type::Beran: {
                const BeranConfig c = spec.beran ? *spec.beran
                                                 : tuning_lookup_beran(TuningTable::builtin(), family,
                                                                       nearest_tabulated_n(TuningTable::builtin(), family,
                                                                                           static_cast<int>(sample.size())),
                                                                       spec.regime);
                const LocationEstimate e = beran_estimate(sample, c, level);
                out = {true, e.theta, e.ci_low, e.ci_high};
                break;
            }
            case EstimatorSpec::Type::OracleMean: {
                double mean = 0.0;
                for (double x : sample) mean += x;
                mean /= static_cast<double>(sample.size());
                const auto [lo, hi] = confidence_interval(mean, true_info, sample.size(), level);
                out = {true, mean, lo, hi};
                break;
            }
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::MissingEntry || e.kind() == ErrorKind::InvalidArgument) throw;
        out.ok = false;
    }
    if (out.ok && !std::isfinite(out.theta)) out.ok = false;
    return out;
}

ReportRow summarise(const std::vector<Outcome>& outcomes, const EstimatorSpec& spec, const std::string& family,
                    std::size_t n, double true_info) {
    ReportRow row;
    row.family = family;
    row.n = n;
    row.estimator = spec.display_label();
    row.comparator = spec.is_comparator();
    row.has_interval = spec.has_interval();
    row.fisher_info = true_info;

    std::vector<const Outcome*> good;
    for (const auto& o : outcomes) {
        if (o.ok) good.push_back(&o);
    }
    row.successes = good.size();
    row.failures = outcomes.size() - good.size();
    const double s = static_cast<double>(good.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (good.size() < 2) {
        row.efficiency = row.efficiency_se = row.coverage = row.coverage_se = nan;
        row.mean_ci_length = row.mean_ci_length_se = row.mse = row.mse_se = nan;
        return row;
    }

    double mean = 0.0;
    for (const auto* o : good) mean += o->theta;
    mean /= s;
    double m2 = 0.0;
    double m4 = 0.0;
    double sq = 0.0;
    double sq2 = 0.0;
    for (const auto* o : good) {
        const double d = o->theta - mean;
        m2 += d * d;
        m4 += d * d * d * d;
        const double e2 = o->theta * o->theta;
        sq += e2;
        sq2 += e2 * e2;
    }
    const double var = m2 / (s - 1.0);
    const double central2 = m2 / s;
    const double central4 = m4 / s;
    row.efficiency = (1.0 / (static_cast<double>(n) * true_info)) / var;
    const double var_se = std::sqrt(std::max(0.0, central4 - central2 * central2) / s);
    row.efficiency_se = row.efficiency * var_se / var;

    row.mse = sq / s;
    row.mse_se = std::sqrt(std::max(0.0, sq2 / s - row.mse * row.mse) / s);

    if (row.has_interval) {
        double covered = 0.0;
        double len = 0.0;
        double len2 = 0.0;
        for (const auto* o : good) {
            if (o->ci_low <= 0.0 && 0.0 <= o->ci_high) covered += 1.0;
            const double l = o->ci_high - o->ci_low;
            len += l;
            len2 += l * l;
        }
        row.coverage = covered / s;
        row.coverage_se = std::sqrt(row.coverage * (1.0 - row.coverage) / s);
        row.mean_ci_length = len / s;
        row.mean_ci_length_se = std::sqrt(std::max(0.0, len2 / s - row.mean_ci_length * row.mean_ci_length) / s);
    } else {
        row.coverage = row.coverage_se = row.mean_ci_length = row.mean_ci_length_se = nan;
    }
    return row;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string_view to_string(EstimatorSpec::Type t) noexcept {
    switch (t) {
        case EstimatorSpec::Type::OneStep: return "onestep";
        case EstimatorSpec::Type::Mle: return "mle";
        case EstimatorSpec::Type::Stone: return "stone";
        case EstimatorSpec::Type::Beran: return "beran";
        case EstimatorSpec::Type::OracleMean: return "oracle-mean";
    }
    return "unknown";
}

EstimatorSpec::Type parse_estimator_type(std::string_view name) {
    for (auto t : {EstimatorSpec::Type::OneStep, EstimatorSpec::Type::Mle, EstimatorSpec::Type::Stone,
                   EstimatorSpec::Type::Beran, EstimatorSpec::Type::OracleMean}) {
        if (name == to_string(t)) return t;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown estimator type '" + std::string(name) + "'");
}

std::string EstimatorSpec::display_label() const {
    if (!label.empty()) return label;
    switch (type) {
        case Type::OneStep: {
            std::string s = "onestep:" + std::string(to_string(onestep.score_kind)) + ":eta=" + format_short(onestep.eta);
            if (onestep.info_variant != InfoVariant::Empirical) s += ":info=" + std::string(to_string(onestep.info_variant));
            if (onestep.preliminary.kind != Preliminary::Kind::Mean) s += ":prelim=" + to_string(onestep.preliminary);
            return s;
        }
        case Type::Mle: return "mle";
        case Type::Stone:
            if (stone) return "stone:d=" + format_short(stone->d) + ":t=" + format_short(stone->t);
            return "stone:" + std::string(to_string(regime));
        case Type::Beran:
            if (beran) return "beran:b=" + std::to_string(beran->basis_count) + ":rho=" + format_short(beran->rho);
            return "beran:" + std::string(to_string(regime));
        case Type::OracleMean: return "oracle-mean";
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    if (families.empty()) throw Error(ErrorKind::InvalidArgument, "experiment needs at least one family");
    if (sample_sizes.empty()) throw Error(ErrorKind::InvalidArgument, "experiment needs at least one sample size");
    for (std::size_t n : sample_sizes) {
        if (n < 2) throw Error(ErrorKind::InvalidArgument, "sample sizes must be at least 2");
    }
    if (replications < 2) throw Error(ErrorKind::InvalidArgument, "experiment needs at least two replications");
    if (estimators.empty()) throw Error(ErrorKind::InvalidArgument, "experiment needs at least one estimator");
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidArgument, "level must lie in (0,1)");
    for (const auto& f : families) ReferenceDistribution::parse(f);
    for (const auto& e : estimators) {
        e.onestep.validate();
        e.grid.validate();
        if (e.stone) e.stone->validate();
        if (e.beran) e.beran->validate();
    }
}

ExperimentConfig paper_scale_config(const ExperimentConfig& base) {
    ExperimentConfig cfg;
    cfg.seed = base.seed;
    cfg.level = base.level;
    cfg.parallel_workers = base.parallel_workers;
    cfg.replications = 3000;
    cfg.families = {"gaussian", "laplace", "symbeta:2.1", "symbeta:4.5", "logistic"};
    cfg.sample_sizes = {40, 100, 200, 500};

    EstimatorSpec mle;
    mle.type = EstimatorSpec::Type::Mle;
    cfg.estimators.push_back(mle);
    for (ScoreKind kind : {ScoreKind::PartialMLE, ScoreKind::SymSmoothed}) {
        for (double eta : {0.0, 1e-2, 1e-3, 1e-5}) {
            EstimatorSpec e;
            e.type = EstimatorSpec::Type::OneStep;
            e.onestep.score_kind = kind;
            e.onestep.eta = eta;
            cfg.estimators.push_back(e);
        }
    }
    for (auto type : {EstimatorSpec::Type::Stone, EstimatorSpec::Type::Beran}) {
        for (Regime regime : {Regime::Optimal, Regime::NonOptimal}) {
            EstimatorSpec e;
            e.type = type;
            e.regime = regime;
            cfg.estimators.push_back(e);
        }
    }
    return cfg;
}

std::uint64_t replication_seed(std::uint64_t seed, const std::string& family, std::size_t n, std::size_t rep) {
    std::uint64_t h = splitmix(seed ^ fnv1a(family));
    h = splitmix(h ^ static_cast<std::uint64_t>(n));
    return splitmix(h ^ static_cast<std::uint64_t>(rep));
}

SimulationReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    struct Target {
        std::string family;
        ReferenceDistribution dist;
        double info;
    };
    std::vector<Target> targets;
    for (const auto& name : cfg.families) {
        ReferenceDistribution dist = ReferenceDistribution::parse(name);
        dist.theta0 = 0.0;
        const double info = ref_fisher_info(dist);
        if (!std::isfinite(info)) {
            throw Error(ErrorKind::InfiniteInformation,
                        "family " + name + " has infinite Fisher information; efficiency is undefined");
        }
        targets.push_back({dist.name(), dist, info});
    }

    SimulationReport report;
    const std::size_t reps = cfg.replications;
    const std::size_t m = cfg.estimators.size();
    for (const auto& target : targets) {
        for (std::size_t n : cfg.sample_sizes) {
            std::vector<Outcome> outcomes(reps * m);
            parallel_for(reps, cfg.parallel_workers, [&](std::size_t rep) {
                const std::vector<double> sample =
                    ref_sample(target.dist, n, replication_seed(cfg.seed, target.family, n, rep));
                for (std::size_t e = 0; e < m; ++e) {
                    outcomes[rep * m + e] = run_one(cfg.estimators[e], sample, target.family, target.info, cfg.level);
                }
            });
            for (std::size_t e = 0; e < m; ++e) {
                std::vector<Outcome> column(reps);
                for (std::size_t rep = 0; rep < reps; ++rep) column[rep] = outcomes[rep * m + e];
                report.rows.push_back(summarise(column, cfg.estimators[e], target.family, n, target.info));
            }
        }
    }
    return report;
}

std::string report_csv(const SimulationReport& report) {
    std::ostringstream os;
    os << "family,n,estimator,metric,value,mc_stderr\n";
    auto line = [&os](const ReportRow& r, const char* metric, double v, double se) {
        os << r.family << ',' << r.n << ',' << r.estimator << ',' << metric << ',' << format_double(v) << ','
           << format_double(se) << '\n';
    };
    for (const auto& r : report.rows) {
        line(r, "efficiency", r.efficiency, r.efficiency_se);
        if (r.has_interval) {
            line(r, "coverage", r.coverage, r.coverage_se);
            line(r, "mean_ci_length", r.mean_ci_length, r.mean_ci_length_se);
        }
        line(r, "mse", r.mse, r.mse_se);
        line(r, "failures", static_cast<double>(r.failures), 0.0);
    }
    return os.str();
}

std::vector<std::pair<std::string, std::string>> plot_csvs(const SimulationReport& report) {
    struct Panel {
        const char* file;
        double ReportRow::*value;
        double ReportRow::*se;
        int which;  // 0 all, 1 shape-constrained and oracle, 2 comparators only
        bool needs_interval;
    };
    const Panel panels[] = {
        {"fig_efficiency.csv", &ReportRow::efficiency, &ReportRow::efficiency_se, 0, false},
        {"fig_coverage.csv", &ReportRow::coverage, &ReportRow::coverage_se, 1, true},
        {"fig_coverage_comparators.csv", &ReportRow::coverage, &ReportRow::coverage_se, 2, true},
        {"fig_length.csv", &ReportRow::mean_ci_length, &ReportRow::mean_ci_length_se, 0, true},
        {"fig_mse.csv", &ReportRow::mse, &ReportRow::mse_se, 0, false},
    };
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& p : panels) {
        std::ostringstream os;
        os << "family,n,estimator,value,lower,upper\n";
        for (const auto& r : report.rows) {
            if (p.needs_interval && !r.has_interval) continue;
            if (p.which == 1 && r.comparator) continue;
            if (p.which == 2 && !r.comparator) continue;
            const double v = r.*(p.value);
            const double se = r.*(p.se);
            os << r.family << ',' << r.n << ',' << r.estimator << ',' << format_double(v) << ','
               << format_double(v - 2.0 * se) << ',' << format_double(v + 2.0 * se) << '\n';
        }
        out.emplace_back(p.file, os.str());
    }
    return out;
}

std::size_t tune_grid_search(const std::vector<std::function<double(std::span<const double>)>>& candidates,
                             const ReferenceDistribution& dist, std::size_t n, std::size_t inner_replications,
                             std::uint64_t seed) {
    if (candidates.empty()) throw Error(ErrorKind::InvalidArgument, "tuning grid is empty");
    if (inner_replications < 2) throw Error(ErrorKind::InvalidArgument, "tuning needs at least two replications");
    std::vector<std::vector<double>> samples;
    samples.reserve(inner_replications);
    const std::string family = dist.name();
    for (std::size_t rep = 0; rep < inner_replications; ++rep) {
        samples.push_back(ref_sample(dist, n, replication_seed(seed, family, n, rep)));
    }
    std::size_t best = 0;
    double best_var = kInf;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        std::vector<double> values;
        values.reserve(samples.size());
        for (const auto& s : samples) {
            try {
                const double v = candidates[c](s);
                if (std::isfinite(v)) values.push_back(v);
            } catch (const Error&) {
            }
        }
        if (values.size() < 2) continue;
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double var = ss / static_cast<double>(values.size() - 1);
        if (var < best_var) {
            best_var = var;
            best = c;
        }
    }
    return best;
}

StoneConfig tune_grid_search(const ReferenceDistribution& dist, std::size_t n, std::vector<StoneConfig> grid,
                             std::size_t inner_replications, std::uint64_t seed) {
    std::sort(grid.begin(), grid.end(),
              [](const StoneConfig& a, const StoneConfig& b) { return std::tie(a.d, a.t) < std::tie(b.d, b.t); });
    std::vector<std::function<double(std::span<const double>)>> candidates;
    for (const auto& c : grid) {
        candidates.emplace_back([c](std::span<const double> s) { return stone_estimate(s, c).theta; });
    }
    return grid[tune_grid_search(candidates, dist, n, inner_replications, seed)];
}

BeranConfig tune_grid_search(const ReferenceDistribution& dist, std::size_t n, std::vector<BeranConfig> grid,
                             std::size_t inner_replications, std::uint64_t seed) {
    std::sort(grid.begin(), grid.end(), [](const BeranConfig& a, const BeranConfig& b) {
        return std::tie(a.basis_count, a.rho) < std::tie(b.basis_count, b.rho);
    });
    std::vector<std::function<double(std::span<const double>)>> candidates;
    for (const auto& c : grid) {
        candidates.emplace_back([c](std::span<const double> s) { return beran_estimate(s, c).theta; });
    }
    return grid[tune_grid_search(candidates, dist, n, inner_replications, seed)];
}

std::vector<StoneConfig> default_stone_grid() {
    std::vector<StoneConfig> grid;
    for (int d = 10; d <= 80; d += 10) {
        for (int t = 1; t <= 6; ++t) grid.push_back({static_cast<double>(d), t / 10.0});
    }
    return grid;
}

std::vector<BeranConfig> default_beran_grid() {
    std::vector<BeranConfig> grid;
    for (int b = 10; b <= 50; b += 10) {
        for (int r = 1; r <= 15; ++r) grid.push_back({b, r / 10.0});
    }
    return grid;
}

}  // namespace loclace

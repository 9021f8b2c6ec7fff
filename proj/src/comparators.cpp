#include "loclace/comparators.hpp"

#include "loclace/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace loclace {

namespace detail {
extern const std::string_view kTuningTablesJson;
}

namespace {

double median_of(std::vector<double> v) {
    return preliminary(v, Preliminary::median());
}

struct Residuals {
    double center;
    double mad;
    std::vector<double> r;
};

Residuals median_residuals(std::span<const double> sample) {
    if (sample.empty()) throw Error(ErrorKind::EmptySample, "no observations");
    Residuals out;
    out.center = median_of(std::vector<double>(sample.begin(), sample.end()));
    out.r.reserve(sample.size());
    std::vector<double> abs_dev;
    abs_dev.reserve(sample.size());
    for (double x : sample) {
        out.r.push_back(x - out.center);
        abs_dev.push_back(std::abs(x - out.center));
    }
    out.mad = median_of(std::move(abs_dev));
    return out;
}

// Pool {+-r_i}, sorted.
std::vector<double> symmetric_pool(const std::vector<double>& r) {
    std::vector<double> pool;
    pool.reserve(2 * r.size());
    for (double v : r) {
        pool.push_back(v);
        pool.push_back(-v);
    }
    std::sort(pool.begin(), pool.end());
    return pool;
}

// Log-derivative of the Gaussian-kernel density of `pool` at z.
double kernel_score(const std::vector<double>& pool, double h, double z) {
    double top = -kInf;
    for (double p : pool) top = std::max(top, -0.5 * (z - p) * (z - p) / (h * h));
    double den = 0.0;
    double num = 0.0;
    for (double p : pool) {
        const double w = std::exp(-0.5 * (z - p) * (z - p) / (h * h) - top);
        den += w;
        num += w * (p - z);
    }
    return num / (den * h * h);
}

double sine_basis(int k, double u) {
    return std::numbers::sqrt2 * std::sin(2.0 * std::numbers::pi * k * u);
}

// Empirical cdf of a sorted pool.
double pool_cdf(const std::vector<double>& pool, double y) {
    const auto it = std::upper_bound(pool.begin(), pool.end(), y);
    return static_cast<double>(it - pool.begin()) / static_cast<double>(pool.size());
}

}  // namespace

void StoneConfig::validate() const {
    if (!(d > 0.0) || !(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "Stone tuning parameters must be positive");
}

void BeranConfig::validate() const {
    if (basis_count < 1) throw Error(ErrorKind::InvalidArgument, "Beran needs at least one basis function");
    if (!(rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "Beran scale parameter must be positive");
}

double median_absolute_deviation(std::span<const double> sample) { return median_residuals(sample).mad; }

double stone_kernel_density(std::span<const double> sample, const StoneConfig& cfg, double z) {
    cfg.validate();
    const Residuals res = median_residuals(sample);
    if (!(res.mad > 0.0)) throw Error(ErrorKind::ZeroMad, "median absolute deviation is zero");
    const double h = cfg.t * res.mad;
    double acc = 0.0;
    for (double r : res.r) acc += numeric::norm_pdf((z - r) / h) + numeric::norm_pdf((z + r) / h);
    return acc / (2.0 * static_cast<double>(res.r.size()) * h);
}

LocationEstimate stone_estimate(std::span<const double> sample, const StoneConfig& cfg, double level) {
    cfg.validate();
    if (sample.size() < 2) throw Error(ErrorKind::DegenerateSample, "Stone's estimator needs n >= 2");
    const Residuals res = median_residuals(sample);
    if (!(res.mad > 0.0)) throw Error(ErrorKind::ZeroMad, "median absolute deviation is zero");
    const double h = cfg.t * res.mad;
    const double cut = cfg.d * res.mad;
    const std::vector<double> pool = symmetric_pool(res.r);

    double sum = 0.0;
    double sq = 0.0;
    for (double r : res.r) {
        if (std::abs(r) > cut) continue;
        const double s = kernel_score(pool, h, r);
        sum += s;
        sq += s * s;
    }
    const auto n = static_cast<double>(sample.size());
    const double info = sq / n;
    if (!(info > 0.0)) throw Error(ErrorKind::ZeroInformation, "kernel scores vanish in the window");

    LocationEstimate est;
    est.preliminary_theta = res.center;
    est.theta = res.center - sum / (n * info);
    est.fisher_info = info;
    est.eta = 0.0;
    est.xi = cut;
    est.n = sample.size();
    est.level = level;
    std::tie(est.ci_low, est.ci_high) = confidence_interval(est.theta, info, est.n, level);
    return est;
}

LocationEstimate beran_estimate(std::span<const double> sample, const BeranConfig& cfg, double level) {
    cfg.validate();
    if (sample.size() < 2) throw Error(ErrorKind::DegenerateSample, "Beran's estimator needs n >= 2");
    const Residuals res = median_residuals(sample);
    if (!(res.mad > 0.0)) throw Error(ErrorKind::DegenerateSample, "median absolute deviation is zero");
    const double h = cfg.rho * res.mad;
    const std::vector<double> pool = symmetric_pool(res.r);
    const auto big_n = static_cast<double>(pool.size());

    // c_k = int d/dy e_k(G(y)) dG(y), with the derivative replaced by a
    // central difference quotient of the pooled empirical cdf.
    std::vector<double> coef(static_cast<std::size_t>(cfg.basis_count), 0.0);
    std::vector<double> up(pool.size());
    std::vector<double> down(pool.size());
    for (std::size_t j = 0; j < pool.size(); ++j) {
        up[j] = pool_cdf(pool, pool[j] + h);
        down[j] = pool_cdf(pool, pool[j] - h);
    }
    double info = 0.0;
    for (int k = 1; k <= cfg.basis_count; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < pool.size(); ++j) acc += sine_basis(k, up[j]) - sine_basis(k, down[j]);
        const double c = acc / (big_n * 2.0 * h);
        coef[static_cast<std::size_t>(k - 1)] = c;
        info += c * c;
    }
    if (!(info > 0.0)) throw Error(ErrorKind::ZeroInformation, "all estimated score coefficients vanish");

    auto score = [&coef](double u) {
        double s = 0.0;
        for (std::size_t k = 0; k < coef.size(); ++k) s += coef[k] * sine_basis(static_cast<int>(k + 1), u);
        return s;
    };

    // Midranks of |r_i|. Absolute residuals within 1e-12 (relative) count as
    // tied: with even n the two central residuals are +-delta in exact
    // arithmetic, and rounding must not decide which one ranks first.
    const std::size_t n = res.r.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&res](std::size_t a, std::size_t b) { return std::abs(res.r[a]) < std::abs(res.r[b]); });
    const double tie_tol = 1e-12 * std::abs(res.r[order[n - 1]]);
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(res.r[order[j + 1]]) - std::abs(res.r[order[j]]) <= tie_tol) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    const auto dn = static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(res.r[i]) <= tie_tol) continue;
        const double s = score(0.5 + rank[i] / (2.0 * (dn + 1.0)));
        sum += res.r[i] > 0.0 ? s : -s;
    }

    LocationEstimate est;
    est.preliminary_theta = res.center;
    est.theta = res.center + sum / (dn * info);
    est.fisher_info = info;
    est.eta = 0.0;
    est.xi = kInf;
    est.n = n;
    est.level = level;
    std::tie(est.ci_low, est.ci_high) = confidence_interval(est.theta, info, n, level);
    return est;
}

std::string_view to_string(Regime r) noexcept { return r == Regime::Optimal ? "optimal" : "non_optimal"; }

Regime parse_regime(std::string_view name) {
    if (name == "optimal") return Regime::Optimal;
    if (name == "non_optimal" || name == "non-optimal") return Regime::NonOptimal;
    throw Error(ErrorKind::InvalidArgument, "unknown tuning regime '" + std::string(name) + "'");
}

TuningTable TuningTable::from_json(std::string_view text) {
    TuningTable table;
    try {
        const auto doc = nlohmann::json::parse(text);
        for (const Regime regime : {Regime::Optimal, Regime::NonOptimal}) {
            const std::string key(to_string(regime));
            for (const auto& row : doc.at("stone").at(key)) {
                StoneConfig c{row.at("d").get<double>(), row.at("t").get<double>()};
                c.validate();
                table.stone[{row.at("family").get<std::string>(), row.at("n").get<int>(), regime}] = c;
            }
            for (const auto& row : doc.at("beran").at(key)) {
                BeranConfig c{row.at("basis_count").get<int>(), row.at("rho").get<double>()};
                c.validate();
                table.beran[{row.at("family").get<std::string>(), row.at("n").get<int>(), regime}] = c;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed tuning table: ") + e.what());
    }
    return table;
}

const TuningTable& TuningTable::builtin() {
    static const TuningTable table = from_json(detail::kTuningTablesJson);
    return table;
}

StoneConfig tuning_lookup_stone(const TuningTable& table, const std::string& family, int n, Regime regime) {
    const auto it = table.stone.find({family, n, regime});
    if (it == table.stone.end()) {
        throw Error(ErrorKind::MissingEntry, "no Stone tuning for " + family + ", n=" + std::to_string(n));
    }
    return it->second;
}

BeranConfig tuning_lookup_beran(const TuningTable& table, const std::string& family, int n, Regime regime) {
    const auto it = table.beran.find({family, n, regime});
    if (it == table.beran.end()) {
        throw Error(ErrorKind::MissingEntry, "no Beran tuning for " + family + ", n=" + std::to_string(n));
    }
    return it->second;
}

int nearest_tabulated_n(const TuningTable& table, const std::string& family, int n) {
    int best = -1;
    for (const auto& [key, cfg] : table.stone) {
        if (std::get<0>(key) != family) continue;
        const int m = std::get<1>(key);
        if (best < 0 || std::abs(m - n) < std::abs(best - n) || (std::abs(m - n) == std::abs(best - n) && m < best)) {
            best = m;
        }
    }
    if (best < 0) throw Error(ErrorKind::MissingEntry, "no tuning entries for family " + family);
    return best;
}

}  // namespace loclace

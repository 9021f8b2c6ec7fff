#include "loclace/refdists.hpp"

#include "loclace/error.hpp"
#include "loclace/numeric.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/beta_distribution.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace loclace {

namespace {

double symbeta_log_norm(double r) {
    return std::lgamma(0.5 * (3.0 + r)) - 0.5 * std::log(std::numbers::pi * r) - std::lgamma(1.0 + 0.5 * r);
}

// Uniform on (0,1) from the top 53 bits, open at both ends.
double open_uniform(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

ReferenceDistribution ReferenceDistribution::symbeta(double r, double theta0) {
    ReferenceDistribution d{Family::SymBeta, r, theta0};
    d.validate();
    return d;
}

ReferenceDistribution ReferenceDistribution::parse(const std::string& name) {
    if (name == "gaussian") return gaussian();
    if (name == "laplace") return laplace();
    if (name == "logistic") return logistic();
    constexpr std::string_view prefix = "symbeta:";
    if (name.rfind(prefix, 0) == 0) {
        const std::string_view tail = std::string_view(name).substr(prefix.size());
        double r = 0.0;
        const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), r);
        if (ec != std::errc() || ptr != tail.data() + tail.size()) {
            throw Error(ErrorKind::InvalidArgument, "cannot parse SymBeta shape in '" + name + "'");
        }
        return symbeta(r);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown family '" + name + "'");
}

std::string ReferenceDistribution::name() const {
    switch (family) {
        case Family::Gaussian: return "gaussian";
        case Family::Laplace: return "laplace";
        case Family::Logistic: return "logistic";
        case Family::SymBeta: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "symbeta:%g", r);
            return buf;
        }
    }
    return "unknown";
}

void ReferenceDistribution::validate() const {
    if (!std::isfinite(theta0)) throw Error(ErrorKind::InvalidArgument, "theta0 must be finite");
    if (family == Family::SymBeta && !(r > 0.0 && std::isfinite(r))) {
        throw Error(ErrorKind::InvalidArgument, "SymBeta shape r must be positive");
    }
}

RefEval ref_eval(const ReferenceDistribution& dist, double x) {
    const double z = x - dist.theta0;
    switch (dist.family) {
        case Family::Gaussian: return {numeric::norm_pdf(z), -z};
        case Family::Laplace: return {0.5 * std::exp(-std::abs(z)), z >= 0.0 ? -1.0 : 1.0};
        case Family::Logistic: {
            const double e = std::exp(-std::abs(z));
            return {e / ((1.0 + e) * (1.0 + e)), -std::tanh(0.5 * z)};
        }
        case Family::SymBeta: {
            const double r = dist.r;
            const double s = std::sqrt(r);
            if (!(std::abs(z) < s)) return {0.0, 0.0};
            const double inner = (1.0 - z / s) * (1.0 + z / s);
            return {std::exp(symbeta_log_norm(r) + 0.5 * r * std::log(inner)), -z / inner};
        }
    }
    return {0.0, 0.0};
}

double ref_cdf(const ReferenceDistribution& dist, double x) {
    const double z = x - dist.theta0;
    switch (dist.family) {
        case Family::Gaussian: return numeric::norm_cdf(z);
        case Family::Laplace: return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
        case Family::Logistic: return 1.0 / (1.0 + std::exp(-z));
        case Family::SymBeta: {
            const double s = std::sqrt(dist.r);
            if (z <= -s) return 0.0;
            if (z >= s) return 1.0;
            const double a = 0.5 * (dist.r + 2.0);
            return boost::math::ibeta(a, a, 0.5 * (1.0 + z / s));
        }
    }
    return 0.0;
}

double symbeta_score_derivative(double r, double x) {
    const double s = std::sqrt(r);
    if (!(std::abs(x) < s)) return 0.0;
    const double inner = (1.0 - x / s) * (1.0 + x / s);
    return -(1.0 + x * x / r) / (inner * inner);
}

double ref_fisher_info(const ReferenceDistribution& dist) {
    dist.validate();
    if (dist.family == Family::SymBeta) {
        const double r = dist.r;
        if (r <= 2.0) return kInf;
        // Integrand c x^2 (1 - x^2/r)^(r/2 - 2) on [0, sqrt r], written with the
        // distance to the endpoint to keep the singular factor accurate.
        const double s = std::sqrt(r);
        const double log_c = symbeta_log_norm(r);
        auto integrand = [=](double x, double xc) {
            const double dist_to_end = x > 0.5 * s ? xc : s - x;
            const double inner = dist_to_end * (s + x) / r;
            if (!(inner > 0.0)) return 0.0;
            return x * x * std::exp(log_c + (0.5 * r - 2.0) * std::log(inner));
        };
        boost::math::quadrature::tanh_sinh<double> ts;
        double err = 0.0;
        double l1 = 0.0;
        const double tol = r < 2.5 ? 1e-9 : 1e-12;
        const double half = ts.integrate(integrand, 0.0, s, tol, &err, &l1);
        if (!std::isfinite(half) || err > 1e-6 * std::max(1.0, half)) {
            throw Error(ErrorKind::QuadratureFailure, "SymBeta information quadrature did not converge");
        }
        return 2.0 * half;
    }
    auto integrand = [&dist](double x) {
        const RefEval e = ref_eval(dist, x + dist.theta0);
        return e.score * e.score * e.pdf;
    };
    return 2.0 * numeric::integrate(integrand, 0.0, kInf);
}

double ref_fisher_info_exact(const ReferenceDistribution& dist) {
    dist.validate();
    switch (dist.family) {
        case Family::Gaussian: return 1.0;
        case Family::Laplace: return 1.0;
        case Family::Logistic: return 1.0 / 3.0;
        case Family::SymBeta: {
            const double r = dist.r;
            if (r <= 2.0) return kInf;
            const double a = 0.5 * (r + 2.0);
            using boost::math::beta;
            return (r / 16.0) * (beta(a - 2.0, a - 2.0) - 4.0 * beta(a - 1.0, a - 1.0)) / beta(a, a);
        }
    }
    return 0.0;
}

std::vector<double> ref_sample(const ReferenceDistribution& dist, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return ref_sample(dist, n, rng);
}

std::vector<double> ref_sample(const ReferenceDistribution& dist, std::size_t n, Rng& rng) {
    dist.validate();
    std::vector<double> out(n);
    switch (dist.family) {
        case Family::Gaussian:
            for (double& x : out) x = numeric::norm_quantile(open_uniform(rng));
            break;
        case Family::Laplace:
            for (double& x : out) {
                const double u = open_uniform(rng);
                x = u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
            }
            break;
        case Family::Logistic:
            for (double& x : out) {
                const double u = open_uniform(rng);
                x = std::log(u) - std::log1p(-u);
            }
            break;
        case Family::SymBeta: {
            const double a = 0.5 * (dist.r + 2.0);
            boost::random::beta_distribution<double> beta(a, a);
            const double s = std::sqrt(dist.r);
            for (double& x : out) x = s * (2.0 * beta(rng) - 1.0);
            break;
        }
    }
    for (double& x : out) x += dist.theta0;
    return out;
}

}  // namespace loclace

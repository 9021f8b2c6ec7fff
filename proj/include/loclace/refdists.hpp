#pragma once

// Reference location families used as ground truth in simulations, all
// standardised so that theta0 is the centre of symmetry.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace loclace {

enum class Family { Gaussian, Laplace, Logistic, SymBeta };

struct ReferenceDistribution {
    Family family = Family::Gaussian;
    double r = 0.0;  // SymBeta shape; density proportional to (1 - x^2/r)^(r/2) on [-sqrt r, sqrt r]
    double theta0 = 0.0;

    static ReferenceDistribution gaussian(double theta0 = 0.0) { return {Family::Gaussian, 0.0, theta0}; }
    static ReferenceDistribution laplace(double theta0 = 0.0) { return {Family::Laplace, 0.0, theta0}; }
    static ReferenceDistribution logistic(double theta0 = 0.0) { return {Family::Logistic, 0.0, theta0}; }
    static ReferenceDistribution symbeta(double r, double theta0 = 0.0);

    /// "gaussian", "laplace", "logistic" or "symbeta:<r>".
    static ReferenceDistribution parse(const std::string& name);
    std::string name() const;

    void validate() const;
};

struct RefEval {
    double pdf;
    double score;  // right derivative of log pdf; 0 outside the support
};

RefEval ref_eval(const ReferenceDistribution& dist, double x);
double ref_cdf(const ReferenceDistribution& dist, double x);

/// Derivative of the SymBeta score, -(1 + x^2/r) / (1 - x^2/r)^2 inside the
/// support and 0 outside (centred at theta0).
double symbeta_score_derivative(double r, double x);

/// Fisher information for location by adaptive quadrature; +inf for SymBeta
/// with r <= 2. Throws QuadratureFailure.
double ref_fisher_info(const ReferenceDistribution& dist);

/// Closed-form information, used to cross-check the quadrature.
double ref_fisher_info_exact(const ReferenceDistribution& dist);

using Rng = std::mt19937_64;

std::vector<double> ref_sample(const ReferenceDistribution& dist, std::size_t n, std::uint64_t seed);
std::vector<double> ref_sample(const ReferenceDistribution& dist, std::size_t n, Rng& rng);

}  // namespace loclace

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "ntkspectra/linalg.hpp"

namespace ntkspectra {

struct BoundParams {
    double eta = 0.0;
    double c = 0.0;
    double delta = 0.0;
    double slack_epsilon = 0.0;  // the approximation slack of the band theorem
    double l0 = 0.0;             // loss at initialization
    double beta = 1.0;           // smoothness constants, diagnostics only
    double beta_f = 1.0;
};

struct BoundCurve {
    std::vector<long> steps;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> corollary_upper;
    std::vector<double> classical;
    bool corollary_valid = true;  // false when c == delta
};

struct TimeComplexityInputs {
    double q = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c = 0.0;
    double delta = 0.0;
    double target_epsilon = 0.0;  // the loss level to reach
    double eta = 0.0;
    long n = 0;
    double l0 = 0.0;
};

struct GeneralizationBounds {
    double y_kinv_y = 0.0;     // sum proj_i / lambda_i
    double classical_rhs = 0.0;  // sqrt(2 * y_kinv_y / n)
    double tr_k = 0.0;
    double mean_c = 0.0;       // mean proj_i / lambda_i^2 over retained indices
    double aligned_rhs = 0.0;  // mean_c * tr_k / n
};

namespace detail {

// (1 - eta*lambda)^(2t), evaluated in log space when the base is in (0, 2)
// so huge t does not underflow prematurely through repeated rounding.
inline double decay_factor(double lambda, double eta, double two_t) {
    const double x = eta * lambda;
    if (std::abs(x) < 1.0) return std::exp(two_t * std::log1p(-x));
    return std::pow(1.0 - x, two_t);
}

}  // namespace detail

// tr[(I - eta K)^{2t} K] = sum_i (1 - eta lambda_i)^{2t} lambda_i.
inline double spectral_trace_bound(const Vector& eigenvalues, double eta, long t) {
    if (t < 0) throw DomainError("spectral_trace_bound: t must be >= 0");
    double s = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        s += detail::decay_factor(eigenvalues(i), eta, 2.0 * static_cast<double>(t)) * eigenvalues(i);
    return s;
}

inline double classical_bound(double lambda_min, double eta, double l0, long t) {
    const double x = eta * lambda_min;
    if (x < 0.0 || x > 1.0) throw DomainError("classical_bound: eta*lambda_min must be in [0, 1]");
    return detail::decay_factor(lambda_min, eta, static_cast<double>(t)) * l0;
}

// Per-step band: lower/upper from the trace curve and the (c, delta) alignment
// constants, the initial-loss corollary curve, and the classical rate for
// comparison. The lower bound is clamped at 0.
inline BoundCurve convergence_band(const Vector& eigenvalues, const BoundParams& params,
                                   long t_max) {
    if (!(params.eta > 0.0)) throw DomainError("convergence_band: eta must be > 0");
    if (!(params.c > params.delta) || params.delta < 0.0)
        throw DomainError("convergence_band: need c > delta >= 0");
    BoundCurve curve;
    const double tr_k = eigenvalues.sum();
    const double lmin = std::max(eigenvalues.minCoeff(), 0.0);
    curve.corollary_valid = (params.c != params.delta);
    for (long t = 0; t <= t_max; ++t) {
        const double trace = spectral_trace_bound(eigenvalues, params.eta, t);
        curve.steps.push_back(t);
        curve.lower.push_back(
            std::max(0.0, (params.c - params.delta) / 2.0 * trace - params.slack_epsilon / 2.0));
        curve.upper.push_back((params.c + params.delta) / 2.0 * trace + params.slack_epsilon / 2.0);
        curve.corollary_upper.push_back(
            curve.corollary_valid
                ? ((params.c + params.delta) / (params.c - params.delta)) * (trace / tr_k) * params.l0 +
                      params.slack_epsilon / 2.0
                : std::numeric_limits<double>::quiet_NaN());
        curve.classical.push_back(classical_bound(lmin, params.eta, params.l0, t));
    }
    return curve;
}

// Closed-form iteration count to reach the target loss under a power-law
// spectrum. The power term is evaluated in log space.
inline double time_complexity(const TimeComplexityInputs& in) {
    if (!(in.q > 1.0)) throw DomainError("time_complexity: q must be > 1");
    if (!(in.c1 > 0.0 && in.c2 >= in.c1)) throw DomainError("time_complexity: need 0 < C1 <= C2");
    if (!(in.c > in.delta) || in.delta < 0.0)
        throw DomainError("time_complexity: need c > delta >= 0");
    if (!(in.target_epsilon > 0.0 && in.target_epsilon < 1.0))
        throw DomainError("time_complexity: target epsilon must be in (0, 1)");
    if (!(in.eta > 0.0) || in.n < 1 || !(in.l0 > 0.0))
        throw DomainError("time_complexity: invalid eta, n, or L0");

    const double inner = (in.q - 1.0) * in.target_epsilon / (2.0 * (in.c + in.delta) * in.c2) +
                         std::pow(static_cast<double>(in.n), 1.0 - in.q);
    const double power = std::exp(in.q / (1.0 - in.q) * std::log(inner));
    const double log_term =
        std::log(4.0 * (in.c + in.delta) * in.l0 / ((in.c - in.delta) * in.target_epsilon));
    return power * log_term / (2.0 * in.eta * in.c1);
}

// Width diagnostic n R^{6L+2} / (lambda_min^2 eps^2) with R = 8 beta sqrt(L0)
// / lambda_min. Returns log10 of the value; constants and log factors hidden
// by the Omega-tilde are not represented.
inline double width_requirement_log10(long n, double lambda_min, double epsilon,
                                      const BoundParams& params, int depth_l) {
    if (!(lambda_min > 0.0)) throw DomainError("width_requirement: lambda_min must be > 0");
    if (!(epsilon > 0.0)) throw DomainError("width_requirement: epsilon must be > 0");
    const double log10_r =
        std::log10(8.0 * params.beta) + 0.5 * std::log10(std::max(params.l0, 1e-300)) -
        std::log10(lambda_min);
    return std::log10(static_cast<double>(n)) + (6.0 * depth_l + 2.0) * log10_r -
           2.0 * std::log10(lambda_min) - 2.0 * std::log10(epsilon);
}

// Right-hand sides of the kernel generalization bounds, evaluated spectrally.
inline GeneralizationBounds generalization_bounds(const SpectralDecomposition& decomp,
                                                  const Vector& y, double floor = 1e-12) {
    const Eigen::Index n = decomp.eigenvalues.size();
    if (y.size() != n) throw ShapeMismatchError("generalization_bounds: size mismatch");
    const double lmax = decomp.eigenvalues(0);
    std::string bad;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(decomp.eigenvalues(i) > floor * std::max(lmax, 1.0)))
            bad += (bad.empty() ? "" : ",") + std::to_string(i);
    }
    if (!bad.empty())
        throw SingularKernelError("generalization_bounds: near-zero eigenvalues at ranks " + bad);

    GeneralizationBounds out;
    const Vector coeff = decomp.eigenvectors.transpose() * y;
    double mean_c = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double proj = coeff(i) * coeff(i);
        const double lambda = decomp.eigenvalues(i);
        out.y_kinv_y += proj / lambda;
        out.tr_k += lambda;
        mean_c += proj / (lambda * lambda);
    }
    out.mean_c = mean_c / static_cast<double>(n);
    out.classical_rhs = std::sqrt(2.0 * out.y_kinv_y / static_cast<double>(n));
    out.aligned_rhs = out.mean_c * out.tr_k / static_cast<double>(n);
    return out;
}

}  // namespace ntkspectra

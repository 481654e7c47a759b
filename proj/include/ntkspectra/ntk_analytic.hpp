#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ntkspectra/linalg.hpp"

namespace ntkspectra {

// Infinite-width NTK of a depth-L fully-connected bias-free ReLU network.
struct AnalyticNTKConfig {
    int depth_L = 1;       // number of hidden layers
    bool normalize = true; // divide by (L+1) so the diagonal is exactly 1
};

struct TwoPointReport {
    double theta = 0.0;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    Eigen::Vector2d v_max;
    Eigen::Vector2d v_min;
    double proj_max = 0.0;     // (v_max . y)^2
    double proj_min = 0.0;     // (v_min . y)^2
    double lipschitz_rhs = 0.0;  // L_y^2 (1 - cos theta)
};

struct NearDuplicatePrediction {
    std::pair<Eigen::Index, Eigen::Index> pair;
    double theta = 0.0;
    double lambda_pred = 0.0;
    Vector v_pred;
    double matched_lambda_true = 0.0;
    double cosine_to_true = 0.0;
};

namespace detail {

inline double arccos_clamped(double u) {
    return std::acos(std::clamp(u, -1.0, 1.0));
}

}  // namespace detail

// Arc-cosine NTK recursion for unit-norm inputs with inner product u.
// Sigma^0 = u; Sigma^l = kappa1(Sigma^{l-1}); Theta^l = Theta^{l-1} *
// kappa0(Sigma^{l-1}) + Sigma^l. The unnormalized diagonal is L+1.
inline double relu_ntk_entry(double u, const AnalyticNTKConfig& config) {
    if (std::abs(u) > 1.0 + 1e-12)
        throw DomainError("relu_ntk_entry: |u| > 1, got " + std::to_string(u));
    u = std::clamp(u, -1.0, 1.0);

    auto kappa0 = [](double x) { return (M_PI - detail::arccos_clamped(x)) / M_PI; };
    auto kappa1 = [](double x) {
        x = std::clamp(x, -1.0, 1.0);
        return (std::sqrt(1.0 - x * x) + x * (M_PI - std::acos(x))) / M_PI;
    };

    double sigma = u;
    double theta_ntk = u;
    for (int l = 1; l <= config.depth_L; ++l) {
        const double sigma_next = kappa1(sigma);
        theta_ntk = theta_ntk * kappa0(sigma) + sigma_next;
        sigma = sigma_next;
    }
    return config.normalize ? theta_ntk / (config.depth_L + 1) : theta_ntk;
}

// Infinite-width NTK Gram matrix over unit-norm rows of X.
inline SymMatrix build_ntk_matrix(const Matrix& x, const AnalyticNTKConfig& config) {
    const Eigen::Index n = x.rows();
    std::string bad;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(x.row(i).norm() - 1.0) > 1e-8)
            bad += (bad.empty() ? "" : ",") + std::to_string(i);
    }
    if (!bad.empty())
        throw NotUnitNormError("build_ntk_matrix: rows not unit norm: " + bad);

    Matrix k(n, n);
    const double diag = config.normalize ? 1.0 : static_cast<double>(config.depth_L + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = diag;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            k(i, j) = k(j, i) = relu_ntk_entry(x.row(i).dot(x.row(j)), config);
        }
    }
    return SymMatrix(std::move(k));
}

// Closed-form eigenstructure of the normalized 2x2 kernel of two points at
// angle theta, plus the label projections and the Lipschitz bound on the
// small one.
inline TwoPointReport two_point_analysis(double theta, const AnalyticNTKConfig& config,
                                         double y1, double y2, double l_y) {
    if (!(theta > 0.0 && theta < M_PI))
        throw DegenerateInputError("two_point_analysis: theta must be in (0, pi)");
    AnalyticNTKConfig cfg = config;
    cfg.normalize = true;
    const double k12 = relu_ntk_entry(std::cos(theta), cfg);

    TwoPointReport r;
    r.theta = theta;
    r.lambda_max = 1.0 + k12;
    r.lambda_min = 1.0 - k12;
    r.v_max = Eigen::Vector2d(1.0, 1.0) / std::sqrt(2.0);
    r.v_min = Eigen::Vector2d(1.0, -1.0) / std::sqrt(2.0);
    r.proj_max = (y1 + y2) * (y1 + y2) / 2.0;
    r.proj_min = (y1 - y2) * (y1 - y2) / 2.0;
    r.lipschitz_rhs = l_y * l_y * (1.0 - std::cos(theta));
    return r;
}

// Predicted small eigenpair for a near-duplicate pair (i, j) at angle theta in
// a normalized kernel: lambda = (L/2pi) * theta and
// v = (1, -1, -B^{-1}(a - b)) / sqrt(2) with B the block excluding i, j.
// The prediction is compared against the full eigendecomposition; the match is
// the eigenpair with maximal |v_pred . v_k| (ties broken by smaller eigenvalue).
inline NearDuplicatePrediction predicted_small_eigenpair(const SymMatrix& k_bar,
                                                         std::pair<Eigen::Index, Eigen::Index> pair,
                                                         double theta,
                                                         const AnalyticNTKConfig& config) {
    const Eigen::Index n = k_bar.order();
    auto [i, j] = pair;
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
        throw IndexError("predicted_small_eigenpair: invalid pair (" + std::to_string(i) +
                         ", " + std::to_string(j) + ")");

    std::vector<Eigen::Index> rest;
    rest.reserve(static_cast<std::size_t>(n - 2));
    for (Eigen::Index k = 0; k < n; ++k)
        if (k != i && k != j) rest.push_back(k);

    NearDuplicatePrediction pred;
    pred.pair = pair;
    pred.theta = theta;
    pred.lambda_pred = (config.depth_L / (2.0 * M_PI)) * theta;

    Vector v = Vector::Zero(n);
    v(i) = 1.0;
    v(j) = -1.0;
    if (n > 2) {
        const Eigen::Index r = n - 2;
        Matrix b_block(r, r);
        Vector a_vec(r), b_vec(r);
        for (Eigen::Index p = 0; p < r; ++p) {
            a_vec(p) = k_bar(i, rest[static_cast<std::size_t>(p)]);
            b_vec(p) = k_bar(j, rest[static_cast<std::size_t>(p)]);
            for (Eigen::Index q = 0; q < r; ++q)
                b_block(p, q) = k_bar(rest[static_cast<std::size_t>(p)], rest[static_cast<std::size_t>(q)]);
        }
        const Vector tail = solve_spd(SymMatrix(std::move(b_block)), a_vec - b_vec);
        for (Eigen::Index p = 0; p < r; ++p) v(rest[static_cast<std::size_t>(p)]) = -tail(p);
    }
    v.normalize();
    pred.v_pred = v;

    const SpectralDecomposition decomp = eigh_symmetric(k_bar);
    Eigen::Index best = 0;
    double best_cos = -1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double c = std::abs(v.dot(decomp.eigenvectors.col(k)));
        // >= so ties go to the smaller eigenvalue (columns are descending).
        if (c >= best_cos) {
            best_cos = c;
            best = k;
        }
    }
    pred.matched_lambda_true = decomp.eigenvalues(best);
    pred.cosine_to_true = best_cos;
    return pred;
}

}  // namespace ntkspectra

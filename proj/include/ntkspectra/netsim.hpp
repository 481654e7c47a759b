#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "ntkspectra/linalg.hpp"
#include "ntkspectra/rng.hpp"

namespace ntkspectra {

// Bias-free fully-connected ReLU network in NTK parameterization: weights are
// unit-variance, scaling lives in the forward pass. Hidden and output layers
// carry sqrt(2/fan_in) (the 2 is the ReLU gain); the first layer carries no
// factor since inputs are unit-norm. With this scaling the empirical NTK
// converges to the analytic arc-cosine NTK as the width grows.
struct MLPNetwork {
    Eigen::Index input_dim = 0;
    Eigen::Index width = 0;
    int hidden_layers = 0;
    std::uint64_t seed = 0;
    // weights[0]: m x d, weights[1..L-1]: m x m, weights[L]: 1 x m.
    std::vector<Matrix> weights;

    double layer_scale(std::size_t layer) const {
        return layer == 0 ? 1.0 : std::sqrt(2.0 / static_cast<double>(width));
    }
};

struct GDConfig {
    double eta = 0.0;
    long steps = 0;
    bool record_residuals = false;
};

struct TrainingTrace {
    std::vector<double> losses;
    std::vector<Vector> residuals;        // per step, empty unless recorded and n <= 4096
    std::vector<double> deviation_norms;  // ||r_t - (I - eta K0)^t r_0||
    double eta = 0.0;
    long steps = 0;
    bool diverged = false;
};

inline MLPNetwork init_network(Eigen::Index d, Eigen::Index m, int hidden_layers,
                               std::uint64_t seed) {
    if (d < 1 || m < 1 || hidden_layers < 1)
        throw DomainError("init_network: d, m, L must be >= 1");
    MLPNetwork net;
    net.input_dim = d;
    net.width = m;
    net.hidden_layers = hidden_layers;
    net.seed = seed;
    net.weights.reserve(static_cast<std::size_t>(hidden_layers) + 1);
    for (int l = 0; l <= hidden_layers; ++l) {
        const Eigen::Index rows = (l == hidden_layers) ? 1 : m;
        const Eigen::Index cols = (l == 0) ? d : m;
        RandomStream rng(seed, static_cast<std::uint64_t>(l));
        Matrix w(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = rng.next_gaussian();
        net.weights.push_back(std::move(w));
    }
    return net;
}

namespace detail {

struct ForwardCache {
    std::vector<Matrix> activations;  // [0] = X, then post-ReLU per hidden layer
    std::vector<Matrix> preacts;      // pre-activation per hidden layer
    Vector outputs;
};

inline ForwardCache forward_cached(const MLPNetwork& net, const Matrix& x) {
    if (x.cols() != net.input_dim)
        throw ShapeMismatchError("forward: input dim mismatch");
    ForwardCache cache;
    cache.activations.push_back(x);
    Matrix a = x;
    for (int l = 0; l < net.hidden_layers; ++l) {
        Matrix z = net.layer_scale(static_cast<std::size_t>(l)) *
                   (a * net.weights[static_cast<std::size_t>(l)].transpose());
        a = z.cwiseMax(0.0);
        cache.preacts.push_back(std::move(z));
        cache.activations.push_back(a);
    }
    const std::size_t out = static_cast<std::size_t>(net.hidden_layers);
    cache.outputs = net.layer_scale(out) * (a * net.weights[out].transpose());
    return cache;
}

// Per-layer cotangents dL/dz_l for an output cotangent vector (one entry per
// sample). Row i of the returned matrix for layer l is the sample-i cotangent.
inline std::vector<Matrix> backward_deltas(const MLPNetwork& net, const ForwardCache& cache,
                                           const Vector& out_cotangent) {
    const int depth = net.hidden_layers;
    std::vector<Matrix> deltas(static_cast<std::size_t>(depth));
    const std::size_t out = static_cast<std::size_t>(depth);
    Matrix d = (out_cotangent * (net.layer_scale(out) * net.weights[out]))
                   .cwiseProduct((cache.preacts[out - 1].array() > 0.0).cast<double>().matrix());
    deltas[out - 1] = d;
    for (int l = depth - 2; l >= 0; --l) {
        d = (net.layer_scale(static_cast<std::size_t>(l) + 1) *
             (d * net.weights[static_cast<std::size_t>(l) + 1]))
                .cwiseProduct(
                    (cache.preacts[static_cast<std::size_t>(l)].array() > 0.0).cast<double>().matrix());
        deltas[static_cast<std::size_t>(l)] = d;
    }
    return deltas;
}

}  // namespace detail

inline Vector forward(const MLPNetwork& net, const Matrix& x) {
    return detail::forward_cached(net, x).outputs;
}

// Exact reverse-mode gradient of the scalar output, flattened in layer order
// (each weight matrix row-major). Intended for small nets and oracle checks;
// the empirical NTK below never materializes these.
inline Vector per_sample_gradient(const MLPNetwork& net, const Vector& x) {
    const auto cache = detail::forward_cached(net, Matrix(x.transpose()));
    const auto deltas = detail::backward_deltas(net, cache, Vector::Ones(1));

    std::size_t total = 0;
    for (const auto& w : net.weights) total += static_cast<std::size_t>(w.size());
    Vector grad(static_cast<Eigen::Index>(total));
    Eigen::Index pos = 0;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const double s = net.layer_scale(l);
        Matrix gw;  // same shape as weights[l]
        if (l == static_cast<std::size_t>(net.hidden_layers)) {
            gw = s * cache.activations.back();
        } else {
            gw = s * (deltas[l].transpose() * cache.activations[l]);
        }
        for (Eigen::Index i = 0; i < gw.rows(); ++i)
            for (Eigen::Index j = 0; j < gw.cols(); ++j) grad(pos++) = gw(i, j);
    }
    return grad;
}

// Empirical NTK K = J J^T without forming J: per layer the gradient of sample
// i w.r.t. W_l is s_l * delta_l^i (a_{l-1}^i)^T, so
// <g_i, g_j>_l = s_l^2 (delta_l^i . delta_l^j)(a_{l-1}^i . a_{l-1}^j).
inline SymMatrix empirical_ntk(const MLPNetwork& net, const Matrix& x) {
    const auto cache = detail::forward_cached(net, x);
    const Eigen::Index n = x.rows();
    const auto deltas = detail::backward_deltas(net, cache, Vector::Ones(n));

    Matrix k = Matrix::Zero(n, n);
    for (std::size_t l = 0; l < static_cast<std::size_t>(net.hidden_layers); ++l) {
        const double s2 = net.layer_scale(l) * net.layer_scale(l);
        k.noalias() += s2 * (deltas[l] * deltas[l].transpose())
                                .cwiseProduct(cache.activations[l] * cache.activations[l].transpose());
    }
    const std::size_t out = static_cast<std::size_t>(net.hidden_layers);
    const double s2 = net.layer_scale(out) * net.layer_scale(out);
    k.noalias() += s2 * (cache.activations[out] * cache.activations[out].transpose());
    return SymMatrix(std::move(k));
}

// Linear-dynamics prediction (I - eta K)^t r0 evaluated in the eigenbasis.
inline Vector linearized_residual(const SpectralDecomposition& decomp, const Vector& r0,
                                  double eta, long t) {
    if (r0.size() != decomp.eigenvalues.size())
        throw ShapeMismatchError("linearized_residual: size mismatch");
    if (t < 0) throw DomainError("linearized_residual: t must be >= 0");
    Vector coeff = decomp.eigenvectors.transpose() * r0;
    for (Eigen::Index i = 0; i < coeff.size(); ++i)
        coeff(i) *= std::pow(1.0 - eta * decomp.eigenvalues(i), static_cast<double>(t));
    return decomp.eigenvectors * coeff;
}

// Full-batch gradient descent on the half squared loss. When residuals are
// recorded, deviation norms ||r_t - (I - eta K0)^t r0|| are measured against
// the empirical NTK frozen at initialization.
inline TrainingTrace train_gd(MLPNetwork net, const Matrix& x, const Vector& y,
                              const GDConfig& config) {
    if (config.eta <= 0.0) throw DomainError("train_gd: eta must be > 0");
    if (y.size() != x.rows()) throw ShapeMismatchError("train_gd: label size mismatch");
    const Eigen::Index n = x.rows();
    const bool store_full = config.record_residuals && n <= 4096;

    TrainingTrace trace;
    trace.eta = config.eta;
    trace.steps = config.steps;

    SpectralDecomposition k0_decomp;
    Vector r0;
    if (config.record_residuals) {
        k0_decomp = eigh_symmetric(empirical_ntk(net, x));
    }

    for (long t = 0; t <= config.steps; ++t) {
        auto cache = detail::forward_cached(net, x);
        const Vector r = cache.outputs - y;
        const double loss = 0.5 * r.squaredNorm();
        trace.losses.push_back(loss);
        if (config.record_residuals) {
            if (t == 0) r0 = r;
            if (store_full) trace.residuals.push_back(r);
            trace.deviation_norms.push_back(
                (r - linearized_residual(k0_decomp, r0, config.eta, t)).norm());
        }
        if (!std::isfinite(loss) || loss > 1e6 * trace.losses.front()) {
            trace.diverged = true;
            break;
        }
        if (t == config.steps) break;

        const auto gammas = detail::backward_deltas(net, cache, r);
        const std::size_t out = static_cast<std::size_t>(net.hidden_layers);
        net.weights[out] -=
            config.eta * net.layer_scale(out) * (r.transpose() * cache.activations[out]);
        for (std::size_t l = 0; l < out; ++l) {
            net.weights[l] -= config.eta * net.layer_scale(l) *
                              (gammas[l].transpose() * cache.activations[l]);
        }
    }
    return trace;
}

}  // namespace ntkspectra

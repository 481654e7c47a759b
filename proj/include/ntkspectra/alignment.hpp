#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "ntkspectra/dataio.hpp"
#include "ntkspectra/linalg.hpp"
#include "ntkspectra/netsim.hpp"
#include "ntkspectra/ntk_analytic.hpp"

namespace ntkspectra {

struct ProfilePoint {
    long rank = 0;  // 1-based eigenvalue rank, descending
    double lambda = 0.0;
    double proj = 0.0;  // (v_rank . target)^2
};

struct AlignmentProfile {
    std::vector<ProfilePoint> points;
    double alpha = 0.0;
    double log_intercept = 0.0;
    double r_squared = 0.0;
    long excluded_top_k = 0;
    double floor = 0.0;
};

// Condition constants (c, delta) such that (c - delta) lambda_i <= proj_i <=
// (c + delta) lambda_i on the retained index set.
struct AlignmentBand {
    double c = 0.0;
    double delta = 0.0;
    std::vector<double> ratios;  // proj_i / lambda_i per retained index
    std::vector<long> retained_indices;
    double dominance = 0.0;  // c / delta
    bool degenerate = false; // min ratio was zero
};

struct PowerLawFit {
    double q = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    long fit_begin = 0;  // 1-based rank interval, inclusive
    long fit_end = 0;
};

inline std::vector<double> eigen_projections(const SpectralDecomposition& decomp,
                                             const Vector& target) {
    if (target.size() != decomp.eigenvalues.size())
        throw ShapeMismatchError("eigen_projections: size mismatch");
    std::vector<double> out(static_cast<std::size_t>(decomp.eigenvalues.size()));
    const Vector coeff = decomp.eigenvectors.transpose() * target;
    for (Eigen::Index i = 0; i < coeff.size(); ++i)
        out[static_cast<std::size_t>(i)] = coeff(i) * coeff(i);
    return out;
}

struct LoglogFit {
    double alpha = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    long points_used = 0;
};

// OLS of log(proj) on log(lambda) over points surviving the top-k exclusion
// and the floor on both coordinates.
inline LoglogFit fit_loglog_slope(const std::vector<ProfilePoint>& points, long exclude_top_k,
                                  double floor) {
    std::vector<double> lx, ly;
    for (const auto& p : points) {
        if (p.rank <= exclude_top_k) continue;
        if (!(p.lambda > floor) || !(p.proj > floor)) continue;
        lx.push_back(std::log(p.lambda));
        ly.push_back(std::log(p.proj));
    }
    const std::size_t k = lx.size();
    if (k < 3)
        throw InsufficientPointsError("fit_loglog_slope: fewer than 3 points after filtering");

    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < k; ++i) {
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / static_cast<double>(k);
    const double my = sy / static_cast<double>(k);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    LoglogFit fit;
    fit.alpha = sxy / sxx;
    fit.intercept = my - fit.alpha * mx;
    fit.r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.points_used = static_cast<long>(k);
    return fit;
}

inline AlignmentProfile make_profile(const SpectralDecomposition& decomp, const Vector& target,
                                     long exclude_top_k = 10, double floor = 1e-14) {
    AlignmentProfile prof;
    prof.excluded_top_k = exclude_top_k;
    prof.floor = floor;
    const auto projs = eigen_projections(decomp, target);
    for (std::size_t i = 0; i < projs.size(); ++i) {
        prof.points.push_back({static_cast<long>(i) + 1, decomp.eigenvalues(static_cast<Eigen::Index>(i)),
                               projs[i]});
    }
    const auto fit = fit_loglog_slope(prof.points, exclude_top_k, floor);
    prof.alpha = fit.alpha;
    prof.log_intercept = fit.intercept;
    prof.r_squared = fit.r_squared;
    return prof;
}

inline AlignmentBand estimate_alignment_band(const SpectralDecomposition& decomp, const Vector& r0,
                                             double floor = 1e-14, long exclude_top_k = 10) {
    const auto projs = eigen_projections(decomp, r0);
    AlignmentBand band;
    for (std::size_t i = 0; i < projs.size(); ++i) {
        const long rank = static_cast<long>(i) + 1;
        if (rank <= exclude_top_k) continue;
        const double lambda = decomp.eigenvalues(static_cast<Eigen::Index>(i));
        if (!(lambda > floor)) continue;
        band.retained_indices.push_back(rank);
        band.ratios.push_back(projs[i] / lambda);
    }
    if (band.ratios.size() < 1)
        throw InsufficientPointsError("estimate_alignment_band: no retained indices");
    double lo = band.ratios.front(), hi = band.ratios.front();
    for (double r : band.ratios) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    band.c = (hi + lo) / 2.0;
    band.delta = (hi - lo) / 2.0;
    band.degenerate = (lo == 0.0);
    band.dominance = (band.delta > 0.0) ? band.c / band.delta
                                        : std::numeric_limits<double>::infinity();
    return band;
}

inline PowerLawFit fit_power_law(const Vector& eigenvalues, long fit_begin, long fit_end) {
    if (fit_begin < 1 || fit_end > eigenvalues.size() || fit_begin > fit_end)
        throw IndexError("fit_power_law: invalid fit range");
    std::vector<ProfilePoint> pts;
    for (long i = fit_begin; i <= fit_end; ++i) {
        const double lambda = eigenvalues(i - 1);
        if (!(lambda > 0.0))
            throw NonPositiveEigenvalueError("fit_power_law: eigenvalue at rank " +
                                             std::to_string(i) + " is not positive");
        // Reuse the log-log LS by treating rank as the abscissa.
        pts.push_back({i, static_cast<double>(i), lambda});
    }
    const auto fit = fit_loglog_slope(pts, 0, 0.0);
    PowerLawFit out;
    out.q = -fit.alpha;
    out.fit_begin = fit_begin;
    out.fit_end = fit_end;
    double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
    for (long i = fit_begin; i <= fit_end; ++i) {
        const double v = eigenvalues(i - 1) * std::pow(static_cast<double>(i), out.q);
        c1 = std::min(c1, v);
        c2 = std::max(c2, v);
    }
    out.c1 = c1;
    out.c2 = c2;
    return out;
}

// Kernel source for batched profiles: either the analytic infinite-width
// kernel or a freshly initialized finite-width network per batch (the network
// seed is derived from (seed, batch index), giving seed-averaged profiles
// when the batch covers the full dataset).
struct EmpiricalKernelSpec {
    Eigen::Index width = 0;
    int hidden_layers = 0;
};
using KernelSource = std::variant<AnalyticNTKConfig, EmpiricalKernelSpec>;

enum class TargetKind { labels, residual };

// Per batch: build the kernel on the sampled rows, eigendecompose, project the
// target; then average lambda and proj across batches at matched rank and fit
// the slope on the averaged profile.
inline AlignmentProfile batched_alignment(const Matrix& x, const Vector& y,
                                          const KernelSource& source, Eigen::Index batch_size,
                                          long num_batches, std::uint64_t seed,
                                          TargetKind target_kind, long exclude_top_k = 10,
                                          double floor = 1e-14) {
    if (batch_size > x.rows() || batch_size < 1)
        throw InvalidSizeError("batched_alignment: batch_size out of range");
    const auto batches = make_batches(x.rows(), batch_size, num_batches, seed);

    Vector mean_lambda = Vector::Zero(batch_size);
    Vector mean_proj = Vector::Zero(batch_size);
    for (std::size_t b = 0; b < batches.size(); ++b) {
        Matrix xb(batch_size, x.cols());
        Vector yb(batch_size);
        for (Eigen::Index i = 0; i < batch_size; ++i) {
            xb.row(i) = x.row(batches[b][static_cast<std::size_t>(i)]);
            yb(i) = y(batches[b][static_cast<std::size_t>(i)]);
        }

        SpectralDecomposition decomp;
        Vector target;
        if (std::holds_alternative<AnalyticNTKConfig>(source)) {
            if (target_kind == TargetKind::residual)
                throw DomainError("batched_alignment: residual target needs a finite-width network");
            decomp = eigh_symmetric(build_ntk_matrix(xb, std::get<AnalyticNTKConfig>(source)));
            target = yb;
        } else {
            const auto& spec = std::get<EmpiricalKernelSpec>(source);
            RandomStream mix(seed, static_cast<std::uint64_t>(b) + 0x9d2c5680ULL);
            const auto net = init_network(x.cols(), spec.width, spec.hidden_layers, mix.next_u64());
            decomp = eigh_symmetric(empirical_ntk(net, xb));
            target = (target_kind == TargetKind::residual) ? Vector(forward(net, xb) - yb) : yb;
        }
        const auto projs = eigen_projections(decomp, target);
        for (Eigen::Index i = 0; i < batch_size; ++i) {
            mean_lambda(i) += decomp.eigenvalues(i);
            mean_proj(i) += projs[static_cast<std::size_t>(i)];
        }
    }
    mean_lambda /= static_cast<double>(batches.size());
    mean_proj /= static_cast<double>(batches.size());

    AlignmentProfile prof;
    prof.excluded_top_k = exclude_top_k;
    prof.floor = floor;
    for (Eigen::Index i = 0; i < batch_size; ++i)
        prof.points.push_back({static_cast<long>(i) + 1, mean_lambda(i), mean_proj(i)});
    const auto fit = fit_loglog_slope(prof.points, exclude_top_k, floor);
    prof.alpha = fit.alpha;
    prof.log_intercept = fit.intercept;
    prof.r_squared = fit.r_squared;
    return prof;
}

}  // namespace ntkspectra

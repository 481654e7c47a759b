#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ntkspectra/errors.hpp"

namespace ntkspectra {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Dense symmetric matrix. Symmetrized as (A + A^T)/2 at construction so the
// symmetry invariant holds exactly.
class SymMatrix {
public:
    explicit SymMatrix(Matrix a) : m_((a + a.transpose()) / 2.0) {
        if (m_.rows() != m_.cols())
            throw ShapeMismatchError("SymMatrix: matrix must be square");
        if (m_.rows() < 1)
            throw ShapeMismatchError("SymMatrix: order must be >= 1");
        if (!m_.allFinite())
            throw NonFiniteError("SymMatrix: non-finite entry");
    }

    static SymMatrix identity(Eigen::Index n) { return SymMatrix(Matrix::Identity(n, n)); }

    Eigen::Index order() const { return m_.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
    const Matrix& mat() const { return m_; }

private:
    Matrix m_;
};

// Ordered eigenpairs of a symmetric matrix. Eigenvalues descending, columns
// of `eigenvectors` unit-norm, sign fixed so the first nonzero component of
// each eigenvector is positive.
struct SpectralDecomposition {
    Vector eigenvalues;
    Matrix eigenvectors;

    double lambda_max() const { return eigenvalues(0); }
    double lambda_min() const { return eigenvalues(eigenvalues.size() - 1); }
};

namespace detail {

inline double offdiag_fro(const Matrix& a) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = i + 1; j < a.cols(); ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
}

}  // namespace detail

// Cyclic Jacobi with threshold sweeps. Stops when the off-diagonal Frobenius
// norm drops below 1e-13 * ||A||_F, or fails after 100 sweeps.
inline SpectralDecomposition eigh_symmetric(const SymMatrix& sym) {
    const Eigen::Index n = sym.order();
    Matrix a = sym.mat();
    Matrix v = Matrix::Identity(n, n);

    const double norm_a = std::max(a.norm(), 1e-300);
    const double tol = 1e-13 * norm_a;
    constexpr int kMaxSweeps = 100;

    int sweep = 0;
    while (detail::offdiag_fro(a) > tol) {
        if (++sweep > kMaxSweeps)
            throw NoConvergenceError("eigh_symmetric: Jacobi did not converge in 100 sweeps");
        // Skip rotations on entries already negligible this sweep.
        const double thresh = tol / static_cast<double>(n);
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= thresh) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                // Smaller-magnitude root of t^2 + 2*tau*t - 1 = 0.
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        Vector col = v.col(order[static_cast<std::size_t>(k)]);
        col.normalize();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (col(i) != 0.0) {
                if (col(i) < 0.0) col = -col;
                break;
            }
        }
        out.eigenvectors.col(k) = col;
    }
    return out;
}

// Cholesky solve. Throws NotSPD on a non-positive pivot.
inline Vector solve_spd(const SymMatrix& sym, const Vector& b) {
    const Eigen::Index n = sym.order();
    if (b.size() != n) throw ShapeMismatchError("solve_spd: size mismatch");
    Matrix l = Matrix::Zero(n, n);
    const Matrix& a = sym.mat();
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = a(j, j) - l.row(j).head(j).squaredNorm();
        if (d <= 0.0) throw NotSPDError("solve_spd: non-positive pivot at index " + std::to_string(j));
        l(j, j) = std::sqrt(d);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
        }
    }
    // Forward then backward substitution.
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i)
        y(i) = (b(i) - l.row(i).head(i).dot(y.head(i))) / l(i, i);
    Vector x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i)
        x(i) = (y(i) - l.col(i).tail(n - 1 - i).dot(x.tail(n - 1 - i))) / l(i, i);
    return x;
}

// (I - eta*A)^t p by t explicit matrix-vector products. Brute-force oracle.
inline Vector apply_matrix_power(const SymMatrix& a, Vector p, long t, double eta) {
    if (t < 0) throw DomainError("apply_matrix_power: t must be >= 0");
    if (p.size() != a.order()) throw ShapeMismatchError("apply_matrix_power: size mismatch");
    for (long k = 0; k < t; ++k) p -= eta * (a.mat() * p);
    if (!p.allFinite()) throw NonFiniteError("apply_matrix_power: non-finite result");
    return p;
}

// Clamp small negative eigenvalues of a numerically PSD spectrum to zero.
// Magnitudes above 1e-10 * lambda_max are a real violation.
inline Vector clamp_psd(const Vector& eigenvalues) {
    const double lmax = eigenvalues.maxCoeff();
    const double tol = 1e-10 * std::max(lmax, 0.0);
    Vector out = eigenvalues;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        if (out(i) < 0.0) {
            if (-out(i) > tol) throw NotSPDError("clamp_psd: eigenvalue below -1e-10*lambda_max");
            out(i) = 0.0;
        }
    }
    return out;
}

}  // namespace ntkspectra

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ntkspectra/alignment.hpp"
#include "ntkspectra/dataio.hpp"

using namespace ntkspectra;

namespace {

SpectralDecomposition diag_decomposition(std::initializer_list<double> lambdas) {
    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(lambdas.size()),
                            static_cast<Eigen::Index>(lambdas.size()));
    Eigen::Index i = 0;
    for (double l : lambdas) a(i, i) = l, ++i;
    return eigh_symmetric(SymMatrix(a));
}

SpectralDecomposition random_spd_decomposition(Eigen::Index n, std::uint64_t seed) {
    RandomStream rng(seed, 0);
    Matrix j(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k) j(i, k) = rng.next_gaussian();
    return eigh_symmetric(SymMatrix(j * j.transpose() / static_cast<double>(n) +
                                    0.1 * Matrix::Identity(n, n)));
}

}  // namespace

TEST_CASE("projection onto an eigenvector is a unit spike") {
    const auto d = random_spd_decomposition(8, 3);
    const Vector target = d.eigenvectors.col(2);
    const auto projs = eigen_projections(d, target);
    for (std::size_t i = 0; i < projs.size(); ++i)
        CHECK(projs[i] == doctest::Approx(i == 2 ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
}

TEST_CASE("projections satisfy Parseval and match direct dots") {
    const auto d = random_spd_decomposition(16, 9);
    RandomStream rng(4, 1);
    Vector y(16);
    for (Eigen::Index i = 0; i < 16; ++i) y(i) = rng.next_gaussian();
    const auto projs = eigen_projections(d, y);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < 16; ++i) {
        const double dot = d.eigenvectors.col(i).dot(y);
        CHECK(projs[static_cast<std::size_t>(i)] == doctest::Approx(dot * dot).epsilon(1e-12));
        sum += projs[static_cast<std::size_t>(i)];
    }
    CHECK(sum == doctest::Approx(y.squaredNorm()).epsilon(1e-8));
}

TEST_CASE("eigen_projections rejects size mismatch") {
    const auto d = random_spd_decomposition(4, 1);
    CHECK_THROWS_AS(eigen_projections(d, Vector::Zero(5)), ShapeMismatchError);
}

TEST_CASE("log-log fit recovers exact power laws") {
    std::vector<ProfilePoint> pts;
    for (long i = 1; i <= 40; ++i) {
        const double lambda = std::pow(static_cast<double>(i), -1.5);
        pts.push_back({i, lambda, lambda * lambda});
    }
    auto fit = fit_loglog_slope(pts, 0, 0.0);
    CHECK(fit.alpha == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));

    for (auto& p : pts) p.proj = 0.7 * p.lambda;
    fit = fit_loglog_slope(pts, 0, 0.0);
    CHECK(fit.alpha == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::exp(fit.intercept) == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("log-log fit agrees with an independent least-squares solve") {
    RandomStream rng(11, 0);
    std::vector<ProfilePoint> pts;
    for (long i = 1; i <= 60; ++i) {
        const double lambda = std::pow(static_cast<double>(i), -2.0);
        const double noise = std::exp(0.3 * rng.next_gaussian());
        pts.push_back({i, lambda, std::pow(lambda, 1.3) * noise});
    }
    const auto fit = fit_loglog_slope(pts, 0, 0.0);

    Matrix design(60, 2);
    Vector rhs(60);
    for (long i = 0; i < 60; ++i) {
        design(i, 0) = std::log(pts[static_cast<std::size_t>(i)].lambda);
        design(i, 1) = 1.0;
        rhs(i) = std::log(pts[static_cast<std::size_t>(i)].proj);
    }
    const Vector beta = design.colPivHouseholderQr().solve(rhs);
    CHECK(fit.alpha == doctest::Approx(beta(0)).epsilon(1e-10));
    CHECK(fit.intercept == doctest::Approx(beta(1)).epsilon(1e-8));
    CHECK(std::abs(fit.alpha - 1.3) <= 0.15);
}

TEST_CASE("log-log fit needs at least three surviving points") {
    std::vector<ProfilePoint> pts = {{1, 1.0, 1.0}, {2, 0.5, 0.25}};
    CHECK_THROWS_AS(fit_loglog_slope(pts, 0, 0.0), InsufficientPointsError);
    pts.push_back({3, 1e-20, 1e-20});
    CHECK_THROWS_AS(fit_loglog_slope(pts, 0, 1e-14), InsufficientPointsError);
}

TEST_CASE("alpha is invariant under target rescaling") {
    const auto d = random_spd_decomposition(30, 5);
    RandomStream rng(6, 2);
    Vector y(30);
    for (Eigen::Index i = 0; i < 30; ++i) y(i) = rng.next_gaussian();
    const auto p1 = make_profile(d, y, 0, 1e-14);
    const auto p2 = make_profile(d, Vector(100.0 * y), 0, 1e-14);
    CHECK(p1.alpha == doctest::Approx(p2.alpha).epsilon(1e-10));
}

TEST_CASE("a target built from eigenvalue-weighted eigenvectors gives alpha 2") {
    const auto d = random_spd_decomposition(20, 8);
    const Vector y = d.eigenvectors * d.eigenvalues;
    const auto prof = make_profile(d, y, 0, 1e-14);
    CHECK(prof.alpha == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(prof.r_squared == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("alignment band on exactly aligned targets") {
    const auto d = diag_decomposition({1.0, 0.5, 0.25});
    Vector y(3);
    y << std::sqrt(3.0 * 1.0), std::sqrt(3.0 * 0.5), std::sqrt(3.0 * 0.25);
    const auto band = estimate_alignment_band(d, y, 1e-14, 0);
    CHECK(band.c == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(band.delta == doctest::Approx(0.0).scale(1.0));
    CHECK(std::isinf(band.dominance));
    CHECK_FALSE(band.degenerate);
}

TEST_CASE("alignment band with ratio spread") {
    const auto d = diag_decomposition({1.0, 0.5});
    Vector y(2);
    y << std::sqrt(2.0), std::sqrt(2.0);  // ratios 2 and 4
    const auto band = estimate_alignment_band(d, y, 1e-14, 0);
    CHECK(band.c == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(band.delta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(band.dominance == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("alignment band flags a vanishing projection") {
    const auto d = diag_decomposition({1.0, 0.5});
    Vector y(2);
    y << 1.0, 0.0;
    const auto band = estimate_alignment_band(d, y, 1e-14, 0);
    CHECK(band.degenerate);
    CHECK(band.c == doctest::Approx(band.delta));
}

TEST_CASE("alignment band requires retained indices") {
    const auto d = diag_decomposition({1.0, 0.5});
    CHECK_THROWS_AS(estimate_alignment_band(d, Vector::Ones(2), 1e-14, 10),
                    InsufficientPointsError);
}

TEST_CASE("power-law fit on exact spectra") {
    Vector ev(50);
    for (Eigen::Index i = 0; i < 50; ++i) ev(i) = std::pow(static_cast<double>(i + 1), -2.0);
    auto fit = fit_power_law(ev, 1, 50);
    CHECK(fit.q == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.c1 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fit.c2 == doctest::Approx(1.0).epsilon(1e-10));

    for (Eigen::Index i = 0; i < 50; ++i) ev(i) = 2.0 * std::pow(static_cast<double>(i + 1), -1.5);
    fit = fit_power_law(ev, 5, 40);
    CHECK(fit.q == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(fit.c1 == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.c2 == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("power-law fit rejects bad ranges and nonpositive eigenvalues") {
    Vector ev(5);
    ev << 5, 4, 3, 2, 0.0;
    CHECK_THROWS_AS(fit_power_law(ev, 0, 4), IndexError);
    CHECK_THROWS_AS(fit_power_law(ev, 3, 2), IndexError);
    CHECK_THROWS_AS(fit_power_law(ev, 1, 6), IndexError);
    CHECK_THROWS_AS(fit_power_law(ev, 1, 5), NonPositiveEigenvalueError);
}

TEST_CASE("one full batch reproduces the unbatched profile") {
    SyntheticSpec spec;
    spec.n = 30;
    spec.d = 5;
    spec.seed = 12;
    const auto ds = generate_sphere_dataset(spec);
    const AnalyticNTKConfig cfg{2, true};
    const auto full = make_profile(eigh_symmetric(build_ntk_matrix(ds.x, cfg)), ds.y, 10, 1e-14);
    const auto batched =
        batched_alignment(ds.x, ds.y, cfg, 30, 1, 7, TargetKind::labels, 10, 1e-14);
    CHECK(batched.alpha == doctest::Approx(full.alpha).epsilon(1e-8));
    for (std::size_t i = 0; i < full.points.size(); ++i) {
        CHECK(batched.points[i].lambda ==
              doctest::Approx(full.points[i].lambda).epsilon(1e-8).scale(1e-12));
        CHECK(batched.points[i].proj ==
              doctest::Approx(full.points[i].proj).epsilon(1e-7).scale(1e-10));
    }
}

TEST_CASE("residual target requires a finite-width source") {
    SyntheticSpec spec;
    spec.n = 12;
    spec.d = 4;
    spec.seed = 2;
    const auto ds = generate_sphere_dataset(spec);
    CHECK_THROWS_AS(batched_alignment(ds.x, ds.y, AnalyticNTKConfig{2, true}, 12, 1, 0,
                                      TargetKind::residual),
                    DomainError);
    CHECK_THROWS_AS(batched_alignment(ds.x, ds.y, AnalyticNTKConfig{2, true}, 13, 1, 0,
                                      TargetKind::labels),
                    InvalidSizeError);
}

TEST_CASE("batched empirical alpha is stable across batch seeds") {
    SyntheticSpec spec;
    spec.n = 60;
    spec.d = 8;
    spec.seed = 19;
    const auto ds = generate_sphere_dataset(spec);
    const EmpiricalKernelSpec net_spec{512, 2};
    const auto a = batched_alignment(ds.x, ds.y, net_spec, 40, 8, 1, TargetKind::labels, 5, 1e-14);
    const auto b = batched_alignment(ds.x, ds.y, net_spec, 40, 8, 2, TargetKind::labels, 5, 1e-14);
    CHECK(std::isfinite(a.alpha));
    CHECK(std::abs(a.alpha - b.alpha) <= 0.3);
}

TEST_CASE("residual profile from a fresh network is well defined") {
    SyntheticSpec spec;
    spec.n = 24;
    spec.d = 6;
    spec.seed = 23;
    const auto ds = generate_sphere_dataset(spec);
    const auto prof = batched_alignment(ds.x, ds.y, EmpiricalKernelSpec{256, 2}, 24, 2, 3,
                                        TargetKind::residual, 4, 1e-14);
    CHECK(std::isfinite(prof.alpha));
    CHECK(prof.points.size() == 24);
    for (const auto& p : prof.points) CHECK(p.proj >= 0.0);
}

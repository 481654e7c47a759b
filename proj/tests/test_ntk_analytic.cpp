#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ntkspectra/dataio.hpp"
#include "ntkspectra/ntk_analytic.hpp"

using namespace ntkspectra;

TEST_CASE("diagonal entry is exactly 1 when normalized") {
    for (int l : {1, 2, 3, 5, 8}) CHECK(relu_ntk_entry(1.0, {l, true}) == 1.0);
}

TEST_CASE("orthogonal inputs, one hidden layer") {
    // Sigma^0 = 0, kappa0(0) = 1/2, kappa1(0) = 1/pi; Theta^1 = 1/pi, halved.
    CHECK(relu_ntk_entry(0.0, {1, true}) == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("domain clamp and error") {
    CHECK(relu_ntk_entry(1.0 + 5e-13, {2, true}) == 1.0);
    CHECK_THROWS_AS(relu_ntk_entry(1.01, {2, true}), DomainError);
}

TEST_CASE("near-one asymptotic matches the L/(2pi) slope") {
    const double theta = 1e-3;
    for (int l : {1, 2, 3, 5}) {
        const double k = relu_ntk_entry(std::cos(theta), {l, true});
        const double slope = (1.0 - k) / theta;
        CHECK(std::abs(slope - l / (2.0 * M_PI)) <= 0.1 * l / (2.0 * M_PI));
    }
}

TEST_CASE("asymptotic slope error shrinks with theta") {
    for (int l : {1, 2, 3, 5}) {
        double prev_err = std::numeric_limits<double>::infinity();
        for (double theta : {1e-2, 1e-3, 1e-4}) {
            const double slope = (1.0 - relu_ntk_entry(std::cos(theta), {l, true})) / theta;
            const double err = std::abs(slope / (l / (2.0 * M_PI)) - 1.0);
            CHECK(err < prev_err);
            prev_err = err;
        }
    }
}

TEST_CASE("kernel entry is monotone increasing on [0, 1]") {
    // Not monotone near u = -1 (the kappa_0 derivative blows up there), but on
    // nonnegative correlations every term of the recursion is increasing.
    for (int l : {1, 2, 3, 5}) {
        double prev = relu_ntk_entry(0.0, {l, true});
        for (int i = 1; i <= 1000; ++i) {
            const double u = static_cast<double>(i) / 1000.0;
            const double cur = relu_ntk_entry(u, {l, true});
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("build_ntk_matrix on two orthogonal unit vectors") {
    Matrix x = Matrix::Zero(2, 3);
    x(0, 0) = 1.0;
    x(1, 1) = 1.0;
    const auto k = build_ntk_matrix(x, {1, true});
    CHECK(k(0, 0) == 1.0);
    CHECK(k(1, 1) == 1.0);
    CHECK(k(0, 1) == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("build_ntk_matrix rejects non-unit rows") {
    Matrix x = Matrix::Zero(2, 3);
    x(0, 0) = 1.0;
    x(1, 1) = 2.0;
    CHECK_THROWS_AS(build_ntk_matrix(x, {1, true}), NotUnitNormError);
}

TEST_CASE("analytic kernel is numerically PSD") {
    SyntheticSpec spec;
    spec.n = 24;
    spec.d = 6;
    spec.seed = 11;
    const auto ds = generate_sphere_dataset(spec);
    const auto d = eigh_symmetric(build_ntk_matrix(ds.x, {3, true}));
    CHECK(d.lambda_min() >= -1e-10 * d.lambda_max());
}

TEST_CASE("duplicate row gives a near-zero eigenvalue") {
    SyntheticSpec spec;
    spec.n = 8;
    spec.d = 5;
    spec.seed = 2;
    auto ds = generate_sphere_dataset(spec);
    ds.x.row(7) = ds.x.row(0);
    const auto k = build_ntk_matrix(ds.x, {2, true});
    CHECK(k(0, 7) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eigh_symmetric(k).lambda_min() <= 1e-10);
}

TEST_CASE("two_point_analysis rejects degenerate angles") {
    CHECK_THROWS_AS(two_point_analysis(0.0, {1, true}, 0, 1, 1), DegenerateInputError);
    CHECK_THROWS_AS(two_point_analysis(M_PI, {1, true}, 0, 1, 1), DegenerateInputError);
}

TEST_CASE("two_point_analysis with symmetric labels") {
    const auto r = two_point_analysis(0.7, {2, true}, 1.0, 1.0, 3.0);
    CHECK(r.proj_min == 0.0);
    CHECK(r.proj_max == doctest::Approx(2.0));
    CHECK(r.lambda_max + r.lambda_min == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("two_point_analysis small-eigenvalue slope at depth 5") {
    const auto r = two_point_analysis(1e-3, {5, true}, 0.0, 0.0, 1.0);
    const double a = 5.0 / (2.0 * M_PI);
    CHECK(std::abs(r.lambda_min / 1e-3 - a) <= 0.1 * a);
}

TEST_CASE("two_point Lipschitz inequality holds for admissible labels") {
    // |y1 - y2| <= L_y ||x1 - x2|| implies (v_min . y)^2 <= L_y^2 (1 - cos theta).
    SyntheticSpec spec;
    spec.n = 2;
    spec.d = 4;
    spec.seed = 5;
    for (double theta : {0.3, 0.05, 1e-3}) {
        const double l_y = 2.0;
        const double dist = std::sqrt(2.0 * (1.0 - std::cos(theta)));
        const double y1 = 0.4, y2 = 0.4 + 0.99 * l_y * dist;
        const auto r = two_point_analysis(theta, {3, true}, y1, y2, l_y);
        CHECK(r.proj_min <= r.lipschitz_rhs);
    }
}

TEST_CASE("predicted eigenvector tail vanishes for a symmetric block") {
    // Third input orthogonal to both pair members: a_vec == b_vec.
    Matrix x = Matrix::Zero(3, 4);
    const double theta = 0.01;
    x(0, 0) = 1.0;
    x(1, 0) = std::cos(theta);
    x(1, 1) = std::sin(theta);
    x(2, 2) = 1.0;
    const auto k = build_ntk_matrix(x, {2, true});
    const auto pred = predicted_small_eigenpair(k, {0, 1}, theta, {2, true});
    CHECK(pred.v_pred(2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pred.v_pred(0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(pred.v_pred(1) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("predicted eigenpair matches the true smallest one") {
    SyntheticSpec spec;
    spec.n = 10;
    spec.d = 8;
    spec.seed = 17;
    spec.near_dup_pairs = {{1, 1e-3}};
    const auto ds = generate_sphere_dataset(spec);
    const auto k = build_ntk_matrix(ds.x, {3, true});
    // The injected duplicate is the last row, partnered with row 0.
    const auto pred = predicted_small_eigenpair(k, {0, 9}, 1e-3, {3, true});
    CHECK(std::abs(pred.lambda_pred - pred.matched_lambda_true) <= 0.2 * pred.matched_lambda_true);
    CHECK(pred.cosine_to_true >= 0.99);
}

TEST_CASE("predicted_small_eigenpair rejects bad pairs") {
    const auto k = SymMatrix::identity(4);
    CHECK_THROWS_AS(predicted_small_eigenpair(k, {1, 1}, 0.1, {1, true}), IndexError);
    CHECK_THROWS_AS(predicted_small_eigenpair(k, {0, 7}, 0.1, {1, true}), IndexError);
}

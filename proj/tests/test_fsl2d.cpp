#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "properties.hpp"

#include "fsl/bench.hpp"
#include "fsl/fsl2d.hpp"
#include "fsl/logcost.hpp"

#include <cmath>

using namespace fsl;

namespace {

Matrix dense_reflector(const Points2D& xs, const Points2D& ys, double kappa, int L) {
    Matrix k(xs.rows(), ys.rows());
    for (Index i = 0; i < xs.rows(); ++i) {
        for (Index j = 0; j < ys.rows(); ++j) {
            k(i, j) = std::pow(1.0 - kappa * (xs(i, 0) * ys(j, 0) + xs(i, 1) * ys(j, 1)), L);
        }
    }
    return k;
}

}  // namespace

TEST_CASE("TriangularIndex") {
    CHECK(TriangularIndex::index(0, 0) == 0);
    CHECK(TriangularIndex::index(0, 1) == 1);
    CHECK(TriangularIndex::index(1, 0) == 2);
    CHECK(TriangularIndex::index(0, 2) == 3);
    const TriangularIndex t(10);
    CHECK(t.size() == 66);
    for (Index r = 0; r < t.size(); ++r) {
        const auto [p, q] = t.pq(r);
        CHECK(p + q <= 10);
        CHECK(TriangularIndex::index(p, q) == r);
    }
    CHECK_THROWS_AS(t.pq(66), ConfigError);
    CHECK_THROWS_AS(TriangularIndex(-1), ConfigError);
}

TEST_CASE("MonomialMatrix2D") {
    Points2D pts(3, 2);
    pts << 0.5, 0.2, 0.1, 0.9, 0.3, 0.3;
    const MonomialMatrix2D m(pts, 6);
    for (Index r = 0; r < m.index_map().size(); ++r) {
        const auto [p, q] = m.index_map().pq(r);
        for (Index j = 0; j < 3; ++j) {
            const double want = std::pow(pts(j, 0), p) * std::pow(pts(j, 1), q);
            CHECK(m.values()(r, j) == doctest::Approx(want).epsilon(1e-13));
        }
    }
}

TEST_CASE("reflector coefficients") {
    const Vector b1 = reflector_coefficients(1.0, 1);
    CHECK(b1.size() == 3);
    CHECK(b1[TriangularIndex::index(0, 0)] == 1.0);
    CHECK(b1[TriangularIndex::index(1, 0)] == -1.0);
    CHECK(b1[TriangularIndex::index(0, 1)] == -1.0);

    const Vector b2 = reflector_coefficients(0.5, 2);
    CHECK(b2[TriangularIndex::index(0, 0)] == 1.0);
    CHECK(b2[TriangularIndex::index(1, 0)] == -1.0);
    CHECK(b2[TriangularIndex::index(0, 1)] == -1.0);
    CHECK(b2[TriangularIndex::index(2, 0)] == 0.25);
    CHECK(b2[TriangularIndex::index(0, 2)] == 0.25);
    CHECK(b2[TriangularIndex::index(1, 1)] == 0.5);

    const Vector b8 = reflector_coefficients(0.25, 8);
    for (int p = 0; p <= 8; ++p) {
        for (int q = 0; p + q <= 8; ++q) {
            const double want =
                std::pow(-0.25, p + q) * oracle::factorial_multinomial(8, {p, q, 8 - p - q});
            CHECK(b8[TriangularIndex::index(p, q)] == doctest::Approx(want).epsilon(1e-15));
        }
    }
}

TEST_CASE("L = 1 kernel is 1 - <x, y>") {
    Points2D xs(2, 2), ys(2, 2);
    xs << 0.1, 0.2, 0.3, 0.4;
    ys << 0.5, 0.6, 0.7, 0.1;
    const FslKernel2D k = build_fsl2d(1.0, xs, ys, 1);
    const Matrix dense = k.materialize(10);
    for (Index i = 0; i < 2; ++i) {
        for (Index j = 0; j < 2; ++j) {
            const double want = 1.0 - xs(i, 0) * ys(j, 0) - xs(i, 1) * ys(j, 1);
            CHECK(dense(i, j) == doctest::Approx(want).epsilon(1e-15));
        }
    }
}

TEST_CASE("apply small cases") {
    const Points2D g = grid_points(4, default_grid_length(4));
    CHECK(g.rows() == 16);
    const FslKernel2D k = build_fsl2d(1.0, g, g, 3);
    CHECK(k.apply(Vector::Zero(16)) == Vector::Zero(16));

    Rng rng(5);
    Vector xi(16);
    for (Index i = 0; i < 16; ++i) xi[i] = rng.uniform_open();
    const Matrix dense = dense_reflector(g, g, 1.0, 3);
    CHECK(oracle::max_rel_diff(k.apply(xi), oracle::matvec(dense, xi)) <= 1e-10);
    CHECK(oracle::max_rel_diff(k.apply_transpose(xi), oracle::matvec_transpose(dense, xi)) <= 1e-10);

    Points2D x1(1, 2), y1(1, 2);
    x1 << 0.2, 0.3;
    y1 << 0.4, 0.1;
    const FslKernel2D single = build_fsl2d(0.5, x1, y1, 5);
    const Vector two = Vector::Constant(1, 2.0);
    CHECK(single.apply(two)[0] == doctest::Approx(2.0 * std::pow(1.0 - 0.5 * 0.11, 5)).epsilon(1e-14));
}

TEST_CASE("random grids against the dense kernel") {
    const props::Outcome d = props::fsl2d_matches_dense(100, 3);
    INFO(d.first_failure);
    CHECK(d.ok());
    const props::Outcome adj = props::fsl2d_adjoint(100, 4);
    INFO(adj.first_failure);
    CHECK(adj.ok());
}

TEST_CASE("build_fsl2d validation and flags") {
    const Points2D g = grid_points(20, default_grid_length(20));
    CHECK_NOTHROW(build_fsl2d(1.0, g, g, 10));
    CHECK_NOTHROW(build_fsl2d(0.25, g, g, 10));
    CHECK_FALSE(build_fsl2d(1.0, g, g, 10).expansion_not_cheaper());
    CHECK(build_fsl2d(1.0, g, g, 20).expansion_not_cheaper());

    Points2D far(1, 2);
    far << 0.9, 0.9;
    CHECK_THROWS_AS(build_fsl2d(1.0, far, far, 3), SupportError);
    CHECK_THROWS_AS(build_fsl2d(1.0, g, g, 0), ConfigError);
}

TEST_CASE("work counter") {
    auto count_at = [](int n) {
        const Points2D g = grid_points(n, default_grid_length(n));
        const FslKernel2D k(g, g, 1.0, 10);
        k.reset_counters();
        k.apply(Vector::Ones(g.rows()));
        return static_cast<double>(k.multiply_adds());
    };
    // 10x10 -> 20x20 quadruples the point count.
    const double c10 = count_at(10), c20 = count_at(20);
    CHECK(c20 / c10 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("grid_points and parse_points_json") {
    const Points2D g = grid_points(2, 0.1);
    Points2D want(4, 2);
    want << 0.1, 0.1, 0.1, 0.2, 0.2, 0.1, 0.2, 0.2;
    CHECK(g.isApprox(want));
    CHECK(default_grid_length(20) == doctest::Approx(0.7 / 22.0));
    CHECK_THROWS_AS(grid_points(0, 0.1), ConfigError);

    CHECK(parse_points_json(R"({"n": 2, "h": 0.1})").isApprox(want));
    CHECK(parse_points_json("[[0.1, 0.1], [0.1, 0.2], [0.2, 0.1], [0.2, 0.2]]").isApprox(want));
    CHECK_THROWS_AS(parse_points_json("[[0.1]]"), ConfigError);
    CHECK_THROWS_AS(parse_points_json("nope"), ConfigError);
}

TEST_CASE("full Sinkhorn pipeline matches dense on the 20x20 grid") {
    const Points2D g = grid_points(20, default_grid_length(20));
    const DiscreteMeasure a = gen_random_measure(400, derive_seed(42, 1));
    const DiscreteMeasure b = gen_random_measure(400, derive_seed(42, 2));
    for (double kappa : {1.0, 0.5}) {
        const FslKernel2D k = build_fsl2d(kappa, g, g, 10);
        const DenseKernel d = dense_kernel(cost_matrix(ReflectorRefractorCost(kappa), g, g), 0.1);
        const ScalingPair s1 = run_sinkhorn(k, a, b, StoppingRule::fixed(1000));
        const ScalingPair s2 = run_sinkhorn(d, a, b, StoppingRule::fixed(1000));
        CHECK(plan_frobenius_distance(k, s1, d, s2) <= 1e-12);
    }
}

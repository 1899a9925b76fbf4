#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lossybs/dilation.hpp"
#include "lossybs/sampling.hpp"

using namespace lossybs;
using Catch::Matchers::WithinAbs;

TEST_CASE("dilation blocks square to the noise commutators") {
    const ScatteringMatrix s(0.6, 0.3, 0.55, 0.45, 0.8, 2.2);
    const Eigen::Matrix4cd u = unitary_dilation(s);
    const Eigen::Matrix2cd m = complex_matrix(s);
    const Eigen::Matrix2cd b = u.topRightCorner<2, 2>();
    const Eigen::Matrix2cd c = u.bottomLeftCorner<2, 2>();
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    CHECK((b * b - (id - m * m.adjoint())).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((c * c - (id - m.adjoint() * m)).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((b - b.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((c - c.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("dilation of reference circuits") {
    SECTION("lossless: block diagonal, loss modes decoupled") {
        const double u = 1.0 / std::sqrt(2.0);
        const ScatteringMatrix s(u, u, u, u, pi / 2, pi / 2);
        const Eigen::Matrix4cd d = unitary_dilation(s);
        CHECK(d.topRightCorner<2, 2>().cwiseAbs().maxCoeff() <= 1e-7);
        CHECK(d.bottomLeftCorner<2, 2>().cwiseAbs().maxCoeff() <= 1e-7);
        const Eigen::Matrix2cd m = complex_matrix(s);
        CHECK((d.bottomRightCorner<2, 2>() + m.adjoint())
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }
    SECTION("fully absorbing: everything routed to the loss modes") {
        const Eigen::Matrix4cd d =
            unitary_dilation(ScatteringMatrix(0, 0, 0, 0));
        Eigen::Matrix4cd expect = Eigen::Matrix4cd::Zero();
        expect.topRightCorner<2, 2>() = Eigen::Matrix2cd::Identity();
        expect.bottomLeftCorner<2, 2>() = Eigen::Matrix2cd::Identity();
        CHECK((d - expect).cwiseAbs().maxCoeff() <= 1e-15);
    }
    SECTION("half transmission couples each port to its loss mode") {
        const double u = 1.0 / std::sqrt(2.0);
        const Eigen::Matrix4cd d =
            unitary_dilation(ScatteringMatrix(u, 0, u, 0));
        CHECK_THAT(d(0, 2).real(), WithinAbs(u, 1e-12));
        CHECK_THAT(d(1, 3).real(), WithinAbs(u, 1e-12));
        CHECK_THAT(std::abs(d(0, 3)), WithinAbs(0.0, 1e-15));
        CHECK_THAT(std::abs(d(1, 2)), WithinAbs(0.0, 1e-15));
    }
    SECTION("non-passive inputs are rejected") {
        CHECK_THROWS_AS(unitary_dilation(ScatteringMatrix(1, 1, 1, 1)),
                        std::domain_error);
    }
}

TEST_CASE("dilation is unitary and embeds the matrix exactly") {
    for (int idx = 0; idx < 3000; ++idx) {
        auto rng = engine_for(4242, idx);
        const ScatteringMatrix s = (idx % 10 == 9)
                                       ? random_boundary_matrix(rng)
                                       : random_passive_matrix(rng);
        const Eigen::Matrix4cd u = unitary_dilation(s);
        REQUIRE(unitarity_defect(u) <= 1e-12);
        const Eigen::Matrix2cd m = complex_matrix(s);
        // top-left block is a bitwise copy
        REQUIRE((u.topLeftCorner<2, 2>() - m).cwiseAbs().maxCoeff() == 0.0);
    }
}

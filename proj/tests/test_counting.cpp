#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lossybs/counting.hpp"
#include "lossybs/sampling.hpp"

using namespace lossybs;
using Catch::Matchers::WithinAbs;

namespace {
const double kU = 1.0 / std::sqrt(2.0);
const ScatteringMatrix kLosslessBalanced(kU, kU, kU, kU, pi / 2, pi / 2);

ScatteringMatrix quarter_with_alpha(double alpha) {
    return ScatteringMatrix(0.5, 0.5, 0.5, 0.5, alpha / 2, alpha / 2);
}
}  // namespace

TEST_CASE("number moments") {
    SECTION("lossless balanced symmetric, unit overlap") {
        const auto m = number_moments(kLosslessBalanced, 1.0);
        CHECK_THAT(m.n1, WithinAbs(1.0, 1e-12));
        CHECK_THAT(m.n2, WithinAbs(1.0, 1e-12));
        CHECK_THAT(m.n1n1m1, WithinAbs(1.0, 1e-12));
        CHECK_THAT(m.n2n2m1, WithinAbs(1.0, 1e-12));
        CHECK(std::abs(m.n1n2) <= 1e-15);
    }
    SECTION("zero overlap kills the cross term exactly") {
        for (int idx = 0; idx < 200; ++idx) {
            auto rng = engine_for(11, idx);
            const ScatteringMatrix s = random_passive_matrix(rng);
            const auto m = number_moments(s, 0.0);
            REQUIRE(m.n1n2 == (s.t * s.t) * (s.tau * s.tau) +
                                  (s.r * s.r) * (s.rho * s.rho));
        }
    }
    SECTION("all-quarter circuit, aligned phases") {
        const auto m = number_moments(quarter_with_alpha(0.0), 1.0);
        CHECK_THAT(m.n1n2, WithinAbs(0.25, 1e-15));
    }
    SECTION("preconditions") {
        CHECK_THROWS_AS(number_moments(ScatteringMatrix(1, 1, 1, 1), 0.5),
                        std::domain_error);
        CHECK_THROWS_AS(number_moments(kLosslessBalanced, complexd(1.1, 0)),
                        std::invalid_argument);
    }
}

TEST_CASE("outcome probabilities") {
    SECTION("quarter circuit at alpha = pi, unit overlap") {
        const auto d = outcome_probabilities(quarter_with_alpha(pi), 1.0);
        CHECK_THAT(d.p20, WithinAbs(0.125, 1e-14));
        CHECK_THAT(d.p02, WithinAbs(0.125, 1e-14));
        CHECK_THAT(d.p11, WithinAbs(0.0, 1e-14));
        CHECK_THAT(d.p10, WithinAbs(0.25, 1e-14));
        CHECK_THAT(d.p01, WithinAbs(0.25, 1e-14));
        CHECK_THAT(d.p00, WithinAbs(0.25, 1e-14));
    }
    SECTION("identity circuit passes both photons") {
        for (double i : {0.0, 0.6, 1.0}) {
            const auto d =
                outcome_probabilities(ScatteringMatrix(1, 0, 1, 0), i);
            CHECK(d.p11 == 1.0);
            CHECK(d.p20 == 0.0);
            CHECK(d.p00 == 0.0);
            CHECK(d.p10 == 0.0);
        }
    }
    SECTION("full absorption loses both photons") {
        const auto d = outcome_probabilities(ScatteringMatrix(0, 0, 0, 0), 1.0);
        CHECK(d.p00 == 1.0);
        CHECK(d.p11 == 0.0);
        CHECK(d.p10 == 0.0);
    }
}

TEST_CASE("probability laws over random passive circuits") {
    for (int idx = 0; idx < 10000; ++idx) {
        auto rng = engine_for(58, idx);
        const ScatteringMatrix s = random_passive_matrix(rng);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double i = unit(rng);

        const auto d = outcome_probabilities(s, i);
        REQUIRE_THAT(d.sum(), WithinAbs(1.0, 1e-12));
        for (double p : {d.p20, d.p02, d.p11, d.p10, d.p01, d.p00})
            REQUIRE(p >= 0.0);  // clamped outputs; raw checked below
        for (double p : d.raw) REQUIRE(p >= -1e-12);

        // affinity in the overlap
        const auto d0 = outcome_probabilities(s, 0.0);
        const auto d1 = outcome_probabilities(s, 1.0);
        for (int c = 0; c < 6; ++c) {
            const double blend = i * d1.raw[c] + (1.0 - i) * d0.raw[c];
            REQUIRE_THAT(d.raw[c], WithinAbs(blend, 1e-14));
        }
    }
}

TEST_CASE("bunching outcomes do not depend on alpha") {
    for (int idx = 0; idx < 500; ++idx) {
        auto rng = engine_for(59, idx);
        std::uniform_real_distribution<double> amp(0.0, 1.0);
        // amplitudes with a wide allowed window
        const double t = 0.4 * amp(rng), r = 0.4 * amp(rng);
        const double tau = 0.4 * amp(rng), rho = 0.4 * amp(rng);
        const AlphaWindow w = alpha_window(ScatteringMatrix(t, r, tau, rho));
        if (w.empty) continue;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double i = unit(rng);
        double p20_ref = -1.0, p02_ref = -1.0;
        for (int k = 0; k < 8; ++k) {
            const double a =
                pi + (2.0 * unit(rng) - 1.0) * w.half_width * 0.999;
            const auto d = outcome_probabilities(
                ScatteringMatrix(t, r, tau, rho, a / 2, a / 2), i);
            if (p20_ref < 0) { p20_ref = d.p20; p02_ref = d.p02; }
            REQUIRE_THAT(d.p20, WithinAbs(p20_ref, 1e-15));
            REQUIRE_THAT(d.p02, WithinAbs(p02_ref, 1e-15));
        }
    }
}

TEST_CASE("symmetric closed forms") {
    SECTION("reference values") {
        CHECK_THAT(symmetric_probabilities(0.5, 0.5, 0.0, 1.0).p11,
                   WithinAbs(0.25, 1e-14));
        CHECK_THAT(symmetric_probabilities(0.5, 0.5, pi, 0.0).p11,
                   WithinAbs(0.125, 1e-14));
        const double t = std::sqrt(0.3), r = std::sqrt(0.7);
        CHECK_THAT(symmetric_probabilities(t, r, pi, 1.0).p11,
                   WithinAbs(0.16, 1e-12));  // lossless: (1 - 2 t^2)^2
    }
    SECTION("window violation is rejected") {
        // t + r = 1.2: alpha = 0 falls outside the allowed window
        CHECK_THROWS_AS(symmetric_probabilities(0.6, 0.6, 0.0, 1.0),
                        std::domain_error);
        // t + r = 1 sits exactly on the full-window boundary: allowed
        CHECK_NOTHROW(symmetric_probabilities(0.5, 0.5, 0.0, 1.0));
        CHECK_NOTHROW(symmetric_probabilities(0.4, 0.4, 0.0, 1.0));
        CHECK_THROWS_AS(symmetric_probabilities(0.9, 0.9, pi, 1.0),
                        std::domain_error);
    }
    SECTION("agrees with the general path on the embedded matrix") {
        for (int idx = 0; idx < 3000; ++idx) {
            auto rng = engine_for(60, idx);
            std::uniform_real_distribution<double> amp(0.0, 1.0);
            const double t = amp(rng), r = amp(rng);
            if (t * t + r * r > 1.0) continue;
            const AlphaWindow w = alpha_window_symmetric(t, r);
            if (w.empty) continue;
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const double a = pi + (2 * unit(rng) - 1) * w.half_width * 0.999;
            const double i = unit(rng);
            const auto sym = symmetric_probabilities(t, r, a, i);
            const auto gen = outcome_probabilities(
                ScatteringMatrix(t, r, t, r, a / 2, a / 2), complexd(i, 0.0));
            REQUIRE_THAT(sym.p20, WithinAbs(gen.p20, 1e-14));
            REQUIRE_THAT(sym.p02, WithinAbs(gen.p02, 1e-14));
            REQUIRE_THAT(sym.p11, WithinAbs(gen.p11, 1e-14));
            REQUIRE_THAT(sym.p10, WithinAbs(gen.p10, 1e-14));
            REQUIRE_THAT(sym.p01, WithinAbs(gen.p01, 1e-14));
            REQUIRE_THAT(sym.p00, WithinAbs(gen.p00, 1e-14));
        }
    }
    SECTION("coincidence range over a full window") {
        for (double t2 : {0.05, 0.1, 0.2}) {
            const double t = std::sqrt(t2), r = std::sqrt(t2);
            double lo = 2.0, hi = -1.0;
            for (int k = 0; k <= 400; ++k) {
                const double a = two_pi * k / 400.0;
                const double p = symmetric_probabilities(t, r, a, 1.0).p11;
                lo = std::min(lo, p);
                hi = std::max(hi, p);
            }
            CHECK_THAT(lo, WithinAbs((t2 - t2) * (t2 - t2), 1e-12));
            CHECK_THAT(hi, WithinAbs((t2 + t2) * (t2 + t2), 1e-12));
        }
    }
}

TEST_CASE("hom scan over the built-in amplitudes") {
    const FrequencyGrid grid(-1.0, 11.0, 257);
    const BiphotonAmplitude psi = make_gaussian(5.0, 5.0, 1.0, 1.0);

    SECTION("lossless balanced symmetric dips to zero") {
        const auto curve =
            hom_scan(kLosslessBalanced, psi, grid, {0.0, 50.0, -50.0});
        REQUIRE(curve.points.size() == 3);
        CHECK(curve.points[0].p11 <= 1e-12);
        // distinguishable photons at a lossless 50:50 coincide half the time
        CHECK_THAT(curve.points[1].p11, WithinAbs(0.5, 1e-3));
        CHECK_THAT(curve.points[2].p11, WithinAbs(0.5, 1e-3));
        CHECK_THAT(curve.coherence_time, WithinAbs(3.330218444630791, 1e-6));
        // baseline approached within the residual overlap magnitude
        const double resid = std::abs(curve.points[1].overlap);
        CHECK(std::abs(curve.points[1].p11 - 0.5) <= 0.5 * resid + 1e-12);
    }
    SECTION("alpha = pi/2 stays flat at the baseline") {
        const auto curve =
            hom_scan(quarter_with_alpha(pi / 2), psi, grid, {0.0, 1.0, 3.0});
        for (const auto& p : curve.points)
            CHECK_THAT(p.p11, WithinAbs(0.125, 1e-12));
    }
    SECTION("non-passive circuits are rejected") {
        CHECK_THROWS_AS(
            hom_scan(ScatteringMatrix(1, 1, 1, 1), psi, grid, {0.0}),
            std::domain_error);
    }
}

TEST_CASE("max coincidence") {
    SECTION("lossless symmetric follows (1 - 2 t^2)^2") {
        for (double t2 : {0.1, 0.3, 0.5, 0.8}) {
            const double t = std::sqrt(t2), r = std::sqrt(1.0 - t2);
            CHECK_THAT(max_coincidence(t, r, t, r),
                       WithinAbs((1 - 2 * t2) * (1 - 2 * t2), 1e-12));
        }
    }
    SECTION("full window reaches (t^2 + r^2)^2") {
        CHECK_THAT(max_coincidence(0.5, 0.5, 0.5, 0.5),
                   WithinAbs(0.25, 1e-15));
        CHECK_THAT(max_coincidence(0.3, 0.6, 0.3, 0.6),
                   WithinAbs((0.09 + 0.36) * (0.09 + 0.36), 1e-14));
    }
    SECTION("energy violations are rejected") {
        CHECK_THROWS_AS(max_coincidence(0.8, 0.8, 0.8, 0.8),
                        std::domain_error);
        // empty window: individually passive, jointly unphysical
        CHECK_THROWS_AS(max_coincidence(0.9, 0.1, 0.1, 0.9),
                        std::domain_error);
    }
}

TEST_CASE("programmability") {
    CHECK_THAT(programmability(0.3, 0.3), WithinAbs(2.0, 0.0));
    CHECK_THAT(programmability(0.45, 0.45), WithinAbs(2.0, 0.0));
    const double t = std::sqrt(0.3), r = std::sqrt(0.7);
    CHECK_THAT(programmability(t, r), WithinAbs(0.0, 1e-12));
    CHECK_THAT(programmability(0.5, 0.25), WithinAbs(16.0 / 17.0, 1e-12));
    CHECK_THROWS_AS(programmability(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(programmability(0.9, 0.9), std::domain_error);
}

TEST_CASE("parameter maps") {
    CHECK_THROWS_AS(parameter_map(MapKind::tunability, 1),
                    std::invalid_argument);

    SECTION("cell centers at resolution 2 and 3 hit the reference points") {
        const auto m2 = tunability_map(2);
        CHECK(m2.at(0, 0).t2 == 0.25);
        CHECK_FALSE(m2.at(0, 0).forbidden);
        CHECK(m2.at(0, 0).value == two_pi);
        CHECK(m2.at(1, 1).forbidden);  // (0.75, 0.75)

        const auto m3 = tunability_map(3);
        CHECK(m3.at(1, 1).t2 == 0.5);
        CHECK_FALSE(m3.at(1, 1).forbidden);
        CHECK_THAT(m3.at(1, 1).value, WithinAbs(0.0, 1e-6));  // lossless
        CHECK(m3.at(2, 2).forbidden);
    }
    SECTION("tunability at 200: full region is exactly t + r <= 1") {
        const auto map = tunability_map(200);
        REQUIRE(map.cells.size() == 200u * 200u);
        for (const MapCell& c : map.cells) {
            if (c.forbidden) {
                REQUIRE(c.t2 + c.r2 > 1.0);
                continue;
            }
            const double s = std::sqrt(c.t2) + std::sqrt(c.r2);
            if (std::abs(s - 1.0) <= 1e-12) continue;  // knife edge
            REQUIRE((c.value == two_pi) == (s <= 1.0));
        }
    }
    SECTION("programmability map matches the pointwise function") {
        const auto map = programmability_map(8);
        CHECK_THAT(map.at(0, 0).value, WithinAbs(2.0, 0.0));  // balanced lossy
        // spot cell containing (0.25, 0.0625): centers are coarse, compare
        // against the pointwise value at the cell center
        const MapCell& c = map.at(2, 0);
        CHECK_THAT(c.value,
                   WithinAbs(programmability(std::sqrt(c.t2),
                                             std::sqrt(c.r2)),
                             0.0));
    }
    SECTION("max-coincidence map agrees with the closed form on cells") {
        const auto map = max_coincidence_map(16);
        for (const MapCell& c : map.cells) {
            if (c.forbidden) continue;
            const double t = std::sqrt(c.t2), r = std::sqrt(c.r2);
            REQUIRE(c.value == max_coincidence(t, r, t, r));
        }
    }
}

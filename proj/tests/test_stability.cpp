#include "doctest.h"

#include <cmath>

#include "hartree/errors.hpp"
#include "hartree/spectral.hpp"
#include "hartree/stability.hpp"

using namespace hartree;

TEST_CASE("norm of W: four routes agree") {
    for (auto [N, a] : {std::pair{9, 8.0}, {10, 8.0}, {9, 4.0}, {12, 5.0}}) {
        ProblemParams pp(N, a);
        const NormW n = norm_W_squared(pp);
        CHECK(n.beta_form > 0);
        CHECK(std::abs(n.convolution / n.beta_form - 1.0) < 1e-8);
        CHECK(std::abs(n.sphere_form / n.beta_form - 1.0) < 1e-8);
        CHECK(std::abs(n.from_Sstar / n.beta_form - 1.0) < 1e-8);
    }
}

TEST_CASE("delta_k closed values") {
    ProblemParams pp(9, 8.0);
    CHECK(deficit_quadratic_form(pp, 2) == doctest::Approx(68.0 / 117.0).epsilon(1e-13));
    double prev = 0.0;
    for (int k = 2; k <= 10; ++k) {
        const double d = deficit_quadratic_form(pp, k);
        CHECK(d > 0.0);
        CHECK(d <= 1.0);
        CHECK(d >= prev);
        prev = d;
    }
    CHECK_THROWS_AS(deficit_quadratic_form(pp, 1), DomainError);
    CHECK_THROWS_AS(deficit_quadratic_form(pp, 0), DomainError);
}

TEST_CASE("tangent directions have vanishing second-order deficit") {
    ProblemParams pp(9, 8.0);
    for (int k : {0, 1}) {
        for (double eps : {1e-2, 1e-3}) {
            const ZonalState u = sector_direction_state(pp, k, eps);
            CHECK(std::abs(deficit(u)) / (eps * eps) < 1e-8);
        }
    }
    // (1 + eps) W is on the manifold
    const ZonalState u = sector_direction_state(pp, 0, 1e-2);
    CHECK(distance_to_manifold(u).dist2 < 1e-12);
}

TEST_CASE("on-manifold state") {
    ProblemParams pp(9, 8.0);
    const ZonalState u = sector_direction_state(pp, 2, 0.0);
    CHECK(deficit(u) == 0.0);
    CHECK(distance_to_manifold(u).dist2 == 0.0);
}

TEST_CASE("unit direction: distance equals eps for k = 2") {
    ProblemParams pp(9, 8.0);
    const double eps = 0.05;
    const DistanceResult d = distance_to_manifold(sector_direction_state(pp, 2, eps));
    CHECK(d.dist2 == doctest::Approx(eps * eps).epsilon(1e-10));
    CHECK(d.c == doctest::Approx(1.0));
    CHECK(d.y_norm < 1e-8);
}

TEST_CASE("deficit and distance are invariant under rescaling") {
    ProblemParams pp(9, 8.0);
    const ZonalState u = sector_direction_state(pp, 2, 1.0);
    const double d0 = deficit(u);
    const double s0 = distance_to_manifold(u).dist2;
    for (double rho : {0.5, 2.0}) {
        const ZonalState v = rescaled_state(u, rho);
        CHECK(std::abs(deficit(v) / d0 - 1.0) < 1e-8);
        const DistanceResult dr = distance_to_manifold(v);
        CHECK(std::abs(dr.dist2 / s0 - 1.0) < 1e-8);
        CHECK(dr.beta == doctest::Approx(rho).epsilon(1e-6));
    }
}

TEST_CASE("distance minimizer recovers a displaced bubble") {
    // a translated bubble is on the manifold: its rescaled image has distance 0
    ProblemParams pp(9, 8.0);
    const ZonalState u = rescaled_state(sector_direction_state(pp, 2, 0.0), 1.7);
    const DistanceResult dr = distance_to_manifold(u);
    CHECK(dr.dist2 < 1e-9 * norm_W_squared(pp).beta_form);
    CHECK(dr.beta == doctest::Approx(1.7).epsilon(1e-6));
}

TEST_CASE("deficit experiment at (9, 8), k = 2") {
    ProblemParams pp(9, 8.0);
    const DeficitExperiment ex = deficit_experiment(pp, 2, {1e-1, 1e-2, 1e-3});
    CHECK_FALSE(ex.approximate);
    REQUIRE(ex.rows.size() == 3);
    for (const auto& r : ex.rows) {
        CHECK(r.deficit >= -1e-10);
        CHECK(r.ratio <= 1.0);
    }
    CHECK(ex.order >= 0.95);
    CHECK(std::abs(ex.rows.back().ratio - ex.delta_k) < 1e-5);
    CHECK(ex.report.status() != Status::fail);
}

TEST_CASE("deficit experiment tier guard") {
    CHECK(stability_supported(ProblemParams(9, 8.0)));
    CHECK_FALSE(stability_supported(ProblemParams(9, 4.0)));
    CHECK_THROWS_AS(deficit_experiment(ProblemParams(9, 4.0), 2, {1e-1, 1e-2}), DomainError);
    CHECK_THROWS_AS(deficit_experiment(ProblemParams(12, 10.0), 2, {1e-1, 1e-2}, true), DomainError);
    CHECK_THROWS_AS(deficit_experiment(ProblemParams(9, 8.0), 2, {1e-2, 1e-1}), DomainError);
    CHECK_THROWS_AS(deficit_experiment(ProblemParams(9, 8.0), 1, {1e-1, 1e-2}), DomainError);
    const DeficitExperiment ex = deficit_experiment(ProblemParams(9, 4.0), 2, {1e-1, 1e-2, 1e-3}, true);
    CHECK(ex.approximate);
    CHECK(std::abs(ex.rows.back().ratio - ex.delta_k) < 1e-4);
}

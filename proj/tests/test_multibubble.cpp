#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "hartree/errors.hpp"
#include "hartree/multibubble.hpp"

using namespace hartree;

namespace {

const char* kEngineered = "(1 + (r-2)^2 + (x3-1)^2 + x4^2 + x5^2 + x6^2 + x7^2 + x8^2 + x9^2) / r^4";

Vec e1(int n) {
    Vec v = Vec::Zero(n);
    v(0) = 1.0;
    return v;
}

PotentialBox engineered_box() { return {1.0, 3.0, e1(7), 1.0}; }

const InteractionConstants& consts98() {
    static const InteractionConstants c = interaction_constants(ProblemParams(9, 8.0));
    return c;
}

}  // namespace

TEST_CASE("parser: constants, variables, precedence") {
    CHECK(parse_potential("1").value(Vec::Zero(8)) == 1.0);
    Vec z = Vec::Zero(8);
    z(0) = 2.0;
    z(1) = 3.0;
    CHECK(parse_potential("r^2 * x3 - 1").value(z) == doctest::Approx(11.0));
    CHECK(parse_potential("-2^2").value(z) == doctest::Approx(-4.0));
    CHECK(parse_potential("2^-1").value(z) == doctest::Approx(0.5));
    CHECK(parse_potential("2^3^2").value(z) == doctest::Approx(512.0));
    CHECK(parse_potential("8 / 2 / 2").value(z) == doctest::Approx(2.0));
    CHECK(parse_potential("exp(0) + 1.5e1").value(z) == doctest::Approx(16.0));
    CHECK(parse_potential("x9", 9).value(z) == 0.0);
}

TEST_CASE("parser: errors carry positions") {
    try {
        parse_potential("r +");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 3);
        CHECK(e.line() == 1);
        CHECK(e.column() == 4);
    }
    try {
        parse_potential("r +\n  y");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 6);
        CHECK(e.line() == 2);
        CHECK(e.column() == 3);
    }
    CHECK_THROWS_AS(parse_potential("x2"), ParseError);
    CHECK_THROWS_AS(parse_potential("x10", 9), ParseError);
    CHECK_NOTHROW(parse_potential("x10", 10));
    CHECK_THROWS_AS(parse_potential("(r"), ParseError);
    CHECK_THROWS_AS(parse_potential("r r"), ParseError);
    CHECK_THROWS_AS(parse_potential(""), ParseError);
}

TEST_CASE("parser: division by zero is reported at evaluation") {
    auto V = parse_potential("1 / (r - 1)");
    Vec z = Vec::Zero(8);
    z(0) = 1.0;
    CHECK_THROWS_AS(V.value(z), DomainError);
    CHECK_THROWS_AS(V.jet(z), DomainError);
    z(0) = 2.0;
    CHECK(V.value(z) == 1.0);
}

TEST_CASE("parser: jets match finite differences") {
    auto V = parse_potential("exp(-(r-1.5)^2) * (2 + x3*x4) / r^4 + x5^3 - 0.5^r");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.5, 2.5);
    for (int trial = 0; trial < 10; ++trial) {
        Vec z(8);
        for (int i = 0; i < 8; ++i) z(i) = u(rng);
        const Jet2 j = V.jet(z);
        CHECK(j.v == doctest::Approx(V.value(z)).epsilon(1e-14));
        const double h = 1e-5;
        for (int i = 0; i < 8; ++i) {
            Vec zp = z, zm = z;
            zp(i) += h;
            zm(i) -= h;
            const double fd = (V.value(zp) - V.value(zm)) / (2 * h);
            CHECK(j.g(i) == doctest::Approx(fd).epsilon(1e-7));
            const Vec gfd = (V.jet(zp).g - V.jet(zm).g) / (2 * h);
            for (int k = 0; k < 8; ++k) CHECK(j.h(i, k) == doctest::Approx(gfd(k)).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("parser: engineered critical point of r^4 V") {
    auto V = parse_potential("(1 + (r-2)^2 + (x3-1)^2) / r^4");
    Vec z = Vec::Zero(8);
    z(0) = 2.0;
    z(1) = 1.0;
    CHECK(V.r4_jet(z).g.norm() < 1e-14);
    z(0) = 2.1;
    CHECK(V.r4_jet(z).g(0) == doctest::Approx(0.2));
}

TEST_CASE("polygon sums") {
    ProblemParams pp(9, 8.0);
    PolygonConfig two(2, 1.5, Vec::Zero(7), 1.0, pp);
    CHECK(polygon_sum(two) == doctest::Approx(std::pow(3.0, -5.0)).epsilon(1e-14));
    PolygonConfig sq(4, 1.0, Vec::Zero(7), 1.0, pp);
    const double expect = std::pow(2.0, -5.0) * (2.0 * std::pow(std::sqrt(0.5), -5.0) + 1.0);
    CHECK(polygon_sum(sq) == doctest::Approx(expect).epsilon(1e-14));
    for (int m : {3, 7, 50, 333, 1000}) {
        PolygonConfig c(m, 0.7, e1(7), 1.0, pp);
        const double s = polygon_sum(c);
        CHECK(std::abs(polygon_sum_direct(c) / s - 1.0) < 1e-12);
        CHECK(std::abs(polygon_sum_direct(c, m / 2 + 1) / s - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(PolygonConfig(1, 1.0, Vec::Zero(7), 1.0, pp), DomainError);
}

TEST_CASE("polygon dihedral distances") {
    ProblemParams pp(9, 8.0);
    PolygonConfig c(9, 1.3, e1(7), 1.0, pp);
    for (int j = 2; j <= 9; ++j)
        CHECK((c.center(1) - c.center(j)).norm() ==
              doctest::Approx(2 * 1.3 * std::sin((j - 1) * std::numbers::pi / 9)).epsilon(1e-14));
}

TEST_CASE("polygon growth exponent") {
    const double e = polygon_growth_exponent(9, {10, 31, 100, 316, 1000, 3162, 10000});
    CHECK(std::abs(e / 5.0 - 1.0) < 0.01);
    // normalized sum converges to 2 zeta(5) / pi^5
    const double lim = 2.0 * 1.0369277551433699 / std::pow(std::numbers::pi, 5.0);
    CHECK(polygon_sine_sum(10000, 9) / std::pow(10000.0, 5.0) == doctest::Approx(lim).epsilon(1e-6));
}

TEST_CASE("A1 closed form and quadrature") {
    CHECK(bubble_l2_squared(9, 1.0) == doctest::Approx(std::pow(std::numbers::pi, 5.0) / 24.0).epsilon(1e-13));
    for (int N : {9, 10, 13}) {
        const double c = bubble_amplitude(ProblemParams(N, 4.0));
        CHECK(std::abs(bubble_l2_squared_quadrature(N, c) / bubble_l2_squared(N, c) - 1.0) < 1e-8);
    }
    CHECK_THROWS_AS(bubble_l2_squared(8, 1.0), DomainError);
}

TEST_CASE("A2 extrapolation") {
    ProblemParams pp(9, 8.0);
    const A2Estimate e = constant_A2(pp);
    CHECK(e.value > 0);
    CHECK(e.uncertainty < 0.01 * e.value);
    CHECK(std::abs(e.value / e.closed_form - 1.0) < 1e-3);
    for (size_t i = 1; i < e.scaled.size(); ++i) CHECK(e.scaled[i] > e.scaled[i - 1]);
    CHECK(e.exponent_nonlocal == doctest::Approx(-5.0).epsilon(0.02));
    CHECK(e.exponent_local == doctest::Approx(-5.0).epsilon(0.02));
    // both channels carry the sign of the total
    CHECK(pair_interaction(pp, 16.0, 1.0, PairChannel::local) < 0);
    CHECK(pair_interaction(pp, 16.0, 1.0, PairChannel::nonlocal) < 0);
}

TEST_CASE("A2 beta covariance") {
    ProblemParams pp(9, 8.0);
    for (double d : {4.0, 8.0, 20.0}) {
        const double p2 = pair_interaction(pp, d, 2.0);
        const double p1 = pair_interaction(pp, 2.0 * d, 1.0);
        CHECK(std::abs(p2 / (0.5 * p1) - 1.0) < 1e-8);
    }
}

TEST_CASE("reduced residuals") {
    ProblemParams pp(9, 8.0);
    auto V = parse_potential(kEngineered);
    const auto& k = consts98();
    PolygonConfig c(100, 2.0, e1(7), beta_of_t(0.05, 100, 9), pp);
    Vec F = reduced_residuals(c, V, k);
    CHECK(F.head(8).norm() < 1e-14);
    // balance root
    const double tstar = std::pow(constant_A3(c, k) / (k.A1 / 16.0), 1.0);
    PolygonConfig cs(100, 2.0, e1(7), beta_of_t(tstar, 100, 9), pp);
    const Vec Fs = reduced_residuals(cs, V, k);
    CHECK(std::abs(Fs(8)) < 1e-12 * k.A1 / 16.0 / std::pow(tstar, 5.0));
    CHECK_THROWS_AS(reduced_residuals(c, parse_potential("-1"), k), DomainError);
}

TEST_CASE("reduced residuals: relabeling invariance") {
    ProblemParams pp(9, 8.0);
    auto V = parse_potential(kEngineered);
    PolygonConfig c(12, 1.7, e1(7) * 0.5, 3.0, pp);
    const Vec F = reduced_residuals(c, V, consts98());
    // the configuration seen from center j is a rotation of itself
    const double s = polygon_sum(c);
    for (int j : {2, 5, 12}) CHECK(std::abs(polygon_sum_direct(c, j) / s - 1.0) < 1e-12);
    PolygonConfig c2(12, 1.7, e1(7) * 0.5, 3.0, pp);
    CHECK((reduced_residuals(c2, V, consts98()) - F).norm() == 0.0);
}

TEST_CASE("reduced jacobian matches finite differences") {
    ProblemParams pp(9, 8.0);
    auto V = parse_potential("exp(-(r-2)^2) * (1 + x3^2 + 0.3*x4*x5) + 0.1 * r");
    const auto& k = consts98();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int trial = 0; trial < 5; ++trial) {
        Vec xpp(7);
        for (int i = 0; i < 7; ++i) xpp(i) = u(rng);
        const double r = 2.0 + u(rng), t = 0.05 * (1.0 + u(rng));
        PolygonConfig c(50, r, xpp, beta_of_t(t, 50, 9), pp);
        const Eigen::MatrixXd J = reduced_jacobian(c, V, k);
        Vec z(9);
        z << r, xpp, t;
        for (int i = 0; i < 9; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(z(i)));
            Vec zp = z, zm = z;
            zp(i) += h;
            zm(i) -= h;
            auto mk = [&](const Vec& w) {
                return PolygonConfig(50, w(0), w.segment(1, 7), beta_of_t(w(8), 50, 9), pp);
            };
            const Vec col = (reduced_residuals_scaled(mk(zp), V, k) - reduced_residuals_scaled(mk(zm), V, k)) / (2 * h);
            CHECK((col - J.col(i)).norm() <= 1e-5 * std::max(1.0, J.col(i).norm()));
        }
    }
}

TEST_CASE("solver: engineered potential") {
    ProblemParams pp(9, 8.0);
    auto V = parse_potential(kEngineered);
    const auto& k = consts98();
    SolveOptions opt;
    opt.box = engineered_box();
    Vec x0 = e1(7);
    x0(1) = 0.2;
    PolygonConfig init(100, 2.4, x0, beta_of_t(0.1, 100, 9), pp);
    SolveResult r = solve_reduced(V, 100, init, k, opt);
    CHECK(r.converged);
    CHECK(r.residual_norm < 1e-10);
    CHECK(std::abs(r.config.r_bar - 2.0) < 1e-8);
    CHECK((r.config.x_pp - e1(7)).norm() < 1e-8);
    CHECK(r.t == doctest::Approx(r.t_closed).epsilon(1e-10));
    CHECK(r.degree.degree == 1);
    CHECK(r.report.status() == Status::pass);
    // determinism
    SolveResult r2 = solve_reduced(V, 100, init, k, opt);
    CHECK(r2.t == r.t);
    CHECK(r2.trace.size() == r.trace.size());
}

TEST_CASE("solver: beta scaling in m") {
    ProblemParams pp(9, 8.0);
    auto V = parse_potential(kEngineered);
    SolveOptions opt;
    opt.box = engineered_box();
    double prev = 0.0;
    for (int m : {100, 200, 400}) {
        PolygonConfig init(m, 2.2, e1(7), beta_of_t(0.05, m, 9), pp);
        SolveResult r = solve_reduced(V, m, init, consts98(), opt);
        REQUIRE(r.converged);
        if (prev > 0) CHECK(std::abs(r.config.beta / prev / 32.0 - 1.0) < 0.005);
        prev = r.config.beta;
    }
}

TEST_CASE("solver: constant potential has no critical point") {
    ProblemParams pp(9, 8.0);
    auto V = parse_potential("1");
    SolveOptions opt;
    opt.box = engineered_box();
    PolygonConfig init(100, 2.0, e1(7), beta_of_t(0.05, 100, 9), pp);
    CHECK_THROWS_AS(solve_reduced(V, 100, init, consts98(), opt), NumericError);
}

TEST_CASE("solver: critical point outside the box") {
    ProblemParams pp(9, 8.0);
    auto V = parse_potential("(1 + (r-4)^2 + (x3-1)^2 + x4^2 + x5^2 + x6^2 + x7^2 + x8^2 + x9^2) / r^4");
    SolveOptions opt;
    opt.box = {1.5, 2.5, e1(7), 0.5};
    PolygonConfig init(100, 2.0, e1(7), beta_of_t(0.05, 100, 9), pp);
    SolveResult r = solve_reduced(V, 100, init, consts98(), opt);
    CHECK_FALSE(r.converged);
    CHECK_FALSE(r.failure.empty());
    CHECK(r.report.status() == Status::fail);
}

TEST_CASE("solver: alpha range guard") {
    CHECK(alpha_below_range(ProblemParams(9, 3.0)));
    CHECK_FALSE(alpha_below_range(ProblemParams(9, 3.6)));  // boundary 6 - 12/5 is admissible
    CHECK_FALSE(alpha_below_range(ProblemParams(9, 8.0)));
}

TEST_CASE("potential config parsing") {
    json j = json::parse(R"({"expression": "1 + r", "box": {"r": [1, 3], "xpp_center": [1,0,0,0,0,0,0],
        "xpp_radius": 0.5}, "constants": {"L0": 0.001, "L1": 10}})");
    auto c = potential_config_from_json(j, 9);
    CHECK(c.expression == "1 + r");
    CHECK(c.box.r_hi == 3.0);
    CHECK(c.L1 == 10.0);
    j["box"]["xpp_center"] = json::array({1, 0});
    CHECK_THROWS_AS(potential_config_from_json(j, 9), DomainError);
    json bad = json::parse(R"({"expression": "1"})");
    CHECK_THROWS_AS(potential_config_from_json(bad, 9), DomainError);
}

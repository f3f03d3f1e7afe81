#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "doctest.h"
#include "hartree/errors.hpp"
#include "hartree/specfun.hpp"

using namespace hartree;
using std::numbers::pi;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}

TEST_CASE("ProblemParams validation") {
    CHECK_THROWS_AS(ProblemParams(8, 4.0), DomainError);
    CHECK_THROWS_AS(ProblemParams(9, 9.0), DomainError);
    CHECK_THROWS_AS(ProblemParams(9, 0.0), DomainError);
    ProblemParams pp(9, 8.0);
    CHECK(pp.p() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(pp.p_ge_two());
    CHECK_FALSE(ProblemParams(12, 8.5).p_ge_two());
    CHECK(ProblemParams(12, 8.0).p_ge_two());
}

TEST_CASE("log_gamma anchors") {
    CHECK(log_gamma(1.0) == 0.0);
    CHECK(rel(log_gamma(0.5), std::log(std::sqrt(pi))) < 1e-15);
    CHECK(rel(log_gamma(5.0), std::log(24.0)) < 1e-15);
    CHECK_THROWS_AS(log_gamma(0.0), DomainError);
    CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
}

TEST_CASE("log_gamma against 50-digit reference") {
    using big = boost::multiprecision::cpp_bin_float_50;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> U(0.5, 200.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = U(rng);
        const big ref = boost::math::lgamma(big(x));
        const double r = static_cast<double>(abs((big(log_gamma(x)) - ref) / ref));
        worst = std::max(worst, r);
    }
    CHECK(worst <= 1e-13);
}

TEST_CASE("lambda_k closed-form anchors") {
    CHECK(rel(lambda_k(9, 8.0, 0), std::pow(pi, 5) / 12.0) < 1e-14);
    CHECK(rel(lambda_k(9, 8.0, 1), std::pow(pi, 5) / 15.0) < 1e-14);
    CHECK(rel(lambda_k(9, 8.0, 1), 0.8 * lambda_k(9, 8.0, 0)) < 1e-14);
    for (int N = 9; N <= 16; ++N) {
        CHECK(rel(lambda_k(N, N - 4.0, 1), (N - 4.0) / (N + 4.0) * lambda_k(N, N - 4.0, 0)) < 1e-13);
        const double alt = 64.0 / (N * (N + 2.0)) * std::pow(pi, 0.5 * N) / std::tgamma(0.5 * N);
        CHECK(rel(lambda_k(N, N - 4.0, 0), alt) < 1e-12);
    }
    CHECK_THROWS_AS(lambda_k(9, 9.0, 0), DomainError);
    CHECK_THROWS_AS(lambda_k(9, 0.0, 0), DomainError);
}

TEST_CASE("lambda_k monotone and recurrence") {
    for (int N : {9, 11, 14}) {
        for (double s : {0.5, 4.0, N - 4.0, N - 0.5}) {
            for (int k = 0; k < 50; ++k) {
                CHECK(lambda_k(N, s, k + 1) < lambda_k(N, s, k));
                const double dlog = log_lambda_k(N, s, k + 1) - log_lambda_k(N, s, k);
                CHECK(std::abs(dlog - std::log((k + 0.5 * s) / (k + N - 0.5 * s))) < 1e-12);
            }
        }
    }
}

TEST_CASE("i_of_s") {
    CHECK(rel(i_of_s(9, 4.0), std::pow(pi, 5) / 24.0) < 1e-14);
    CHECK(rel(i_of_s(10, 1.0), std::pow(pi, 5) * 6.0 / 40320.0) < 1e-14);
    CHECK_THROWS_AS(i_of_s(9, 4.5), DomainError);
    CHECK_THROWS_AS(i_of_s(9, 4.5 - 1e-14), DomainError);
    CHECK(std::isfinite(i_of_s(9, 4.4999)));
}

TEST_CASE("amplitude candidates at (9,8)") {
    ProblemParams pp(9, 8.0);
    auto c = c_n_alpha(pp);
    const double printed = std::sqrt(11.0 * 9 * 7 * 5 * 24 / (std::pow(pi, 4.5) * std::sqrt(pi)));
    CHECK(rel(c.printed, printed) < 1e-14);
    REQUIRE(c.cd_form.has_value());
    const double cd = std::sqrt(11.0 * 9 * 7 * 120 / (std::pow(pi, 4.5) * std::sqrt(pi)));
    CHECK(rel(*c.cd_form, cd) < 1e-14);
    // the same form with the (N-2) factor dropped is off by sqrt(7)
    const double dropped = std::sqrt(11.0 * 9 * 120 / (std::pow(pi, 4.5) * std::sqrt(pi)));
    CHECK(rel(*c.cd_form / dropped, std::sqrt(7.0)) < 1e-14);
    CHECK(c.rel_discrepancy < 1e-13);
    CHECK(!c.disagree);
    CHECK(bubble_amplitude(pp) == c.self_consistent);
}

TEST_CASE("amplitude candidates agree over a grid") {
    for (int N = 9; N <= 20; ++N)
        for (double a : {0.3, 1.0, 4.0, 8.0, N - 0.7}) {
            auto c = c_n_alpha(ProblemParams(N, a));
            CHECK(c.rel_discrepancy < 1e-12);
            CHECK(c.cd_form.has_value() == (a == 8.0));
        }
}

TEST_CASE("sharp constants") {
    ProblemParams pp(9, 8.0);
    auto c = sharp_constants(pp);
    const double s2 = pi * pi * 5 * 7 * 9 * 11 * std::pow(std::tgamma(4.5) / std::tgamma(9.0), 4.0 / 9.0);
    CHECK(rel(c.S2, s2) < 1e-13);
    const double chls = std::pow(pi, 4) * (std::sqrt(pi) / 24.0) *
                        std::pow(std::tgamma(4.5) / std::tgamma(9.0), -1.0 + 8.0 / 9.0);
    CHECK(rel(c.C_HLS, chls) < 1e-13);
    CHECK(rel(c.C_N, std::tgamma(4.5) / (4.0 * 7 * 5 * std::pow(pi, 4.5))) < 1e-14);
    CHECK(rel(c.I_half_alpha, std::pow(pi, 5) / 24.0) < 1e-14);
    CHECK(c.Sstar > 0);
    CHECK_THROWS_AS(hls_constant(9, 9.0), DomainError);
}

TEST_CASE("sharp constant routes agree") {
    for (int N : {9, 10, 13}) {
        for (double a : {1.0, 4.0, 8.0}) {
            ProblemParams pp(N, a);
            auto c = sharp_constants(pp);
            const double p = pp.p();
            const double area = sphere_area(N);
            // sphere route: constant function is the extremal
            const double s_sphere = paneitz_eigenvalue(N, 0) * std::pow(area, 1.0 - 1.0 / p) *
                                    std::pow(lambda_k(N, a, 0), -1.0 / p);
            CHECK(rel(c.Sstar, s_sphere) < 1e-12);
            CHECK(rel(c.S2, paneitz_eigenvalue(N, 0) * std::pow(area, 4.0 / N)) < 1e-12);
            CHECK(rel(c.C_HLS, lambda_k(N, a, 0) * std::pow(area, (a - N) / N)) < 1e-12);
            CHECK(rel(c.I_half_alpha, std::pow(2.0, a - N) * lambda_k(N, a, 0)) < 1e-12);
            // Green constant inverts the Paneitz spectrum through lambda_k(N-4)
            for (int k = 0; k < 6; ++k)
                CHECK(rel(c.C_N * lambda_k(N, N - 4.0, k), 1.0 / paneitz_eigenvalue(N, k)) < 1e-12);
        }
    }
}

#include "hartree/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "hartree/errors.hpp"

namespace hartree {

namespace {

constexpr double kPi = std::numbers::pi;
const double kLogPi = std::log(kPi);

double log_sphere_area(int n) {
    // |S^n| = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
    return std::log(2.0) + 0.5 * (n + 1) * kLogPi - log_gamma(0.5 * (n + 1));
}

}  // namespace

ProblemParams::ProblemParams(int N, double alpha) : N_(N), alpha_(alpha) {
    if (N < 9)
        throw DomainError("N must be >= 9 (got " + std::to_string(N) + ")");
    if (!(alpha > 0.0 && alpha < N))
        throw DomainError("alpha must lie in (0, N) (got " + std::to_string(alpha) + ")");
}

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("log_gamma: argument must be positive and finite");
    // boost keeps no global sign state, unlike ::lgamma
    return boost::math::lgamma(x);
}

double log_lambda_k(int N, double s, int k) {
    if (!(s > 0.0 && s < N))
        throw DomainError("lambda_k: s must lie in (0, N)");
    if (k < 0)
        throw DomainError("lambda_k: k must be nonnegative");
    return (N - s) * std::log(2.0) + 0.5 * N * kLogPi + log_gamma(k + 0.5 * s) +
           log_gamma(0.5 * (N - s)) - log_gamma(0.5 * s) - log_gamma(k + N - 0.5 * s);
}

double lambda_k(int N, double s, int k) { return std::exp(log_lambda_k(N, s, k)); }

double sphere_area(int n) { return std::exp(log_sphere_area(n)); }

double paneitz_eigenvalue(int N, int k) {
    const double c = k + 0.5 * N;
    return (c + 1.0) * c * (c - 1.0) * (c - 2.0);
}

double green_constant(int N) {
    return std::exp(log_gamma(0.5 * N) - 0.5 * N * kLogPi) / (4.0 * (N - 2) * (N - 4));
}

double i_of_s(int N, double s) {
    if (!(s > 0.0))
        throw DomainError("i_of_s: s must be positive");
    // Gamma((N-2s)/2) has a pole at s = N/2; refuse before it overflows
    if (!(s < 0.5 * N) || 0.5 * N - s < 1e-12)
        throw DomainError("i_of_s: s must be < N/2");
    return std::exp(0.5 * N * kLogPi + log_gamma(0.5 * N - s) - log_gamma(N - s));
}

AmplitudeCandidates c_n_alpha(const ProblemParams& pp) {
    const int N = pp.N();
    const double a = pp.alpha();
    const double pm1 = pp.p() - 1.0;

    AmplitudeCandidates out{};
    const double log_poly = std::log((N + 2.0) * N * (N - 2.0) * (N - 4.0));
    const double log_printed_pow = log_poly + log_gamma(N - 0.5 * a) -
                                   0.5 * N * kLogPi - log_gamma(0.5 * (N - a));
    out.printed = std::exp(log_printed_pow / (2.0 * pm1));

    // kappa' = C^{2(p-1)} C_N 2^{-(p-1)(N-4)} and kappa' lambda_0(N-4) lambda_0(alpha) = 1
    const double log_kappa = -log_lambda_k(N, N - 4.0, 0) - log_lambda_k(N, a, 0);
    const double log_c_pow = log_kappa - std::log(green_constant(N)) + pm1 * (N - 4) * std::log(2.0);
    out.self_consistent = std::exp(log_c_pow / (2.0 * pm1));
    out.rel_discrepancy = std::abs(out.printed - out.self_consistent) / out.self_consistent;
    out.disagree = out.rel_discrepancy > 1e-12;

    if (a == 8.0) {
        // (N+2)N(N-2)(N-4)! / (pi^{N/2} Gamma((N-8)/2)), square root since p = 2
        const double log_cd = std::log((N + 2.0) * N * (N - 2.0)) + log_gamma(N - 3.0) -
                              0.5 * N * kLogPi - log_gamma(0.5 * (N - 8.0));
        out.cd_form = std::exp(0.5 * log_cd);
        out.cd_rel_discrepancy = std::abs(*out.cd_form - out.self_consistent) / out.self_consistent;
        out.disagree = out.disagree || *out.cd_rel_discrepancy > 1e-12;
    }
    return out;
}

double bubble_amplitude(const ProblemParams& pp) { return c_n_alpha(pp).self_consistent; }

double sobolev_constant_S2(int N) {
    const double g = log_gamma(0.5 * N) - log_gamma(static_cast<double>(N));
    return kPi * kPi * (N - 4.0) * (N - 2.0) * N * (N + 2.0) * std::exp(4.0 / N * g);
}

double hls_constant(int N, double alpha) {
    if (!(alpha > 0.0 && alpha < N))
        throw DomainError("hls_constant: alpha must lie in (0, N)");
    const double g = log_gamma(0.5 * N) - log_gamma(static_cast<double>(N));
    return std::exp(0.5 * alpha * kLogPi + log_gamma(0.5 * (N - alpha)) -
                    log_gamma(N - 0.5 * alpha) + (-1.0 + alpha / N) * g);
}

SharpConstants sharp_constants(const ProblemParams& pp) {
    const int N = pp.N();
    SharpConstants c{};
    c.C_N_alpha = bubble_amplitude(pp);
    c.C_N = green_constant(N);
    c.I_half_alpha = i_of_s(N, 0.5 * pp.alpha());
    c.S2 = sobolev_constant_S2(N);
    c.C_HLS = hls_constant(N, pp.alpha());
    c.Sstar = c.S2 * std::pow(c.C_HLS, -1.0 / pp.p());
    return c;
}

}  // namespace hartree

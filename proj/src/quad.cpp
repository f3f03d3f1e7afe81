#include "hartree/quad.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "hartree/errors.hpp"
#include "hartree/specfun.hpp"

namespace hartree {

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("quadrature tolerances must be > 0");
    if (max_subdivisions < 10) throw DomainError("max_subdivisions must be >= 10");
    if (mc_samples < 1) throw DomainError("mc_samples must be >= 1");
}

namespace {

struct Thunk {
    const std::function<double(double)>* f;
    std::exception_ptr err;
};

double trampoline(double x, void* p) {
    auto* t = static_cast<Thunk*>(p);
    if (t->err) return 0.0;
    try {
        return (*t->f)(x);
    } catch (...) {
        t->err = std::current_exception();
        return 0.0;
    }
}

struct WorkspaceDeleter {
    void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

void silence_gsl() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

}  // namespace

QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                        const QuadratureSpec& spec) {
    spec.validate();
    silence_gsl();
    if (a == b) return {0.0, 0.0};
    if (a > b) {
        auto r = integrate_1d(f, b, a, spec);
        return {-r.value, r.err};
    }
    std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
        gsl_integration_workspace_alloc(spec.max_subdivisions));
    Thunk th{&f, nullptr};
    gsl_function F{&trampoline, &th};
    double value = 0.0, err = 0.0;
    const size_t lim = spec.max_subdivisions;
    int status;
    const bool ia = std::isinf(a), ib = std::isinf(b);
    if (!ia && !ib)
        status = gsl_integration_qags(&F, a, b, spec.abs_tol, spec.rel_tol, lim, ws.get(), &value, &err);
    else if (!ia)
        status = gsl_integration_qagiu(&F, a, spec.abs_tol, spec.rel_tol, lim, ws.get(), &value, &err);
    else if (!ib)
        status = gsl_integration_qagil(&F, b, spec.abs_tol, spec.rel_tol, lim, ws.get(), &value, &err);
    else
        status = gsl_integration_qagi(&F, spec.abs_tol, spec.rel_tol, lim, ws.get(), &value, &err);
    if (th.err) std::rethrow_exception(th.err);
    if (status != GSL_SUCCESS || !std::isfinite(value))
        throw NumericError(std::string("integrate_1d: ") + gsl_strerror(status) +
                               " (estimate " + std::to_string(value) + ", error " +
                               std::to_string(err) + ")",
                           value, err);
    return {value, err};
}

QuadResult two_center_integral_raw(const Profile& f, const Profile& g, double d, int N,
                                   const QuadratureSpec& spec) {
    if (!(d >= 0.0)) throw DomainError("two_center_integral: d must be >= 0");
    if (N < 2) throw DomainError("two_center_integral: N must be >= 2");
    if (d == 0.0) {
        const double area = sphere_area(N - 1);
        auto r = integrate_1d([&](double u) { return u == 0.0 ? 0.0 : f(u) * g(u) * std::pow(u, N - 1); },
                              0.0, std::numeric_limits<double>::infinity(), spec);
        return {area * r.value, area * r.err};
    }
    // x = a + u-sphere, v = |x-b|; dx = |S^{N-2}| rho^{N-3} (u v / d) du dv on |u-v| <= d <= u+v.
    // Inner variable: v = |u-d| + w sin^2(phi/2), w = 2 min(u,d), phi in [0,pi].
    const double area = sphere_area(N - 2);
    QuadratureSpec inner = spec;
    inner.rel_tol = std::max(0.1 * spec.rel_tol, 1e-14);
    auto outer = [&](double u) -> double {
        if (u <= 0.0) return 0.0;
        const double fu = f(u);
        if (fu == 0.0) return 0.0;
        const double lo = std::abs(u - d);
        const double w = 2.0 * std::min(u, d);
        auto integrand = [&](double phi) -> double {
            const double s = std::sin(0.5 * phi), c = std::cos(0.5 * phi);
            const double v = lo + w * s * s;
            const double rho2 = (lo + v) * (u + v + d) * (w * s * c) * (w * s * c) / (4.0 * d * d);
            if (rho2 <= 0.0 || v <= 0.0) return 0.0;
            const double jac = std::pow(rho2, 0.5 * (N - 3)) * v * (w * s * c);
            return g(v) * jac;
        };
        auto r = integrate_1d(integrand, 0.0, std::numbers::pi, inner);
        return fu * u / d * r.value;
    };
    auto r1 = integrate_1d(outer, 0.0, d, spec);
    auto r2 = integrate_1d(outer, d, std::numeric_limits<double>::infinity(), spec);
    return {area * (r1.value + r2.value), area * (r1.err + r2.err)};
}

QuadResult two_center_integral(const Profile& f, const Profile& g, double d, int N,
                               const QuadratureSpec& spec) {
    require_quad_selftest();
    return two_center_integral_raw(f, g, d, N, spec);
}

MonteCarloResult monte_carlo_two_center(const Profile& f, const Profile& g, double d, int N,
                                        const QuadratureSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    const double log_norm = log_gamma(0.5 * (N + 1)) - 0.5 * (N + 1) * std::log(std::numbers::pi);
    const double cnorm = std::exp(log_norm);
    std::vector<double> x(N);
    long double sum = 0.0L, sumsq = 0.0L;
    for (std::int64_t i = 0; i < spec.mc_samples; ++i) {
        const double shift = coin(rng) ? d : 0.0;
        for (int k = 0; k < N; ++k) {
            x[k] = normal(rng);
        }
        const double gden = std::abs(normal(rng));
        for (int k = 0; k < N; ++k) {
            x[k] /= gden;
        }
        x[0] += shift;
        double ra2 = 0.0, rb2 = 0.0;
        for (int k = 0; k < N; ++k) {
            ra2 += x[k] * x[k];
            const double y = k == 0 ? x[0] - d : x[k];
            rb2 += y * y;
        }
        const double q = 0.5 * cnorm * (std::pow(1.0 + ra2, -0.5 * (N + 1)) + std::pow(1.0 + rb2, -0.5 * (N + 1)));
        const double val = f(std::sqrt(ra2)) * g(std::sqrt(rb2)) / q;
        sum += val;
        sumsq += static_cast<long double>(val) * val;
    }
    const long double n = static_cast<long double>(spec.mc_samples);
    const long double mean = sum / n;
    const long double var = std::max(0.0L, sumsq / n - mean * mean);
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n)), spec.mc_samples};
}

namespace {

VerificationReport run_selftest() {
    VerificationReport rep;
    rep.id = "bipolar_selftest";
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    const int N = 9;
    {
        auto f = [](double r) { return std::pow(1.0 + r * r, -2.5); };
        auto r = two_center_integral_raw(f, f, 0.0, N, spec);
        const double exact = sphere_area(N - 1) * 0.5 *
                             std::exp(log_gamma(4.5) + log_gamma(0.5) - log_gamma(5.0));
        rep.add("single_center_N9", r.value, exact, 1e-10, Compare::rel_eq, "Beta-function closed form");
    }
    {
        const double s = 4.0;
        QuadratureSpec sp;
        sp.rel_tol = 1e-10;
        auto f = [s](double r) { return std::pow(r, -2.0 * s); };
        auto g = [s, N](double r) { return std::pow(1.0 + r * r, -(N - s)); };
        for (double d : {0.5, 1.0, 2.0}) {
            auto r = two_center_integral_raw(f, g, d, N, sp);
            const double exact = i_of_s(N, s) * std::pow(1.0 + d * d, -s);
            rep.add("riesz_identity_d=" + std::to_string(d).substr(0, 3), r.value, exact, 1e-6,
                    Compare::rel_eq, "I(s)(1+|x|^2)^{-s} with s=4, N=9");
        }
    }
    return rep;
}

}  // namespace

const VerificationReport& quad_selftest() {
    static std::once_flag once;
    static VerificationReport rep;
    std::call_once(once, [] { rep = run_selftest(); });
    return rep;
}

void require_quad_selftest() {
    const auto& r = quad_selftest();
    if (!r.passed()) throw NumericError("bipolar quadrature self-test failed; dependent computations refused");
}

}  // namespace hartree

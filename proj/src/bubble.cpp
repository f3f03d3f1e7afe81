#include "hartree/bubble.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "hartree/errors.hpp"
#include "hartree/quad.hpp"

namespace hartree {

Bubble::Bubble(const ProblemParams& pp, Vec y_, double beta_)
    : Bubble(pp, std::move(y_), beta_, bubble_amplitude(pp)) {}

Bubble::Bubble(const ProblemParams& pp, Vec y_, double beta_, double c_)
    : params(pp), y(std::move(y_)), beta(beta_), c(c_) {
    if (y.size() != pp.N()) throw DomainError("Bubble: center must lie in R^N");
    if (!(beta > 0.0)) throw DomainError("Bubble: beta must be > 0");
}

Bubble Bubble::standard(const ProblemParams& pp) { return Bubble(pp, Vec::Zero(pp.N()), 1.0); }

double bubble_radial(const Bubble& b, double r) {
    const double e = 0.5 * (b.params.N() - 4.0);
    return b.c * std::pow(b.beta, e) * std::pow(1.0 + b.beta * b.beta * r * r, -e);
}

double eval_bubble(const Bubble& b, const Vec& x) { return bubble_radial(b, (x - b.y).norm()); }

Vec eval_kernel_derivatives(const Bubble& b, const Vec& x) {
    if (b.beta != 1.0 || b.y.norm() != 0.0)
        throw DomainError("eval_kernel_derivatives: defined at y = 0, beta = 1 only");
    const int N = b.params.N();
    const double r2 = x.squaredNorm();
    const double w = eval_bubble(b, x);
    Vec phi(N + 1);
    for (int j = 0; j < N; ++j) phi(j) = (4.0 - N) * w * x(j) / (1.0 + r2);
    phi(N) = 0.5 * (N - 4.0) * w * (1.0 - r2) / (1.0 + r2);
    return phi;
}

double riesz_convolution_Wp(const Bubble& b, const Vec& x) {
    const double a = b.params.alpha();
    const double I = i_of_s(b.params.N(), 0.5 * a);
    const double d2 = (x - b.y).squaredNorm();
    return I * std::pow(b.c, b.params.p()) * std::pow(b.beta / (1.0 + b.beta * b.beta * d2), 0.5 * a);
}

SpherePoint::SpherePoint(Vec v) : xi(std::move(v)) {
    if (std::abs(xi.norm() - 1.0) > 1e-12) throw DomainError("SpherePoint: |xi| must be 1");
}

SpherePoint stereographic(const Vec& x) {
    const int N = x.size();
    const double r2 = x.squaredNorm();
    Vec xi(N + 1);
    xi.head(N) = 2.0 * x / (1.0 + r2);
    xi(N) = (1.0 - r2) / (1.0 + r2);
    // renormalize the last few ulps away
    return SpherePoint(xi / xi.norm());
}

Vec inverse_stereographic(const SpherePoint& p) {
    const int N = p.xi.size() - 1;
    if (p.xi(N) < -1.0 + 1e-12) throw DomainError("inverse_stereographic: south pole");
    return p.xi.head(N) / (1.0 + p.xi(N));
}

double stereographic_jacobian(const Vec& x) {
    return std::pow(2.0 / (1.0 + x.squaredNorm()), static_cast<double>(x.size()));
}

double psi_transport(const SpaceFunction& f, const SpherePoint& xi) {
    const Vec x = inverse_stereographic(xi);
    const int N = x.size();
    return std::pow(0.5 * (1.0 + x.squaredNorm()), 0.5 * (N - 4.0)) * f(x);
}

double phi_transport(const SphereFunction& F, const Vec& x) {
    const int N = x.size();
    return std::pow(2.0 / (1.0 + x.squaredNorm()), 0.5 * (N - 4.0)) * F(stereographic(x));
}

SphereBubble sphere_bubble_params(const Vec& y, double beta) {
    if (!(beta > 0.0)) throw DomainError("sphere_bubble_params: beta must be > 0");
    const int N = y.size();
    const double q = (1.0 + beta * beta * y.squaredNorm()) / beta;
    SphereBubble sb;
    sb.s0 = 0.5 * (beta + q);
    sb.s.resize(N + 1);
    sb.s.head(N) = beta * y;
    sb.s(N) = 0.5 * (beta - q);
    return sb;
}

namespace {

double fd_laplacian(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
    const double f0 = f(x);
    double acc = 0.0;
    Vec y = x;
    for (int i = 0; i < x.size(); ++i) {
        const double xi = x(i);
        y(i) = xi + h;
        const double p1 = f(y);
        y(i) = xi - h;
        const double m1 = f(y);
        y(i) = xi + 2 * h;
        const double p2 = f(y);
        y(i) = xi - 2 * h;
        const double m2 = f(y);
        y(i) = xi;
        acc += -p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2;
    }
    return acc / (12.0 * h * h);
}

double fd_bilap_once(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
    return fd_laplacian([&](const Vec& y) { return fd_laplacian(f, y, h); }, x, h);
}

}  // namespace

double fd_bilaplacian(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
    const double coarse = fd_bilap_once(f, x, h);
    const double fine = fd_bilap_once(f, x, 0.5 * h);
    return (16.0 * fine - coarse) / 15.0;
}

VerificationReport pde_residual_check(const ProblemParams& pp, int npoints, double rmax,
                                      std::uint64_t seed, double tol) {
    const int N = pp.N();
    const Bubble W = Bubble::standard(pp);
    const double p = pp.p();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto w = [&](const Vec& x) { return eval_bubble(W, x); };
    double worst = 0.0, worst_r = 0.0;
    for (int i = 0; i < npoints; ++i) {
        Vec x(N);
        for (int k = 0; k < N; ++k) x(k) = normal(rng);
        x *= rmax * unif(rng) / x.norm();
        const double h = 2e-2 * (1.0 + x.norm());
        const double lhs = fd_bilaplacian(w, x, h);
        const double rhs = riesz_convolution_Wp(W, x) * std::pow(eval_bubble(W, x), p - 1.0);
        const double e = std::abs(lhs - rhs) / std::abs(rhs);
        if (e > worst) {
            worst = e;
            worst_r = x.norm();
        }
    }
    VerificationReport rep;
    rep.id = "pde_residual";
    rep.set_params(pp);
    rep.add("max_rel_residual", worst, 0.0, tol, Compare::at_most,
            "FD bilaplacian (h = 2e-2 (1+|x|), Richardson) vs convolution * W^{p-1}");
    rep.info("worst_radius", worst_r, "|x| at the worst point");
    rep.info("points", npoints, "random points, |x| <= " + std::to_string(rmax));
    rep.info("amplitude", W.c, "self-consistent C_{N,alpha}");
    return rep;
}

VerificationReport riesz_identity_check(const ProblemParams& pp, const std::vector<double>& distances,
                                        double tol) {
    const int N = pp.N();
    const Bubble b = Bubble::standard(pp);
    const double a = pp.alpha(), p = pp.p();
    auto kern = [a](double r) { return std::pow(r, -a); };
    auto wp = [&](double r) { return std::pow(bubble_radial(b, r), p); };
    VerificationReport rep;
    rep.id = "riesz_identity";
    rep.set_params(pp);
    for (double d : distances) {
        Vec x = Vec::Zero(N);
        x(0) = d;
        const double q = two_center_integral(kern, wp, d, N).value;
        char name[48];
        std::snprintf(name, sizeof name, "convolution_d=%g", d);
        rep.add(name, q, riesz_convolution_Wp(b, x), tol, Compare::rel_eq, "closed-form convolution");
    }
    return rep;
}

}  // namespace hartree

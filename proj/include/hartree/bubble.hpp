#pragma once

#include <cstdint>
#include <functional>

#include "hartree/polygon.hpp"
#include "hartree/report.hpp"
#include "hartree/specfun.hpp"

namespace hartree {

/// c beta^{(N-4)/2} (1 + beta^2 |x-y|^2)^{-(N-4)/2}
struct Bubble {
    ProblemParams params;
    Vec y;
    double beta;
    double c;

    /// Amplitude defaults to the canonical C_{N,alpha}.
    Bubble(const ProblemParams& pp, Vec y, double beta);
    Bubble(const ProblemParams& pp, Vec y, double beta, double c);
    static Bubble standard(const ProblemParams& pp);  // y = 0, beta = 1
};

double eval_bubble(const Bubble& b, const Vec& x);

/// Radial profile of b about its center.
double bubble_radial(const Bubble& b, double r);

/// (phi_1..phi_N, phi_{N+1}): translation derivatives and the scaling
/// derivative at the normalized gauge. Throws DomainError if b is not
/// centered at 0 with beta = 1.
Vec eval_kernel_derivatives(const Bubble& b, const Vec& x);

/// (|.|^{-alpha} * b^p)(x) = I(alpha/2) c^p (beta / (1 + beta^2 |x-y|^2))^{alpha/2}
double riesz_convolution_Wp(const Bubble& b, const Vec& x);

struct SpherePoint {
    Vec xi;  // in R^{N+1}
    explicit SpherePoint(Vec v);  // throws DomainError unless |v| = 1 within 1e-12
};

SpherePoint stereographic(const Vec& x);
/// Throws DomainError within 1e-12 of the south pole.
Vec inverse_stereographic(const SpherePoint& xi);
double stereographic_jacobian(const Vec& x);  // (2/(1+|x|^2))^N

using SpaceFunction = std::function<double(const Vec&)>;
using SphereFunction = std::function<double(const SpherePoint&)>;

/// Pushes f to the sphere with the conformal weight J^{(4-N)/(2N)}.
double psi_transport(const SpaceFunction& f, const SpherePoint& xi);
/// Inverse transport: (2/(1+|x|^2))^{(N-4)/2} F(S(x)).
double phi_transport(const SphereFunction& F, const Vec& x);

/// On the sphere W_{y,beta} is a (s0 - s.xi)^{-(N-4)/2}, a = C 2^{-(N-4)/2}, s0^2 - |s|^2 = 1.
struct SphereBubble {
    double s0;
    Vec s;  // R^{N+1}
};
SphereBubble sphere_bubble_params(const Vec& y, double beta);

/// Finite-difference bilaplacian of W against the right-hand side of the
/// equation at random points with |x| <= rmax.
VerificationReport pde_residual_check(const ProblemParams& pp, int npoints, double rmax,
                                      std::uint64_t seed, double tol = 1e-4);

/// riesz_convolution_Wp against bipolar quadrature of |x|^{-alpha} * W^p at
/// the given distances from the center.
VerificationReport riesz_identity_check(const ProblemParams& pp, const std::vector<double>& distances,
                                        double tol = 1e-6);

/// Nested fourth-order five-point Laplacian applied twice, with one
/// Richardson step between h and h/2.
double fd_bilaplacian(const std::function<double(const Vec&)>& f, const Vec& x, double h);

}  // namespace hartree

#pragma once

#include <vector>

namespace hartree {

/// Gegenbauer polynomial C_k^lambda(t) by three-term recurrence.
double gegenbauer(int k, double lambda, double t);

/// C_k^lambda(t) / C_k^lambda(1).
double gegenbauer_normalized(int k, double lambda, double t);

/// Fills out[0..kmax] with the normalized values at t.
void gegenbauer_normalized_all(int kmax, double lambda, double t, std::vector<double>& out);

/// Gauss rule for the weight (1-t^2)^{lambda-1/2} on [-1,1], exact to degree 2n-1.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Golub-Welsch on the Jacobi matrix; rules are cached and shared.
const GaussRule& gauss_gegenbauer(int n, double lambda);
const GaussRule& gauss_legendre(int n);

/// Zonal index on S^N: lambda = (N-1)/2, weight (1-t^2)^{(N-2)/2}.
inline double zonal_index(int N) { return 0.5 * (N - 1); }

/// dim of degree-k spherical harmonics on S^N.
double harmonic_dimension(int N, int k);

/// Integral over S^N of the square of the normalized zonal harmonic of degree k.
double zonal_norm_squared(int N, int k);

}  // namespace hartree

#pragma once

#include <vector>

#include "hartree/quad.hpp"
#include "hartree/report.hpp"
#include "hartree/specfun.hpp"

namespace hartree {

struct NormW {
    double convolution;  // integral of (|x|^{-alpha} * W^p) W^p by radial quadrature
    double beta_form;    // same, Beta closed form
    double sphere_form;  // P_0 a^2 |S^N|
    double from_Sstar;   // Sstar^{p/(p-1)}
};

/// ||W||^2 computed several ways; they agree when W is the extremal.
NormW norm_W_squared(const ProblemParams& pp, const QuadratureSpec& spec = {});

/// Second-order coefficient delta_k = 1 - p B_k - (p-1) A_k of the deficit along a
/// unit sector-k direction (k >= 2).
double deficit_quadratic_form(const ProblemParams& pp, int k);

/// A state u whose sphere image F is zonal about the north pole, stored as
/// F - a at the Gauss nodes and as coefficients of the normalized zonal harmonics.
struct ZonalState {
    ProblemParams params;
    std::vector<double> excess_nodes;  // F - a at the rule nodes
    std::vector<double> coeffs;        // coefficients of F - a, degrees 0..K
    bool truncated = false;            // F^p expanded beyond exactness (p non-integer)
};

struct ZonalDiscretization {
    int K = 80;       // harmonic cutoff
    int nodes = 120;  // Gauss-Gegenbauer nodes
};

/// F = a + eps gamma Y_k with gamma fixed by P_k gamma^2 ||Y_k||^2 = 1.
ZonalState sector_direction_state(const ProblemParams& pp, int k, double eps, const ZonalDiscretization& disc = {});
/// Sphere image of rho^{(N-4)/2} u(rho x).
ZonalState rescaled_state(const ZonalState& u, double rho, const ZonalDiscretization& disc = {});
/// Normalization gamma of the sector-k direction.
double sector_direction_gamma(const ProblemParams& pp, int k);

/// ||u||^2 - S* (int (|x|^{-alpha} * u^p) u^p)^{1/p}, evaluated relative to W.
double deficit(const ZonalState& u, const ZonalDiscretization& disc = {});

struct DistanceResult {
    double dist2;
    double c;
    double beta;
    double y_norm;
    int iterations;
    std::vector<double> trace;  // dist2 per iterate
};

/// min over (c, beta, y) of ||u - c W_{y,beta}||^2; c is eliminated in closed
/// form, (log beta, y) by damped Newton with finite-difference derivatives.
DistanceResult distance_to_manifold(const ZonalState& u, const ZonalDiscretization& disc = {});

struct DeficitRow {
    double eps;
    double deficit;
    double dist2;
    double ratio;
    double beta;
    double c;
};

struct DeficitExperiment {
    ProblemParams params;
    int k;
    std::vector<double> epsilons;
    std::vector<DeficitRow> rows;
    double delta_k;
    double order;  // log-log slope of |ratio - delta_k| in eps
    bool approximate;
    VerificationReport report;
};

/// True when p = 2, where all nonlocal terms are exact quadratic forms.
bool stability_supported(const ProblemParams& pp);

/// Sector-k deficit experiment. Params outside the supported tier require
/// approximate = true and p >= 2.
DeficitExperiment deficit_experiment(const ProblemParams& pp, int k, const std::vector<double>& epsilons,
                                     bool approximate = false, const ZonalDiscretization& disc = {});

}  // namespace hartree

#pragma once

#include <functional>
#include <vector>

#include "hartree/quad.hpp"
#include "hartree/report.hpp"
#include "hartree/specfun.hpp"

namespace hartree {

struct KappaPrime {
    double canonical;     // 1 / (lambda_0(N-4) lambda_0(alpha))
    double from_printed;  // C^{2(p-1)} C_N 2^{-(p-1)(N-4)} with the printed amplitude
    double rel_discrepancy;
};
KappaPrime kappa_prime(const ProblemParams& pp);

struct SectorSpectrum {
    int k;
    double lambda_k_N4;
    double lambda_k_alpha;
    double A_k;  // kappa' lambda_k(N-4) lambda_0(alpha)
    double B_k;  // kappa' lambda_k(N-4) lambda_k(alpha)
    double rho_k;
    double mu_k;
    double dim_k;
};

/// Sectors k = 0..k_max (k_max >= 2), canonical kappa'.
std::vector<SectorSpectrum> sector_spectrum(const ProblemParams& pp, int k_max);

struct MuEntry {
    int k;
    double mu;
    double dim;
};
std::vector<MuEntry> mu_ladder(const ProblemParams& pp, int k_max);

struct StabilityConstants {
    double lower;  // 2 (mu_{N+3} - p)
    double upper;  // 1
    double mu_N3;  // sector k = 2 value
};
StabilityConstants stability_constants(const ProblemParams& pp);

/// rho_k = 1 exactly for k = 1, kernel dimension N+1, strict gaps elsewhere.
VerificationReport nondegeneracy_check(const ProblemParams& pp, int k_max);

/// Numerical lambda_k(s) from the one-dimensional Gegenbauer reduction.
/// max_panels bounds the adaptive subdivision.
double funk_hecke_numeric(int N, double s, int k, int max_panels = 2000);

/// Zonal integral int_{S^N} F(t) Y_k(t) with t the last coordinate.
double zonal_moment(int N, const std::function<double(double)>& F, int k, int max_panels = 2000);

/// Value at eta (last coordinate t) of int_{S^N} |eta - sigma|^{-s} Y_k(sigma_{N+1}) d sigma,
/// computed without the Funk-Hecke formula.
double riesz_on_zonal_numeric(int N, double s, int k, double t);

/// Numerical composition of the two kernels of orders N-4 and alpha, both
/// orders, against the closed-form products.
VerificationReport composed_kernel_check(const ProblemParams& pp, int k, double tol = 1e-6);

}  // namespace hartree

#pragma once

#include <optional>

namespace hartree {

/// The triple (N, alpha, p). p is always derived from N and alpha.
class ProblemParams {
public:
    /// Throws DomainError unless N >= 9 and 0 < alpha < N.
    ProblemParams(int N, double alpha);

    int N() const { return N_; }
    double alpha() const { return alpha_; }
    double p() const { return (2.0 * N_ - alpha_) / (N_ - 4.0); }
    /// p >= 2 exactly when alpha <= 8.
    bool p_ge_two() const { return alpha_ <= 8.0; }

private:
    int N_;
    double alpha_;
};

double log_gamma(double x);

/// Funk-Hecke eigenvalue of |xi-eta|^{-s} on the degree-k harmonics of S^N.
double lambda_k(int N, double s, int k);
double log_lambda_k(int N, double s, int k);

/// Surface area of the unit sphere S^n in R^{n+1}.
double sphere_area(int n);

/// Eigenvalue of the Paneitz operator on degree-k harmonics of S^N.
double paneitz_eigenvalue(int N, int k);

double green_constant(int N);       // Gamma(N/2) / (4(N-2)(N-4) pi^{N/2})
double i_of_s(int N, double s);     // pi^{N/2} Gamma((N-2s)/2) / Gamma(N-s)

struct AmplitudeCandidates {
    double printed;                 // closed form with Gamma((2N-alpha)/2)
    std::optional<double> cd_form;  // (N-4)! form, defined only at alpha = 8
    double self_consistent;         // from kappa' lambda_0(N-4) lambda_0(alpha) = 1
    double rel_discrepancy;         // |printed - self_consistent| / self_consistent
    std::optional<double> cd_rel_discrepancy;
    bool disagree;                  // any discrepancy above 1e-12
};

AmplitudeCandidates c_n_alpha(const ProblemParams& pp);

/// Canonical amplitude used downstream (the self-consistent one).
double bubble_amplitude(const ProblemParams& pp);

struct SharpConstants {
    double C_N_alpha;
    double C_N;
    double I_half_alpha;  // I(alpha/2)
    double S2;
    double C_HLS;
    double Sstar;
};

double sobolev_constant_S2(int N);
double hls_constant(int N, double alpha);
SharpConstants sharp_constants(const ProblemParams& pp);

}  // namespace hartree

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hartree/polygon.hpp"
#include "hartree/report.hpp"
#include "hartree/specfun.hpp"

namespace hartree {

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    int max_subdivisions = 2000;
    std::int64_t mc_samples = 10'000'000;
    std::uint64_t seed = 0x5eed2024ULL;

    void validate() const;  // throws DomainError
};

struct QuadResult {
    double value;
    double err;
};

using Profile = std::function<double(double)>;

/// Adaptive 1-D quadrature; a or b may be infinite. Throws NumericError
/// (carrying the best estimate) when the subdivision budget runs out.
QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                        const QuadratureSpec& spec = {});

/// Integral over R^N of f(|x-a|) g(|x-b|) with |a-b| = d. Singular
/// profiles belong in f. Runs the bipolar self-test on first use.
QuadResult two_center_integral(const Profile& f, const Profile& g, double d, int N,
                               const QuadratureSpec& spec = {});

/// Same integral without the self-test gate (used by the gate itself).
QuadResult two_center_integral_raw(const Profile& f, const Profile& g, double d, int N,
                                   const QuadratureSpec& spec);

struct MonteCarloResult {
    double mean;
    double std_error;
    std::int64_t samples;
};

/// Importance-sampled estimate of the same two-center integral: uniform
/// mixture of unit Cauchy densities at both centers, seeded by spec.seed.
MonteCarloResult monte_carlo_two_center(const Profile& f, const Profile& g, double d, int N,
                                        const QuadratureSpec& spec = {});

/// d = 0 closed form and the Riesz convolution identity, evaluated once.
const VerificationReport& quad_selftest();
/// Throws NumericError unless the self-test passed.
void require_quad_selftest();

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct DecayProfile {
    double theta;                 // bound decay exponent
    std::vector<double> samples;  // |x| or separation D
    std::vector<double> values;   // convolution values
    std::vector<double> ratios;   // value * (1+|x|)^theta
    double fitted_constant;       // max ratio
    double max_min_ratio;
    double fitted_exponent;       // minus the log-log slope against 1+sample
    double tail_exponent;         // same, last two samples only
};

/// Convolution of |x|^{-(N-4)} with (1+|y|)^{-(4+delta)}, scaled by (1+|x|)^delta.
DecayProfile validate_decay_B3(int N, double delta, const std::vector<double>& samples,
                               const QuadratureSpec& spec = {});

/// |x|^{-alpha} * beta^{N-alpha/2} (1+beta|x-z|)^{-((3N+4)/2-alpha+eta)} at |x-z| = D.
double decay_B4_value(const ProblemParams& pp, double eta, double beta, double D,
                      const QuadratureSpec& spec = {});
DecayProfile validate_decay_B4(const ProblemParams& pp, double eta, const std::vector<double>& samples,
                               double beta = 1.0, const QuadratureSpec& spec = {});

/// Pointwise check of the two-bubble split bound; C is fitted over sample_x.
struct SplitFit {
    double fitted_C;
    double min_ratio;
    std::vector<double> ratios;
};
SplitFit split_ratio_B2(double a_exp, double b_exp, double delta, const Vec& z1, const Vec& z2,
                        const std::vector<Vec>& sample_x);
VerificationReport validate_interaction_split_B2(double a_exp, double b_exp, double delta,
                                                 const Vec& z1, const Vec& z2,
                                                 const std::vector<Vec>& sample_x);

enum class NormKind { star, star_star };

/// Fixed sample grid: axis shells at radii {0, 1/beta, 2/beta, ...} around each
/// center plus far-field points.
std::vector<Vec> weighted_norm_grid(const PolygonConfig& cfg);
double norm_weight(const Vec& x, const PolygonConfig& cfg, NormKind kind);
double weighted_norm(const std::function<double(const Vec&)>& f, const PolygonConfig& cfg,
                     NormKind kind, const std::vector<Vec>& grid);
double weighted_norm(const std::function<double(const Vec&)>& f, const PolygonConfig& cfg,
                     NormKind kind);

}  // namespace hartree

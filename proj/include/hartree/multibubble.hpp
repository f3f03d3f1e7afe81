#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hartree/polygon.hpp"
#include "hartree/potential.hpp"
#include "hartree/quad.hpp"
#include "hartree/report.hpp"

namespace hartree {

/// sum_{j=1}^{m-1} sin(j pi / m)^{-(N-4)}, pairwise summation.
double polygon_sine_sum(int m, int N);
/// sum_{j=2}^m |z_1 - z_j|^{-(N-4)} via the sine closed form.
double polygon_sum(const PolygonConfig& cfg);
/// Same sum from explicit center coordinates, anchored at center `anchor`.
double polygon_sum_direct(const PolygonConfig& cfg, int anchor = 1);

/// Growth exponent of polygon_sum in m (log-log fit) over the given m values.
double polygon_growth_exponent(int N, const std::vector<int>& ms);

/// integral of W^2 for amplitude c: c^2 pi^{N/2} Gamma((N-8)/2) / Gamma(N-4).
double bubble_l2_squared(int N, double c);
double bubble_l2_squared_quadrature(int N, double c, const QuadratureSpec& spec = {});
double constant_A1(const ProblemParams& pp);

enum class PairChannel { total, nonlocal, local };

/// Pair interaction P(d) = integral of d/dbeta[(|x|^{-alpha} * W^p) W^{p-1}] at
/// scale beta against a second bubble of the same scale at distance d.
/// `nonlocal` differentiates the convolution, `local` the factor W^{p-1}.
double pair_interaction(const ProblemParams& pp, double d, double beta = 1.0,
                        PairChannel channel = PairChannel::total, const QuadratureSpec& spec = {});

/// Closed form of -lim d^{N-4} P(d): (N-4) C^2 / (2 C_N).
double constant_A2_closed(const ProblemParams& pp);

struct A2Estimate {
    double value;        // 4-point extrapolant
    double uncertainty;  // |4-point - 3-point|
    double closed_form;
    std::vector<double> d;
    std::vector<double> scaled;  // -d^{N-4} P(d)
    double exponent_nonlocal;    // log-log slopes of each channel, expected -(N-4)
    double exponent_local;
};

/// Extrapolates -d^{N-4} P(d) over d in {8,16,32,64} in powers of 1/d.
/// Throws NumericError if the 3- and 4-point extrapolants differ by more than 1%.
A2Estimate constant_A2(const ProblemParams& pp, const QuadratureSpec& spec = {});

struct InteractionConstants {
    double A1;
    double A2;
    double A2_uncertainty = 0.0;
};

InteractionConstants interaction_constants(const ProblemParams& pp, const QuadratureSpec& spec = {});

/// A_3 = A_2 polygon_sum / m^{N-4} at the current configuration.
double constant_A3(const PolygonConfig& cfg, const InteractionConstants& consts);

/// The scale beta = t m^{(N-4)/(N-8)}.
double t_of_beta(const PolygonConfig& cfg);
double beta_of_t(double t, int m, int N);

/// [grad(r^4 V) at (r_bar, x''), -A1 V / t^5 + A3 / t^{N-3}].
Vec reduced_residuals(const PolygonConfig& cfg, const PotentialModel& V, const InteractionConstants& consts);

struct PotentialBox {
    double r_lo;
    double r_hi;
    Vec xpp_center;
    double xpp_radius;

    bool contains(double r, const Vec& xpp) const;
    void validate(int N) const;
};

/// Potential config file: {expression, box: {r: [lo, hi], xpp_center, xpp_radius},
/// constants: {L0, L1}}.
struct PotentialConfig {
    std::string expression;
    PotentialBox box;
    double L0;
    double L1;
};

PotentialConfig potential_config_from_json(const json& j, int N);
PotentialConfig load_potential_config(const std::string& path, int N);

struct SolveOptions {
    PotentialBox box;
    double L0 = 1e-3;
    double L1 = 1e3;
    int max_iter = 100;
    double tol = 1e-10;  // on the scaled residual norm
};

struct NewtonStep {
    int iter;
    double r;
    double t;
    double residual_norm;
    double step_length;
};

struct DegreeEstimate {
    int degree;      // 0 when the boundary sample is inconclusive
    int samples;
    int outward;     // samples with <grad(r^4 V), z - center> > 0
    int inward;
};

/// Boundary sign sampling of grad(r^4 V) on the box. Heuristic only.
DegreeEstimate degree_heuristic(const PotentialModel& V, const PotentialBox& box, int samples_per_face = 64);

struct SolveResult {
    bool converged;
    PolygonConfig config;
    double t;
    double t_closed;  // (A3 / (A1 V))^{1/(N-8)} at the solution
    double residual_norm;
    std::vector<NewtonStep> trace;
    DegreeEstimate degree;
    std::string failure;  // empty on success
    VerificationReport report;
};

/// Damped Newton on the scaled reduced system. Throws NumericError if the
/// Jacobian is numerically singular.
SolveResult solve_reduced(const PotentialModel& V, int m, const PolygonConfig& initial,
                          const InteractionConstants& consts, const SolveOptions& opt);

/// Jacobian of the scaled reduced system in (r, x'', t).
Eigen::MatrixXd reduced_jacobian(const PolygonConfig& cfg, const PotentialModel& V, const InteractionConstants& consts);
Vec reduced_residuals_scaled(const PolygonConfig& cfg, const PotentialModel& V, const InteractionConstants& consts);

/// True when alpha lies below the admissible range 6 - 12/(N-4) <= alpha.
bool alpha_below_range(const ProblemParams& pp);

}  // namespace hartree

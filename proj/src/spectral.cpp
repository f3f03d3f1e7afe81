#include "hartree/spectral.hpp"

#include <cmath>
#include <string>

#include "hartree/errors.hpp"
#include "hartree/gegenbauer.hpp"

namespace hartree {

KappaPrime kappa_prime(const ProblemParams& pp) {
    const int N = pp.N();
    const double pm1 = pp.p() - 1.0;
    KappaPrime kp{};
    kp.canonical = std::exp(-log_lambda_k(N, N - 4.0, 0) - log_lambda_k(N, pp.alpha(), 0));
    const double C = c_n_alpha(pp).printed;
    kp.from_printed = std::exp(2.0 * pm1 * std::log(C) + std::log(green_constant(N)) -
                               pm1 * (N - 4) * std::log(2.0));
    kp.rel_discrepancy = std::abs(kp.from_printed - kp.canonical) / kp.canonical;
    return kp;
}

std::vector<SectorSpectrum> sector_spectrum(const ProblemParams& pp, int k_max) {
    if (k_max < 2) throw DomainError("sector_spectrum: k_max must be >= 2");
    const int N = pp.N();
    const double a = pp.alpha(), p = pp.p();
    const double l0n = log_lambda_k(N, N - 4.0, 0), l0a = log_lambda_k(N, a, 0);
    std::vector<SectorSpectrum> out;
    for (int k = 0; k <= k_max; ++k) {
        SectorSpectrum s{};
        s.k = k;
        const double lkn = log_lambda_k(N, N - 4.0, k), lka = log_lambda_k(N, a, k);
        s.lambda_k_N4 = std::exp(lkn);
        s.lambda_k_alpha = std::exp(lka);
        // canonical kappa' cancels lambda_0(N-4) lambda_0(alpha) exactly
        s.A_k = std::exp(lkn - l0n);
        s.B_k = std::exp(lkn - l0n + lka - l0a);
        s.rho_k = p * s.B_k + (p - 1.0) * s.A_k;
        s.mu_k = (1.0 + s.A_k) / (s.A_k + s.B_k);
        s.dim_k = harmonic_dimension(N, k);
        out.push_back(s);
    }
    return out;
}

std::vector<MuEntry> mu_ladder(const ProblemParams& pp, int k_max) {
    std::vector<MuEntry> out;
    for (const auto& s : sector_spectrum(pp, k_max)) out.push_back({s.k, s.mu_k, s.dim_k});
    return out;
}

StabilityConstants stability_constants(const ProblemParams& pp) {
    const auto sp = sector_spectrum(pp, 2);
    return {2.0 * (sp[2].mu_k - pp.p()), 1.0, sp[2].mu_k};
}

VerificationReport nondegeneracy_check(const ProblemParams& pp, int k_max) {
    const auto sp = sector_spectrum(pp, k_max);
    VerificationReport rep;
    rep.id = "nondegeneracy";
    rep.set_params(pp);
    rep.add("rho_1", sp[1].rho_k, 1.0, 1e-10, Compare::abs_eq, "sector k=1 multiplier");
    rep.add("rho_0_minus_1", sp[0].rho_k - 1.0, 1e-6, 0.0, Compare::at_least, "sector k=0 gap");
    double worst = -1.0;
    int worst_k = 2;
    for (int k = 2; k <= k_max; ++k) {
        if (sp[k].rho_k > worst) {
            worst = sp[k].rho_k;
            worst_k = k;
        }
    }
    rep.add("max_rho_k_ge2", worst, 1.0 - 1e-6, 0.0, Compare::at_most,
            "largest multiplier over 2 <= k <= " + std::to_string(k_max));
    rep.info("argmax_k", worst_k, "degree attaining max_rho_k_ge2");
    bool decreasing = true;
    for (int k = 3; k <= k_max; ++k) decreasing = decreasing && sp[k].rho_k < sp[k - 1].rho_k;
    rep.add("rho_decreasing_k_ge2", decreasing ? 1.0 : 0.0, 1.0, 0.0, Compare::abs_eq,
            "strict decrease of rho_k for k >= 2");
    double kernel = 0.0;
    for (const auto& s : sp)
        if (std::abs(s.rho_k - 1.0) < 1e-10) kernel += s.dim_k;
    rep.add("kernel_dimension", kernel, pp.N() + 1.0, 0.0, Compare::abs_eq,
            "sum of dim_k over unit multipliers");
    const auto kp = kappa_prime(pp);
    rep.add("solvability_product", kp.canonical * lambda_k(pp.N(), pp.N() - 4.0, 0) * lambda_k(pp.N(), pp.alpha(), 0),
            1.0, 1e-12, Compare::rel_eq, "kappa' lambda_0(N-4) lambda_0(alpha)");
    rep.add("kappa_printed_rel_discrepancy", kp.rel_discrepancy, 0.0, 1e-12, Compare::at_most,
            "kappa' from the printed amplitude vs canonical")
        .warn_only = true;
    return rep;
}

namespace {

// int_{S^N} |e - sigma|^{-s} F(sigma_{N+1}) d sigma with e the north pole,
// after t = 1 - u^2.
// abs_tol is relative to lambda_0(s) sup|F|, with sup|F| given by f_scale.
double zonal_riesz_1d(int N, double s, const std::function<double(double)>& F, int max_panels,
                      double rel_tol, double f_scale = 1.0) {
    QuadratureSpec spec;
    spec.rel_tol = rel_tol;
    spec.abs_tol = 1e-15 * lambda_k(N, s, 0) * f_scale / sphere_area(N - 1);
    spec.max_subdivisions = max_panels;
    const double c = std::pow(2.0, 1.0 - 0.5 * s);
    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;  // never sampled: the rule has interior nodes only
        const double w = std::max(0.0, 2.0 - u * u);
        return c * std::pow(u, N - 1 - s) * std::pow(w, 0.5 * (N - 2)) * F(1.0 - u * u);
    };
    return sphere_area(N - 1) * integrate_1d(integrand, 0.0, std::sqrt(2.0), spec).value;
}

}  // namespace

double funk_hecke_numeric(int N, double s, int k, int max_panels) {
    if (!(s > 0.0 && s < N)) throw DomainError("funk_hecke_numeric: s must lie in (0, N)");
    if (k < 0 || k > 20) throw DomainError("funk_hecke_numeric: 0 <= k <= 20");
    const double lam = zonal_index(N);
    return zonal_riesz_1d(N, s, [&](double t) { return gegenbauer_normalized(k, lam, t); }, max_panels, 1e-13);
}

double zonal_moment(int N, const std::function<double(double)>& F, int k, int max_panels) {
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-14;
    spec.max_subdivisions = max_panels;
    const double lam = zonal_index(N);
    auto integrand = [&](double t) {
        return F(t) * gegenbauer_normalized(k, lam, t) * std::pow(std::max(0.0, 1.0 - t * t), 0.5 * (N - 2));
    };
    return sphere_area(N - 1) * integrate_1d(integrand, -1.0, 1.0, spec).value;
}

double riesz_on_zonal_numeric(int N, double s, int k, double t) {
    // sigma = tau eta + sqrt(1-tau^2) omega, omega in S^{N-1} of eta-perp; the
    // last coordinate of omega is sqrt(1-t^2) c with c ~ (1-c^2)^{(N-3)/2}.
    const double lam = zonal_index(N);
    const GaussRule& gr = gauss_gegenbauer(k / 2 + 2, 0.5 * (N - 2));
    const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
    auto inner = [&](double tau) {
        const double sq = std::sqrt(std::max(0.0, 1.0 - tau * tau));
        double acc = 0.0;
        for (size_t i = 0; i < gr.nodes.size(); ++i)
            acc += gr.weights[i] * gegenbauer_normalized(k, lam, tau * t + sq * st * gr.nodes[i]);
        return acc;
    };
    // (2-2tau)^{-s/2}(1-tau^2)^{(N-2)/2} d tau  with tau = 1 - u^2
    QuadratureSpec spec;
    spec.rel_tol = 1e-13;
    spec.abs_tol = 1e-15 * lambda_k(N, s, 0) / sphere_area(N - 2);
    const double c = std::pow(2.0, 1.0 - 0.5 * s);
    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double w = std::max(0.0, 2.0 - u * u);
        return c * std::pow(u, N - 1 - s) * std::pow(w, 0.5 * (N - 2)) * inner(1.0 - u * u);
    };
    return sphere_area(N - 2) * integrate_1d(integrand, 0.0, std::sqrt(2.0), spec).value;
}

VerificationReport composed_kernel_check(const ProblemParams& pp, int k, double tol) {
    if (k < 0 || k > 10) throw DomainError("composed_kernel_check: 0 <= k <= 10");
    const int N = pp.N();
    const double a = pp.alpha(), s = N - 4.0;
    const double lam = zonal_index(N);
    // order 12: outer kernel applied to the numerically transformed harmonic
    const double fh12 = zonal_riesz_1d(
        N, s, [&](double t) { return riesz_on_zonal_numeric(N, a, k, t); }, 2000, 1e-11, lambda_k(N, a, 0));
    // order 11: inner kernel applied to the constant, then multiplied by the harmonic
    const double fh11 = zonal_riesz_1d(
        N, s,
        [&](double t) { return riesz_on_zonal_numeric(N, a, 0, t) * gegenbauer_normalized(k, lam, t); },
        2000, 1e-11, lambda_k(N, a, 0));
    VerificationReport rep;
    rep.id = "composed_kernel_k=" + std::to_string(k);
    rep.set_params(pp);
    const double e12 = lambda_k(N, s, k) * lambda_k(N, a, k);
    const double e11 = lambda_k(N, s, k) * lambda_k(N, a, 0);
    rep.add("FH12", fh12, e12, tol, Compare::rel_eq, "lambda_k(N-4) lambda_k(alpha)");
    rep.add("FH11", fh11, e11, tol, Compare::rel_eq, "lambda_k(N-4) lambda_0(alpha)");
    rep.info("FH11_minus_FH12_rel", (fh11 - fh12) / e11, "zero only for k = 0");
    return rep;
}

}  // namespace hartree

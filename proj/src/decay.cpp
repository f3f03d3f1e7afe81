#include <algorithm>
#include <cmath>
#include <limits>

#include "hartree/errors.hpp"
#include "hartree/quad.hpp"

namespace hartree {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

namespace {

void finish_profile(DecayProfile& prof) {
    prof.ratios.clear();
    for (size_t i = 0; i < prof.samples.size(); ++i)
        prof.ratios.push_back(prof.values[i] * std::pow(1.0 + prof.samples[i], prof.theta));
    const auto [lo, hi] = std::minmax_element(prof.ratios.begin(), prof.ratios.end());
    prof.fitted_constant = *hi;
    prof.max_min_ratio = *hi / *lo;
    std::vector<double> onep;
    for (double s : prof.samples) onep.push_back(1.0 + s);
    prof.fitted_exponent = -loglog_slope(onep, prof.values);
    const size_t n = onep.size();
    prof.tail_exponent = -std::log(prof.values[n - 1] / prof.values[n - 2]) / std::log(onep[n - 1] / onep[n - 2]);
}

}  // namespace

DecayProfile validate_decay_B3(int N, double delta, const std::vector<double>& samples,
                               const QuadratureSpec& spec) {
    if (N < 9) throw DomainError("validate_decay_B3: N must be >= 9");
    if (!(delta > 0.0 && delta < N - 4.0)) throw DomainError("validate_decay_B3: delta must lie in (0, N-4)");
    if (samples.size() < 2) throw DomainError("validate_decay_B3: need at least two samples");
    DecayProfile prof{};
    prof.theta = delta;
    prof.samples = samples;
    auto f = [N](double r) { return std::pow(r, -(N - 4.0)); };
    auto g = [delta](double r) { return std::pow(1.0 + r, -(4.0 + delta)); };
    for (double x : samples) prof.values.push_back(two_center_integral(f, g, x, N, spec).value);
    finish_profile(prof);
    return prof;
}

double decay_B4_value(const ProblemParams& pp, double eta, double beta, double D,
                      const QuadratureSpec& spec) {
    if (!(eta > 0.0)) throw DomainError("validate_decay_B4: eta must be > 0");
    if (!(beta > 0.0)) throw DomainError("validate_decay_B4: beta must be > 0");
    const int N = pp.N();
    const double a = pp.alpha();
    const double e = 0.5 * (3.0 * N + 4.0) - a + eta;
    auto f = [a](double r) { return std::pow(r, -a); };
    auto g = [=](double r) { return std::pow(beta, N - 0.5 * a) * std::pow(1.0 + beta * r, -e); };
    return two_center_integral(f, g, D, N, spec).value;
}

DecayProfile validate_decay_B4(const ProblemParams& pp, double eta, const std::vector<double>& samples,
                               double beta, const QuadratureSpec& spec) {
    if (samples.size() < 2) throw DomainError("validate_decay_B4: need at least two samples");
    DecayProfile prof{};
    prof.theta = std::min(pp.alpha(), 0.5 * (pp.N() + 4.0));
    for (double D : samples) {
        prof.samples.push_back(beta * D);
        prof.values.push_back(decay_B4_value(pp, eta, beta, D, spec) * std::pow(beta, -0.5 * pp.alpha()));
    }
    finish_profile(prof);
    return prof;
}

SplitFit split_ratio_B2(double a_exp, double b_exp, double delta, const Vec& z1, const Vec& z2,
                        const std::vector<Vec>& sample_x) {
    if (!(a_exp >= 1.0 && b_exp >= 1.0)) throw DomainError("split_ratio_B2: exponents must be >= 1");
    if (!(delta > 0.0 && delta <= std::min(a_exp, b_exp)))
        throw DomainError("split_ratio_B2: delta must lie in (0, min(exponents)]");
    if (sample_x.empty()) throw DomainError("split_ratio_B2: empty sample set");
    const double sep = (z1 - z2).norm();
    if (!(sep > 0.0)) throw DomainError("split_ratio_B2: centers must differ");
    SplitFit out{0.0, std::numeric_limits<double>::infinity(), {}};
    const double e = a_exp + b_exp - delta;
    for (const Vec& x : sample_x) {
        const double d1 = (x - z1).norm(), d2 = (x - z2).norm();
        const double lhs = std::pow(1.0 + d1, -a_exp) * std::pow(1.0 + d2, -b_exp);
        const double rhs = std::pow(sep, -delta) * (std::pow(1.0 + d1, -e) + std::pow(1.0 + d2, -e));
        const double r = lhs / rhs;
        out.ratios.push_back(r);
        out.fitted_C = std::max(out.fitted_C, r);
        out.min_ratio = std::min(out.min_ratio, r);
    }
    return out;
}

VerificationReport validate_interaction_split_B2(double a_exp, double b_exp, double delta,
                                                 const Vec& z1, const Vec& z2,
                                                 const std::vector<Vec>& sample_x) {
    auto fit = split_ratio_B2(a_exp, b_exp, delta, z1, z2, sample_x);
    VerificationReport rep;
    rep.id = "split_bound_B2";
    rep.add("fitted_C", fit.fitted_C, 0.0, 0.0, Compare::at_least, "max pointwise ratio, must be finite");
    rep.info("min_ratio", fit.min_ratio, "min pointwise ratio");
    rep.info("separation", (z1 - z2).norm(), "|z1 - z2|");
    rep.notes.push_back("the bound constant is fitted, not certified");
    return rep;
}

// ---- weighted norms ----

double norm_weight(const Vec& x, const PolygonConfig& cfg, NormKind kind) {
    const int N = cfg.params.N();
    const double tau = (N - 8.0) / (N - 4.0);
    const double e = kind == NormKind::star ? 0.5 * (N - 4.0) : 0.5 * (N + 4.0);
    const double pre = std::pow(cfg.beta, e);
    double w = 0.0;
    for (int j = 1; j <= cfg.m; ++j)
        w += pre * std::pow(1.0 + cfg.beta * (x - cfg.center(j)).norm(), -(e + tau));
    return w;
}

std::vector<Vec> weighted_norm_grid(const PolygonConfig& cfg) {
    const int N = cfg.params.N();
    std::vector<Vec> grid;
    std::vector<double> radii{0.0};
    for (int k = 0; k <= 10; ++k) radii.push_back(std::ldexp(1.0, k) / cfg.beta);
    for (int j = 1; j <= cfg.m; ++j) {
        const Vec z = cfg.center(j);
        grid.push_back(z);
        for (size_t s = 1; s < radii.size(); ++s)
            for (int i = 0; i < N; ++i)
                for (double sg : {-1.0, 1.0}) {
                    Vec x = z;
                    x(i) += sg * radii[s];
                    grid.push_back(x);
                }
    }
    const double scale = cfg.r_bar + cfg.x_pp.norm() + 1.0;
    for (double R : {10.0, 100.0, 1000.0})
        for (int i = 0; i < N; ++i)
            for (double sg : {-1.0, 1.0}) {
                Vec x = Vec::Zero(N);
                x(i) = sg * R * scale;
                grid.push_back(x);
            }
    return grid;
}

double weighted_norm(const std::function<double(const Vec&)>& f, const PolygonConfig& cfg,
                     NormKind kind, const std::vector<Vec>& grid) {
    if (grid.empty()) throw DomainError("weighted_norm: empty sample grid");
    double best = 0.0;
    for (const Vec& x : grid) best = std::max(best, std::abs(f(x)) / norm_weight(x, cfg, kind));
    return best;
}

double weighted_norm(const std::function<double(const Vec&)>& f, const PolygonConfig& cfg,
                     NormKind kind) {
    return weighted_norm(f, cfg, kind, weighted_norm_grid(cfg));
}

}  // namespace hartree

#include "hartree/multibubble.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "hartree/errors.hpp"

namespace hartree {

PolygonConfig::PolygonConfig(int m_, double r_bar_, Vec x_pp_, double beta_, ProblemParams params_)
    : m(m_), r_bar(r_bar_), x_pp(std::move(x_pp_)), beta(beta_), params(params_) {
    if (m < 2) throw DomainError("PolygonConfig: m must be >= 2");
    if (!(r_bar > 0.0)) throw DomainError("PolygonConfig: r_bar must be > 0");
    if (!(beta > 0.0)) throw DomainError("PolygonConfig: beta must be > 0");
    if (x_pp.size() != params.N() - 2) throw DomainError("PolygonConfig: x_pp must lie in R^{N-2}");
}

Vec PolygonConfig::center(int j) const {
    const double th = 2.0 * (j - 1) * std::numbers::pi / m;
    Vec z(params.N());
    z(0) = r_bar * std::cos(th);
    z(1) = r_bar * std::sin(th);
    z.tail(params.N() - 2) = x_pp;
    return z;
}

std::vector<Vec> PolygonConfig::centers() const {
    std::vector<Vec> out;
    for (int j = 1; j <= m; ++j) out.push_back(center(j));
    return out;
}

// ---- polygon sums ----

namespace {

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace

double polygon_sine_sum(int m, int N) {
    if (m < 2) throw DomainError("polygon_sum: m must be >= 2");
    std::vector<double> terms;
    terms.reserve(m - 1);
    for (int j = 1; j < m; ++j) terms.push_back(std::pow(std::sin(j * std::numbers::pi / m), -(N - 4.0)));
    return pairwise_sum(terms);
}

double polygon_sum(const PolygonConfig& cfg) {
    const int N = cfg.params.N();
    return std::pow(2.0 * cfg.r_bar, -(N - 4.0)) * polygon_sine_sum(cfg.m, N);
}

double polygon_sum_direct(const PolygonConfig& cfg, int anchor) {
    if (anchor < 1 || anchor > cfg.m) throw DomainError("polygon_sum_direct: anchor out of range");
    const Vec z = cfg.center(anchor);
    std::vector<double> terms;
    for (int j = 1; j <= cfg.m; ++j) {
        if (j == anchor) continue;
        terms.push_back(std::pow((z - cfg.center(j)).norm(), -(cfg.params.N() - 4.0)));
    }
    return pairwise_sum(terms);
}

double polygon_growth_exponent(int N, const std::vector<int>& ms) {
    if (ms.size() < 2) throw DomainError("polygon_growth_exponent: need at least two m values");
    std::vector<double> x, y;
    for (int m : ms) {
        x.push_back(m);
        y.push_back(polygon_sine_sum(m, N));
    }
    return loglog_slope(x, y);
}

// ---- A1 ----

double bubble_l2_squared(int N, double c) {
    if (N < 9) throw DomainError("bubble_l2_squared: N must be >= 9");
    return c * c * std::exp(0.5 * N * std::log(std::numbers::pi) + log_gamma(0.5 * (N - 8.0)) - log_gamma(N - 4.0));
}

double bubble_l2_squared_quadrature(int N, double c, const QuadratureSpec& spec) {
    if (N < 9) throw DomainError("bubble_l2_squared: N must be >= 9");
    auto f = [N](double r) { return std::pow(r, N - 1.0) * std::pow(1.0 + r * r, -(N - 4.0)); };
    return c * c * sphere_area(N - 1) * integrate_1d(f, 0.0, INFINITY, spec).value;
}

double constant_A1(const ProblemParams& pp) { return bubble_l2_squared(pp.N(), bubble_amplitude(pp)); }

// ---- A2 ----

double pair_interaction(const ProblemParams& pp, double d, double beta, PairChannel channel,
                        const QuadratureSpec& spec) {
    if (!(d > 0.0)) throw DomainError("pair_interaction: d must be > 0");
    if (!(beta > 0.0)) throw DomainError("pair_interaction: beta must be > 0");
    const int N = pp.N();
    const double a = pp.alpha(), p = pp.p();
    const double C = bubble_amplitude(pp);
    const double KC = i_of_s(N, 0.5 * a) * std::pow(C, p);
    auto W = [=](double r) { return C * std::pow(beta / (1.0 + beta * beta * r * r), 0.5 * (N - 4.0)); };
    auto f = [=](double r) {
        const double b2r2 = beta * beta * r * r;
        const double q = beta / (1.0 + b2r2);
        const double shape = (1.0 - b2r2) / (1.0 + b2r2);
        const double w = W(r);
        double out = 0.0;
        if (channel != PairChannel::local)
            out += std::pow(w, p - 1.0) * KC * 0.5 * a * std::pow(q, 0.5 * a - 1.0) * shape / (1.0 + b2r2);
        if (channel != PairChannel::nonlocal)
            out += (p - 1.0) * KC * std::pow(q, 0.5 * a) * std::pow(w, p - 1.0) * (N - 4.0) / (2.0 * beta) * shape;
        return out;
    };
    return two_center_integral(f, W, d, N, spec).value;
}

double constant_A2_closed(const ProblemParams& pp) {
    const double C = bubble_amplitude(pp);
    return (pp.N() - 4.0) * C * C / (2.0 * green_constant(pp.N()));
}

namespace {

// Neville extrapolation of (h_i, y_i) to h = 0.
double extrapolate_zero(std::vector<double> h, std::vector<double> y) {
    const std::size_t n = h.size();
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t i = n - 1; i >= k; --i) {
            y[i] = (h[i - k] * y[i] - h[i] * y[i - 1]) / (h[i - k] - h[i]);
            if (i == k) break;
        }
    return y[n - 1];
}

}  // namespace

A2Estimate constant_A2(const ProblemParams& pp, const QuadratureSpec& spec) {
    require_quad_selftest();
    const int N = pp.N();
    A2Estimate est{};
    est.d = {8.0, 16.0, 32.0, 64.0};
    std::vector<double> h, nonlocal, local;
    for (double d : est.d) {
        const double pn = pair_interaction(pp, d, 1.0, PairChannel::nonlocal, spec);
        const double pl = pair_interaction(pp, d, 1.0, PairChannel::local, spec);
        nonlocal.push_back(std::abs(pn));
        local.push_back(std::abs(pl));
        est.scaled.push_back(-std::pow(d, N - 4.0) * (pn + pl));
        h.push_back(1.0 / d);
    }
    est.value = extrapolate_zero(h, est.scaled);
    const double e3 = extrapolate_zero({h.begin() + 1, h.end()}, {est.scaled.begin() + 1, est.scaled.end()});
    est.uncertainty = std::abs(est.value - e3);
    est.closed_form = constant_A2_closed(pp);
    est.exponent_nonlocal = loglog_slope(est.d, nonlocal);
    est.exponent_local = loglog_slope(est.d, local);
    if (!(est.value > 0.0) || est.uncertainty > 0.01 * std::abs(est.value)) {
        std::string prof = "constant_A2: extrapolation unstable; -d^{N-4}P(d) =";
        for (double s : est.scaled) prof += " " + std::to_string(s);
        throw NumericError(prof, est.value, est.uncertainty);
    }
    return est;
}

InteractionConstants interaction_constants(const ProblemParams& pp, const QuadratureSpec& spec) {
    const A2Estimate a2 = constant_A2(pp, spec);
    return {constant_A1(pp), a2.value, a2.uncertainty};
}

double constant_A3(const PolygonConfig& cfg, const InteractionConstants& consts) {
    return consts.A2 * polygon_sum(cfg) / std::pow(static_cast<double>(cfg.m), cfg.params.N() - 4.0);
}

double beta_of_t(double t, int m, int N) { return t * std::pow(static_cast<double>(m), (N - 4.0) / (N - 8.0)); }

double t_of_beta(const PolygonConfig& cfg) {
    const int N = cfg.params.N();
    return cfg.beta * std::pow(static_cast<double>(cfg.m), -(N - 4.0) / (N - 8.0));
}

// ---- reduced system ----

namespace {

Vec potential_point(const PolygonConfig& cfg) {
    Vec z(cfg.params.N() - 1);
    z(0) = cfg.r_bar;
    z.tail(cfg.params.N() - 2) = cfg.x_pp;
    return z;
}

double positive_potential(const PotentialModel& V, const Vec& z) {
    const double v = V.value(z);
    if (!(v > 0.0)) throw DomainError("reduced_residuals: V must be positive at the probe point");
    return v;
}

}  // namespace

Vec reduced_residuals(const PolygonConfig& cfg, const PotentialModel& V, const InteractionConstants& consts) {
    const int N = cfg.params.N();
    if (V.N() != N) throw DomainError("reduced_residuals: potential dimension mismatch");
    const Vec z = potential_point(cfg);
    const double v = positive_potential(V, z);
    const double t = t_of_beta(cfg);
    Vec out(N);
    out.head(N - 1) = V.r4_jet(z).g;
    out(N - 1) = -consts.A1 * v / std::pow(t, 5.0) + constant_A3(cfg, consts) / std::pow(t, N - 3.0);
    return out;
}

Vec reduced_residuals_scaled(const PolygonConfig& cfg, const PotentialModel& V, const InteractionConstants& consts) {
    const int N = cfg.params.N();
    if (V.N() != N) throw DomainError("reduced_residuals: potential dimension mismatch");
    const Vec z = potential_point(cfg);
    const double v = positive_potential(V, z);
    const double t = t_of_beta(cfg);
    Vec out(N);
    out.head(N - 1) = V.r4_jet(z).g;
    out(N - 1) = -v + constant_A3(cfg, consts) / consts.A1 * std::pow(t, -(N - 8.0));
    return out;
}

Eigen::MatrixXd reduced_jacobian(const PolygonConfig& cfg, const PotentialModel& V, const InteractionConstants& consts) {
    const int N = cfg.params.N();
    const Vec z = potential_point(cfg);
    positive_potential(V, z);
    const double t = t_of_beta(cfg);
    const double q = constant_A3(cfg, consts) / consts.A1;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
    J.topLeftCorner(N - 1, N - 1) = V.r4_jet(z).h;
    const Jet2 vj = V.jet(z);
    J.row(N - 1).head(N - 1) = -vj.g.transpose();
    J(N - 1, 0) += -(N - 4.0) / cfg.r_bar * q * std::pow(t, -(N - 8.0));
    J(N - 1, N - 1) = -(N - 8.0) * q * std::pow(t, -(N - 7.0));
    return J;
}

bool PotentialBox::contains(double r, const Vec& xpp) const {
    return r >= r_lo && r <= r_hi && (xpp - xpp_center).norm() <= xpp_radius;
}

void PotentialBox::validate(int N) const {
    if (!(r_lo > 0.0 && r_hi > r_lo)) throw DomainError("box: need 0 < r_lo < r_hi");
    if (xpp_center.size() != N - 2) throw DomainError("box: xpp_center must have N-2 entries");
    if (!(xpp_radius > 0.0)) throw DomainError("box: xpp_radius must be > 0");
}

PotentialConfig potential_config_from_json(const json& j, int N) {
    try {
        PotentialConfig c;
        c.expression = j.at("expression").get<std::string>();
        const json& b = j.at("box");
        const auto r = b.at("r").get<std::vector<double>>();
        if (r.size() != 2) throw DomainError("potential config: box.r must be [lo, hi]");
        c.box.r_lo = r[0];
        c.box.r_hi = r[1];
        const auto xc = b.at("xpp_center").get<std::vector<double>>();
        c.box.xpp_center = Eigen::Map<const Vec>(xc.data(), static_cast<Eigen::Index>(xc.size()));
        c.box.xpp_radius = b.at("xpp_radius").get<double>();
        c.L0 = j.at("constants").at("L0").get<double>();
        c.L1 = j.at("constants").at("L1").get<double>();
        c.box.validate(N);
        if (!(c.L0 > 0.0 && c.L1 > c.L0)) throw DomainError("potential config: need 0 < L0 < L1");
        return c;
    } catch (const json::exception& e) {
        throw DomainError(std::string("potential config: ") + e.what());
    }
}

PotentialConfig load_potential_config(const std::string& path, int N) {
    std::ifstream in(path);
    if (!in) throw DomainError("potential config: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DomainError(std::string("potential config: ") + e.what());
    }
    return potential_config_from_json(j, N);
}

DegreeEstimate degree_heuristic(const PotentialModel& V, const PotentialBox& box, int samples_per_face) {
    const int n = V.dim();
    box.validate(V.N());
    Vec center(n);
    center(0) = 0.5 * (box.r_lo + box.r_hi);
    center.tail(n - 1) = box.xpp_center;
    std::mt19937_64 rng(0xd3e9ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto ball_point = [&](double radius) {
        Vec u(n - 1);
        for (int i = 0; i < n - 1; ++i) u(i) = gauss(rng);
        return Vec(box.xpp_center + radius * u.normalized());
    };
    DegreeEstimate est{0, 0, 0, 0};
    auto probe = [&](const Vec& z) {
        const double s = V.r4_jet(z).g.dot(z - center);
        ++est.samples;
        if (s > 0.0) ++est.outward;
        else if (s < 0.0) ++est.inward;
    };
    for (int k = 0; k < samples_per_face; ++k) {
        for (double r : {box.r_lo, box.r_hi}) {
            Vec z(n);
            z(0) = r;
            z.tail(n - 1) = ball_point(box.xpp_radius * std::pow(unif(rng), 1.0 / (n - 1)));
            probe(z);
        }
        Vec z(n);
        z(0) = box.r_lo + (box.r_hi - box.r_lo) * unif(rng);
        z.tail(n - 1) = ball_point(box.xpp_radius);
        probe(z);
    }
    if (est.outward == est.samples) est.degree = 1;
    else if (est.inward == est.samples) est.degree = (n % 2 == 0) ? 1 : -1;
    return est;
}

bool alpha_below_range(const ProblemParams& pp) { return pp.alpha() < 6.0 - 12.0 / (pp.N() - 4.0); }

SolveResult solve_reduced(const PotentialModel& V, int m, const PolygonConfig& initial,
                          const InteractionConstants& consts, const SolveOptions& opt) {
    const ProblemParams pp = initial.params;
    const int N = pp.N();
    if (V.N() != N) throw DomainError("solve_reduced: potential dimension mismatch");
    opt.box.validate(N);
    if (!opt.box.contains(initial.r_bar, initial.x_pp)) throw DomainError("solve_reduced: initial guess outside the box");
    if (!(opt.L0 > 0.0 && opt.L1 > opt.L0)) throw DomainError("solve_reduced: need 0 < L0 < L1");

    PolygonConfig cfg(m, initial.r_bar, initial.x_pp, initial.beta, pp);
    auto unpack = [&](const Vec& u) {
        return PolygonConfig(m, u(0), u.segment(1, N - 2), beta_of_t(u(N - 1), m, N), pp);
    };
    Vec u(N);
    u(0) = cfg.r_bar;
    u.segment(1, N - 2) = cfg.x_pp;
    u(N - 1) = t_of_beta(cfg);

    SolveResult res{false, cfg, u(N - 1), 0.0, 0.0, {}, {}, {}, {}};
    Vec F = reduced_residuals_scaled(cfg, V, consts);
    double fn = F.norm();
    res.trace.push_back({0, u(0), u(N - 1), fn, 0.0});
    for (int it = 1; it <= opt.max_iter && fn >= opt.tol; ++it) {
        const Eigen::MatrixXd J = reduced_jacobian(cfg, V, consts);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double cond = sv(0) / sv(sv.size() - 1);
        if (!(cond < 1e13)) throw NumericError("solve_reduced: Jacobian is singular (condition number " + std::to_string(cond) + ")", fn, cond);
        const Vec step = -svd.solve(F);
        double lam = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= 40; ++halving, lam *= 0.5) {
            const Vec trial = u + lam * step;
            if (!(trial(0) > 0.0 && trial(N - 1) > 0.0)) continue;
            const PolygonConfig tc = unpack(trial);
            double tn;
            try {
                tn = reduced_residuals_scaled(tc, V, consts).norm();
            } catch (const DomainError&) {
                continue;
            }
            if (tn <= (1.0 - 1e-4 * lam) * fn) {
                u = trial;
                cfg = tc;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            res.failure = "line search failed after 40 halvings";
            break;
        }
        F = reduced_residuals_scaled(cfg, V, consts);
        fn = F.norm();
        res.trace.push_back({it, u(0), u(N - 1), fn, lam});
        if (!opt.box.contains(u(0), u.segment(1, N - 2))) {
            res.failure = "iterate left the box";
            break;
        }
    }
    res.config = cfg;
    res.t = u(N - 1);
    res.residual_norm = fn;
    res.converged = res.failure.empty() && fn < opt.tol;
    if (res.failure.empty() && !res.converged) res.failure = "no convergence within max_iter";
    const double v = V.value(potential_point(cfg));
    res.t_closed = std::pow(constant_A3(cfg, consts) / (consts.A1 * v), 1.0 / (N - 8.0));
    res.degree = degree_heuristic(V, opt.box);

    VerificationReport& rep = res.report;
    rep.id = "reduced_solver";
    rep.set_params(pp);
    rep.add("converged", res.converged ? 1.0 : 0.0, 1.0, 0.0, Compare::abs_eq, "Newton termination");
    rep.add("residual_norm", fn, 0.0, opt.tol, Compare::at_most, "scaled residual norm");
    rep.info("iterations", static_cast<double>(res.trace.size() - 1), "Newton steps taken");
    rep.info("r_bar", cfg.r_bar, "solution");
    for (int i = 0; i < N - 2; ++i) rep.info("x_pp_" + std::to_string(i + 3), cfg.x_pp(i), "solution");
    rep.info("t", res.t, "solution");
    rep.info("beta", cfg.beta, "t m^{(N-4)/(N-8)}");
    rep.add("t_vs_balance", res.t, res.t_closed, 1e-8, Compare::rel_eq, "(A3/(A1 V))^{1/(N-8)}");
    rep.add("t_above_L0", res.t, opt.L0, 0.0, Compare::at_least, "beta range");
    rep.add("t_below_L1", res.t, opt.L1, 0.0, Compare::at_most, "beta range");
    rep.add("degree_nonzero", std::abs(res.degree.degree), 1.0, 0.0, Compare::at_least,
            "boundary sign sampling, heuristic").warn_only = true;
    rep.info("A2_uncertainty_rel", consts.A2_uncertainty / consts.A2, "extrapolation gap");
    if (alpha_below_range(pp)) {
        rep.add("alpha_range", pp.alpha(), 6.0 - 12.0 / (N - 4.0), 0.0, Compare::at_least,
                "alpha >= 6 - 12/(N-4)").warn_only = true;
    }
    if (!res.failure.empty()) rep.notes.push_back(res.failure);
    return res;
}

}  // namespace hartree

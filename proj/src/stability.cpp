#include "hartree/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "hartree/errors.hpp"
#include "hartree/gegenbauer.hpp"
#include "hartree/spectral.hpp"

namespace hartree {

NormW norm_W_squared(const ProblemParams& pp, const QuadratureSpec& spec) {
    const int N = pp.N();
    const double p = pp.p();
    const double C = bubble_amplitude(pp);
    const double pref = i_of_s(N, 0.5 * pp.alpha()) * std::pow(C, 2.0 * p) * sphere_area(N - 1);
    auto f = [N](double r) { return std::pow(r, N - 1.0) * std::pow(1.0 + r * r, -static_cast<double>(N)); };
    NormW out{};
    out.convolution = pref * integrate_1d(f, 0.0, INFINITY, spec).value;
    // int_0^inf r^{N-1} (1+r^2)^{-N} dr = B(N/2, N/2) / 2
    out.beta_form = pref * 0.5 * std::exp(2.0 * log_gamma(0.5 * N) - log_gamma(N));
    const double a = C * std::pow(2.0, -0.5 * (N - 4.0));
    out.sphere_form = paneitz_eigenvalue(N, 0) * a * a * sphere_area(N);
    out.from_Sstar = std::pow(sharp_constants(pp).Sstar, p / (p - 1.0));
    return out;
}

double deficit_quadratic_form(const ProblemParams& pp, int k) {
    if (k < 2) throw DomainError("deficit_quadratic_form: k must be >= 2 (k = 0, 1 are tangent to the manifold)");
    const auto sec = sector_spectrum(pp, std::max(k, 2));
    return 1.0 - sec[k].rho_k;
}

// ---- zonal machinery ----

namespace {

struct Basis {
    int N, K;
    double lam;
    double area;  // |S^N|
    double a;     // sphere image of W
    double normW;
    double QW;
    std::vector<double> t, w;               // nodes, weights including |S^{N-1}|
    std::vector<std::vector<double>> Y;     // Y[j][i]
    std::vector<double> nrm, P, lam_alpha;  // ||Y_j||^2, P_j, lambda_j(alpha)

    Basis(const ProblemParams& pp, const ZonalDiscretization& d) : N(pp.N()), K(d.K) {
        if (d.K < 2 || d.nodes < d.K) throw DomainError("zonal discretization: need 2 <= K <= nodes");
        lam = zonal_index(N);
        area = sphere_area(N);
        a = bubble_amplitude(pp) * std::pow(2.0, -0.5 * (N - 4.0));
        const GaussRule& rule = gauss_gegenbauer(d.nodes, lam);
        t = rule.nodes;
        const double s1 = sphere_area(N - 1);
        for (double wi : rule.weights) w.push_back(s1 * wi);
        Y.assign(K + 1, std::vector<double>(t.size()));
        std::vector<double> tmp;
        for (size_t i = 0; i < t.size(); ++i) {
            gegenbauer_normalized_all(K, lam, t[i], tmp);
            for (int j = 0; j <= K; ++j) Y[j][i] = tmp[j];
        }
        for (int j = 0; j <= K; ++j) {
            nrm.push_back(zonal_norm_squared(N, j));
            P.push_back(paneitz_eigenvalue(N, j));
            lam_alpha.push_back(lambda_k(N, pp.alpha(), j));
        }
        normW = P[0] * a * a * area;
        QW = lam_alpha[0] * std::pow(a, 2.0 * pp.p()) * area;
    }

    std::vector<double> project(const std::vector<double>& v) const {
        std::vector<double> c(K + 1);
        for (int j = 0; j <= K; ++j) {
            long double s = 0.0L;
            for (size_t i = 0; i < t.size(); ++i) s += static_cast<long double>(w[i]) * v[i] * Y[j][i];
            c[j] = static_cast<double>(s) / nrm[j];
        }
        return c;
    }

    double synthesize(const std::vector<double>& c, double x) const {
        std::vector<double> y;
        gegenbauer_normalized_all(K, lam, x, y);
        long double s = 0.0L;
        for (int j = 0; j <= K; ++j) s += static_cast<long double>(c[j]) * y[j];
        return static_cast<double>(s);
    }
};

void check_state(const ZonalState& u, const Basis& b) {
    if (u.coeffs.size() != static_cast<size_t>(b.K + 1) || u.excess_nodes.size() != b.t.size())
        throw DomainError("zonal state does not match the discretization");
}

// ||u||^2 - ||W||^2
double norm_excess(const ZonalState& u, const Basis& b) {
    long double s = 2.0L * b.a * b.P[0] * b.area * u.coeffs[0];
    for (int j = 0; j <= b.K; ++j) s += static_cast<long double>(b.P[j]) * b.nrm[j] * u.coeffs[j] * u.coeffs[j];
    return static_cast<double>(s);
}

}  // namespace

double sector_direction_gamma(const ProblemParams& pp, int k) {
    if (k < 0) throw DomainError("sector direction: k must be >= 0");
    return 1.0 / std::sqrt(paneitz_eigenvalue(pp.N(), k) * zonal_norm_squared(pp.N(), k));
}

ZonalState sector_direction_state(const ProblemParams& pp, int k, double eps, const ZonalDiscretization& disc) {
    Basis b(pp, disc);
    if (k > b.K) throw DomainError("sector direction: k exceeds the harmonic cutoff");
    const double amp = eps * sector_direction_gamma(pp, k);
    ZonalState u{pp, {}, std::vector<double>(b.K + 1, 0.0), false};
    u.coeffs[k] = amp;
    for (size_t i = 0; i < b.t.size(); ++i) u.excess_nodes.push_back(amp * b.Y[k][i]);
    const double p = pp.p();
    u.truncated = !(p == std::round(p) && p * k <= b.K);
    return u;
}

ZonalState rescaled_state(const ZonalState& u, double rho, const ZonalDiscretization& disc) {
    if (!(rho > 0.0)) throw DomainError("rescaled_state: rho must be > 0");
    Basis b(u.params, disc);
    check_state(u, b);
    const int N = b.N;
    const double sm1 = (rho - 1.0) * (rho - 1.0) / (2.0 * rho);
    const double s = (rho * rho - 1.0) / (2.0 * rho);
    ZonalState out{u.params, {}, {}, true};
    for (double t : b.t) {
        const double fm1 = std::expm1(-0.5 * (N - 4.0) * std::log1p(sm1 - s * t));
        const double tp = ((1.0 + t) - rho * rho * (1.0 - t)) / ((1.0 + t) + rho * rho * (1.0 - t));
        out.excess_nodes.push_back(b.a * fm1 + (1.0 + fm1) * b.synthesize(u.coeffs, tp));
    }
    out.coeffs = b.project(out.excess_nodes);
    return out;
}

double deficit(const ZonalState& u, const ZonalDiscretization& disc) {
    Basis b(u.params, disc);
    check_state(u, b);
    const double p = u.params.p();
    const double ap = std::pow(b.a, p);
    std::vector<double> H;
    for (double e : u.excess_nodes) {
        if (!(e > -b.a)) throw DomainError("deficit: state is not positive on the sphere");
        H.push_back(ap * std::expm1(p * std::log1p(e / b.a)));
    }
    const std::vector<double> h = b.project(H);
    long double dq = static_cast<long double>(b.lam_alpha[0]) * b.area * (2.0 * ap * h[0] + h[0] * h[0]);
    for (int j = 1; j <= b.K; ++j) dq += static_cast<long double>(b.lam_alpha[j]) * b.nrm[j] * h[j] * h[j];
    const double rel = static_cast<double>(dq) / b.QW;
    return norm_excess(u, b) - b.normW * std::expm1(std::log1p(rel) / p);
}

// ---- distance ----

namespace {

struct DistanceEval {
    double D;
    double Delta;
};

// theta = (log beta, y)
DistanceEval distance_eval(const ZonalState& u, const Basis& b, double E, const Eigen::VectorXd& theta) {
    const int N = b.N;
    const double beta = std::exp(theta(0));
    const double y2 = theta.tail(N).squaredNorm();
    const double sm1 = 0.5 * ((beta - 1.0) * (beta - 1.0) / beta + beta * y2);
    const double s = std::sqrt(sm1 * (sm1 + 2.0));
    const double shat = s > 0.0 ? std::clamp(0.5 * (beta - 1.0 / beta - beta * y2) / s, -1.0, 1.0) : 1.0;
    std::vector<double> gm1(b.t.size());
    for (size_t i = 0; i < b.t.size(); ++i) gm1[i] = std::expm1(-0.5 * (N + 4.0) * std::log1p(sm1 - s * b.t[i]));
    std::vector<double> yh;
    gegenbauer_normalized_all(b.K, b.lam, shat, yh);
    long double mu0 = 0.0L;
    for (size_t i = 0; i < b.t.size(); ++i) mu0 += static_cast<long double>(b.w[i]) * gm1[i];
    long double acc = -static_cast<long double>(b.a) * mu0 - u.coeffs[0] * (b.area + mu0);
    for (int j = 1; j <= b.K; ++j) {
        if (u.coeffs[j] == 0.0) continue;
        long double mu = 0.0L;
        for (size_t i = 0; i < b.t.size(); ++i) mu += static_cast<long double>(b.w[i]) * gm1[i] * b.Y[j][i];
        acc -= u.coeffs[j] * mu * yh[j];
    }
    const double Delta = b.P[0] * b.a * static_cast<double>(acc);
    return {E + 2.0 * Delta - Delta * Delta / b.normW, Delta};
}

}  // namespace

DistanceResult distance_to_manifold(const ZonalState& u, const ZonalDiscretization& disc) {
    Basis b(u.params, disc);
    check_state(u, b);
    const int n = b.N + 1;
    const double E = norm_excess(u, b);
    auto D = [&](const Eigen::VectorXd& th) { return distance_eval(u, b, E, th).D; };

    // coarse scan in log beta along y = 0; includes the on-manifold start beta = 1
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
    double best = D(theta);
    for (int i = -16; i <= 16; ++i) {
        Eigen::VectorXd th = Eigen::VectorXd::Zero(n);
        th(0) = 0.25 * i;
        const double v = D(th);
        if (v < best) {
            best = v;
            theta = th;
        }
    }

    DistanceResult res{best, 1.0, 1.0, 0.0, 0, {best}};
    const double h = 1e-4;
    for (int it = 0; it < 60; ++it) {
        const double f0 = D(theta);
        Eigen::VectorXd g(n);
        Eigen::MatrixXd H(n, n);
        std::vector<double> fp(n), fm(n);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd a = theta, c = theta;
            a(i) += h;
            c(i) -= h;
            fp[i] = D(a);
            fm[i] = D(c);
            g(i) = (fp[i] - fm[i]) / (2 * h);
            H(i, i) = (fp[i] - 2 * f0 + fm[i]) / (h * h);
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                Eigen::VectorXd pp = theta, pm = theta, mp = theta, mm = theta;
                pp(i) += h, pp(j) += h;
                pm(i) += h, pm(j) -= h;
                mp(i) -= h, mp(j) += h;
                mm(i) -= h, mm(j) -= h;
                H(i, j) = H(j, i) = (D(pp) - D(pm) - D(mp) + D(mm)) / (4 * h * h);
            }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        Eigen::VectorXd step;
        if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0).all())
            step = -ldlt.solve(g);
        else
            step = -g / std::max(H.diagonal().cwiseAbs().maxCoeff(), 1e-300);
        double lam = 1.0;
        bool moved = false;
        for (int k = 0; k <= 40; ++k, lam *= 0.5) {
            const Eigen::VectorXd trial = theta + lam * step;
            const double ft = D(trial);
            if (ft <= f0) {
                theta = trial;
                moved = ft < f0;
                break;
            }
        }
        res.iterations = it + 1;
        res.trace.push_back(D(theta));
        if (!moved || (lam * step).norm() < 1e-12) break;
    }
    const DistanceEval fin = distance_eval(u, b, E, theta);
    res.dist2 = fin.D;
    res.c = 1.0 - fin.Delta / b.normW;
    res.beta = std::exp(theta(0));
    res.y_norm = theta.tail(b.N).norm();
    return res;
}

// ---- experiment ----

bool stability_supported(const ProblemParams& pp) { return pp.alpha() == 8.0; }

DeficitExperiment deficit_experiment(const ProblemParams& pp, int k, const std::vector<double>& epsilons,
                                     bool approximate, const ZonalDiscretization& disc) {
    if (k < 2) throw DomainError("deficit_experiment: k must be >= 2");
    if (!stability_supported(pp)) {
        if (!approximate) throw DomainError("deficit_experiment: unsupported parameters (p != 2) without approximate flag");
        if (!pp.p_ge_two()) throw DomainError("deficit_experiment: approximate tier requires p >= 2");
    }
    if (epsilons.size() < 2) throw DomainError("deficit_experiment: need at least two amplitudes");
    for (size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0)) throw DomainError("deficit_experiment: amplitudes must be > 0");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw DomainError("deficit_experiment: amplitudes must be strictly decreasing");
    }
    DeficitExperiment ex{pp, k, epsilons, {}, deficit_quadratic_form(pp, k), 0.0, !stability_supported(pp), {}};
    std::vector<double> errs;
    double min_def = INFINITY, max_ratio = -INFINITY;
    bool truncated = false;
    for (double eps : epsilons) {
        const ZonalState u = sector_direction_state(pp, k, eps, disc);
        truncated = truncated || u.truncated;
        const double def = deficit(u, disc);
        const DistanceResult dr = distance_to_manifold(u, disc);
        const double ratio = def / dr.dist2;
        ex.rows.push_back({eps, def, dr.dist2, ratio, dr.beta, dr.c});
        errs.push_back(std::abs(ratio - ex.delta_k));
        min_def = std::min(min_def, def);
        max_ratio = std::max(max_ratio, ratio);
    }
    ex.approximate = ex.approximate || truncated;
    ex.order = loglog_slope(epsilons, errs);

    VerificationReport& rep = ex.report;
    rep.id = "stability_k" + std::to_string(k);
    rep.set_params(pp);
    const auto sc = stability_constants(pp);
    rep.add("delta_k_positive", ex.delta_k, 0.0, 0.0, Compare::at_least, "1 - rho_k from the spectral data");
    rep.add("delta_k_at_most_one", ex.delta_k, 1.0, 0.0, Compare::at_most, "1 - rho_k");
    rep.add("min_deficit", min_def, 0.0, 1e-10, Compare::at_least, "deficit is nonnegative");
    rep.add("convergence_order", ex.order, 1.0, 0.05, Compare::at_least, "slope of log|ratio - delta_k| in log eps");
    bool monotone = true;
    for (size_t i = 1; i < errs.size(); ++i) monotone = monotone && errs[i] < errs[i - 1];
    rep.add("monotone_approach", monotone ? 1.0 : 0.0, 1.0, 0.0, Compare::abs_eq, "|ratio - delta_k| decreases");
    rep.add("final_ratio", ex.rows.back().ratio, ex.delta_k, 10.0 * epsilons.back(), Compare::abs_eq,
            "ratio at the smallest eps");
    rep.add("sandwich_upper", max_ratio, sc.upper, 0.0, Compare::at_most, "upper stability constant");
    rep.add("sandwich_lower", ex.rows.back().ratio, sc.lower, 0.0, Compare::at_least,
            "printed lower constant 2(mu - p), normalization differs").warn_only = true;
    if (ex.approximate) rep.notes.push_back("approximate: F^p expanded with a finite harmonic cutoff");
    return ex;
}

}  // namespace hartree

#include "hartree/gegenbauer.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

#include <Eigen/Dense>

#include "hartree/errors.hpp"
#include "hartree/specfun.hpp"

namespace hartree {

double gegenbauer(int k, double lambda, double t) {
    if (k < 0) throw DomainError("gegenbauer: negative degree");
    if (k == 0) return 1.0;
    double g0 = 1.0, g1 = 2.0 * lambda * t;
    for (int n = 1; n < k; ++n) {
        const double g2 = (2.0 * (n + lambda) * t * g1 - (n + 2.0 * lambda - 1.0) * g0) / (n + 1.0);
        g0 = g1;
        g1 = g2;
    }
    return g1;
}

// Y_{n+1} = (2(n+lambda) t Y_n - n Y_{n-1}) / (n + 2 lambda), Y_0 = 1, Y_1 = t
double gegenbauer_normalized(int k, double lambda, double t) {
    if (k < 0) throw DomainError("gegenbauer: negative degree");
    if (k == 0) return 1.0;
    double y0 = 1.0, y1 = t;
    for (int n = 1; n < k; ++n) {
        const double y2 = (2.0 * (n + lambda) * t * y1 - n * y0) / (n + 2.0 * lambda);
        y0 = y1;
        y1 = y2;
    }
    return y1;
}

void gegenbauer_normalized_all(int kmax, double lambda, double t, std::vector<double>& out) {
    out.resize(kmax + 1);
    out[0] = 1.0;
    if (kmax == 0) return;
    out[1] = t;
    for (int n = 1; n < kmax; ++n)
        out[n + 1] = (2.0 * (n + lambda) * t * out[n] - n * out[n - 1]) / (n + 2.0 * lambda);
}

namespace {

GaussRule build_rule(int n, double lambda) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = 0.5 * std::sqrt(i * (i + 2.0 * lambda - 1.0) /
                                         ((i + lambda) * (i + lambda - 1.0)));
        J(i, i - 1) = J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double mu0 = std::exp(0.5 * std::log(std::numbers::pi) + log_gamma(lambda + 0.5) -
                                log_gamma(lambda + 1.0));
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // symmetrize: the rule is even, roundoff in the eigensolver is not
        r.nodes[i] = 0.5 * (es.eigenvalues()(i) - es.eigenvalues()(n - 1 - i));
        const double v = es.eigenvectors()(0, i);
        const double w = es.eigenvectors()(0, n - 1 - i);
        r.weights[i] = 0.5 * mu0 * (v * v + w * w);
    }
    return r;
}

}  // namespace

const GaussRule& gauss_gegenbauer(int n, double lambda) {
    if (n < 1) throw DomainError("gauss_gegenbauer: need at least one node");
    if (!(lambda > -0.5)) throw DomainError("gauss_gegenbauer: lambda must exceed -1/2");
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, lambda}];
    if (!slot) slot = std::make_unique<GaussRule>(build_rule(n, lambda));
    return *slot;
}

const GaussRule& gauss_legendre(int n) { return gauss_gegenbauer(n, 0.5); }

double harmonic_dimension(int N, int k) {
    if (k == 0) return 1.0;
    if (k == 1) return N + 1.0;
    // exact while the binomials fit in 128 bits
    auto binom = [](int n, int r) {
        unsigned __int128 c = 1;
        for (int i = 0; i < r; ++i) c = c * (n - i) / (i + 1);
        return c;
    };
    return static_cast<double>(binom(k + N, k) - binom(k + N - 2, k - 2));
}

double zonal_norm_squared(int N, int k) { return sphere_area(N) / harmonic_dimension(N, k); }

}  // namespace hartree

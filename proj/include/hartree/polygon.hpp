#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hartree/specfun.hpp"

namespace hartree {

using Vec = Eigen::VectorXd;

/// m bubbles of common scale beta on a circle of radius r_bar in the
/// (x1,x2)-plane, sharing the transverse coordinates x_pp in R^{N-2}.
struct PolygonConfig {
    int m;
    double r_bar;
    Vec x_pp;
    double beta;
    ProblemParams params;

    PolygonConfig(int m, double r_bar, Vec x_pp, double beta, ProblemParams params);

    Vec center(int j) const;  // j = 1..m
    std::vector<Vec> centers() const;
};

}  // namespace hartree

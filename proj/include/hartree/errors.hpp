#pragma once

#include <stdexcept>
#include <string>

namespace hartree {

// Precondition violated (bad parameters, pole of a Gamma factor, south pole, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// An iterative or adaptive procedure did not reach its tolerance.
// Carries the best estimate and the error actually achieved.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double best = 0.0, double achieved = 0.0)
        : std::runtime_error(what), best_estimate(best), achieved_error(achieved) {}
    double best_estimate;
    double achieved_error;
};

}  // namespace hartree

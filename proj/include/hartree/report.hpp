#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace hartree {

class ProblemParams;

enum class Status { pass, warn, fail };
std::string to_string(Status s);

/// How a measured value is judged against its target.
enum class Compare {
    rel_eq,    // |v - target| <= tol * |target|
    abs_eq,    // |v - target| <= tol
    at_least,  // v >= target - tol
    at_most,   // v <= target + tol
    info       // recorded only
};

struct Measured {
    std::string name;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    Compare compare = Compare::info;
    std::string provenance;
    bool warn_only = false;  // a miss downgrades the report to warn, not fail

    bool ok() const;
};

struct VerificationReport {
    std::string id;
    std::optional<int> N;
    std::optional<double> alpha;
    std::vector<Measured> measured;
    std::vector<std::string> notes;
    double runtime_seconds = 0.0;  // serialized separately, under "timing"

    void set_params(const ProblemParams& pp);
    Measured& add(std::string name, double value, double target, double tol, Compare cmp,
                  std::string provenance);
    Measured& info(std::string name, double value, std::string provenance);
    Status status() const;
    bool passed() const { return status() != Status::fail; }
};

using json = nlohmann::ordered_json;

/// Deterministic body of a report (runtime excluded).
json to_json(const VerificationReport& r);

}  // namespace hartree

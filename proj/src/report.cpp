#include "hartree/report.hpp"

#include <cmath>

#include "hartree/specfun.hpp"

namespace hartree {

std::string to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::warn: return "warn";
        case Status::fail: return "fail";
    }
    return "fail";
}

namespace {

const char* compare_name(Compare c) {
    switch (c) {
        case Compare::rel_eq: return "rel";
        case Compare::abs_eq: return "abs";
        case Compare::at_least: return ">=";
        case Compare::at_most: return "<=";
        case Compare::info: return "info";
    }
    return "info";
}

// NaN and infinities are not representable in JSON
json num(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
}

}  // namespace

bool Measured::ok() const {
    if (!std::isfinite(value)) return compare == Compare::info;
    switch (compare) {
        case Compare::rel_eq: return std::abs(value - target) <= tolerance * std::abs(target);
        case Compare::abs_eq: return std::abs(value - target) <= tolerance;
        case Compare::at_least: return value >= target - tolerance;
        case Compare::at_most: return value <= target + tolerance;
        case Compare::info: return true;
    }
    return false;
}

void VerificationReport::set_params(const ProblemParams& pp) {
    N = pp.N();
    alpha = pp.alpha();
}

Measured& VerificationReport::add(std::string name, double value, double target, double tol,
                                  Compare cmp, std::string provenance) {
    measured.push_back({std::move(name), value, target, tol, cmp, std::move(provenance), false});
    return measured.back();
}

Measured& VerificationReport::info(std::string name, double value, std::string provenance) {
    return add(std::move(name), value, 0.0, 0.0, Compare::info, std::move(provenance));
}

Status VerificationReport::status() const {
    Status s = Status::pass;
    for (const auto& m : measured) {
        if (m.ok()) continue;
        if (!m.warn_only) return Status::fail;
        s = Status::warn;
    }
    return s;
}

json to_json(const VerificationReport& r) {
    json j;
    j["id"] = r.id;
    if (r.N) {
        j["params"] = {{"N", *r.N}, {"alpha", *r.alpha}, {"p", (2.0 * *r.N - *r.alpha) / (*r.N - 4.0)}};
    }
    j["status"] = to_string(r.status());
    json ms = json::array();
    for (const auto& m : r.measured) {
        json e;
        e["name"] = m.name;
        e["value"] = num(m.value);
        e["tolerance"] = num(m.tolerance);
        e["compare"] = compare_name(m.compare);
        if (m.compare != Compare::info) {
            e["target"] = num(m.target);
            e["ok"] = m.ok();
            if (m.warn_only) e["warn_only"] = true;
        }
        e["provenance"] = m.provenance;
        ms.push_back(std::move(e));
    }
    j["measured"] = std::move(ms);
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

}  // namespace hartree

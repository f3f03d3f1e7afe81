#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hartree/quad.hpp"
#include "hartree/report.hpp"

namespace hartree {

inline constexpr int kSchemaVersion = 1;

enum ExitCode { exit_pass = 0, exit_fail = 1, exit_invalid = 2 };

/// Plot-ready numeric table, written as CSV with a header row.
struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string to_csv(const Table& t);

/// A command's full output. Everything nondeterministic lives under
/// report["timing"].
struct CommandResult {
    json report;
    std::vector<Table> tables;
    int exit_code = exit_pass;
};

/// Report body with the "timing" field removed.
json strip_timing(const json& report);

CommandResult cmd_nondegeneracy(int N, double alpha, int kmax);
CommandResult cmd_oracle_suite(const QuadratureSpec& spec);
CommandResult cmd_stability(int N, double alpha, int k, const std::vector<double>& eps, bool approximate);

struct MultibubbleArgs {
    std::string potential_path;
    int N = 9;
    double alpha = 8.0;
    int m = 100;
    std::vector<double> init;  // r, then optionally the N-2 entries of x''
    std::optional<double> init_t;
    std::optional<double> L0, L1;
    std::vector<int> sweep;  // defaults to {m, 2m, 4m}
};

CommandResult cmd_multibubble(const MultibubbleArgs& args);

/// Directory resolution: explicit flag, then HARTREE_REPORT_DIR, then "reports".
std::string resolve_report_dir(const std::optional<std::string>& flag);

/// Writes <stem>.json and <stem>_<table>.csv atomically (temp file + rename).
std::vector<std::string> write_outputs(const CommandResult& r, const std::string& dir, const std::string& stem);

/// Entry point of the hartree executable.
int run_cli(int argc, char** argv);

}  // namespace hartree

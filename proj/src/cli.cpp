#include "hartree/cli.hpp"

#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include <unistd.h>

#include "CLI11.hpp"
#include "hartree/bubble.hpp"
#include "hartree/errors.hpp"
#include "hartree/multibubble.hpp"
#include "hartree/spectral.hpp"
#include "hartree/stability.hpp"

namespace hartree {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json num(double v) {
    if (std::isfinite(v)) return v;
    return fmt(v);
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Collects reports and their timings into one envelope.
class Envelope {
public:
    Envelope(std::string command, json params) : command_(std::move(command)), params_(std::move(params)) {}

    void add(VerificationReport rep, double seconds) {
        rep.runtime_seconds = seconds;
        timing_[rep.id] = seconds;
        const Status s = rep.status();
        if (s == Status::fail) status_ = Status::fail;
        else if (s == Status::warn && status_ == Status::pass) status_ = Status::warn;
        checks_.push_back(to_json(rep));
    }

    template <class F>
    void run(F&& make) {
        const auto t0 = Clock::now();
        VerificationReport rep = make();
        add(std::move(rep), std::chrono::duration<double>(Clock::now() - t0).count());
    }

    void fail_with(const std::string& id, const std::string& message) {
        json j;
        j["id"] = id;
        j["status"] = "fail";
        j["error"] = message;
        checks_.push_back(std::move(j));
        status_ = Status::fail;
    }

    json& data() { return data_; }

    CommandResult finish(std::vector<Table> tables, Clock::time_point start) {
        CommandResult r;
        r.report["schema_version"] = kSchemaVersion;
        r.report["command"] = command_;
        r.report["params"] = params_;
        r.report["status"] = to_string(status_);
        r.report["checks"] = checks_;
        if (!data_.is_null()) r.report["data"] = data_;
        json t;
        t["timestamp"] = utc_timestamp();
        t["total_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
        t["checks"] = timing_;
        r.report["timing"] = t;
        r.tables = std::move(tables);
        r.exit_code = status_ == Status::fail ? exit_fail : exit_pass;
        return r;
    }

private:
    std::string command_;
    json params_;
    json checks_ = json::array();
    json data_;
    json timing_ = json::object();
    Status status_ = Status::pass;
};

}  // namespace

std::string to_csv(const Table& t) {
    std::string out;
    for (size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + fmt(row[i]);
        out += "\n";
    }
    return out;
}

json strip_timing(const json& report) {
    json j = report;
    j.erase("timing");
    return j;
}

// ---- commands ----

CommandResult cmd_nondegeneracy(int N, double alpha, int kmax) {
    const auto start = Clock::now();
    const ProblemParams pp(N, alpha);
    if (kmax < 2 || kmax > 500) throw DomainError("nondegeneracy: kmax must lie in [2, 500]");
    Envelope env("nondegeneracy", {{"N", N}, {"alpha", alpha}, {"p", pp.p()}, {"kmax", kmax}});
    env.run([&] { return nondegeneracy_check(pp, kmax); });
    Table t{"spectrum", {"k", "lambda_k_N4", "lambda_k_alpha", "rho_k", "mu_k", "dim_k"}, {}};
    for (const auto& s : sector_spectrum(pp, kmax))
        t.rows.push_back({double(s.k), s.lambda_k_N4, s.lambda_k_alpha, s.rho_k, s.mu_k, s.dim_k});
    return env.finish({t}, start);
}

CommandResult cmd_oracle_suite(const QuadratureSpec& spec) {
    const auto start = Clock::now();
    spec.validate();
    Envelope env("oracle-suite", {{"rel_tol", spec.rel_tol},
                                  {"abs_tol", spec.abs_tol},
                                  {"max_subdivisions", spec.max_subdivisions},
                                  {"mc_samples", spec.mc_samples},
                                  {"seed", spec.seed}});
    env.run([] { return quad_selftest(); });

    Table fh{"funk_hecke", {"N", "s", "k", "numeric", "closed_form", "rel_err"}, {}};
    env.run([&] {
        VerificationReport rep;
        rep.id = "funk_hecke";
        for (auto [N, s] : {std::pair{9, 8.0}, {9, 5.0}, {10, 6.0}}) {
            for (int k = 0; k <= 10; ++k) {
                const double num_v = funk_hecke_numeric(N, s, k, spec.max_subdivisions);
                const double exact = lambda_k(N, s, k);
                fh.rows.push_back({double(N), s, double(k), num_v, exact, num_v / exact - 1.0});
                rep.add("N=" + std::to_string(N) + ",s=" + fmt(s) + ",k=" + std::to_string(k), num_v, exact, 1e-8,
                        Compare::rel_eq, "Gamma closed form");
            }
        }
        return rep;
    });
    const ProblemParams p98(9, 8.0);
    for (int k = 0; k <= 10; ++k) env.run([&] { return composed_kernel_check(p98, k); });
    env.run([&] { return riesz_identity_check(p98, {0.3, 1.0, 2.5, 6.0, 15.0}); });
    env.run([&] {
        VerificationReport rep;
        rep.id = "monte_carlo_bipolar";
        rep.set_params(p98);
        auto f = [](double r) { return std::pow(1.0 + r * r, -2.5); };
        auto g = [](double r) { return std::pow(1.0 + r * r, -3.0); };
        const double q = two_center_integral(f, g, 2.0, 9, spec).value;
        const MonteCarloResult mc = monte_carlo_two_center(f, g, 2.0, 9, spec);
        rep.info("quadrature", q, "bipolar reduction, d = 2");
        rep.info("monte_carlo", mc.mean, "seeded importance sampling");
        rep.add("deviation_in_std_errors", std::abs(mc.mean - q) / mc.std_error, 3.0, 0.0, Compare::at_most,
                "agreement within 3 standard errors");
        return rep;
    });
    env.run([&] { return pde_residual_check(p98, 200, 5.0, spec.seed); });
    return env.finish({fh}, start);
}

CommandResult cmd_stability(int N, double alpha, int k, const std::vector<double>& eps, bool approximate) {
    const auto start = Clock::now();
    const ProblemParams pp(N, alpha);
    Envelope env("stability", {{"N", N}, {"alpha", alpha}, {"p", pp.p()}, {"k", k}, {"eps", eps},
                               {"approximate", approximate}});
    const auto t0 = Clock::now();
    const DeficitExperiment ex = deficit_experiment(pp, k, eps, approximate);
    env.add(ex.report, std::chrono::duration<double>(Clock::now() - t0).count());
    env.run([&] {
        VerificationReport rep;
        rep.id = "norm_W";
        rep.set_params(pp);
        const NormW n = norm_W_squared(pp);
        rep.add("convolution", n.convolution, n.beta_form, 1e-8, Compare::rel_eq, "Beta closed form");
        rep.add("sphere_form", n.sphere_form, n.beta_form, 1e-8, Compare::rel_eq, "Beta closed form");
        rep.add("from_Sstar", n.from_Sstar, n.beta_form, 1e-8, Compare::rel_eq, "Sstar^{p/(p-1)}");
        return rep;
    });
    env.data()["delta_k"] = num(ex.delta_k);
    env.data()["order"] = num(ex.order);
    env.data()["approximate"] = ex.approximate;
    Table t{"deficit", {"eps", "deficit", "dist2", "ratio"}, {}};
    Table tr{"ratio", {"eps", "ratio"}, {}};
    for (const auto& r : ex.rows) {
        t.rows.push_back({r.eps, r.deficit, r.dist2, r.ratio});
        tr.rows.push_back({r.eps, r.ratio});
    }
    return env.finish({t, tr}, start);
}

CommandResult cmd_multibubble(const MultibubbleArgs& args) {
    const auto start = Clock::now();
    const ProblemParams pp(args.N, args.alpha);
    const int N = pp.N();
    PotentialConfig cfg = load_potential_config(args.potential_path, N);
    if (args.L0) cfg.L0 = *args.L0;
    if (args.L1) cfg.L1 = *args.L1;
    if (!(cfg.L0 > 0.0 && cfg.L1 > cfg.L0)) throw DomainError("multibubble: need 0 < L0 < L1");
    if (args.m < 2) throw DomainError("multibubble: m must be >= 2");
    const PotentialModel V = parse_potential(cfg.expression, N);

    double r0 = 0.5 * (cfg.box.r_lo + cfg.box.r_hi);
    Vec x0 = cfg.box.xpp_center;
    if (!args.init.empty()) {
        r0 = args.init[0];
        if (args.init.size() == static_cast<size_t>(N - 1)) {
            for (int i = 0; i < N - 2; ++i) x0(i) = args.init[i + 1];
        } else if (args.init.size() != 1) {
            throw DomainError("multibubble: --init takes r or r followed by the N-2 entries of x''");
        }
    }
    std::vector<int> sweep = args.sweep;
    if (sweep.empty()) sweep = {args.m, 2 * args.m, 4 * args.m};

    Envelope env("multibubble", {{"N", N},
                                 {"alpha", args.alpha},
                                 {"expression", cfg.expression},
                                 {"m", args.m},
                                 {"init_r", r0},
                                 {"L0", cfg.L0},
                                 {"L1", cfg.L1},
                                 {"sweep", sweep}});
    const auto tc = Clock::now();
    const A2Estimate a2 = constant_A2(pp);
    const InteractionConstants consts{constant_A1(pp), a2.value, a2.uncertainty};
    {
        VerificationReport rep;
        rep.id = "interaction_constants";
        rep.set_params(pp);
        rep.add("A1_quadrature", bubble_l2_squared_quadrature(N, bubble_amplitude(pp)), consts.A1, 1e-8,
                Compare::rel_eq, "Beta closed form");
        rep.add("A2_extrapolation_gap", a2.uncertainty / a2.value, 0.0, 0.01, Compare::at_most,
                "3- vs 4-point extrapolant");
        rep.add("A2_vs_closed_form", a2.value, a2.closed_form, 1e-2, Compare::rel_eq, "(N-4) C^2 / (2 C_N)");
        rep.add("exponent_nonlocal", a2.exponent_nonlocal, -(N - 4.0), 0.02 * (N - 4.0), Compare::abs_eq,
                "log-log slope of the nonlocal channel");
        rep.add("exponent_local", a2.exponent_local, -(N - 4.0), 0.02 * (N - 4.0), Compare::abs_eq,
                "log-log slope of the local channel");
        rep.info("A1", consts.A1, "closed form");
        rep.info("A2", consts.A2, "extrapolated");
        env.add(rep, std::chrono::duration<double>(Clock::now() - tc).count());
    }

    SolveOptions opt;
    opt.box = cfg.box;
    opt.L0 = cfg.L0;
    opt.L1 = cfg.L1;
    auto initial_for = [&](int m) {
        PolygonConfig probe(m, r0, x0, 1.0, pp);
        double t0 = 0.0;
        if (args.init_t) {
            t0 = *args.init_t;
        } else {
            t0 = std::pow(constant_A3(probe, consts) / (consts.A1 * V.value([&] {
                                                            Vec z(N - 1);
                                                            z(0) = r0;
                                                            z.tail(N - 2) = x0;
                                                            return z;
                                                        }())),
                          1.0 / (N - 8.0));
        }
        if (!(t0 > 0.0)) throw DomainError("multibubble: initial t must be > 0");
        return PolygonConfig(m, r0, x0, beta_of_t(t0, m, N), pp);
    };

    Table trace{"trace", {"iter", "r_bar", "t", "residual_norm", "step_length"}, {}};
    const auto ts = Clock::now();
    SolveResult main = solve_reduced(V, args.m, initial_for(args.m), consts, opt);
    for (const auto& s : main.trace) trace.rows.push_back({double(s.iter), s.r, s.t, s.residual_norm, s.step_length});
    main.report.id = "reduced_solver_m=" + std::to_string(args.m);
    env.add(main.report, std::chrono::duration<double>(Clock::now() - ts).count());
    json sol;
    sol["converged"] = main.converged;
    sol["r_bar"] = num(main.config.r_bar);
    std::vector<double> xs(main.config.x_pp.data(), main.config.x_pp.data() + main.config.x_pp.size());
    sol["x_pp"] = xs;
    sol["t"] = num(main.t);
    sol["t_balance"] = num(main.t_closed);
    sol["beta"] = num(main.config.beta);
    sol["degree"] = {{"estimate", main.degree.degree},
                     {"samples", main.degree.samples},
                     {"outward", main.degree.outward},
                     {"inward", main.degree.inward},
                     {"kind", "heuristic boundary sign sampling"}};
    if (!main.failure.empty()) sol["failure"] = main.failure;
    env.data()["solution"] = sol;
    env.data()["constants"] = {{"A1", num(consts.A1)}, {"A2", num(consts.A2)}, {"A2_uncertainty", num(consts.A2_uncertainty)}};

    Table sweep_t{"beta_sweep", {"m", "t", "beta", "r_bar"}, {}};
    if (main.converged) {
        const auto tw = Clock::now();
        VerificationReport rep;
        rep.id = "beta_sweep";
        rep.set_params(pp);
        const double expect = std::pow(2.0, (N - 4.0) / (N - 8.0));
        double prev_beta = 0.0;
        int prev_m = 0;
        for (int m : sweep) {
            const SolveResult r = solve_reduced(V, m, initial_for(m), consts, opt);
            sweep_t.rows.push_back({double(m), r.t, r.config.beta, r.config.r_bar});
            rep.add("converged_m=" + std::to_string(m), r.converged ? 1.0 : 0.0, 1.0, 0.0, Compare::abs_eq,
                    "Newton termination");
            if (prev_m > 0 && m == 2 * prev_m)
                rep.add("beta_ratio_m=" + std::to_string(m), r.config.beta / prev_beta, expect, 0.005, Compare::rel_eq,
                        "2^{(N-4)/(N-8)}");
            prev_beta = r.config.beta;
            prev_m = m;
        }
        env.add(rep, std::chrono::duration<double>(Clock::now() - tw).count());
    }
    return env.finish({trace, sweep_t}, start);
}

// ---- output ----

std::string resolve_report_dir(const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv("HARTREE_REPORT_DIR"); env && *env) return env;
    return "reports";
}

namespace {

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

std::vector<std::string> write_outputs(const CommandResult& r, const std::string& dir, const std::string& stem) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    const std::filesystem::path base(dir);
    atomic_write(base / (stem + ".json"), r.report.dump(2) + "\n");
    written.push_back((base / (stem + ".json")).string());
    for (const auto& t : r.tables) {
        const auto p = base / (stem + "_" + t.name + ".csv");
        atomic_write(p, to_csv(t));
        written.push_back(p.string());
    }
    return written;
}

// ---- entry point ----

int run_cli(int argc, char** argv) {
    CLI::App app{"Verification toolkit for the critical biharmonic Hartree equation"};
    app.require_subcommand(1);
    app.fallthrough();
    std::optional<std::string> out_dir;
    app.add_option("--out-dir", out_dir, "report directory (default: $HARTREE_REPORT_DIR, else ./reports)");

    int N = 9, kmax = 20, k = 2;
    double alpha = 8.0;
    auto* nd = app.add_subcommand("nondegeneracy", "sector spectrum and kernel dimension");
    nd->add_option("--N", N, "dimension, N >= 9")->capture_default_str();
    nd->add_option("--alpha", alpha, "Riesz exponent, 0 < alpha < N")->capture_default_str();
    nd->add_option("--kmax", kmax, "highest harmonic degree")->capture_default_str();

    QuadratureSpec spec;
    auto* os = app.add_subcommand("oracle-suite", "Funk-Hecke, composed kernel, convolution and bipolar oracles");
    os->add_option("--rel-tol", spec.rel_tol, "relative tolerance of adaptive quadrature")->capture_default_str();
    os->add_option("--abs-tol", spec.abs_tol, "absolute tolerance of adaptive quadrature")->capture_default_str();
    os->add_option("--max-subdivisions", spec.max_subdivisions, "subdivision budget")->capture_default_str();
    os->add_option("--mc-samples", spec.mc_samples, "Monte Carlo sample count")->capture_default_str();
    os->add_option("--seed", spec.seed, "Monte Carlo and sampling seed")->capture_default_str();

    std::vector<double> eps{1e-1, 1e-2, 1e-3};
    bool approximate = false;
    auto* st = app.add_subcommand("stability", "deficit over squared distance along a sector-k direction");
    st->add_option("--N", N, "dimension")->capture_default_str();
    st->add_option("--alpha", alpha, "Riesz exponent")->capture_default_str();
    st->add_option("--k", k, "harmonic degree, k >= 2")->capture_default_str();
    st->add_option("--eps-list", eps, "strictly decreasing amplitudes")->delimiter(',')->capture_default_str();
    st->add_flag("--approximate", approximate, "allow p != 2 with a finite harmonic cutoff");

    MultibubbleArgs mb;
    double init_t = 0.0;
    auto* mbc = app.add_subcommand("multibubble", "solve the reduced equations for a polygonal configuration");
    mbc->add_option("--potential", mb.potential_path, "potential config file (JSON)")->required();
    mbc->add_option("--N", mb.N, "dimension")->capture_default_str();
    mbc->add_option("--alpha", mb.alpha, "Riesz exponent")->capture_default_str();
    mbc->add_option("--m", mb.m, "number of bubbles")->capture_default_str();
    mbc->add_option("--init", mb.init, "initial r or r,x3,...,xN (default: box center)")->delimiter(',');
    auto* it_opt = mbc->add_option("--init-t", init_t, "initial t (default: balance value at the initial point)");
    double L0 = 0.0, L1 = 0.0;
    auto* l0_opt = mbc->add_option("--L0", L0, "lower t bound, overrides the config");
    auto* l1_opt = mbc->add_option("--L1", L1, "upper t bound, overrides the config");
    mbc->add_option("--sweep", mb.sweep, "m values for the beta table (default: m, 2m, 4m)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_invalid;
    }

    try {
        CommandResult r;
        std::string stem;
        if (*nd) {
            r = cmd_nondegeneracy(N, alpha, kmax);
            stem = "nondegeneracy";
        } else if (*os) {
            r = cmd_oracle_suite(spec);
            stem = "oracle_suite";
        } else if (*st) {
            r = cmd_stability(N, alpha, k, eps, approximate);
            stem = "stability";
        } else {
            if (*it_opt) mb.init_t = init_t;
            if (*l0_opt) mb.L0 = L0;
            if (*l1_opt) mb.L1 = L1;
            r = cmd_multibubble(mb);
            stem = "multibubble";
        }
        for (const auto& p : write_outputs(r, resolve_report_dir(out_dir), stem)) std::cout << p << "\n";
        std::cout << "status: " << r.report["status"].get<std::string>() << "\n";
        return r.exit_code;
    } catch (const ParseError& e) {
        std::cerr << "error: potential expression: " << e.what() << " (offset " << e.offset() << ")\n";
        return exit_invalid;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invalid;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << " (best estimate " << e.best_estimate << ", achieved error "
                  << e.achieved_error << ")\n";
        return exit_fail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_fail;
    }
}

}  // namespace hartree

#pragma once

// Subcommands of the ckn command-line tool. Kept in a header so the test
// suite can drive them with in-memory streams.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ckn/engine.hpp"
#include "ckn/params.hpp"
#include "ckn/profiles.hpp"
#include "ckn/rigidity.hpp"

#ifndef CKN_VERSION
#define CKN_VERSION "0.1.0"
#endif

namespace ckn::cli {

using nlohmann::json;

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kNumerical = 3 };

struct ParamArgs {
    int n = 3;
    double p = 2.0;
    double r = 2.0;
    double alpha = 0.0;
    double beta = 0.0;
};

struct VerifyArgs {
    ParamArgs params;
    double b = 0.0;
    std::string profile = "gaussian";
    double scale = 1.0;
    double lambda = 1.0;
    double c = 1.0;
    std::optional<double> tol;
    std::uint64_t seed = 0;
};

struct SweepArgs {
    std::string config;
    std::string out;
    int workers = 1;
};

struct RigidityArgs {
    ParamArgs params;
    double b = 0.0;
    std::string which = "exp";
    double lambda_min = 0.1;
    double lambda_max = 10.0;
    int points = 20;
    std::string csv;
    std::optional<double> tol;
};

inline const char* const kCsvHeader = "n,p,r,alpha,beta,gamma,b,profile,ratio,bound,margin,identity_residual,pass,error";

/// %.12g: short, round-trip stable across runs and platforms with the same libc.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline double resolve_tol(const std::optional<double>& flag, double fallback) {
    if (flag && !(*flag > 0.0)) throw std::invalid_argument("tolerance must be positive");
    return flag ? *flag : fallback;
}

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json check_entry(const std::string& name, double value, double tol, bool pass) {
    return {{"name", name}, {"value", number_or_null(value)}, {"tol", number_or_null(tol)}, {"pass", pass}};
}

inline json params_json(const CknParams& c) {
    return {{"n", c.n()}, {"p", c.p()}, {"r", c.r()}, {"alpha", c.alpha()}, {"beta", c.beta()}, {"gamma", c.gamma()}};
}

inline json derived_json(const CknParams& c) {
    json d{{"q", c.q()}, {"s", c.s()}, {"p_conj", c.p_conj()}};
    d["c_sharp"] = c.lhs_homogeneity() > 0.0 ? json(sharp_constant(c)) : json(nullptr);
    return d;
}

inline json meta_json(const std::string& command, std::uint64_t seed) {
    return {{"command", command}, {"seed", seed}, {"version", CKN_VERSION}};
}

inline json base_report(const CknParams& c, const std::string& command, std::uint64_t seed) {
    return {{"params", params_json(c)},
            {"derived", derived_json(c)},
            {"case", std::string(to_string(classify_sharpness_case(c)))},
            {"checks", json::array()},
            {"meta", meta_json(command, seed)}};
}

/// Builds the profile named on the command line. "extremal" selects the
/// family matching the parameters' sharpness case.
inline RadialProfile profile_from_args(const CknParams& c, const std::string& name, double scale, double lambda,
                                       double amp) {
    if (name == "extremal") return make_extremal(c, classify_sharpness_case(c), lambda, amp);
    return make_test_profile(parse_test_profile(name), scale);
}

// ---------------------------------------------------------------------------

inline int cmd_check(const ParamArgs& a, std::ostream& out) {
    CknParams c = CknParams::make(a.n, a.p, a.r, a.alpha, a.beta);
    json rep = base_report(c, "check", 0);
    const double n = c.n();
    IntegrabilityReport ir = check_integrability(c);
    rep["checks"].push_back(check_entry("lhs_weight", 1.0 / c.r() - c.gamma() / n, 0.0, ir.lhs_weight));
    rep["checks"].push_back(check_entry("gradient_weight", 1.0 / c.p() - c.alpha() / n, 0.0, ir.gradient_weight));
    rep["checks"].push_back(check_entry("q_weight", 1.0 - c.beta() / n, 0.0, ir.q_weight));
    rep["admissible"] = ir.all();
    out << rep.dump(2) << "\n";
    return ir.all() ? kPass : kFail;
}

inline int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    CknParams c = CknParams::make(a.params.n, a.params.p, a.params.r, a.params.alpha, a.params.beta);
    json rep = base_report(c, "verify", a.seed);
    rep["space"] = {{"n", c.n()}, {"b", a.b}};
    rep["profile"] = a.profile;
    if (!is_admissible(c)) {
        rep["error"] = "inadmissible parameters";
        out << rep.dump(2) << "\n";
        return kFail;
    }
    try {
        ModelSpace space(c.n(), a.b);
        RadialProfile phi = profile_from_args(c, a.profile, a.scale, a.lambda, a.c);
        EngineOptions opt = default_engine_options();
        const double tol = resolve_tol(a.tol, 1e-8);
        VerificationReport vr = verify(c, space, phi, opt, tol);
        rep["ratio"] = vr.ratio;
        rep["bound"] = vr.bound;
        rep["margin"] = vr.margin;
        rep["identity_residual"] = vr.identity_residual;
        rep["quantitative_margin"] = vr.quantitative_margin;
        for (const auto& ch : vr.residuals) rep["checks"].push_back(check_entry(ch.name, ch.value, ch.tol, ch.pass));
        out << rep.dump(2) << "\n";
        return vr.passed ? kPass : kFail;
    } catch (const NonIntegrable& e) {
        rep["error"] = std::string("non_integrable: ") + e.what();
        out << rep.dump(2) << "\n";
        return kNumerical;
    } catch (const NumericalError& e) {
        rep["error"] = std::string("numerical: ") + e.what();
        out << rep.dump(2) << "\n";
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        err << "verify: " << e.what() << "\n";
        return kUsage;
    }
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepProfile {
    std::string kind;
    double scale = 1.0;
};

struct SweepRow {
    double n, p, r, alpha, beta, b;
    SweepProfile profile;
};

/// Expands a sweep config into rows in a fixed order: explicit tuples (or
/// the grid product n, p, r, alpha, beta), then b, then profiles.
///
/// {"grid": {"n": [3], "p": [2], "r": [1.5, 2, 3], "alpha": [0], "beta": [0]},
///  "tuples": [[3, 2, 3, 0, 0]],      // optional, replaces "grid"
///  "b": [0, 1],
///  "profiles": [{"kind": "gaussian", "scale": 1}]}
inline std::vector<SweepRow> expand_sweep_config(const json& cfg) {
    if (!cfg.is_object()) throw std::invalid_argument("sweep config: top level must be an object");
    std::vector<std::array<double, 5>> tuples;
    if (cfg.contains("tuples")) {
        for (const auto& t : cfg.at("tuples")) {
            if (!t.is_array() || t.size() != 5) throw std::invalid_argument("sweep config: each tuple needs 5 numbers");
            tuples.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>(), t[3].get<double>(),
                              t[4].get<double>()});
        }
    } else if (cfg.contains("grid")) {
        const json& g = cfg.at("grid");
        auto axis = [&](const char* key) {
            if (!g.contains(key)) throw std::invalid_argument(std::string("sweep config: grid.") + key + " missing");
            auto v = g.at(key).get<std::vector<double>>();
            if (v.empty()) throw std::invalid_argument(std::string("sweep config: grid.") + key + " is empty");
            return v;
        };
        auto ns = axis("n"), ps = axis("p"), rs = axis("r"), as = axis("alpha"), bs = axis("beta");
        for (double n : ns)
            for (double p : ps)
                for (double r : rs)
                    for (double al : as)
                        for (double be : bs) tuples.push_back({n, p, r, al, be});
    } else {
        throw std::invalid_argument("sweep config: needs \"grid\" or \"tuples\"");
    }
    std::vector<double> curvatures = cfg.contains("b") ? cfg.at("b").get<std::vector<double>>() : std::vector<double>{0.0};
    std::vector<SweepProfile> profiles;
    if (cfg.contains("profiles")) {
        for (const auto& p : cfg.at("profiles")) {
            SweepProfile sp;
            sp.kind = p.at("kind").get<std::string>();
            sp.scale = p.value("scale", 1.0);
            if (sp.kind != "extremal") (void)parse_test_profile(sp.kind);
            profiles.push_back(sp);
        }
    } else {
        profiles.push_back({"gaussian", 1.0});
    }
    std::vector<SweepRow> rows;
    for (const auto& t : tuples)
        for (double b : curvatures)
            for (const auto& pr : profiles) rows.push_back({t[0], t[1], t[2], t[3], t[4], b, pr});
    return rows;
}

inline std::string clean_message(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

/// One CSV line; failures go to the error column instead of aborting.
inline std::string sweep_row_csv(const SweepRow& row, double tol) {
    std::ostringstream line;
    line << fmt(row.n) << ',' << fmt(row.p) << ',' << fmt(row.r) << ',' << fmt(row.alpha) << ',' << fmt(row.beta)
         << ',';
    auto tail = [&](const std::string& gamma, const std::string& rest) {
        line << gamma << ',' << fmt(row.b) << ',' << row.profile.kind << ',' << rest;
        return line.str();
    };
    if (row.n != std::floor(row.n) || row.n < 2) return tail("", ",,,,false,invalid:n must be an integer >= 2");
    std::optional<CknParams> c;
    try {
        c = CknParams::make(static_cast<int>(row.n), row.p, row.r, row.alpha, row.beta);
    } catch (const std::exception& e) {
        return tail("", ",,,,false,invalid:" + clean_message(e.what()));
    }
    const std::string gamma = fmt(c->gamma());
    IntegrabilityReport ir = check_integrability(*c);
    if (!ir.all()) {
        std::string which = !ir.lhs_weight ? "lhs_weight" : !ir.gradient_weight ? "gradient_weight" : "q_weight";
        return tail(gamma, ",,,,false,inadmissible:" + which);
    }
    try {
        ModelSpace space(c->n(), row.b);
        RadialProfile phi = profile_from_args(*c, row.profile.kind, row.profile.scale, 1.0, 1.0);
        VerificationReport vr = verify(*c, space, phi, default_engine_options(), tol);
        return tail(gamma, fmt(vr.ratio) + ',' + fmt(vr.bound) + ',' + fmt(vr.margin) + ',' +
                               fmt(vr.identity_residual) + ',' + (vr.passed ? "true" : "false") + ',');
    } catch (const NonIntegrable& e) {
        return tail(gamma, ",,,,false,non_integrable:" + clean_message(e.what()));
    } catch (const NumericalError& e) {
        return tail(gamma, ",,,,false,numerical:" + clean_message(e.what()));
    } catch (const std::exception& e) {
        return tail(gamma, ",,,,false,invalid:" + clean_message(e.what()));
    }
}

/// Rows are computed by a pool of `workers` threads and written in input
/// order, so the output does not depend on the worker count.
inline std::vector<std::string> run_sweep_rows(const std::vector<SweepRow>& rows, int workers, double tol) {
    std::vector<std::string> out(rows.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) out[i] = sweep_row_csv(rows[i], tol);
    };
    const int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(rows.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < nthreads; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return out;
}

inline int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    json cfg;
    std::vector<SweepRow> rows;
    try {
        std::ifstream in(a.config);
        if (!in) throw std::invalid_argument("cannot open config '" + a.config + "'");
        cfg = json::parse(in);
        rows = expand_sweep_config(cfg);
    } catch (const json::exception& e) {
        err << "sweep: " << a.config << ": " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "sweep: " << e.what() << "\n";
        return kUsage;
    }
    const double tol = resolve_tol(cfg.contains("tol") ? std::optional<double>(cfg["tol"].get<double>()) : std::nullopt, 1e-8);
    std::vector<std::string> lines = run_sweep_rows(rows, a.workers, tol);
    std::ofstream file;
    std::ostream* dst = &out;
    if (!a.out.empty()) {
        file.open(a.out, std::ios::binary);
        if (!file) {
            err << "sweep: cannot write '" << a.out << "'\n";
            return kUsage;
        }
        dst = &file;
    }
    *dst << kCsvHeader << "\n";
    bool all_pass = true;
    for (const auto& l : lines) {
        *dst << l << "\n";
        if (l.find(",true,") == std::string::npos) all_pass = false;
    }
    return all_pass ? kPass : kFail;
}

// ---------------------------------------------------------------------------
// Rigidity

inline int cmd_rigidity(const RigidityArgs& a, std::ostream& out, std::ostream& err) {
    CknParams c = CknParams::make(a.params.n, a.params.p, a.params.r, a.params.alpha, a.params.beta);
    RigidityCase which = parse_rigidity_case(a.which);
    json rep = base_report(c, "rigidity", 0);
    rep["space"] = {{"n", c.n()}, {"b", a.b}};
    rep["rigidity_case"] = a.which;
    RigidityProbe probe{c, ModelSpace(c.n(), a.b), which, {}, {}, {}, {}, {}};
    try {
        probe = ft_ratio_scan(c, ModelSpace(c.n(), a.b), log_grid(a.lambda_min, a.lambda_max, a.points), which);
    } catch (const std::invalid_argument& e) {
        err << "rigidity: " << e.what() << "\n";
        return kUsage;
    }
    const double tol = resolve_tol(a.tol, 1e-9);
    std::ostringstream csv;
    csv << "lambda,T,F,F_over_T,status\n";
    json table = json::array();
    for (std::size_t i = 0; i < probe.lambda_grid.size(); ++i) {
        const bool ok = probe.status[i] == "ok";
        csv << fmt(probe.lambda_grid[i]) << ',' << fmt(probe.t_values[i]) << ',' << (ok ? fmt(probe.f_values[i]) : "")
            << ',' << (ok ? fmt(probe.ratio_values[i]) : "") << ','
            << (ok ? std::string("ok") : "non_integrable") << "\n";
        table.push_back({{"lambda", probe.lambda_grid[i]},
                         {"T", number_or_null(probe.t_values[i])},
                         {"F", number_or_null(probe.f_values[i])},
                         {"ratio", number_or_null(probe.ratio_values[i])},
                         {"status", probe.status[i]}});
    }
    bool pass = true;
    if (a.b == 0.0) {
        bool eq = probe.ratios_equal_one(tol);
        rep["checks"].push_back(check_entry("f_equals_t", 0.0, tol, eq));
        pass = pass && eq;
    } else {
        bool ge = probe.ratios_at_least_one(tol);
        rep["checks"].push_back(check_entry("f_at_least_t", 0.0, tol, ge));
        pass = pass && ge;
    }
    rep["checks"].push_back(check_entry("all_points_finite", 0.0, 0.0, probe.all_ok()));
    rep["monotone_nondecreasing"] = probe.ratios_monotone(true);
    rep["monotone_nonincreasing"] = probe.ratios_monotone(false);
    rep["table"] = table;
    if (!a.csv.empty()) {
        std::ofstream f(a.csv, std::ios::binary);
        if (!f) {
            err << "rigidity: cannot write '" << a.csv << "'\n";
            return kUsage;
        }
        f << csv.str();
    }
    out << rep.dump(2) << "\n";
    if (!probe.all_ok()) return kNumerical;
    return pass ? kPass : kFail;
}

// ---------------------------------------------------------------------------

inline void add_param_flags(CLI::App* sub, ParamArgs& a) {
    sub->add_option("-n,--dim", a.n, "dimension n >= 2")->required();
    sub->add_option("-p", a.p, "gradient exponent p > 1")->required();
    sub->add_option("-r", a.r, "lhs exponent r > 0")->required();
    sub->add_option("--alpha", a.alpha, "gradient weight exponent")->default_val(0.0);
    sub->add_option("--beta", a.beta, "lower-order weight exponent")->default_val(0.0);
}

/// Parses argv and runs the selected subcommand. Returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Sharp CKN inequalities on model spaces: checks, verification, sweeps and rigidity probes", "ckn"};
    app.require_subcommand(1);
    app.set_version_flag("--version", CKN_VERSION);

    ParamArgs check_args;
    auto* check = app.add_subcommand("check", "parameter admissibility, derived exponents and sharpness case");
    add_param_flags(check, check_args);

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "inequality, main identity and quantitative margin for one profile");
    add_param_flags(verify_cmd, verify_args.params);
    verify_cmd->add_option("-b,--curvature", verify_args.b, "curvature parameter b >= 0 (sectional curvature -b)");
    verify_cmd->add_option("--profile", verify_args.profile, "gaussian|exp|poly_bump|plateau_bump|extremal")
        ->check(CLI::IsMember({"gaussian", "exp", "poly_bump", "plateau_bump", "extremal"}));
    verify_cmd->add_option("--scale", verify_args.scale, "scale of the library profile");
    verify_cmd->add_option("--lambda", verify_args.lambda, "extremal shift (amplitude in the r = p family)");
    verify_cmd->add_option("--c", verify_args.c, "extremal amplitude (rate in the r = p family)");
    verify_cmd->add_option("--tol", verify_args.tol, "relative tolerance of the checks");
    verify_cmd->add_option("--seed", verify_args.seed, "recorded in the report");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "CSV table over a parameter grid");
    sweep->add_option("--config", sweep_args.config, "JSON sweep configuration")->required();
    sweep->add_option("--out", sweep_args.out, "output CSV path (default stdout)");
    sweep->add_option("--workers", sweep_args.workers, "worker threads")->check(CLI::PositiveNumber);

    RigidityArgs rig_args;
    auto* rig = app.add_subcommand("rigidity", "tabulate T, F and F/T over a lambda grid");
    add_param_flags(rig, rig_args.params);
    rig->add_option("-b,--curvature", rig_args.b, "curvature parameter b >= 0");
    rig->add_option("--case", rig_args.which, "exp (r = p) or compact (r < p)")
        ->check(CLI::IsMember({"exp", "compact"}));
    rig->add_option("--lambda-min", rig_args.lambda_min, "smallest lambda");
    rig->add_option("--lambda-max", rig_args.lambda_max, "largest lambda");
    rig->add_option("--points", rig_args.points, "grid points (log-spaced)")->check(CLI::Range(2, 100000));
    rig->add_option("--csv", rig_args.csv, "write the (lambda, T, F, F/T) table to this file");
    rig->add_option("--tol", rig_args.tol, "relative tolerance of the F/T checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(CKN_VERSION) + "\n" : app.help());
            return kPass;
        }
        err << e.what() << "\n" << "Run with --help for usage.\n";
        return kUsage;
    }

    try {
        if (*check) return cmd_check(check_args, out);
        if (*verify_cmd) return cmd_verify(verify_args, out, err);
        if (*sweep) return cmd_sweep(sweep_args, out, err);
        if (*rig) return cmd_rigidity(rig_args, out, err);
    } catch (const std::invalid_argument& e) {
        err << e.what() << "\n";
        return kUsage;
    } catch (const std::domain_error& e) {
        err << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace ckn::cli

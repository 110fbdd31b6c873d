// drpsbp command-line front end.
#include "drpsbp/closure.hpp"
#include "drpsbp/dispersion.hpp"
#include "drpsbp/operator.hpp"
#include "drpsbp/optimizer.hpp"
#include "drpsbp/tables.hpp"
#include "drpsbp/wave.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#ifndef DRPSBP_VERSION
#define DRPSBP_VERSION "0.0.0"
#endif

using namespace drpsbp;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// Everything needed to replay a run; no timestamps so reruns give identical bytes.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    json config = json::object();
    json operators = json::object();
    std::vector<std::string> outputs;

    void add_operator(const DualPairOperator& op) { operators[op.name] = "fnv1a64:" + fnv1a(to_json(op)); }

    void write(const std::string& path) const {
        json j;
        j["tool"] = "drpsbp";
        j["version"] = DRPSBP_VERSION;
        j["command"] = command;
        j["argv"] = argv;
        j["config"] = config;
        j["operators"] = operators;
        j["outputs"] = outputs;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
        out << j.dump(2) << '\n';
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

json collect_config(const CLI::App* sub) {
    json cfg = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_name();
        if (name.empty() || name == "--help") continue;
        if (opt->count() > 0) {
            const auto res = opt->results();
            cfg[name] = res.size() == 1 ? json(res.front()) : json(res);
        } else {
            cfg[name] = opt->get_default_str();
        }
    }
    return cfg;
}

DualPairOperator ensure_closed(DualPairOperator op, std::ostream& log) {
    if (op.closure) return op;
    AdmmResult r;
    const int s = default_block_size(op.interior);
    const int p = default_boundary_order(op.interior);
    op = close_operator(op, build_problem(op.interior, s, p), &r);
    log << "note: " << op.name << " has no closure; solved one with ADMM (s=" << s << ", boundary order " << p
        << ", " << r.iterations << " iterations, " << (r.converged ? "converged" : "NOT converged") << ")\n";
    return op;
}

// ---------------------------------------------------------------- verify

struct VerifyOpts {
    std::string op;
    int n = 0;
    std::string json_path;
};

int cmd_verify(const VerifyOpts& o, RunManifest& m) {
    DualPairOperator op = ensure_closed(resolve_operator(o.op), std::cout);
    m.add_operator(op);
    const int nmin = op.minimum_n();
    std::vector<int> grids;
    if (o.n > 0) {
        if (o.n < nmin)
            throw UsageError("--n " + std::to_string(o.n) + " is below the operator minimum " + std::to_string(nmin));
        grids = {o.n};
    } else {
        grids = {nmin};
        for (int n : {24, 48})
            if (n > nmin) grids.push_back(n);
    }
    const int want_int = op.declared_order, want_bnd = op.declared_order / 2;
    std::vector<std::string> failed;
    json report = json::array();
    std::cout << std::setprecision(6);
    std::cout << op.name << " (declared order " << want_int << ", s = " << op.block_size() << ", minimum n = " << nmin
              << ")\n";
    double hmin = std::numeric_limits<double>::infinity();
    for (const auto& h : op.closure->h) hmin = std::min(hmin, h.to_double());
    for (int n : grids) {
        const double sbp = verify_sbp(op, n);
        const double lam = verify_upwind(op, n);
        const auto acc = verify_accuracy(op, n);
        std::cout << "  n=" << n << "  sbp_residual=" << sbp << "  lambda_max(S)=" << lam << "  accuracy=(" << acc.interior
                  << "," << acc.boundary << ")\n";
        auto check = [&](bool ok, const std::string& what) {
            if (!ok) failed.push_back("n=" + std::to_string(n) + " " + what);
        };
        check(sbp <= 5e-6, "sbp residual");
        check(lam <= 1e-4, "upwind (lambda_max(S))");
        check(acc.interior >= want_int, "interior accuracy " + std::to_string(acc.interior) + " < " +
                                            std::to_string(want_int));
        check(acc.boundary >= want_bnd, "boundary accuracy " + std::to_string(acc.boundary) + " < " +
                                            std::to_string(want_bnd));
        report.push_back({{"n", n},
                          {"sbp_residual", sbp},
                          {"lambda_max", lam},
                          {"interior_order", acc.interior},
                          {"boundary_order", acc.boundary}});
    }
    std::cout << "  min h_i=" << hmin << '\n';
    if (!(hmin > 0)) failed.push_back("h positivity");
    for (const auto& f : failed) std::cout << "FAIL: " << f << '\n';
    if (failed.empty()) std::cout << "PASS\n";
    if (!o.json_path.empty()) {
        json j = {{"operator", op.name}, {"grids", report}, {"min_h", hmin}, {"failed", failed}};
        open_out(o.json_path) << j.dump(2) << '\n';
        m.outputs.push_back(o.json_path);
    }
    return failed.empty() ? 0 : 1;
}

// ---------------------------------------------------------------- dispersion

struct DispersionOpts {
    std::string op;
    std::string csv, json_path;
    std::vector<double> deltas;
    bool table = false;
};

int cmd_dispersion(const DispersionOpts& o, RunManifest& m) {
    const DualPairOperator op = resolve_operator(o.op);
    m.add_operator(op);
    auto curve = dispersion_upwind(op.interior);
    curve.name = op.name;
    const auto rep = error_report(curve);
    const auto deltas = o.deltas.empty() ? kTableDeltas : o.deltas;
    std::vector<double> hs;
    for (double d : deltas) {
        try {
            hs.push_back(refinement_factor(curve, std::numbers::pi, d));
        } catch (const std::domain_error&) {
            hs.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    const Rational w2pi = curve.omega2_at_pi();
    std::cout << std::setprecision(6);
    if (o.table) {
        std::cout << op.name;
        for (double h : hs) std::cout << " | " << h << ' ' << 1 / h << ' ' << std::pow(1 / h, 4);
        std::cout << " | " << (rep.swm ? 'Y' : 'N') << '\n';
    } else {
        std::cout << op.name << '\n'
                  << "  eps_inf=" << rep.eps_inf << " at k=" << rep.k_at_max << '\n'
                  << "  l2_rel=" << 100 * rep.l2_rel << "%  phase_velocity_l2=" << 100 * phase_velocity_l2(curve)
                  << "%\n"
                  << "  omega_N(pi)^2=" << w2pi << "  omega_N(pi)=" << std::sqrt(w2pi.to_double()) << '\n'
                  << "  v_p(0)=" << phase_velocity_limit(curve) << "  SWM=" << (rep.swm ? 'Y' : 'N') << '\n';
        for (size_t i = 0; i < deltas.size(); ++i)
            std::cout << "  delta=" << deltas[i] << "  h*=" << hs[i] << "  (1/h*)^4=" << std::pow(1 / hs[i], 4) << '\n';
    }
    if (!o.csv.empty()) {
        auto out = open_out(o.csv);
        write_dispersion_csv(out, curve, rep);
        m.outputs.push_back(o.csv);
    }
    if (!o.json_path.empty()) {
        json hj = json::array();
        for (size_t i = 0; i < deltas.size(); ++i) hj.push_back({{"delta", deltas[i]}, {"h_star", hs[i]}});
        json j = {{"operator", op.name},       {"eps_inf", rep.eps_inf}, {"k_at_max", rep.k_at_max},
                  {"l2_rel", rep.l2_rel},      {"swm", rep.swm},         {"omega2_at_pi", w2pi.str()},
                  {"phase_velocity_l2", phase_velocity_l2(curve)},      {"h_star", hj}};
        open_out(o.json_path) << j.dump(2) << '\n';
        m.outputs.push_back(o.json_path);
    }
    return 0;
}

// ---------------------------------------------------------------- optimize-interior

struct OptimizeOpts {
    int a = 4, b = 9, j_max = 20;
    std::string weight = "uniform";
    std::string json_path, csv;
};

int cmd_optimize(const OptimizeOpts& o, RunManifest& m) {
    FamilySpec spec;
    spec.a = o.a;
    spec.b = o.b;
    spec.j_max = o.j_max;
    spec.weight = WeightSpec::parse(o.weight, 2 * o.j_max + 1);
    const auto r = optimize(spec);
    std::cout << std::setprecision(8) << "family (" << o.a << "," << o.b << ") weight " << spec.weight.label << '\n';
    std::cout << "  objective=" << r.value << "  eps_inf=" << r.eps_inf << "  pi_error=" << r.pi_error << '\n';
    std::cout << "  gamma:";
    for (Eigen::Index i = 0; i < r.gamma.size(); ++i) std::cout << ' ' << r.gamma(i);
    std::cout << '\n';
    if (r.relaxation_fallback) std::cout << "  note: relaxation seed fell back to uniform weights\n";
    if (r.floating) std::cout << "  note: gamma kept in floating point\n";
    for (const auto& s : r.starts)
        std::cout << "  start " << s.start << ": value=" << s.value << " iterations=" << s.iterations
                  << (s.converged ? "" : " (not converged)") << '\n';
    if (!o.json_path.empty()) {
        DualPairOperator op;
        op.name = "opt" + std::to_string(o.a) + "_" + std::to_string(o.b);
        op.declared_order = o.a;
        op.interior = r.stencil;
        save_operator(op, o.json_path);
        m.add_operator(op);
        m.outputs.push_back(o.json_path);
    }
    if (!o.csv.empty()) {
        auto out = open_out(o.csv);
        out << std::setprecision(12) << "start,value,iterations,converged\n";
        for (const auto& s : r.starts) out << s.start << ',' << s.value << ',' << s.iterations << ',' << s.converged << '\n';
        m.outputs.push_back(o.csv);
    }
    return 0;
}

// ---------------------------------------------------------------- close-boundary

struct CloseOpts {
    std::string op;
    int s = 0, boundary_order = -1;
    ClosureHyperparams hp;
    std::string json_path, csv;
};

int cmd_close(const CloseOpts& o, RunManifest& m) {
    DualPairOperator op = resolve_operator(o.op);
    m.add_operator(op);
    const int s = o.s > 0 ? o.s : default_block_size(op.interior);
    const int p = o.boundary_order >= 0 ? o.boundary_order : default_boundary_order(op.interior);
    const auto problem = build_problem(op.interior, s, p, o.hp);
    AdmmResult r;
    DualPairOperator closed = close_operator(op, problem, &r);
    std::cout << std::setprecision(6) << op.name << ": s=" << s << " boundary order " << p << '\n'
              << "  " << (r.converged ? "converged" : "NOT converged") << " after " << r.iterations
              << " iterations  primal=" << r.primal << " dual=" << r.dual << '\n';
    const int n = std::max(closed.minimum_n(), 24);
    const auto acc = verify_accuracy(closed, n);
    std::cout << "  n=" << n << " sbp_exact=" << verify_sbp_exact(closed, n) << " lambda_max(S)="
              << verify_upwind(closed, n) << " accuracy=(" << acc.interior << "," << acc.boundary << ")\n  h:";
    for (const auto& h : closed.closure->h) std::cout << ' ' << h.to_double();
    std::cout << '\n';
    if (!o.json_path.empty()) {
        save_operator(closed, o.json_path);
        m.add_operator(closed);
        m.outputs.push_back(o.json_path);
    }
    if (!o.csv.empty()) {
        auto out = open_out(o.csv);
        write_history_csv(out, r);
        m.outputs.push_back(o.csv);
    }
    return r.converged ? 0 : 1;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    std::string op = "drp6";
    int grid = 257;
    double x_left = 0, x_right = 8;
    double cfl = 0.5, tend = 8, penalty = 1;
    std::string bc = "reflecting", ic = "pi:4:0.5:-1";
    std::vector<double> snapshots;
    std::string csv, snapshot_prefix;
};

int cmd_simulate(const SimulateOpts& o, RunManifest& m) {
    SimConfig cfg;
    cfg.operator_name = o.op;
    cfg.grid = {o.x_left, o.x_right, o.grid, parse_boundary(o.bc)};
    cfg.cfl = o.cfl;
    cfg.t_end = o.tend;
    cfg.penalty = o.penalty;
    cfg.ic = InitialCondition::parse(o.ic);
    cfg.snapshot_times = o.snapshots;
    DualPairOperator op = resolve_operator(o.op);
    if (cfg.grid.bc == Boundary::reflecting) {
        op = ensure_closed(op, std::cout);
        if (o.grid < op.minimum_n())
            throw UsageError("--grid " + std::to_string(o.grid) + " is below the operator minimum " +
                             std::to_string(op.minimum_n()));
    }
    m.add_operator(op);
    const auto r = simulate(op, cfg);
    std::cout << std::setprecision(6) << op.name << " on " << o.grid << " points, " << o.bc << ", t_end=" << o.tend
              << '\n'
              << "  rho_bound=" << r.rho << " dt_max=" << r.dt_max << " steps=" << r.steps << '\n'
              << "  final l1_rel=" << r.series.back().l1_rel << " energy=" << r.series.back().energy
              << " (E0=" << r.energy0 << ")\n"
              << "  max step energy increase/E0=" << r.max_energy_increase
              << "  integral |dE/dt|/E0=" << r.rate_integral << '\n';
    if (!o.csv.empty()) {
        auto out = open_out(o.csv);
        write_series_csv(out, r);
        m.outputs.push_back(o.csv);
    }
    if (!o.snapshot_prefix.empty()) {
        for (const auto& s : r.snapshots) {
            std::ostringstream name;
            name << o.snapshot_prefix << "_t" << std::setprecision(12) << s.t << ".csv";
            auto out = open_out(name.str());
            write_snapshot_csv(out, cfg.grid, s);
            m.outputs.push_back(name.str());
        }
    }
    return 0;
}

// ---------------------------------------------------------------- tables

struct TablesOpts {
    std::string out_dir = ".";
    std::vector<double> deltas;
};

int cmd_tables(const TablesOpts& o, RunManifest& m) {
    const auto deltas = o.deltas.empty() ? kTableDeltas : o.deltas;
    const auto rows = build_tables(deltas);
    std::filesystem::create_directories(o.out_dir);
    const std::filesystem::path dir(o.out_dir);
    const std::string l2 = (dir / "l2_dispersion.csv").string(), vp = (dir / "phase_velocity.csv").string(),
                      hs = (dir / "hstar.csv").string();
    {
        auto out = open_out(l2);
        write_l2_csv(out, rows);
    }
    {
        auto out = open_out(vp);
        write_phase_velocity_csv(out, rows);
    }
    {
        auto out = open_out(hs);
        write_hstar_csv(out, rows, deltas);
    }
    m.outputs = {l2, vp, hs};
    std::cout << std::fixed << std::setprecision(3);
    std::cout << "operator   scheme order   l2%     vp_l2%   SWM  h*";
    for (double d : deltas) std::cout << " @" << d;
    std::cout << '\n';
    for (const auto& r : rows) {
        std::cout << std::left << std::setw(10) << r.op << ' ' << std::setw(6) << r.scheme << ' ' << std::right
                  << std::setw(5) << r.order << ' ' << std::setw(8) << r.l2_pct << ' ' << std::setw(8) << r.vp_l2_pct
                  << "  " << (r.swm ? 'Y' : 'N') << "  ";
        for (double h : r.hstar) std::cout << ' ' << h;
        std::cout << '\n';
    }
    return 0;
}

int run(std::vector<std::string> args);

int cmd_replay(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest '" + path + "'");
    const json j = json::parse(in);
    auto argv = j.at("argv").get<std::vector<std::string>>();
    if (!argv.empty() && argv.front() == "replay") throw UsageError("manifest replays itself");
    return run(argv);
}

int run(std::vector<std::string> args) {
    CLI::App app{"Dual-pairing SBP operators: verification, dispersion analysis, optimization, closure, simulation"};
    app.set_version_flag("--version", std::string(DRPSBP_VERSION));
    app.require_subcommand(1);
    std::string manifest_path;
    app.add_option("--manifest", manifest_path, "Write the run manifest here (default: <first output>.manifest.json)");

    VerifyOpts vo;
    auto* verify = app.add_subcommand("verify", "Check SBP, upwind and accuracy properties of an operator");
    verify->add_option("--operator", vo.op, "Builtin name or operator file")->required();
    verify->add_option("--n", vo.n, "Grid size (default: minimum, 24, 48)");
    verify->add_option("--json", vo.json_path, "Report file");

    DispersionOpts dopts;
    auto* disp = app.add_subcommand("dispersion", "Dispersion relation, error report and refinement factors");
    disp->add_option("--operator", dopts.op, "Builtin name or operator file")->required();
    disp->add_option("--csv", dopts.csv, "Dispersion curve CSV");
    disp->add_option("--json", dopts.json_path, "Summary file");
    disp->add_option("--delta", dopts.deltas, "Tolerance for h* (repeatable)");
    disp->add_flag("--table", dopts.table, "One-line h*/SWM row");

    OptimizeOpts oo;
    auto* opt = app.add_subcommand("optimize-interior", "Optimize an interior stencil over an upwind family");
    opt->add_option("--a", oo.a, "Lowest family order")->capture_default_str();
    opt->add_option("--b", oo.b, "Highest family order")->capture_default_str();
    opt->add_option("--weight", oo.weight, "uniform | expquad:c | indicator:k | c0,c1,...")->capture_default_str();
    opt->add_option("--jmax", oo.j_max, "Cosine truncation")->capture_default_str();
    opt->add_option("--json", oo.json_path, "Operator file (interior only)");
    opt->add_option("--csv", oo.csv, "Multistart log");

    CloseOpts co;
    auto* close = app.add_subcommand("close-boundary", "Solve for a boundary closure with ADMM");
    close->add_option("--operator", co.op, "Builtin name or operator file")->required();
    close->add_option("--s", co.s, "Block size (default from order)");
    close->add_option("--boundary-order", co.boundary_order, "Boundary accuracy (default floor(q/2))");
    close->add_option("--eps1", co.hp.eps1, "NSD margin")->capture_default_str();
    close->add_option("--eps2", co.hp.eps2, "Floor on h_i")->capture_default_str();
    close->add_option("--ridge", co.hp.ridge, "Ridge weight")->capture_default_str();
    close->add_option("--t", co.hp.t, "Initial ADMM penalty")->capture_default_str();
    close->add_option("--tol", co.hp.tol, "Residual tolerance")->capture_default_str();
    close->add_option("--max-iter", co.hp.max_iter, "Iteration cap")->capture_default_str();
    close->add_option("--json", co.json_path, "Closed operator file");
    close->add_option("--csv", co.csv, "Residual history");

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "Run the 1D first-order wave system");
    sim->add_option("--operator", so.op, "Builtin name or operator file")->capture_default_str();
    sim->add_option("--grid", so.grid, "Point count")->capture_default_str();
    sim->add_option("--x-left", so.x_left)->capture_default_str();
    sim->add_option("--x-right", so.x_right)->capture_default_str();
    sim->add_option("--cfl", so.cfl, "Courant number")->capture_default_str();
    sim->add_option("--tend", so.tend, "End time")->capture_default_str();
    sim->add_option("--bc", so.bc, "reflecting | periodic")->capture_default_str();
    sim->add_option("--ic", so.ic, "pi|gaussian[:center[:width[:sigma_factor]]]")->capture_default_str();
    sim->add_option("--penalty", so.penalty, "SAT strength")->capture_default_str();
    sim->add_option("--snapshot", so.snapshots, "Snapshot time (repeatable)");
    sim->add_option("--csv", so.csv, "Error/energy time series");
    sim->add_option("--snapshot-prefix", so.snapshot_prefix, "Snapshot CSV prefix");

    TablesOpts to;
    auto* tab = app.add_subcommand("tables", "Regenerate L2, phase-velocity and h*/SWM tables");
    tab->add_option("--out-dir", to.out_dir, "Output directory")->capture_default_str();
    tab->add_option("--delta", to.deltas, "Tolerance for h* (repeatable)");

    std::string replay_path;
    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay->add_option("manifest", replay_path)->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    RunManifest m;
    m.argv = args;
    int rc = 0;
    try {
        CLI::App* used = app.get_subcommands().front();
        m.command = used->get_name();
        m.config = collect_config(used);
        if (used == verify) rc = cmd_verify(vo, m);
        else if (used == disp) rc = cmd_dispersion(dopts, m);
        else if (used == opt) rc = cmd_optimize(oo, m);
        else if (used == close) rc = cmd_close(co, m);
        else if (used == sim) rc = cmd_simulate(so, m);
        else if (used == tab) rc = cmd_tables(to, m);
        else if (used == replay) return cmd_replay(replay_path);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    if (!m.outputs.empty() || !manifest_path.empty()) {
        const std::string path = manifest_path.empty() ? m.outputs.front() + ".manifest.json" : manifest_path;
        m.write(path);
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) { return run(std::vector<std::string>(argv + 1, argv + argc)); }

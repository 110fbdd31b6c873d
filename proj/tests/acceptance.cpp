// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance [criterion...]
#include "drpsbp/closure.hpp"
#include "drpsbp/dispersion.hpp"
#include "drpsbp/operator.hpp"
#include "drpsbp/optimizer.hpp"
#include "drpsbp/tables.hpp"
#include "drpsbp/wave.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

using namespace drpsbp;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

// SBP, upwind, accuracy and weight checks shared by criteria 1 and 6.
void operator_checks(Outcome& o, const DualPairOperator& op, int want_interior, int want_boundary, double lam_tol,
                     bool exact_sbp) {
    for (int n : {op.minimum_n(), 24, 48}) {
        const double sbp = verify_sbp(op, n);
        const double lam = verify_upwind(op, n);
        const auto acc = verify_accuracy(op, n);
        const std::string at = op.name + " n=" + std::to_string(n);
        o.require(sbp <= 5e-6, at + " sbp residual " + std::to_string(sbp));
        if (exact_sbp) o.require(verify_sbp_exact(op, n) == Rational(0), at + " exact sbp residual nonzero");
        o.require(lam <= lam_tol, at + " lambda_max " + std::to_string(lam));
        o.require(acc.interior == want_interior && acc.boundary == want_boundary,
                  at + " accuracy (" + std::to_string(acc.interior) + "," + std::to_string(acc.boundary) +
                      ") want (" + std::to_string(want_interior) + "," + std::to_string(want_boundary) + ")");
    }
    const auto& h = op.closure->h;
    bool positive = true;
    for (const auto& hi : h) positive = positive && hi > Rational(0);
    o.require(positive, op.name + " nonpositive h_i");
    const double h1 = h.front().to_double();
    o.require(h1 >= 0.25 && h1 <= 0.45, op.name + " h_1=" + std::to_string(h1) + " outside [0.25, 0.45]");
}

Outcome criterion1() {
    Outcome o;
    const std::map<int, std::pair<int, int>> want = {{4, {4, 2}}, {5, {5, 2}}, {6, {6, 3}}, {7, {7, 3}}};
    double worst_sbp = 0, worst_lam = -1;
    for (const auto& [q, acc] : want) {
        const auto op = builtin_operator("drp" + std::to_string(q));
        operator_checks(o, op, acc.first, acc.second, 1e-4, false);
        for (int n : {op.minimum_n(), 24, 48}) {
            worst_sbp = std::max(worst_sbp, verify_sbp(op, n));
            worst_lam = std::max(worst_lam, verify_upwind(op, n));
        }
    }
    o.detail << " max sbp residual " << worst_sbp << ", max lambda_max(S) " << worst_lam;
    return o;
}

Outcome criterion2() {
    Outcome o;
    int rows = 0;
    auto check = [&](const InteriorStencil& st, const std::string& name) {
        ++rows;
        o.require(st.moment(0) == Rational(0) && st.moment(1) == Rational(1), name + " inconsistent");
    };
    for (int q = 2; q <= 9; ++q) check(build_upwind_interior(q), "up" + std::to_string(q));
    for (int q = 4; q <= 7; ++q) check(build_drp_interior(q), "drp" + std::to_string(q));
    o.detail << " " << rows << " rows checked in rational arithmetic";
    return o;
}

Outcome criterion3() {
    Outcome o;
    for (int q = 4; q <= 7; ++q) {
        const double e = error_report(dispersion_upwind(build_drp_interior(q))).eps_inf;
        const double lim = q == 4 ? 0.06 : 0.05;
        o.detail << " drp" << q << " eps_inf=" << std::setprecision(4) << e;
        o.require(e <= lim, "drp" + std::to_string(q) + " eps_inf above " + std::to_string(lim));
    }
    for (int q : {2, 4, 6, 8}) {
        // omega_N(pi) = 0 exactly, so the relative error at pi is exactly 1
        const bool one = dispersion_central(build_central_interior(q)).omega2_at_pi() == Rational(0);
        o.require(one, "central" + std::to_string(q) + " relative error at pi not exactly 1");
    }
    o.detail << "; central relative error at pi = 1 exactly";
    return o;
}

Outcome criterion4() {
    Outcome o;
    const double want[] = {2128.0 / 720.0, 2.986667, 3.006984, 3.009161};
    for (int q = 4; q <= 7; ++q) {
        const Rational w2 = dispersion_upwind(build_drp_interior(q)).omega2_at_pi();
        const double w = std::sqrt(w2.to_double());
        o.detail << " drp" << q << " " << std::setprecision(7) << w;
        o.require(std::abs(w - want[q - 4]) <= 1e-6, "drp" + std::to_string(q) + " omega_N(pi) off");
    }
    o.require(dispersion_upwind(build_drp_interior(4)).omega2_at_pi() == Rational(2128, 720) * Rational(2128, 720),
              "drp4 omega_N(pi)^2 != (2128/720)^2 exactly");
    return o;
}

Outcome criterion5() {
    Outcome o;
    const auto rows = build_tables();
    std::map<std::pair<std::string, int>, const TableRow*> by;
    for (const auto& r : rows) by[{r.scheme, r.order}] = &r;
    o.detail << std::setprecision(4) << " L2%";
    for (int q = 4; q <= 7; ++q) {
        const auto* drp = by.at({"DRP", q});
        const auto* dp = by.at({"DP", q});
        o.detail << " " << q << ":" << drp->l2_pct << "/" << dp->l2_pct;
        o.require(drp->l2_pct < dp->l2_pct, "L2 DRP >= DP at order " + std::to_string(q));
        o.require(drp->l2_pct < 2.5, "DRP order " + std::to_string(q) + " L2 " + std::to_string(drp->l2_pct) +
                                         "% >= 2.5%");
        if (q >= 5) o.require(drp->hstar[0] == 1.0, "DRP order " + std::to_string(q) + " h*(0.05) != 1");
        const double drp4 = std::pow(1 / drp->hstar[2], 4), dp4 = std::pow(1 / dp->hstar[2], 4);
        o.require(drp4 < dp4, "(1/h*)^4 DRP >= DP at order " + std::to_string(q));
    }
    for (const auto& p : published_rows()) {
        const auto* r = by.at({p.scheme, p.order});
        const std::string tag = p.scheme + std::to_string(p.order);
        if (p.swm)
            o.require(r->swm == *p.swm, tag + " SWM " + (r->swm ? "Y" : "N") + " vs printed " + (*p.swm ? "Y" : "N"));
        if (p.scheme != "DRP")
            for (size_t d = 0; d < p.hstar.size(); ++d)
                o.require(std::abs(r->hstar[d] - p.hstar[d]) <= 0.05,
                          tag + " h*(" + std::to_string(kTableDeltas[d]) + ")=" + std::to_string(r->hstar[d]) +
                              " vs printed " + std::to_string(p.hstar[d]));
    }
    return o;
}

Outcome criterion6() {
    Outcome o;
    for (const char* name : {"drp4", "drp6"}) {
        const auto op = builtin_operator(name);
        const int q = op.declared_order;
        const int s = default_block_size(op.interior);
        try {
            AdmmResult r;
            const auto closed = close_operator(op, build_problem(op.interior, s, q / 2), &r);
            o.detail << " " << name << ": " << r.iterations << " iterations, residual "
                     << std::max(r.primal, r.dual) << ";";
            o.require(r.converged && std::max(r.primal, r.dual) <= 1e-9 && r.iterations <= 5000,
                      std::string(name) + " did not converge");
            operator_checks(o, closed, q, q / 2, 1e-8, true);
        } catch (const std::invalid_argument& e) {
            o.require(false, std::string(name) + ": " + e.what());
            // diagnostic: the largest boundary order this interior admits
            for (int p = q / 2 - 1; p >= 0; --p) {
                try {
                    AdmmResult r;
                    const auto closed = close_operator(op, build_problem(op.interior, s, p), &r);
                    const auto acc = verify_accuracy(closed, 24);
                    o.detail << " " << name << " closes at boundary order " << p << " (" << r.iterations
                             << " iterations, accuracy (" << acc.interior << "," << acc.boundary
                             << "), lambda_max " << verify_upwind(closed, 24) << ");";
                    break;
                } catch (const std::invalid_argument&) {
                }
            }
        }
    }
    return o;
}

Outcome criterion7() {
    Outcome o;
    GramTensor toy;
    toy.gram = {Eigen::MatrixXd{{1, 0}, {0, 0}}, Eigen::MatrixXd{{0, 0.5}, {0.5, 0}}, Eigen::MatrixXd{{0, 0}, {0, 1}}};
    Eigen::VectorXd beta(3);
    beta << 1, 0, 1;
    const auto sol = minimize_gamma(toy, beta, Eigen::MatrixXd::Identity(3, 3));
    bool m10 = false, m01 = false;
    for (const auto& s : sol.starts) {
        m10 = m10 || ((s.gamma - Eigen::Vector2d(1, 0)).norm() < 1e-6 && std::abs(s.value - 1) < 1e-9);
        m01 = m01 || ((s.gamma - Eigen::Vector2d(0, 1)).norm() < 1e-6 && std::abs(s.value - 1) < 1e-9);
    }
    o.require(m10 && m01, "toy minima not both found");

    const auto r49 = optimize(FamilySpec{});
    const double ref = error_report(dispersion_upwind(build_drp_interior(4))).eps_inf;
    o.detail << std::setprecision(4) << " (4,9) eps_inf " << r49.eps_inf << " vs drp4 " << ref << ";";
    o.require(r49.eps_inf <= 1.1 * ref, "(4,9) eps_inf above 1.1x drp4");

    FamilySpec uni;
    uni.a = 2;
    FamilySpec eq = uni;
    eq.weight = WeightSpec::parse("expquad:0.3", 2 * eq.j_max + 1);
    const auto ru = optimize(uni), re = optimize(eq);
    o.detail << " (2,9) pi error uniform " << ru.pi_error << " vs exp(0.3k^2) " << re.pi_error;
    o.require(re.pi_error < ru.pi_error, "weighted variant not better at pi");
    return o;
}

Outcome criterion8() {
    Outcome o;
    std::vector<DualPairOperator> ops = {builtin_operator("drp6"), close_operator(builtin_operator("up6")),
                                         close_operator(builtin_operator("central6"))};
    std::vector<double> l1, pollution;
    o.detail << std::setprecision(4);
    for (const auto& op : ops) {
        SimConfig c;
        c.t_end = 16;
        c.snapshot_times = {4.0};
        const auto r = simulate(op, c);
        const auto x = c.grid.nodes();
        double pol = 0;
        for (int i = 0; i < c.grid.n; ++i)
            if (x(i) > 0.5 && x(i) < 6.5) pol = std::max(pol, std::abs(r.snapshots.front().v(i)));
        l1.push_back(r.series.back().l1_rel);
        pollution.push_back(pol);
        o.require(r.max_energy_increase <= 1e-10, op.name + " reflecting energy increased");

        SimConfig p = c;
        p.grid.bc = Boundary::periodic;
        p.t_end = 8;
        p.snapshot_times.clear();
        const auto rp = simulate(op, p);
        const double drift = (rp.series.back().energy - rp.energy0) / rp.energy0;
        o.require(rp.rate_integral <= 1e-10, op.name + " periodic energy rate not zero");
        o.detail << " " << op.name << ": L1(t=16) " << l1.back() << ", pollution(t=4) " << pol
                 << ", periodic |dE/dt| integral " << rp.rate_integral << ", RK4 drift " << drift << ";";
    }
    o.require(l1[0] < l1[1] && l1[1] < l1[2], "round-trip ordering DRP6 < DP6 < central");
    const double ratio = pollution[1] / pollution[0];
    o.detail << " pollution ratio DP6/DRP6 " << ratio;
    o.require(ratio >= 10, "pollution ratio below 10");
    return o;
}

Outcome criterion9() {
    Outcome o;
    o.detail << std::setprecision(4);
    for (const char* name : {"drp4", "drp6"}) {
        const auto op = builtin_operator(name);
        const double q = op.declared_order;
        std::vector<double> lh, le;
        for (int n : {65, 129, 257}) {
            SimConfig c;
            c.grid.n = n;
            c.grid.bc = Boundary::periodic;
            c.t_end = 2;
            c.ic.kind = InitialCondition::Kind::gaussian;
            c.ic.width = 1.0;
            c.ic.sigma_factor = 0;
            // dt ~ h^(q/4) keeps the RK4 error below the spatial error
            c.dt_scale = std::min(1.0, std::pow(65.0 / n, q / 4 - 1));
            const auto r = simulate(op, c);
            const auto ex = exact_solution(c.grid, c.ic, c.t_end);
            lh.push_back(std::log(c.grid.h()));
            le.push_back(std::log(l2_error(r.final_state.v, ex.v, WaveSystem(op, c.grid).hdiag())));
        }
        // least-squares slope of log error against log h
        const double mh = (lh[0] + lh[1] + lh[2]) / 3, me = (le[0] + le[1] + le[2]) / 3;
        double num = 0, den = 0;
        for (int i = 0; i < 3; ++i) {
            num += (lh[i] - mh) * (le[i] - me);
            den += (lh[i] - mh) * (lh[i] - mh);
        }
        const double rate = num / den;
        o.detail << " " << name << " rate " << rate << " (need " << q - 0.3 << ");";
        o.require(rate >= q - 0.3, std::string(name) + " rate too low");
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::pair<std::function<Outcome()>, double>> criteria = {
        {1, {criterion1, 1}},  {2, {criterion2, 1e9}},  {3, {criterion3, 1e9}},
        {4, {criterion4, 1e9}}, {5, {criterion5, 30}},  {6, {criterion6, 60}},
        {7, {criterion7, 120}}, {8, {criterion8, 60}},  {9, {criterion9, 1e9}},
    };
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::stoi(argv[i]));
    if (which.empty())
        for (const auto& [k, v] : criteria) which.push_back(k);
    int failed = 0;
    for (int k : which) {
        const auto it = criteria.find(k);
        if (it == criteria.end()) {
            std::cerr << "unknown criterion " << k << '\n';
            return 2;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = it->second.first();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > it->second.second) o.require(false, "runtime " + std::to_string(secs) + " s over budget");
        std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << " (" << std::fixed
                  << std::setprecision(2) << secs << " s)" << std::defaultfloat << o.detail.str() << std::endl;
        if (!o.pass) ++failed;
    }
    return failed ? 1 : 0;
}

#include "drpsbp/tables.hpp"

#include "drpsbp/dispersion.hpp"
#include "drpsbp/operator.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace drpsbp {

const std::vector<PublishedRow>& published_rows() {
    static const std::vector<PublishedRow> rows = {
        {"DRP", 4, 1.91, 1.38, {1.00, 0.97, 0.56}, false},
        {"DRP", 5, 1.72, 2.53, {1.00, 0.97, 0.49}, false},
        {"DRP", 6, 1.36, 0.982, {1.00, 0.98, 0.83}, false},
        {"DRP", 7, 1.28, 3.47, {1.00, 0.98, 0.85}, false},
        {"DP", 4, 7.69, 6.01, {0.38, 0.30, 0.26}, true},
        {"DP", 5, 43.86, 28.87, {0.48, 0.42, 0.38}, true},
        {"DP", 6, 17.54, 11.05, {0.72, 0.68, 0.42}, true},
        {"DP", 7, 44.16, 28.47, {0.54, 0.49, 0.45}, true},
        {"SBP", 4, 64.35, 42.83, {0.37, 0.30, 0.27}, true},
        {"SBP", 6, 58.9, 38.13, {0.47, 0.41, 0.38}, true},
    };
    return rows;
}

const PublishedRow* published(const std::string& scheme, int order) {
    for (const auto& r : published_rows())
        if (r.scheme == scheme && r.order == order) return &r;
    return nullptr;
}

std::string scheme_of(const std::string& name) {
    if (name.rfind("drp", 0) == 0) return "DRP";
    if (name.rfind("up", 0) == 0) return "DP";
    if (name.rfind("central", 0) == 0) return "SBP";
    throw std::invalid_argument("no table scheme for operator '" + name + "'");
}

std::vector<TableRow> build_tables(const std::vector<double>& deltas) {
    std::vector<TableRow> out;
    for (const auto& name : builtin_names()) {
        const auto op = builtin_operator(name);
        auto curve = dispersion_upwind(op.interior);
        curve.name = name;
        const auto rep = error_report(curve);
        TableRow row;
        row.op = name;
        row.scheme = scheme_of(name);
        row.order = op.declared_order;
        row.eps_inf = rep.eps_inf;
        row.l2_pct = 100 * rep.l2_rel;
        row.vp_l2_pct = 100 * phase_velocity_l2(curve);
        row.swm = rep.swm;
        for (double d : deltas) {
            try {
                row.hstar.push_back(refinement_factor(curve, std::numbers::pi, d));
            } catch (const std::domain_error&) {
                row.hstar.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        out.push_back(row);
    }
    return out;
}

namespace {

void opt_cell(std::ostream& os, const std::optional<double>& v) {
    if (v) os << *v;
}

}  // namespace

void write_l2_csv(std::ostream& os, const std::vector<TableRow>& rows) {
    const auto old = os.precision(12);
    os << "operator,scheme,order,l2_rel_pct,published_pct\n";
    for (const auto& r : rows) {
        os << r.op << ',' << r.scheme << ',' << r.order << ',' << r.l2_pct << ',';
        if (const auto* p = published(r.scheme, r.order)) opt_cell(os, p->l2_pct);
        os << '\n';
    }
    os.precision(old);
}

void write_phase_velocity_csv(std::ostream& os, const std::vector<TableRow>& rows) {
    const auto old = os.precision(12);
    os << "operator,scheme,order,vp_l2_rel_pct,published_pct\n";
    for (const auto& r : rows) {
        os << r.op << ',' << r.scheme << ',' << r.order << ',' << r.vp_l2_pct << ',';
        if (const auto* p = published(r.scheme, r.order)) opt_cell(os, p->vp_l2_pct);
        os << '\n';
    }
    os.precision(old);
}

void write_hstar_csv(std::ostream& os, const std::vector<TableRow>& rows, const std::vector<double>& deltas) {
    const auto old = os.precision(12);
    os << "operator,scheme,order,delta,h_star,inv_h_star,inv_h_star_pow4,published_h_star,swm,published_swm\n";
    for (const auto& r : rows) {
        const auto* p = published(r.scheme, r.order);
        for (size_t d = 0; d < deltas.size(); ++d) {
            const double hs = r.hstar[d];
            os << r.op << ',' << r.scheme << ',' << r.order << ',' << deltas[d] << ',' << hs << ',' << 1 / hs << ','
               << std::pow(1 / hs, 4) << ',';
            if (p && d < p->hstar.size() && d < kTableDeltas.size() && deltas[d] == kTableDeltas[d]) os << p->hstar[d];
            os << ',' << (r.swm ? 'Y' : 'N') << ',';
            if (p && p->swm) os << (*p->swm ? 'Y' : 'N');
            os << '\n';
        }
    }
    os.precision(old);
}

}  // namespace drpsbp

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace drpsbp {

inline const std::vector<double> kTableDeltas = {0.05, 0.025, 0.015};

// Published comparison values, keyed by scheme ("DRP", "DP", "SBP") and order.
struct PublishedRow {
    std::string scheme;
    int order = 0;
    std::optional<double> l2_pct;
    std::optional<double> vp_l2_pct;
    std::vector<double> hstar;  // at kTableDeltas; empty when not tabulated
    std::optional<bool> swm;
};

const std::vector<PublishedRow>& published_rows();
const PublishedRow* published(const std::string& scheme, int order);

struct TableRow {
    std::string op;
    std::string scheme;
    int order = 0;
    double eps_inf = 0;
    double l2_pct = 0;
    double vp_l2_pct = 0;
    std::vector<double> hstar;  // one per delta; NaN when no h in (0, 1] meets the tolerance
    bool swm = false;
};

std::string scheme_of(const std::string& builtin_name);

// Rows for every builtin operator.
std::vector<TableRow> build_tables(const std::vector<double>& deltas = kTableDeltas);

void write_l2_csv(std::ostream& os, const std::vector<TableRow>& rows);
void write_phase_velocity_csv(std::ostream& os, const std::vector<TableRow>& rows);
void write_hstar_csv(std::ostream& os, const std::vector<TableRow>& rows, const std::vector<double>& deltas);

}  // namespace drpsbp

#include "drpsbp/tables.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace drpsbp;

TEST_SUITE("tables") {

TEST_CASE("one row per builtin with the expected scheme labels") {
    const auto rows = build_tables();
    CHECK(rows.size() == 16);
    for (const auto& r : rows) {
        CHECK(r.hstar.size() == kTableDeltas.size());
        CHECK(r.scheme == scheme_of(r.op));
    }
    CHECK_THROWS(scheme_of("mystery"));
}

TEST_CASE("published lookup") {
    REQUIRE(published("DRP", 6));
    CHECK(*published("DRP", 6)->l2_pct == doctest::Approx(1.36));
    CHECK(published("SBP", 5) == nullptr);
}

TEST_CASE("CSV outputs carry the published columns") {
    const auto rows = build_tables();
    std::ostringstream l2, vp, hs;
    write_l2_csv(l2, rows);
    write_phase_velocity_csv(vp, rows);
    write_hstar_csv(hs, rows, kTableDeltas);
    CHECK(l2.str().find("drp6,DRP,6,") != std::string::npos);
    CHECK(vp.str().rfind("operator,scheme,order,vp_l2_rel_pct,published_pct\n", 0) == 0);
    // three deltas per operator plus the header
    const std::string text = hs.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 16 * 3 + 1);
}

}

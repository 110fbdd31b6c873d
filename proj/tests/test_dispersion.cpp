#include "drpsbp/dispersion.hpp"
#include "drpsbp/stencil.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

using namespace drpsbp;
constexpr double kPi = std::numbers::pi;

TEST_SUITE("dispersion") {

TEST_CASE("symbol polynomial agrees with the direct Fourier sum") {
    const auto st = build_drp_interior(6);
    const auto sym = symbol(st);
    for (double k : {0.1, 1.0, 2.5, kPi}) {
        std::complex<double> direct = 0;
        for (int l = -st.left; l <= st.right; ++l) direct += st.at(l) * std::exp(std::complex<double>(0, l * k));
        CHECK(std::abs(sym(k) - direct) < 1e-13);
    }
}

TEST_CASE("omega_N(pi) exact values for the DRP operators") {
    CHECK(dispersion_upwind(build_drp_interior(4)).omega2_at_pi() == Rational(2128, 720) * Rational(2128, 720));
    const double want[] = {2.955556, 2.986667, 3.006984, 3.009161};
    for (int q = 4; q <= 7; ++q) {
        const auto c = dispersion_upwind(build_drp_interior(q));
        CHECK(std::abs(std::sqrt(c.omega2_at_pi().to_double()) - want[q - 4]) < 1e-6);
    }
}

TEST_CASE("central stencils lose the pi-mode entirely") {
    for (int q : {2, 4, 6, 8}) {
        const auto c = dispersion_central(build_central_interior(q));
        CHECK(c.omega2_at_pi() == Rational(0));
        CHECK(error_report(c).swm);
    }
}

TEST_CASE("maximum relative error of the DRP family") {
    const double want[] = {0.0592, 0.0493, 0.0428, 0.0422};
    for (int q = 4; q <= 7; ++q) {
        const auto r = error_report(dispersion_upwind(build_drp_interior(q)));
        CHECK(std::abs(r.eps_inf - want[q - 4]) < 1e-3);
        CHECK_FALSE(r.swm);
        CHECK(r.slope_limit_defect < 1e-12);
    }
}

TEST_CASE("error metrics of the exact relation vanish") {
    const auto c = exact_curve();
    for (size_t m = 0; m < c.k.size(); m += 512) CHECK(std::abs(c.omega[m] - c.k[m]) < 1e-15);
}

TEST_CASE("L2 relative error against a brute-force quadrature") {
    const auto c = dispersion_upwind(build_upwind_interior(4));
    double num = 0, den = 0;
    const int m = 200000;
    for (int i = 0; i < m; ++i) {
        const double k = (i + 0.5) * kPi / m;
        num += std::pow(k - c.omega_at(k), 2);
        den += k * k;
    }
    CHECK(std::abs(error_report(c).l2_rel - std::sqrt(num / den)) < 1e-6);
}

TEST_CASE("refinement factor meets the tolerance at the boundary of the search") {
    const auto c = dispersion_upwind(build_drp_interior(6));
    CHECK(refinement_factor(c, kPi, 0.05) == 1.0);
    const double h = refinement_factor(c, kPi, 0.015);
    CHECK(envelope_at(c, h * kPi) <= 0.015);
    CHECK(envelope_at(c, std::min(1.0, h + 2e-4) * kPi) > 0.015);
    CHECK_THROWS(refinement_factor(c, kPi, 0.0));
    CHECK_THROWS(refinement_factor(c, 4.0, 0.05));
}

TEST_CASE("relative error is invariant under grid refinement") {
    const auto c = dispersion_upwind(build_drp_interior(5));
    const auto inv = epsilon_invariance_check(c, 0.5);
    CHECK(std::abs(inv.before - inv.after) < 1e-9);
}

TEST_CASE("phase velocity tends to one") {
    const auto c = dispersion_upwind(build_upwind_interior(6));
    const auto vp = phase_velocity(c);
    CHECK(std::abs(vp.front() - 1) < 1e-12);
    CHECK(std::abs(vp[1] - 1) < 1e-8);
    CHECK(phase_velocity_l2(exact_curve()) < 1e-14);
}

TEST_CASE("dispersion CSV layout") {
    const auto c = dispersion_upwind(build_drp_interior(4));
    std::ostringstream os;
    write_dispersion_csv(os, c, error_report(c));
    std::istringstream is(os.str());
    std::string first, second;
    std::getline(is, first);
    std::getline(is, second);
    CHECK(first.rfind("# ", 0) == 0);
    CHECK(second == "k,omega_N,eps_rel,envelope,v_p");
}

}

#include "drpsbp/dispersion.hpp"
#include "drpsbp/wave.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

using namespace drpsbp;

namespace {

Grid1D grid(int n, Boundary bc) {
    Grid1D g;
    g.n = n;
    g.bc = bc;
    return g;
}

}  // namespace

TEST_SUITE("wave") {

TEST_CASE("grid spacing for both boundary types") {
    CHECK(grid(257, Boundary::reflecting).h() == doctest::Approx(8.0 / 256));
    CHECK(grid(256, Boundary::periodic).h() == doctest::Approx(8.0 / 256));
    CHECK(grid(5, Boundary::reflecting).nodes()(4) == doctest::Approx(8.0));
    CHECK(parse_boundary("periodic") == Boundary::periodic);
    CHECK_THROWS(parse_boundary("open"));
}

TEST_CASE("zero state gives zero rhs and stays zero") {
    const WaveSystem sys(builtin_operator("drp5"), grid(40, Boundary::reflecting));
    WaveState u{Eigen::VectorXd::Zero(40), Eigen::VectorXd::Zero(40), 0};
    Eigen::VectorXd dv, ds;
    sys.rhs(u.v, u.sigma, dv, ds);
    CHECK(dv.cwiseAbs().maxCoeff() == 0);
    CHECK(ds.cwiseAbs().maxCoeff() == 0);
    for (int i = 0; i < 10; ++i) u = sys.rk4_step(u, 0.01);
    CHECK(u.v.cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("constant sigma is annihilated on interior rows") {
    const int n = 40;
    const auto op = builtin_operator("drp6");
    const WaveSystem sys(op, grid(n, Boundary::reflecting));
    Eigen::VectorXd dv, ds;
    sys.rhs(Eigen::VectorXd::Zero(n), Eigen::VectorXd::Constant(n, 2.5), dv, ds);
    const int s = op.block_size();
    for (int i = s; i < n - s; ++i) CHECK(std::abs(dv(i)) < 1e-12);
}

TEST_CASE("periodic plane wave: h (D+ v)_j = omega_+ v_j") {
    const int n = 64;
    const auto op = builtin_operator("drp7");
    const Grid1D g = grid(n, Boundary::periodic);
    const WaveSystem sys(op, g);
    const auto sym = symbol(op.interior);
    for (int m : {1, 5, 17, 32}) {
        const double k = 2 * std::numbers::pi * m / n;
        Eigen::VectorXd re(n), im(n);
        for (int j = 0; j < n; ++j) {
            re(j) = std::cos(k * j);
            im(j) = std::sin(k * j);
        }
        Eigen::VectorXd dre, dim, dummy;
        sys.rhs(Eigen::VectorXd::Zero(n), re, dre, dummy);
        sys.rhs(Eigen::VectorXd::Zero(n), im, dim, dummy);
        const std::complex<double> w = sym(k);
        for (int j = 0; j < n; ++j) {
            const std::complex<double> got(dre(j) * g.h(), dim(j) * g.h());
            const std::complex<double> want = w * std::complex<double>(re(j), im(j));
            CHECK(std::abs(got - want) < 1e-12);
        }
    }
}

TEST_CASE("energy rate: zero for periodic, boundary dissipation for reflecting") {
    const auto op = builtin_operator("drp6");
    const Grid1D gp = grid(100, Boundary::periodic);
    const WaveSystem per(op, gp);
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::gaussian;
    ic.sigma_factor = 0.3;
    const WaveState u = initial_state(gp, ic);
    CHECK(std::abs(per.energy_rate(u)) < 1e-11 * per.energy(u));

    const Grid1D gr = grid(100, Boundary::reflecting);
    const WaveSystem refl(op, gr, 1.7);
    WaveState w;
    w.v = Eigen::VectorXd::LinSpaced(100, 1.0, -2.0);
    w.sigma = Eigen::VectorXd::LinSpaced(100, 0.5, 3.0);
    const double want = -1.7 * (w.v(0) * w.v(0) + w.v(99) * w.v(99));
    CHECK(refl.energy_rate(w) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("spectral radius bound covers every eigenvalue") {
    const auto op = builtin_operator("drp4");
    const int n = 30;
    const WaveSystem sys(op, grid(n, Boundary::reflecting));
    Eigen::MatrixXd m(2 * n, 2 * n);
    for (int c = 0; c < 2 * n; ++c) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(2 * n, c), dv, ds;
        sys.rhs(e.head(n), e.tail(n), dv, ds);
        m.col(c) << dv, ds;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(sys.spectral_radius_bound() >= rho);
    CHECK(es.eigenvalues().real().maxCoeff() < 1e-10);
}

TEST_CASE("RK4 is stable on the half disc used for the CFL limit") {
    for (int a = 0; a <= 180; ++a)
        for (int r = 0; r <= 50; ++r) {
            const double theta = std::numbers::pi / 2 + a * std::numbers::pi / 180;
            const std::complex<double> z = std::polar(kCflMax * r / 50.0, theta);
            const auto R = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
            CHECK(std::abs(R) <= 1 + 1e-12);
        }
}

TEST_CASE("pi packet: wide envelope gives the alternating mode") {
    const Grid1D g = grid(33, Boundary::reflecting);
    const auto u = pi_mode_packet(g, 4.0, 1e9);
    for (int i = 1; i < 32; ++i) CHECK(u.v(i) == doctest::Approx(i % 2 ? -1.0 : 1.0));
    CHECK((u.sigma + u.v).cwiseAbs().maxCoeff() < 1e-15);
    const WaveSystem sys(builtin_operator("drp4"), g);
    CHECK(sys.energy(pi_mode_packet(g, 4.0, 0.5)) > 0);
}

TEST_CASE("exact solution returns after a round trip") {
    for (Boundary bc : {Boundary::reflecting, Boundary::periodic}) {
        const Grid1D g = grid(129, bc);
        InitialCondition ic;
        ic.kind = InitialCondition::Kind::gaussian;
        ic.sigma_factor = -0.4;
        const auto u0 = exact_solution(g, ic, 0.0);
        const double period = bc == Boundary::periodic ? g.length() : 2 * g.length();
        const auto u1 = exact_solution(g, ic, period);
        CHECK((u1.v - u0.v).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((u1.sigma - u0.sigma).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("reflecting exact solution vanishes at the walls") {
    const Grid1D g = grid(65, Boundary::reflecting);
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::gaussian;
    ic.center = 1.0;
    for (double t : {0.5, 1.0, 3.7}) {
        const auto u = exact_solution(g, ic, t);
        CHECK(std::abs(u.v(0)) < 1e-14);
        CHECK(std::abs(u.v(64)) < 1e-14);
    }
}

TEST_CASE("L1 relative error") {
    const Eigen::VectorXd h = Eigen::VectorXd::Constant(4, 0.5);
    const Eigen::VectorXd r = Eigen::Vector4d(1, -2, 3, 0);
    CHECK(l1_relative_error(r, r, h) == 0);
    CHECK(l1_relative_error(2 * r, r, h) == doctest::Approx(1.0));
    CHECK_THROWS_AS(l1_relative_error(r, Eigen::VectorXd::Zero(4), h), std::domain_error);
    CHECK_THROWS_AS(l1_relative_error(r, Eigen::VectorXd::Zero(3), h), std::invalid_argument);
}

TEST_CASE("simulation: configuration checks") {
    const auto op = builtin_operator("drp4");
    SimConfig c;
    c.grid.n = 33;
    c.cfl = 0;
    CHECK_THROWS(simulate(op, c));
    c.cfl = kCflMax + 0.1;
    CHECK_THROWS(simulate(op, c));
    c.cfl = 0.5;
    c.t_end = 0;
    CHECK_THROWS(simulate(op, c));
    c.t_end = 1;
    c.snapshot_times = {2.0};
    CHECK_THROWS(simulate(op, c));
}

TEST_CASE("simulation: snapshots land on requested times and energy never grows") {
    SimConfig c;
    c.grid.n = 65;
    c.t_end = 3;
    c.snapshot_times = {0.0, 1.25, 3.0};
    const auto r = simulate(builtin_operator("drp5"), c);
    REQUIRE(r.snapshots.size() == 3);
    CHECK(r.snapshots[0].t == 0.0);
    CHECK(r.snapshots[1].t == 1.25);
    CHECK(r.snapshots[2].t == 3.0);
    CHECK(r.max_energy_increase <= 1e-10);
    CHECK(r.series.back().energy <= r.energy0 * (1 + 1e-9));
    CHECK(r.series.size() == static_cast<size_t>(r.steps + 1));
}

TEST_CASE("simulation: periodic smooth wave converges under refinement") {
    const auto op = builtin_operator("drp6");
    double prev = 0;
    for (int n : {48, 96}) {
        SimConfig c;
        c.grid = grid(n, Boundary::periodic);
        c.t_end = 1;
        c.ic.kind = InitialCondition::Kind::gaussian;
        c.ic.width = 1.0;
        c.dt_scale = 48.0 / n;
        const auto r = simulate(op, c);
        const auto ex = exact_solution(c.grid, c.ic, 1.0);
        const double e = l2_error(r.final_state.v, ex.v, WaveSystem(op, c.grid).hdiag());
        if (prev > 0) CHECK(prev / e > 30);
        prev = e;
    }
}

TEST_CASE("initial condition specs parse") {
    const auto ic = InitialCondition::parse("gaussian:2:0.75:0");
    CHECK(ic.kind == InitialCondition::Kind::gaussian);
    CHECK(ic.center == 2);
    CHECK(ic.width == 0.75);
    CHECK(ic.sigma_factor == 0);
    CHECK(InitialCondition::parse(ic.str()).width == 0.75);
    CHECK_THROWS(InitialCondition::parse("square"));
    CHECK_THROWS(InitialCondition::parse("pi:1:0"));
}

TEST_CASE("CSV writers") {
    const Grid1D g = grid(9, Boundary::reflecting);
    std::ostringstream snap;
    write_snapshot_csv(snap, g, pi_mode_packet(g, 4, 0.5));
    CHECK(snap.str().find("x,v,sigma\n") != std::string::npos);
    SimResult r;
    r.series = {{0, 0, 1}, {0.5, 0.1, 0.9}};
    std::ostringstream ser;
    write_series_csv(ser, r);
    CHECK(ser.str() == "t,l1_rel,energy\n0,0,1\n0.5,0.1,0.9\n");
}

}

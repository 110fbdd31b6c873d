#include "drpsbp/wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace drpsbp {

Boundary parse_boundary(const std::string& text) {
    if (text == "reflecting") return Boundary::reflecting;
    if (text == "periodic") return Boundary::periodic;
    throw std::invalid_argument("unknown boundary type '" + text + "' (reflecting|periodic)");
}

std::string to_string(Boundary bc) { return bc == Boundary::periodic ? "periodic" : "reflecting"; }

Eigen::VectorXd Grid1D::nodes() const {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = x_left + i * h();
    return x;
}

InitialCondition InitialCondition::parse(const std::string& text) {
    // kind[:center[:width[:sigma_factor]]]
    InitialCondition ic;
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.empty()) throw std::invalid_argument("empty initial condition");
    if (parts[0] == "pi" || parts[0] == "pi_packet") ic.kind = Kind::pi_packet;
    else if (parts[0] == "gaussian") ic.kind = Kind::gaussian;
    else throw std::invalid_argument("unknown initial condition '" + parts[0] + "' (pi|gaussian)");
    if (parts.size() > 1) ic.center = std::stod(parts[1]);
    if (parts.size() > 2) ic.width = std::stod(parts[2]);
    if (parts.size() > 3) ic.sigma_factor = std::stod(parts[3]);
    if (parts.size() > 4) throw std::invalid_argument("too many fields in initial condition '" + text + "'");
    if (!(ic.width > 0)) throw std::invalid_argument("initial condition width must be positive");
    return ic;
}

std::string InitialCondition::str() const {
    std::ostringstream os;
    os.precision(12);
    os << (kind == Kind::pi_packet ? "pi" : "gaussian") << ':' << center << ':' << width << ':' << sigma_factor;
    return os.str();
}

WaveSystem::WaveSystem(const DualPairOperator& op, const Grid1D& grid, double penalty)
    : n_(grid.n), bc_(grid.bc), penalty_(penalty) {
    if (!(penalty > 0)) throw std::invalid_argument("SAT penalty must be positive");
    if (!(grid.length() > 0)) throw std::invalid_argument("grid needs x_right > x_left");
    const double h = grid.h();
    if (bc_ == Boundary::periodic) {
        const auto& st = op.interior;
        if (n_ < st.left + st.right + 1)
            throw std::invalid_argument("periodic grid of " + std::to_string(n_) + " points is narrower than the stencil");
        std::vector<Eigen::Triplet<double>> trip;
        for (int i = 0; i < n_; ++i)
            for (int l = -st.left; l <= st.right; ++l)
                if (double a = st.at(l); a != 0) trip.emplace_back(i, ((i + l) % n_ + n_) % n_, a / h);
        dp_.resize(n_, n_);
        dp_.setFromTriplets(trip.begin(), trip.end());
        dm_ = -Eigen::SparseMatrix<double>(dp_.transpose());
        hdiag_ = Eigen::VectorXd::Constant(n_, h);
    } else {
        const auto a = assemble<double>(op, n_, grid.length());
        dp_ = a.Dp.sparseView();
        dm_ = a.Dm.sparseView();
        hdiag_ = a.hdiag;
    }
}

void WaveSystem::rhs(const Eigen::VectorXd& v, const Eigen::VectorXd& sigma, Eigen::VectorXd& dv,
                     Eigen::VectorXd& dsigma) const {
    if (v.size() != n_ || sigma.size() != n_) throw std::invalid_argument("state length does not match the grid");
    dv = dp_ * sigma;
    dsigma = dm_ * v;
    if (bc_ == Boundary::reflecting) {
        // H dv gets -tau v at both ends; the sigma terms cancel v^T B sigma.
        const double l = v(0) / hdiag_(0), r = v(n_ - 1) / hdiag_(n_ - 1);
        dv(0) -= penalty_ * l;
        dsigma(0) += l;
        dv(n_ - 1) -= penalty_ * r;
        dsigma(n_ - 1) -= r;
    }
}

WaveState WaveSystem::rk4_step(const WaveState& u, double dt) const {
    Eigen::VectorXd k1v, k1s, k2v, k2s, k3v, k3s, k4v, k4s;
    rhs(u.v, u.sigma, k1v, k1s);
    rhs(u.v + 0.5 * dt * k1v, u.sigma + 0.5 * dt * k1s, k2v, k2s);
    rhs(u.v + 0.5 * dt * k2v, u.sigma + 0.5 * dt * k2s, k3v, k3s);
    rhs(u.v + dt * k3v, u.sigma + dt * k3s, k4v, k4s);
    WaveState out;
    out.v = u.v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    out.sigma = u.sigma + dt / 6.0 * (k1s + 2 * k2s + 2 * k3s + k4s);
    out.t = u.t + dt;
    return out;
}

double WaveSystem::energy(const WaveState& u) const {
    return 0.5 * (u.v.cwiseProduct(hdiag_).dot(u.v) + u.sigma.cwiseProduct(hdiag_).dot(u.sigma));
}

double WaveSystem::energy_rate(const WaveState& u) const {
    Eigen::VectorXd dv, ds;
    rhs(u.v, u.sigma, dv, ds);
    return u.v.cwiseProduct(hdiag_).dot(dv) + u.sigma.cwiseProduct(hdiag_).dot(ds);
}

double WaveSystem::spectral_radius_bound() const {
    // rhs^T: dv^T = sigma^T Dp^T ..., so apply the transpose blockwise
    auto apply = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd dv, ds;
        rhs(x.head(n_), x.tail(n_), dv, ds);
        Eigen::VectorXd y(2 * n_);
        y << dv, ds;
        return y;
    };
    auto apply_t = [&](const Eigen::VectorXd& y) {
        Eigen::VectorXd yv = y.head(n_), ys = y.tail(n_);
        Eigen::VectorXd xv = dm_.transpose() * ys;
        Eigen::VectorXd xs = dp_.transpose() * yv;
        if (bc_ == Boundary::reflecting) {
            xv(0) += (-penalty_ * yv(0) + ys(0)) / hdiag_(0);
            xv(n_ - 1) += (-penalty_ * yv(n_ - 1) - ys(n_ - 1)) / hdiag_(n_ - 1);
        }
        Eigen::VectorXd x(2 * n_);
        x << xv, xs;
        return x;
    };
    Eigen::VectorXd x(2 * n_);
    for (int i = 0; i < 2 * n_; ++i) x(i) = 1.0 + 0.5 * std::sin(1.0 + 0.37 * i);
    x.normalize();
    double lam = 0;
    for (int it = 0; it < 5000; ++it) {
        Eigen::VectorXd y = apply_t(apply(x));
        const double next = y.norm();
        if (next == 0) return 0;
        x = y / next;
        if (std::abs(next - lam) <= 1e-10 * next) {
            lam = next;
            break;
        }
        lam = next;
    }
    return 1.02 * std::sqrt(lam);
}

namespace {

struct Profile {
    const Grid1D& grid;
    const InitialCondition& ic;

    double g(double x) const {
        const double e = std::exp(-std::pow((x - ic.center) / ic.width, 2));
        if (ic.kind == InitialCondition::Kind::gaussian) return e;
        return e * std::cos(std::numbers::pi * (x - grid.x_left) / grid.h());
    }
    // characteristic variables w1 = v + sigma (left-moving), w2 = v - sigma (right-moving)
    double w1(double x) const { return (1.0 + ic.sigma_factor) * g(x); }
    double w2(double x) const { return (1.0 - ic.sigma_factor) * g(x); }
};

double wrap(double y, double period) {
    // into [-period/2, period/2)
    double r = std::fmod(y + period / 2, period);
    if (r < 0) r += period;
    return r - period / 2;
}

}  // namespace

WaveState exact_solution(const Grid1D& grid, const InitialCondition& ic, double t) {
    if (t == 0 && grid.bc == Boundary::reflecting) return initial_state(grid, ic);
    const Profile p{grid, ic};
    const double a = grid.x_left, len = grid.length();
    const Eigen::VectorXd x = grid.nodes();
    WaveState u;
    u.t = t;
    u.v.resize(grid.n);
    u.sigma.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        double W1 = 0, W2 = 0;
        if (grid.bc == Boundary::periodic) {
            const double yr = a + len / 2 + wrap(x(i) - t - a - len / 2, len);
            const double yl = a + len / 2 + wrap(x(i) + t - a - len / 2, len);
            for (int k = -3; k <= 3; ++k) {
                W2 += p.w2(yr + k * len);
                W1 += p.w1(yl + k * len);
            }
        } else {
            // odd extension of w1 behind the left wall, 2L-periodic
            auto F = [&](double y) {
                y = wrap(y, 2 * len);
                return y >= 0 ? p.w2(a + y) : -p.w1(a - y);
            };
            const double y = x(i) - a;
            W2 = F(y - t);
            W1 = -F(-y - t);
        }
        u.v(i) = 0.5 * (W1 + W2);
        u.sigma(i) = 0.5 * (W1 - W2);
    }
    return u;
}

WaveState initial_state(const Grid1D& grid, const InitialCondition& ic) {
    // periodic data is the periodized profile so that it matches the exact solution
    if (grid.bc == Boundary::periodic) return exact_solution(grid, ic, 0.0);
    const Profile p{grid, ic};
    const Eigen::VectorXd x = grid.nodes();
    WaveState u;
    u.v.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) u.v(i) = p.g(x(i));
    u.sigma = ic.sigma_factor * u.v;
    return u;
}

WaveState pi_mode_packet(const Grid1D& grid, double center, double width) {
    InitialCondition ic;
    ic.center = center;
    ic.width = width;
    return initial_state(grid, ic);
}

double l1_relative_error(const Eigen::VectorXd& computed, const Eigen::VectorXd& reference,
                         const Eigen::VectorXd& hdiag) {
    if (computed.size() != reference.size() || hdiag.size() != reference.size())
        throw std::invalid_argument("l1_relative_error: length mismatch");
    const double den = hdiag.dot(reference.cwiseAbs());
    if (den == 0) throw std::domain_error("relative error undefined for a zero reference");
    return hdiag.dot((computed - reference).cwiseAbs()) / den;
}

double l2_error(const Eigen::VectorXd& computed, const Eigen::VectorXd& reference, const Eigen::VectorXd& hdiag) {
    if (computed.size() != reference.size() || hdiag.size() != reference.size())
        throw std::invalid_argument("l2_error: length mismatch");
    return std::sqrt(hdiag.dot((computed - reference).cwiseAbs2()));
}

SimResult simulate(const DualPairOperator& op, const SimConfig& cfg) {
    if (!(cfg.cfl > 0 && cfg.cfl <= kCflMax))
        throw std::invalid_argument("CFL must lie in (0, " + std::to_string(kCflMax) + "]");
    if (!(cfg.t_end > 0)) throw std::invalid_argument("end time must be positive");
    if (!(cfg.dt_scale > 0 && cfg.dt_scale <= 1)) throw std::invalid_argument("dt scale must lie in (0, 1]");
    const WaveSystem sys(op, cfg.grid, cfg.penalty);

    SimResult r;
    r.rho = sys.spectral_radius_bound();
    r.dt_max = cfg.dt_scale * cfg.cfl / r.rho;

    std::vector<double> stops;
    for (double t : cfg.snapshot_times) {
        if (t < 0 || t > cfg.t_end) throw std::invalid_argument("snapshot time outside [0, t_end]");
        stops.push_back(t);
    }
    stops.push_back(cfg.t_end);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    std::vector<bool> wanted(stops.size(), false);
    for (size_t k = 0; k < stops.size(); ++k)
        wanted[k] = std::find(cfg.snapshot_times.begin(), cfg.snapshot_times.end(), stops[k]) !=
                    cfg.snapshot_times.end();

    WaveState u = initial_state(cfg.grid, cfg.ic);
    r.energy0 = sys.energy(u);
    auto record = [&](const WaveState& s, double e) {
        const WaveState ex = exact_solution(cfg.grid, cfg.ic, s.t);
        double l1 = std::numeric_limits<double>::quiet_NaN();
        if (ex.v.cwiseAbs().maxCoeff() > 0) l1 = l1_relative_error(s.v, ex.v, sys.hdiag());
        r.series.push_back({s.t, l1, e});
    };
    double e_prev = r.energy0, rate_prev = std::abs(sys.energy_rate(u));
    record(u, e_prev);

    double t0 = 0;
    for (size_t k = 0; k < stops.size(); ++k) {
        const double span = stops[k] - t0;
        const long nst = span > 0 ? static_cast<long>(std::ceil(span / r.dt_max - 1e-9)) : 0;
        const double dt = nst ? span / nst : 0.0;
        for (long i = 0; i < nst; ++i) {
            u = sys.rk4_step(u, dt);
            if (i == nst - 1) u.t = stops[k];
            ++r.steps;
            if (!u.v.allFinite() || !u.sigma.allFinite())
                throw std::runtime_error("non-finite state at step " + std::to_string(r.steps));
            const double e = sys.energy(u);
            const double rate = std::abs(sys.energy_rate(u));
            if (r.energy0 > 0) {
                r.max_energy_increase = std::max(r.max_energy_increase, (e - e_prev) / r.energy0);
                r.rate_integral += 0.5 * dt * (rate + rate_prev) / r.energy0;
            }
            e_prev = e;
            rate_prev = rate;
            record(u, e);
        }
        t0 = stops[k];
        if (wanted[k]) r.snapshots.push_back(u);
    }
    r.final_state = u;
    return r;
}

void write_snapshot_csv(std::ostream& os, const Grid1D& grid, const WaveState& u) {
    const auto old = os.precision(12);
    const Eigen::VectorXd x = grid.nodes();
    os << "# t=" << u.t << "\n";
    os << "x,v,sigma\n";
    for (int i = 0; i < grid.n; ++i) os << x(i) << ',' << u.v(i) << ',' << u.sigma(i) << '\n';
    os.precision(old);
}

void write_series_csv(std::ostream& os, const SimResult& r) {
    const auto old = os.precision(12);
    os << "t,l1_rel,energy\n";
    for (const auto& s : r.series) os << s.t << ',' << s.l1_rel << ',' << s.energy << '\n';
    os.precision(old);
}

}  // namespace drpsbp

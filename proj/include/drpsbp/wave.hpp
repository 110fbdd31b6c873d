#pragma once

#include "drpsbp/operator.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace drpsbp {

enum class Boundary { reflecting, periodic };

Boundary parse_boundary(const std::string& text);
std::string to_string(Boundary bc);

// Reflecting grids include both endpoints, h = L/(n-1). Periodic grids drop the right
// endpoint, x_i = x_left + i L/n.
struct Grid1D {
    double x_left = 0.0;
    double x_right = 8.0;
    int n = 257;
    Boundary bc = Boundary::reflecting;

    double length() const { return x_right - x_left; }
    double h() const { return bc == Boundary::periodic ? length() / n : length() / (n - 1); }
    Eigen::VectorXd nodes() const;
};

struct WaveState {
    Eigen::VectorXd v, sigma;
    double t = 0.0;
};

struct InitialCondition {
    enum class Kind { pi_packet, gaussian };
    Kind kind = Kind::pi_packet;
    double center = 4.0;
    double width = 0.5;
    // sigma = sigma_factor * v; -1 is a right-moving wave, 0 splits into two halves
    double sigma_factor = -1.0;

    static InitialCondition parse(const std::string& text);
    std::string str() const;
};

struct SimConfig {
    std::string operator_name = "drp6";
    Grid1D grid;
    double cfl = 0.5;
    double t_end = 8.0;
    InitialCondition ic;
    double penalty = 1.0;  // SAT strength on the v equation, in units of 1/(h h_1)
    // dt is multiplied by this; used to keep temporal error subdominant in refinement studies
    double dt_scale = 1.0;
    std::vector<double> snapshot_times;
};

// RK4 on the half-disc of radius 2.5 in the left half plane is stable; dt = cfl / ||M||.
inline constexpr double kCflMax = 2.5;

class WaveSystem {
public:
    // Reflecting boundaries need a closed operator; periodic uses the interior stencil only.
    WaveSystem(const DualPairOperator& op, const Grid1D& grid, double penalty = 1.0);

    int size() const { return n_; }
    const Eigen::VectorXd& hdiag() const { return hdiag_; }
    const Eigen::SparseMatrix<double>& Dp() const { return dp_; }
    const Eigen::SparseMatrix<double>& Dm() const { return dm_; }

    void rhs(const Eigen::VectorXd& v, const Eigen::VectorXd& sigma, Eigen::VectorXd& dv,
             Eigen::VectorXd& dsigma) const;
    WaveState rk4_step(const WaveState& u, double dt) const;

    double energy(const WaveState& u) const;
    // dE/dt of the semi-discrete system at u
    double energy_rate(const WaveState& u) const;
    // Upper bound on the spectral radius of the stacked right-hand side: ||M||_2 by power iteration, 2% margin.
    double spectral_radius_bound() const;

private:
    int n_;
    Boundary bc_;
    double penalty_;
    Eigen::VectorXd hdiag_;
    Eigen::SparseMatrix<double> dp_, dm_;
};

WaveState initial_state(const Grid1D& grid, const InitialCondition& ic);
WaveState pi_mode_packet(const Grid1D& grid, double center, double width);

// Analytic solution at time t, reflecting walls (v = 0) or periodic wrap.
WaveState exact_solution(const Grid1D& grid, const InitialCondition& ic, double t);

// sum h_i |v_i - r_i| / sum h_i |r_i|; throws when the reference is zero.
double l1_relative_error(const Eigen::VectorXd& computed, const Eigen::VectorXd& reference,
                         const Eigen::VectorXd& hdiag);
double l2_error(const Eigen::VectorXd& computed, const Eigen::VectorXd& reference, const Eigen::VectorXd& hdiag);

struct SimRecord {
    double t = 0;
    double l1_rel = 0;
    double energy = 0;
};

struct SimResult {
    std::vector<SimRecord> series;
    std::vector<WaveState> snapshots;
    WaveState final_state;
    double dt_max = 0;
    long steps = 0;
    double rho = 0;
    double energy0 = 0;
    // largest single-step energy increase relative to E(0)
    double max_energy_increase = 0;
    // integral of |dE/dt| of the semi-discrete system along the trajectory, relative to E(0)
    double rate_integral = 0;
};

// Snapshot and end times are hit exactly. Throws on NaN/Inf with the step index.
SimResult simulate(const DualPairOperator& op, const SimConfig& config);

void write_snapshot_csv(std::ostream& os, const Grid1D& grid, const WaveState& u);
void write_series_csv(std::ostream& os, const SimResult& r);

}  // namespace drpsbp

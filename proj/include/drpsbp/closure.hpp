#pragma once

#include "drpsbp/operator.hpp"
#include "drpsbp/stencil.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace drpsbp {

struct ClosureHyperparams {
    double eps1 = 0.0;     // NSD margin on the complement of the forced null space
    double eps2 = 0.25;    // floor on h_i
    double ridge = 1e-6;   // lambda_c
    double t = 1.0;        // initial ADMM penalty
    double tol = 1e-9;
    int max_iter = 5000;
    double h_target = 0.3;       // soft anchor for h_1
    double h_target_weight = 1.0;
    double band_weight = 0.01;   // pull of q toward the interior band
    double truncation_weight = 1.0;
    bool balance_penalty = true;  // residual balancing of t every 10 iterations
};

struct ClosureProblem {
    InteriorStencil interior;
    int s = 0;
    int boundary_order = 0;
    ClosureHyperparams hp;
    // Known entries of the symmetric part inside the top s x s block, mirrored to the bottom block.
    std::map<std::pair<int, int>, double> known;
    int working_n = 0;

    // Derived data. theta = (q row-major, h).
    Eigen::MatrixXd A1;  // accuracy equalities A1 theta = b1
    Eigen::VectorXd b1;
    Eigen::MatrixXd C;   // normalized truncation rows, cost |C theta - c|^2
    Eigen::VectorXd c;
    Eigen::MatrixXd S0;  // symmetric part with theta = 0
    Eigen::MatrixXd L;   // vec(S(theta)) = vec(S0) + L theta (row-major)
    Eigen::VectorXd q_band;

    int parameter_count() const { return s * s + s; }
    Eigen::MatrixXd symmetric_part(const Eigen::VectorXd& theta) const;
};

// s defaults to 4/6/8/8 for orders 4..7 and never below max(r1, r2).
int default_block_size(const InteriorStencil& interior);
int default_boundary_order(const InteriorStencil& interior);

ClosureProblem build_problem(const InteriorStencil& interior, int s, int boundary_order,
                             const ClosureHyperparams& hp = {});

struct AdmmRecord {
    int iter = 0;
    double primal = 0;
    double dual = 0;
    double t = 0;
    double lambda_max = 0;
    double accuracy = 0;
};

struct AdmmResult {
    BoundaryClosure closure;
    Eigen::VectorXd theta;
    bool converged = false;
    int iterations = 0;
    double primal = 0;
    double dual = 0;
    bool monotone = true;  // combined residual fell across every 50-iteration window
    std::vector<AdmmRecord> history;
};

// Throws if the accuracy system is inconsistent.
AdmmResult admm_solve(const ClosureProblem& problem, const std::optional<Eigen::VectorXd>& theta0 = std::nullopt);

// Interior plus solved closure.
DualPairOperator close_operator(const DualPairOperator& op, const ClosureProblem& problem, AdmmResult* report = nullptr);
DualPairOperator close_operator(const DualPairOperator& op, AdmmResult* report = nullptr);

void write_history_csv(std::ostream& os, const AdmmResult& result);

}  // namespace drpsbp

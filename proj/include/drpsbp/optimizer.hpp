#pragma once

#include "drpsbp/rational.hpp"
#include "drpsbp/stencil.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace drpsbp {

// Weight rho(k) = sum_j rho_j cos(jk) on [0, pi]; empty coefficients mean rho = 1.
struct WeightSpec {
    std::string label = "uniform";
    std::vector<double> cos_coeffs;

    static WeightSpec uniform() { return {}; }
    // rho = exp(c k^2), projected onto cosines by quadrature
    static WeightSpec expquad(double c, int terms);
    // rho = 1 on [0, k'], 0 beyond
    static WeightSpec indicator(double kprime, int terms);
    // "uniform" | "expquad:c" | "indicator:k'" | "c0,c1,..."
    static WeightSpec parse(const std::string& text, int terms);
};

struct FamilySpec {
    int a = 4;
    int b = 9;
    WeightSpec weight;
    int j_max = 20;
};

// gram[l](i, j): cosine coefficient l of Re(omega_i conj(omega_j)).
struct GramTensor {
    std::vector<MatrixR> exact;
    std::vector<Eigen::MatrixXd> gram;
    int size() const { return gram.empty() ? 0 : static_cast<int>(gram.front().rows()); }
};

struct Family {
    std::vector<InteriorStencil> basis;
    GramTensor gram;
};

// Upwind interiors of orders a..b and their Gram tensor truncated at j_max.
// Throws if a symmetrized product carries a sine term.
Family build_family(const FamilySpec& spec);

// Cosine coefficients of k^2 on [-pi, pi]: pi^2/3, 4(-1)^l / l^2.
Eigen::VectorXd target_coeffs(int j_max);

// Normalized weight matrix on cosine coefficients 0..j_max; identity for rho = 1.
Eigen::MatrixXd weight_matrix(const WeightSpec& w, int j_max);

double objective(const Eigen::VectorXd& gamma, const GramTensor& g, const Eigen::VectorXd& beta,
                 const Eigen::MatrixXd& weight);

struct RelaxationSeed {
    Eigen::VectorXd gamma;
    bool fallback = false;  // leading eigenvalue was not positive; uniform seed used
    double relaxed_objective = 0;
};

RelaxationSeed solve_relaxation(const GramTensor& g, const Eigen::VectorXd& beta, const Eigen::MatrixXd& weight);

struct StartLog {
    std::string start;
    Eigen::VectorXd gamma;
    double value = 0;
    int iterations = 0;
    bool converged = false;
};

struct GammaSolution {
    Eigen::VectorXd gamma;
    double value = 0;
    std::vector<StartLog> starts;
    bool relaxation_fallback = false;
};

// Levenberg-Marquardt on sum(gamma) = 1 from the relaxation seed, every vertex and the barycentre.
GammaSolution minimize_gamma(const GramTensor& g, const Eigen::VectorXd& beta, const Eigen::MatrixXd& weight,
                             int max_iter = 500);

struct OptimizerResult {
    Eigen::VectorXd gamma;
    std::vector<Rational> gamma_exact;  // rationalized gamma, empty when flagged floating
    bool floating = false;
    InteriorStencil stencil;
    double value = 0;
    double eps_inf = 0;
    double pi_error = 0;
    std::vector<StartLog> starts;
    bool relaxation_fallback = false;
};

OptimizerResult optimize(const FamilySpec& spec);

// Best rational approximation with denominator <= max_den (continued fractions).
Rational rationalize(double x, long long max_den);

}  // namespace drpsbp

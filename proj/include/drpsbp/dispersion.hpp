#pragma once

#include "drpsbp/rational.hpp"
#include "drpsbp/stencil.hpp"

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace drpsbp {

// omega_+(k) = sum_j c_j cos(jk) + i sum_j s_j sin(jk), j = 0..N.
struct SymbolPolynomial {
    std::vector<Rational> cos_coeffs;
    std::vector<Rational> sin_coeffs;

    std::complex<double> operator()(double k) const;
    // Exact value at k = pi (the imaginary part vanishes).
    Rational at_pi() const;
};

SymbolPolynomial symbol(const InteriorStencil& stencil);

// Numerical dispersion relation omega_N(k) = |omega_+(k)| with
// omega_N^2 = sum_j w2[j] cos(jk) held exactly.
struct DispersionCurve {
    std::string name;
    std::vector<Rational> w2;
    std::vector<double> w2d;
    std::vector<double> k;      // sample grid on [0, pi]
    std::vector<double> omega;  // omega_N at k

    double omega2_at(double kk) const;
    double omega_at(double kk) const;
    // d omega_N / dk from the differentiated cosine series; NaN where omega_N = 0.
    double slope_at(double kk) const;
    // Exact omega_N^2(pi).
    Rational omega2_at_pi() const;
};

inline constexpr int kDefaultSamples = 4097;

DispersionCurve dispersion_upwind(const InteriorStencil& stencil, int samples = kDefaultSamples);
DispersionCurve dispersion_central(const CentralStencil& stencil, int samples = kDefaultSamples);
// Dispersion of the identity relation omega_N = k, as a sampled curve without series.
DispersionCurve exact_curve(int samples = kDefaultSamples);

struct ErrorReport {
    std::vector<double> k;         // k_m = m pi / (samples - 1), m >= 1
    std::vector<double> eps;       // |k - omega_N|
    std::vector<double> rel;       // eps / k
    std::vector<double> envelope;  // running max of rel
    double eps_inf = 0;            // refined maximum of rel
    double k_at_max = 0;
    double l2_rel = 0;             // ||k - omega_N||_2 / ||k||_2 over [0, pi]
    bool swm = false;
    double slope_limit_defect = 0;  // |v_p(0) - 1| from the series
};

ErrorReport error_report(const DispersionCurve& curve);

// v_p = omega_N / k on the sample grid, with the k -> 0 limit taken from the series.
std::vector<double> phase_velocity(const DispersionCurve& curve);
double phase_velocity_limit(const DispersionCurve& curve);
// ||v_p - 1||_2 / ||1||_2 over [0, pi]
double phase_velocity_l2(const DispersionCurve& curve);

// Running-max relative error evaluated at arbitrary k in (0, pi].
double envelope_at(const DispersionCurve& curve, double kk);

// Largest h in (0, 1] with envelope(h k) <= delta, bisected to 1e-4.
double refinement_factor(const DispersionCurve& curve, double kk, double delta);

bool detect_swm(const DispersionCurve& curve);

struct InvarianceCheck {
    double before = 0;
    double after = 0;
};
// eps_inf of the curve versus eps_inf of its refinement (1/h) omega_N(h k) on [pi/(4096 h), pi/h].
InvarianceCheck epsilon_invariance_check(const DispersionCurve& curve, double h);

// CSV: k, omega_N, eps_rel, envelope, v_p with a commented header line.
void write_dispersion_csv(std::ostream& os, const DispersionCurve& curve, const ErrorReport& report);

}  // namespace drpsbp

#include "drpsbp/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace drpsbp {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> to_doubles(const std::vector<Rational>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& r : v) out.push_back(r.to_double());
    return out;
}

// |sum_l a_l e^{ilk}|^2 = G_0 + sum_{d>0} 2 G_d cos(dk), G_d = sum_{l-m=d} a_l a_m.
std::vector<Rational> squared_modulus(const InteriorStencil& st) {
    const int reach = std::max(st.left, st.right);
    std::vector<Rational> w2(static_cast<size_t>(2 * reach + 1), Rational(0));
    for (int l = -st.left; l <= st.right; ++l)
        for (int m = -st.left; m <= st.right; ++m) {
            const int d = l - m;
            if (d < 0) continue;
            const Rational p = st[l] * st[m];
            w2[static_cast<size_t>(d)] += d == 0 ? p : Rational(2) * p;
        }
    while (w2.size() > 1 && w2.back().is_zero()) w2.pop_back();
    return w2;
}

DispersionCurve make_curve(std::string name, std::vector<Rational> w2, int samples) {
    if (samples < 3 || samples % 2 == 0)
        throw std::invalid_argument("dispersion sample count must be odd and >= 3");
    DispersionCurve c;
    c.name = std::move(name);
    c.w2 = std::move(w2);
    c.w2d = to_doubles(c.w2);
    c.k.resize(static_cast<size_t>(samples));
    c.omega.resize(c.k.size());
    for (int m = 0; m < samples; ++m) {
        c.k[static_cast<size_t>(m)] = kPi * m / (samples - 1);
        c.omega[static_cast<size_t>(m)] = c.omega_at(c.k[static_cast<size_t>(m)]);
    }
    c.omega.front() = 0.0;
    return c;
}

double rel_error(const DispersionCurve& c, double kk) { return std::abs(kk - c.omega_at(kk)) / kk; }

double golden_max(const DispersionCurve& c, double a, double b) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = rel_error(c, x1), f2 = rel_error(c, x2);
    while (b - a > 1e-7) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + g * (b - a); f2 = rel_error(c, x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - g * (b - a); f1 = rel_error(c, x1);
        }
    }
    return (a + b) / 2;
}

}  // namespace

std::complex<double> SymbolPolynomial::operator()(double k) const {
    double re = 0, im = 0;
    for (size_t j = 0; j < cos_coeffs.size(); ++j) re += cos_coeffs[j].to_double() * std::cos(double(j) * k);
    for (size_t j = 0; j < sin_coeffs.size(); ++j) im += sin_coeffs[j].to_double() * std::sin(double(j) * k);
    return {re, im};
}

Rational SymbolPolynomial::at_pi() const {
    Rational s(0);
    for (size_t j = 0; j < cos_coeffs.size(); ++j) s += j % 2 ? -cos_coeffs[j] : cos_coeffs[j];
    return s;
}

SymbolPolynomial symbol(const InteriorStencil& st) {
    const int n = std::max(st.left, st.right);
    SymbolPolynomial p;
    p.cos_coeffs.assign(static_cast<size_t>(n + 1), Rational(0));
    p.sin_coeffs.assign(static_cast<size_t>(n + 1), Rational(0));
    p.cos_coeffs[0] = st[0];
    for (int j = 1; j <= n; ++j) {
        p.cos_coeffs[static_cast<size_t>(j)] = st[j] + st[-j];
        p.sin_coeffs[static_cast<size_t>(j)] = st[j] - st[-j];
    }
    return p;
}

double DispersionCurve::omega2_at(double kk) const {
    double s = 0;
    for (size_t j = 0; j < w2d.size(); ++j) s += w2d[j] * std::cos(double(j) * kk);
    return s;
}

double DispersionCurve::omega_at(double kk) const { return std::sqrt(std::max(omega2_at(kk), 0.0)); }

double DispersionCurve::slope_at(double kk) const {
    const double w = omega_at(kk);
    if (w <= 0) return std::numeric_limits<double>::quiet_NaN();
    double d = 0;
    for (size_t j = 1; j < w2d.size(); ++j) d -= double(j) * w2d[j] * std::sin(double(j) * kk);
    return d / (2 * w);
}

Rational DispersionCurve::omega2_at_pi() const {
    Rational s(0);
    for (size_t j = 0; j < w2.size(); ++j) s += j % 2 ? -w2[j] : w2[j];
    return s;
}

DispersionCurve dispersion_upwind(const InteriorStencil& stencil, int samples) {
    return make_curve("", squared_modulus(stencil), samples);
}

DispersionCurve dispersion_central(const CentralStencil& stencil, int samples) {
    // (sum 2 gamma_j sin jk)^2 is |omega_+|^2 of the antisymmetric band
    return make_curve("", squared_modulus(stencil.as_interior()), samples);
}

DispersionCurve exact_curve(int samples) {
    // k^2 has no finite cosine series; keep an empty series and exact samples
    DispersionCurve c = make_curve("exact", {Rational(0)}, samples);
    c.omega = c.k;
    c.w2.clear();
    c.w2d.clear();
    return c;
}

double phase_velocity_limit(const DispersionCurve& c) {
    // omega_N^2 ~ -k^2/2 sum j^2 w2_j near 0
    double s = 0;
    for (size_t j = 1; j < c.w2d.size(); ++j) s += double(j * j) * c.w2d[j];
    return std::sqrt(std::max(-s / 2, 0.0));
}

std::vector<double> phase_velocity(const DispersionCurve& c) {
    std::vector<double> vp(c.k.size());
    vp[0] = c.w2d.empty() ? 1.0 : phase_velocity_limit(c);
    for (size_t m = 1; m < c.k.size(); ++m) vp[m] = c.omega[m] / c.k[m];
    return vp;
}

bool detect_swm(const DispersionCurve& c) {
    if (c.w2d.empty()) return false;
    std::vector<double> slopes;
    double scale = 0;
    for (size_t m = 1; m + 1 < c.k.size(); ++m) {
        const double d = c.slope_at(c.k[m]);
        if (std::isnan(d)) continue;
        slopes.push_back(d);
        scale = std::max(scale, std::abs(d));
    }
    return std::any_of(slopes.begin(), slopes.end(), [&](double d) { return d < -1e-12 * scale; });
}

ErrorReport error_report(const DispersionCurve& c) {
    ErrorReport r;
    const size_t n = c.k.size();
    double run = 0;
    size_t arg = 1;
    for (size_t m = 1; m < n; ++m) {
        const double e = std::abs(c.k[m] - c.omega[m]);
        r.k.push_back(c.k[m]);
        r.eps.push_back(e);
        r.rel.push_back(e / c.k[m]);
        if (r.rel.back() > run) {
            run = r.rel.back();
            arg = m;
        }
        r.envelope.push_back(run);
    }
    r.eps_inf = run;
    r.k_at_max = c.k[arg];
    if (!c.w2d.empty()) {
        const double a = c.k[arg - 1] > 0 ? c.k[arg - 1] : c.k[arg] / 2;
        const double b = arg + 1 < n ? c.k[arg + 1] : c.k[arg];
        const double km = golden_max(c, a, b);
        for (double cand : {km, c.k[arg]}) {
            const double v = rel_error(c, cand);
            if (v > r.eps_inf) {
                r.eps_inf = v;
                r.k_at_max = cand;
            }
        }
    }

    // composite Simpson on [0, pi]
    double num = 0, den = 0;
    for (size_t m = 0; m < n; ++m) {
        const double w = (m == 0 || m == n - 1) ? 1.0 : (m % 2 ? 4.0 : 2.0);
        const double e = c.k[m] - c.omega[m];
        num += w * e * e;
        den += w * c.k[m] * c.k[m];
    }
    r.l2_rel = std::sqrt(num / den);
    r.swm = detect_swm(c);
    r.slope_limit_defect = c.w2d.empty() ? 0.0 : std::abs(phase_velocity_limit(c) - 1.0);
    return r;
}

double phase_velocity_l2(const DispersionCurve& c) {
    const auto vp = phase_velocity(c);
    const size_t n = vp.size();
    double num = 0, den = 0;
    for (size_t m = 0; m < n; ++m) {
        const double w = (m == 0 || m == n - 1) ? 1.0 : (m % 2 ? 4.0 : 2.0);
        num += w * (vp[m] - 1.0) * (vp[m] - 1.0);
        den += w;
    }
    return std::sqrt(num / den);
}

double envelope_at(const DispersionCurve& c, double kk) {
    if (kk <= 0 || kk > kPi + 1e-15) throw std::invalid_argument("envelope_at: k must lie in (0, pi]");
    double env = rel_error(c, kk);
    for (size_t m = 1; m < c.k.size() && c.k[m] <= kk; ++m) env = std::max(env, std::abs(c.k[m] - c.omega[m]) / c.k[m]);
    return env;
}

double refinement_factor(const DispersionCurve& c, double kk, double delta) {
    if (delta <= 0) throw std::invalid_argument("refinement_factor: tolerance must be positive");
    if (kk <= 0 || kk > kPi + 1e-15) throw std::invalid_argument("refinement_factor: k must lie in (0, pi]");
    if (envelope_at(c, kk) <= delta) return 1.0;
    // running max of the relative error on the sample grid, for fast lookups
    std::vector<double> run(c.k.size(), 0.0);
    for (size_t m = 1; m < c.k.size(); ++m) run[m] = std::max(run[m - 1], std::abs(c.k[m] - c.omega[m]) / c.k[m]);
    auto env = [&](double x) {
        const auto idx = static_cast<size_t>(std::floor(x / (c.k[1] - c.k[0])));
        return std::max(rel_error(c, x), run[std::min(idx, run.size() - 1)]);
    };
    const double floor_h = c.k[1] / kk;
    if (env(floor_h * kk) > delta)
        throw std::domain_error("tolerance " + std::to_string(delta) +
                                " is below the scheme's error floor at the smallest resolved wavenumber");
    double lo = floor_h, hi = 1.0;
    while (hi - lo > 1e-4) {
        const double mid = (lo + hi) / 2;
        (env(mid * kk) <= delta ? lo : hi) = mid;
    }
    return lo;
}

InvarianceCheck epsilon_invariance_check(const DispersionCurve& c, double h) {
    if (h <= 0 || h > 1) throw std::invalid_argument("invariance check needs h in (0, 1]");
    InvarianceCheck out;
    const size_t n = c.k.size();
    for (size_t m = 1; m < n; ++m) {
        out.before = std::max(out.before, std::abs(c.k[m] - c.omega[m]) / c.k[m]);
        // refined curve (1/h) omega_N(h k') sampled at k' = k_m / h
        const double kr = c.k[m] / h;
        const double wr = c.omega_at(h * kr) / h;
        out.after = std::max(out.after, std::abs(kr - wr) / kr);
    }
    return out;
}

void write_dispersion_csv(std::ostream& os, const DispersionCurve& c, const ErrorReport& r) {
    const auto vp = phase_velocity(c);
    const auto old = os.precision(12);
    os << "# operator=" << c.name << " eps_inf=" << r.eps_inf << "\n";
    os << "k,omega_N,eps_rel,envelope,v_p\n";
    for (size_t m = 1; m < c.k.size(); ++m)
        os << c.k[m] << ',' << c.omega[m] << ',' << r.rel[m - 1] << ',' << r.envelope[m - 1] << ',' << vp[m] << '\n';
    os.precision(old);
}

}  // namespace drpsbp

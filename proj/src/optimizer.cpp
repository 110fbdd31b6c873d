#include "drpsbp/optimizer.hpp"

#include "drpsbp/dispersion.hpp"
#include "drpsbp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace drpsbp {

namespace {

constexpr double kPi = std::numbers::pi;

// Cosine coefficients rho_j = (2 - [j == 0]) / pi * int_0^pi f(k) cos(jk) dk, Simpson on 4096 panels.
template <class F> std::vector<double> project_cosines(F f, int terms) {
    const int panels = 4096;
    const double dk = kPi / panels;
    std::vector<double> out(static_cast<size_t>(terms), 0.0);
    for (int m = 0; m <= panels; ++m) {
        const double k = m * dk;
        const double w = (m == 0 || m == panels) ? 1.0 : (m % 2 ? 4.0 : 2.0);
        const double fk = f(k);
        for (int j = 0; j < terms; ++j) out[static_cast<size_t>(j)] += w * fk * std::cos(j * k);
    }
    for (int j = 0; j < terms; ++j) out[static_cast<size_t>(j)] *= dk / 3.0 * (j == 0 ? 1.0 : 2.0) / kPi;
    return out;
}

Eigen::VectorXd coefficients(const Eigen::VectorXd& gamma, const GramTensor& g) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(g.gram.size()));
    for (size_t l = 0; l < g.gram.size(); ++l) f(static_cast<Eigen::Index>(l)) = gamma.dot(g.gram[l] * gamma);
    return f;
}

Eigen::MatrixXd weight_root(const Eigen::MatrixXd& weight) {
    Eigen::LLT<Eigen::MatrixXd> llt(weight);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("weight matrix is not positive definite");
    return llt.matrixL();
}

// Orthonormal basis of {z : sum z = 0}.
Eigen::MatrixXd simplex_directions(Eigen::Index n) {
    return null_space(Eigen::MatrixXd::Ones(1, n));
}

StartLog levenberg_marquardt(std::string name, const Eigen::VectorXd& start, const GramTensor& g,
                             const Eigen::VectorXd& beta, const Eigen::MatrixXd& root, int max_iter) {
    const Eigen::Index n = start.size();
    const Eigen::MatrixXd dirs = simplex_directions(n);
    StartLog log;
    log.start = std::move(name);
    Eigen::VectorXd gamma = start / start.sum();
    auto residual = [&](const Eigen::VectorXd& gm) -> Eigen::VectorXd {
        return root.transpose() * (coefficients(gm, g) - beta);
    };
    Eigen::VectorXd r = residual(gamma);
    double value = r.squaredNorm();
    double mu = -1;
    if (n == 1) {
        log.gamma = gamma;
        log.value = value;
        log.converged = true;
        return log;
    }
    for (int it = 0; it < max_iter; ++it) {
        log.iterations = it + 1;
        Eigen::MatrixXd jf(beta.size(), n);
        for (size_t l = 0; l < g.gram.size(); ++l)
            jf.row(static_cast<Eigen::Index>(l)) = 2.0 * (g.gram[l] * gamma).transpose();
        const Eigen::MatrixXd j = root.transpose() * jf * dirs;
        const Eigen::MatrixXd jtj = j.transpose() * j;
        const Eigen::VectorXd grad = j.transpose() * r;
        if (grad.norm() <= 1e-15 * std::max(1.0, value)) {
            log.converged = true;
            break;
        }
        if (mu < 0) mu = 1e-3 * std::max(jtj.diagonal().maxCoeff(), 1e-12);
        bool accepted = false;
        for (int tries = 0; tries < 60 && !accepted; ++tries) {
            Eigen::MatrixXd sys = jtj;
            sys.diagonal().array() += mu;
            const Eigen::VectorXd step = sys.ldlt().solve(-grad);
            const Eigen::VectorXd trial = gamma + dirs * step;
            const Eigen::VectorXd rt = residual(trial);
            const double vt = rt.squaredNorm();
            if (std::isfinite(vt) && vt <= value) {
                const double change = (value - vt) / std::max(value, 1e-300);
                gamma = trial;
                r = rt;
                value = vt;
                mu = std::max(mu / 3.0, 1e-300);
                accepted = true;
                if (change < 1e-12) log.converged = true;
            } else {
                mu *= 4.0;
            }
        }
        if (!accepted) {
            // no descent along any damped step: stationary to working precision
            log.converged = true;
        }
        if (log.converged) break;
    }
    log.gamma = gamma;
    log.value = value;
    return log;
}

}  // namespace

WeightSpec WeightSpec::expquad(double c, int terms) {
    WeightSpec w;
    std::ostringstream label;
    label << "expquad:" << c;
    w.label = label.str();
    w.cos_coeffs = project_cosines([c](double k) { return std::exp(c * k * k); }, terms);
    return w;
}

WeightSpec WeightSpec::indicator(double kprime, int terms) {
    if (kprime <= 0 || kprime > kPi) throw std::invalid_argument("indicator cutoff must lie in (0, pi]");
    WeightSpec w;
    std::ostringstream label;
    label << "indicator:" << kprime;
    w.label = label.str();
    // exact projection of the step function
    w.cos_coeffs.assign(static_cast<size_t>(terms), 0.0);
    w.cos_coeffs[0] = kprime / kPi;
    for (int j = 1; j < terms; ++j) w.cos_coeffs[static_cast<size_t>(j)] = 2.0 * std::sin(j * kprime) / (j * kPi);
    return w;
}

WeightSpec WeightSpec::parse(const std::string& text, int terms) {
    if (text == "uniform") return uniform();
    if (text.rfind("expquad:", 0) == 0) return expquad(std::stod(text.substr(8)), terms);
    if (text.rfind("indicator:", 0) == 0) {
        const std::string arg = text.substr(10);
        return indicator(arg == "pi" ? kPi : std::stod(arg), terms);
    }
    WeightSpec w;
    w.label = text;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) w.cos_coeffs.push_back(std::stod(item));
    if (w.cos_coeffs.empty()) throw std::invalid_argument("empty weight");
    return w;
}

Family build_family(const FamilySpec& spec) {
    if (spec.a < 2 || spec.b > 9 || spec.a > spec.b)
        throw std::invalid_argument("family order range must satisfy 2 <= a <= b <= 9");
    Family fam;
    int lo = 0, hi = 0;
    for (int q = spec.a; q <= spec.b; ++q) {
        fam.basis.push_back(build_upwind_interior(q));
        if (!fam.basis.back().consistent())
            throw std::logic_error("upwind interior of order " + std::to_string(q) + " is inconsistent");
        lo = std::max(lo, fam.basis.back().left);
        hi = std::max(hi, fam.basis.back().right);
    }
    if (spec.j_max < 2 * std::max(lo, hi))
        throw std::invalid_argument("j_max " + std::to_string(spec.j_max) + " is below twice the stencil reach " +
                                    std::to_string(std::max(lo, hi)));
    const auto n = static_cast<Eigen::Index>(fam.basis.size());
    const int span = lo + hi;
    fam.gram.exact.assign(static_cast<size_t>(spec.j_max + 1), MatrixR::Zero(n, n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const auto& si = fam.basis[static_cast<size_t>(i)];
            const auto& sj = fam.basis[static_cast<size_t>(j)];
            // products omega_i conj(omega_j) and omega_j conj(omega_i) as sum_d P_d e^{idk}
            auto product = [&](const InteriorStencil& x, const InteriorStencil& y) {
                std::vector<Rational> pd(static_cast<size_t>(2 * span + 1), Rational(0));
                for (int l = -x.left; l <= x.right; ++l)
                    for (int m = -y.left; m <= y.right; ++m) pd[static_cast<size_t>(l - m + span)] += x[l] * y[m];
                return pd;
            };
            const auto pij = product(si, sj);
            const auto pji = product(sj, si);
            for (int d = 0; d <= span; ++d) {
                const auto up = static_cast<size_t>(span + d), dn = static_cast<size_t>(span - d);
                // the symmetrized product must be a pure cosine series
                const Rational sine = (pij[up] - pij[dn]) + (pji[up] - pji[dn]);
                if (!sine.is_zero())
                    throw std::logic_error("symmetrized product of bases " + std::to_string(i) + "," +
                                           std::to_string(j) + " has a sine term");
                const Rational plus = (pij[up] + pji[up]) / Rational(2);
                const Rational minus = (pij[dn] + pji[dn]) / Rational(2);
                const Rational c = d == 0 ? plus : plus + minus;
                if (d <= spec.j_max) {
                    fam.gram.exact[static_cast<size_t>(d)](i, j) = c;
                    fam.gram.exact[static_cast<size_t>(d)](j, i) = c;
                }
            }
        }
    for (const auto& m : fam.gram.exact) {
        Eigen::MatrixXd g(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) g(i, j) = m(i, j).to_double();
        fam.gram.gram.push_back(g);
    }
    return fam;
}

Eigen::VectorXd target_coeffs(int j_max) {
    Eigen::VectorXd b(j_max + 1);
    b(0) = kPi * kPi / 3.0;
    for (int l = 1; l <= j_max; ++l) b(l) = 4.0 * (l % 2 ? -1.0 : 1.0) / (double(l) * l);
    return b;
}

Eigen::MatrixXd weight_matrix(const WeightSpec& w, int j_max) {
    const int n = j_max + 1;
    Eigen::MatrixXd wm = Eigen::MatrixXd::Zero(n, n);
    if (w.cos_coeffs.empty()) return Eigen::MatrixXd::Identity(n, n);
    auto rho = [&](int j) { return j < static_cast<int>(w.cos_coeffs.size()) ? w.cos_coeffs[static_cast<size_t>(j)] : 0.0; };
    // (2/pi) int_0^pi rho cos(lk) cos(mk) dk with cos l cos m = (cos(l-m) + cos(l+m)) / 2
    auto inner = [&](int d) { return d == 0 ? 2.0 * rho(0) : rho(d); };
    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) wm(l, m) = 0.5 * (inner(std::abs(l - m)) + inner(l + m));
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
    scale(0) = 1.0 / std::sqrt(2.0);
    wm = scale.asDiagonal() * wm * scale.asDiagonal();
    if (sym_eig(wm).values.minCoeff() <= 0)
        throw std::invalid_argument("weight '" + w.label + "' projects to an indefinite inner product");
    return wm;
}

double objective(const Eigen::VectorXd& gamma, const GramTensor& g, const Eigen::VectorXd& beta,
                 const Eigen::MatrixXd& weight) {
    const Eigen::VectorXd e = coefficients(gamma, g) - beta;
    return e.dot(weight * e);
}

RelaxationSeed solve_relaxation(const GramTensor& g, const Eigen::VectorXd& beta, const Eigen::MatrixXd& weight) {
    const Eigen::Index n = g.size();
    if (n == 1) {
        // the simplex is a single point
        RelaxationSeed seed;
        seed.gamma = Eigen::VectorXd::Ones(1);
        seed.relaxed_objective = objective(seed.gamma, g, beta, weight);
        return seed;
    }
    const Eigen::Index vars = n * (n + 1) / 2;
    // columns: upper-triangular entries of the free symmetric matrix P
    Eigen::MatrixXd f(beta.size(), vars);
    Eigen::VectorXd a(vars);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j, ++col) {
            const double mult = i == j ? 1.0 : 2.0;
            for (size_t l = 0; l < g.gram.size(); ++l) f(static_cast<Eigen::Index>(l), col) = mult * g.gram[l](i, j);
            a(col) = mult;
        }
    const Eigen::MatrixXd root = weight_root(weight);
    const Eigen::VectorXd p0 = a / a.squaredNorm();
    const Eigen::MatrixXd z = null_space(a.transpose());
    const Eigen::MatrixXd lhs = root.transpose() * f * z;
    const Eigen::VectorXd rhs = root.transpose() * (beta - f * p0);
    const Eigen::VectorXd y = lhs.completeOrthogonalDecomposition().solve(rhs);
    const Eigen::VectorXd p = p0 + z * y;

    Eigen::MatrixXd pm(n, n);
    col = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j, ++col) pm(i, j) = pm(j, i) = p(col);

    RelaxationSeed seed;
    const Eigen::VectorXd e = f * p - beta;
    seed.relaxed_objective = e.dot(weight * e);
    const auto eig = sym_eig(pm);
    const Eigen::VectorXd v = eig.vectors.col(n - 1);
    if (eig.values(n - 1) <= 0 || std::abs(v.sum()) < 1e-12) {
        seed.gamma = Eigen::VectorXd::Constant(n, 1.0 / double(n));
        seed.fallback = true;
    } else {
        seed.gamma = v / v.sum();
    }
    return seed;
}

GammaSolution minimize_gamma(const GramTensor& g, const Eigen::VectorXd& beta, const Eigen::MatrixXd& weight,
                             int max_iter) {
    const Eigen::Index n = g.size();
    const Eigen::MatrixXd root = weight_root(weight);
    GammaSolution sol;
    const RelaxationSeed seed = solve_relaxation(g, beta, weight);
    sol.relaxation_fallback = seed.fallback;
    sol.starts.push_back(levenberg_marquardt("relaxation", seed.gamma, g, beta, root, max_iter));
    for (Eigen::Index i = 0; i < n; ++i)
        sol.starts.push_back(levenberg_marquardt("vertex" + std::to_string(i), Eigen::VectorXd::Unit(n, i), g, beta,
                                                 root, max_iter));
    sol.starts.push_back(
        levenberg_marquardt("uniform", Eigen::VectorXd::Constant(n, 1.0 / double(n)), g, beta, root, max_iter));
    bool any = false;
    for (const auto& s : sol.starts) {
        if (!std::isfinite(s.value)) continue;
        if (!any || s.value < sol.value) {
            sol.value = s.value;
            sol.gamma = s.gamma;
            any = true;
        }
    }
    if (!any) {
        std::ostringstream msg;
        msg << "every optimizer start diverged:";
        for (const auto& s : sol.starts) msg << " " << s.start << "(" << s.iterations << " it)";
        throw std::runtime_error(msg.str());
    }
    return sol;
}

Rational rationalize(double x, long long max_den) {
    if (!std::isfinite(x)) throw std::domain_error("cannot rationalize a non-finite value");
    // convergents h/k of the continued fraction of x
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(r);
        if (std::abs(a) > 1e15) break;
        const auto ai = static_cast<long long>(a);
        const long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        const double frac = r - a;
        if (frac < 1e-15) break;
        r = 1.0 / frac;
    }
    if (k1 == 0) return Rational::from_double(x);
    return Rational(BigInt(h1), BigInt(k1));
}

OptimizerResult optimize(const FamilySpec& spec) {
    const Family fam = build_family(spec);
    const Eigen::VectorXd beta = target_coeffs(spec.j_max);
    const Eigen::MatrixXd weight = weight_matrix(spec.weight, spec.j_max);
    const GammaSolution sol = minimize_gamma(fam.gram, beta, weight);

    OptimizerResult res;
    res.gamma = sol.gamma;
    res.value = sol.value;
    res.starts = sol.starts;
    res.relaxation_fallback = sol.relaxation_fallback;

    const auto n = static_cast<size_t>(sol.gamma.size());
    std::vector<Rational> gr(n);
    Rational sum(0);
    for (size_t i = 0; i + 1 < n; ++i) {
        gr[i] = rationalize(sol.gamma(static_cast<Eigen::Index>(i)), 1000000);
        sum += gr[i];
    }
    gr[n - 1] = Rational(1) - sum;
    Eigen::VectorXd gd(static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i) gd(static_cast<Eigen::Index>(i)) = gr[i].to_double();
    const double vr = objective(gd, fam.gram, beta, weight);
    if (std::abs(vr - sol.value) <= 1e-9 + 1e-6 * sol.value) {
        res.gamma_exact = gr;
    } else {
        res.floating = true;
        Rational s(0);
        for (size_t i = 0; i + 1 < n; ++i) {
            gr[i] = Rational::from_double(sol.gamma(static_cast<Eigen::Index>(i)));
            s += gr[i];
        }
        gr[n - 1] = Rational(1) - s;
    }

    int lo = 0, hi = 0;
    for (const auto& b : fam.basis) {
        lo = std::max(lo, b.left);
        hi = std::max(hi, b.right);
    }
    std::vector<Rational> coeffs(static_cast<size_t>(lo + hi + 1), Rational(0));
    for (size_t i = 0; i < n; ++i)
        for (int l = -fam.basis[i].left; l <= fam.basis[i].right; ++l)
            coeffs[static_cast<size_t>(l + lo)] += gr[i] * fam.basis[i][l];
    while (coeffs.size() > 1 && coeffs.back().is_zero() && hi > 0) {
        coeffs.pop_back();
        --hi;
    }
    res.stencil = InteriorStencil(-lo, coeffs, 0);
    res.stencil.declared_order = std::max(res.stencil.exact_order(), 1);

    const auto curve = dispersion_upwind(res.stencil);
    res.eps_inf = error_report(curve).eps_inf;
    res.pi_error = std::abs(kPi - curve.omega_at(kPi)) / kPi;
    return res;
}

}  // namespace drpsbp

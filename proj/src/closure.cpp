#include "drpsbp/closure.hpp"

#include "drpsbp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace drpsbp {

namespace {

// Factorized theta-update for one penalty value. The h floor is handled as a
// least-distance problem in the Cholesky-scaled coordinates of the reduced QP.
struct ThetaSolver {
    Eigen::VectorXd particular;
    Eigen::MatrixXd nullspace;
    Eigen::MatrixXd G;
    Eigen::LLT<Eigen::MatrixXd> reduced;
    Eigen::MatrixXd floor_rows;  // h rows of the nullspace times L^-T
};

ThetaSolver factor(const ClosureProblem& p, const Eigen::MatrixXd& hc, double t) {
    const int s = p.s;
    ThetaSolver f;
    if (p.A1.rows() > 0) {
        f.particular = p.A1.completeOrthogonalDecomposition().solve(p.b1);
        f.nullspace = null_space(p.A1);
    } else {
        f.particular = Eigen::VectorXd::Zero(p.parameter_count());
        f.nullspace = Eigen::MatrixXd::Identity(p.parameter_count(), p.parameter_count());
    }
    if (f.nullspace.cols() == 0) throw std::runtime_error("closure parameters are fully determined by the constraints");
    f.G = (2.0 / t) * hc + 2.0 * p.L.transpose() * p.L;
    f.reduced.compute(f.nullspace.transpose() * f.G * f.nullspace);
    if (f.reduced.info() != Eigen::Success) throw std::runtime_error("theta subproblem is not positive definite");
    const Eigen::MatrixXd e = f.nullspace.bottomRows(s);
    f.floor_rows = f.reduced.matrixU().transpose().solve(e.transpose()).transpose();
    return f;
}

Eigen::MatrixXd as_matrix(const Eigen::VectorXd& v, Eigen::Index n) {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(v.data(), n, n);
}

Eigen::VectorXd as_vector(const Eigen::MatrixXd& m) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = m;
    return Eigen::Map<const Eigen::VectorXd>(r.data(), r.size());
}

}  // namespace

Eigen::MatrixXd ClosureProblem::symmetric_part(const Eigen::VectorXd& theta) const {
    return S0 + as_matrix(L * theta, working_n);
}

int default_block_size(const InteriorStencil& interior) {
    const int q = interior.declared_order;
    const int by_order = q <= 4 ? 4 : q == 5 ? 6 : 8;
    return std::max(by_order, std::max(interior.left, interior.right));
}

int default_boundary_order(const InteriorStencil& interior) {
    return std::min(interior.declared_order, interior.exact_order()) / 2;
}

ClosureProblem build_problem(const InteriorStencil& interior, int s, int boundary_order, const ClosureHyperparams& hp) {
    const int r1 = interior.left, r2 = interior.right;
    if (s < std::max(r1, r2))
        throw std::invalid_argument("block size " + std::to_string(s) + " is smaller than the stencil reach " +
                                    std::to_string(std::max(r1, r2)));
    if (boundary_order < 0) throw std::invalid_argument("boundary order must be nonnegative");
    if (hp.eps1 < 0 || hp.eps2 <= 0 || hp.t <= 0 || hp.ridge < 0 || hp.tol <= 0 || hp.max_iter <= 0)
        throw std::invalid_argument("closure hyperparameters need eps1 >= 0, eps2 > 0, t > 0, ridge >= 0, tol > 0");
    if (s > 30) throw std::invalid_argument("block size above 30 is not supported");

    ClosureProblem p;
    p.interior = interior;
    p.s = s;
    p.boundary_order = boundary_order;
    p.hp = hp;
    p.working_n = 2 * s + r1 + r2 + 1;
    const int np = p.parameter_count();
    const int nw = p.working_n;
    auto alpha = [&](int l) { return interior.at(l); };
    auto x = [&](int j) { return double(j) - (s - 1) / 2.0; };

    // Rows i < s of D+ and D-: sum_j Q_ij x_j^m = h_i m x_i^(m-1), jointly linear in (q, h).
    std::vector<Eigen::VectorXd> arows, crows;
    std::vector<double> brhs, crhs;
    const int last = s + std::max(r1, r2);
    for (int m = 0; m <= boundary_order + 1; ++m)
        for (int i = 0; i < s; ++i)
            for (int sign : {+1, -1}) {
                Eigen::VectorXd row = Eigen::VectorXd::Zero(np);
                double rhs = 0;
                for (int j = 0; j <= last; ++j) {
                    const double xm = std::pow(x(j), m);
                    if (j < s) {
                        if (sign > 0) row(i * s + j) += xm;
                        else row(j * s + i) -= xm;
                    } else {
                        rhs -= (sign > 0 ? alpha(j - i) : -alpha(i - j)) * xm;
                    }
                }
                if (i == 0) rhs += 0.5 * std::pow(x(0), m);  // -B/2 in the first row of both
                if (m > 0) row(s * s + i) -= m * std::pow(x(i), m - 1);
                if (m <= boundary_order) {
                    arows.push_back(row);
                    brhs.push_back(rhs);
                } else {
                    const double nrm = row.norm();
                    crows.push_back(row / nrm);
                    crhs.push_back(rhs / nrm);
                }
            }
    p.A1.resize(static_cast<Eigen::Index>(arows.size()), np);
    p.b1.resize(static_cast<Eigen::Index>(arows.size()));
    for (size_t k = 0; k < arows.size(); ++k) {
        p.A1.row(static_cast<Eigen::Index>(k)) = arows[k].transpose();
        p.b1(static_cast<Eigen::Index>(k)) = brhs[k];
    }
    p.C.resize(static_cast<Eigen::Index>(crows.size()), np);
    p.c.resize(static_cast<Eigen::Index>(crows.size()));
    for (size_t k = 0; k < crows.size(); ++k) {
        p.C.row(static_cast<Eigen::Index>(k)) = crows[k].transpose();
        p.c(static_cast<Eigen::Index>(k)) = crhs[k];
    }

    auto in_block = [&](int i, int j) { return (i < s && j < s) || (i >= nw - s && j >= nw - s); };
    p.S0 = Eigen::MatrixXd::Zero(nw, nw);
    for (int i = 0; i < nw; ++i)
        for (int j = 0; j < nw; ++j)
            if (!in_block(i, j)) p.S0(i, j) = 0.5 * (alpha(j - i) + alpha(i - j));
    p.L = Eigen::MatrixXd::Zero(nw * nw, np);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) {
            const int ii = nw - 1 - i, jj = nw - 1 - j;
            p.L(i * nw + j, i * s + j) += 0.5;
            p.L(i * nw + j, j * s + i) += 0.5;
            p.L(ii * nw + jj, i * s + j) += 0.5;
            p.L(ii * nw + jj, j * s + i) += 0.5;
        }
    p.q_band = Eigen::VectorXd::Zero(np);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) p.q_band(i * s + j) = alpha(j - i);
    return p;
}

AdmmResult admm_solve(const ClosureProblem& p, const std::optional<Eigen::VectorXd>& theta0) {
    const int s = p.s, np = p.parameter_count(), nw = p.working_n;
    const auto& hp = p.hp;

    // consistency of A1 theta = b1
    if (p.A1.rows() > 0) {
        const Eigen::VectorXd th = p.A1.completeOrthogonalDecomposition().solve(p.b1);
        const double res = (p.A1 * th - p.b1).cwiseAbs().maxCoeff();
        if (res > 1e-9 * std::max(1.0, p.b1.cwiseAbs().maxCoeff())) {
            std::ostringstream msg;
            msg << "infeasible accuracy system: boundary order " << p.boundary_order << " with block size " << s
                << " leaves residual " << res;
            throw std::invalid_argument(msg.str());
        }
    }

    Eigen::MatrixXd hc = hp.truncation_weight * p.C.transpose() * p.C;
    hc.diagonal().array() += hp.ridge;
    hc(s * s, s * s) += hp.h_target_weight;
    for (int k = 0; k < s * s; ++k) hc(k, k) += hp.band_weight;
    Eigen::VectorXd gc = hp.truncation_weight * p.C.transpose() * p.c + hp.band_weight * p.q_band;
    gc.tail(s).setZero();
    gc(s * s) += hp.h_target_weight * hp.h_target;

    // Every accurate closure has S x^m = 0 for m <= boundary order, so the NSD cone is
    // restricted to the orthogonal complement of those monomials.
    const int p1 = std::min(p.boundary_order + 1, nw);
    Eigen::MatrixXd mono(nw, p1);
    for (int i = 0; i < nw; ++i)
        for (int m = 0; m < p1; ++m) mono(i, m) = std::pow((i - (nw - 1) / 2.0) / (nw / 2.0), m);
    const Eigen::MatrixXd qfull = mono.householderQr().householderQ();
    const Eigen::MatrixXd W = qfull.rightCols(nw - p1);
    auto project_c = [&](const Eigen::MatrixXd& m) -> Eigen::MatrixXd {
        const Eigen::MatrixXd red = W.transpose() * m * W;
        return W * project_nsd(Eigen::MatrixXd((red + red.transpose()) / 2.0), hp.eps1) * W.transpose();
    };
    auto project_b = [&](Eigen::MatrixXd m) {
        for (int i = 0; i < nw; ++i)
            for (int j = 0; j < nw; ++j)
                if (!((i < s && j < s) || (i >= nw - s && j >= nw - s))) m(i, j) = p.S0(i, j);
        for (const auto& [ij, v] : p.known) {
            const auto [i, j] = ij;
            m(i, j) = m(j, i) = v;
            m(nw - 1 - i, nw - 1 - j) = m(nw - 1 - j, nw - 1 - i) = v;
        }
        return m;
    };

    std::map<double, ThetaSolver> cache;
    auto theta_update = [&](const Eigen::VectorXd& rhs, double t) -> Eigen::VectorXd {
        auto it = cache.find(t);
        if (it == cache.end()) it = cache.emplace(t, factor(p, hc, t)).first;
        const ThetaSolver& f = it->second;
        const Eigen::VectorXd y0 = f.reduced.solve(f.nullspace.transpose() * (rhs - f.G * f.particular));
        const Eigen::VectorXd d = (hp.eps2 - (f.particular + f.nullspace * y0).tail(s).array()).matrix();
        const auto z = least_distance(f.floor_rows, d);
        if (!z) throw std::invalid_argument("no closure satisfies the accuracy rows with every h_i >= eps2");
        return f.particular + f.nullspace * (y0 + f.reduced.matrixU().solve(*z));
    };

    AdmmResult res;
    Eigen::VectorXd theta = theta0 ? *theta0 : Eigen::VectorXd::Zero(np);
    if (theta.size() != np) throw std::invalid_argument("initial theta has the wrong length");
    Eigen::MatrixXd l1 = Eigen::MatrixXd::Zero(nw, nw), l2 = l1;
    double t = hp.t;
    Eigen::VectorXd best = theta;
    double best_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < hp.max_iter; ++it) {
        const Eigen::MatrixXd sth = p.symmetric_part(theta);
        const Eigen::MatrixXd th2 = project_c(sth - l1 / t);
        const Eigen::MatrixXd th1 = project_b(sth - l2 / t);
        const Eigen::VectorXd rhs =
            (2.0 / t) * gc + p.L.transpose() * (as_vector(th2 + l1 / t - p.S0) + as_vector(th1 + l2 / t - p.S0));
        const Eigen::VectorXd thn = theta_update(rhs, t);
        const Eigen::MatrixXd sn = p.symmetric_part(thn);
        l1 -= t * (sn - th2);
        l2 -= t * (sn - th1);
        const double primal = std::max((sn - th2).cwiseAbs().maxCoeff(), (sn - th1).cwiseAbs().maxCoeff());
        const double dual = t * (sn - sth).cwiseAbs().maxCoeff();

        AdmmRecord rec;
        rec.iter = it;
        rec.primal = primal;
        rec.dual = dual;
        rec.t = t;
        rec.lambda_max = max_eigenvalue(sn);
        rec.accuracy = p.A1.rows() ? (p.A1 * thn - p.b1).cwiseAbs().maxCoeff() : 0.0;
        res.history.push_back(rec);
        res.iterations = it + 1;
        res.primal = primal;
        res.dual = dual;

        theta = thn;
        if (std::max(primal, dual) < best_res) {
            best_res = std::max(primal, dual);
            best = thn;
        }
        if (!std::isfinite(primal) || !std::isfinite(dual)) break;
        if (std::max(primal, dual) <= hp.tol) {
            res.converged = true;
            break;
        }
        if (hp.balance_penalty && it % 10 == 0) {
            if (primal > 10 * dual && t * 2 <= 1e6) t *= 2;
            else if (dual > 10 * primal && t / 2 >= 1e-6) t /= 2;
        }
    }
    res.theta = res.converged ? theta : best;

    for (size_t k = 50; k < res.history.size(); ++k) {
        const auto& a = res.history[k - 50];
        const auto& b = res.history[k];
        if (std::max(b.primal, b.dual) >= std::max(a.primal, a.dual)) {
            res.monotone = false;
            break;
        }
    }

    res.closure.q.resize(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) res.closure.q(i, j) = Rational::from_double(res.theta(i * s + j));
    for (int i = 0; i < s; ++i) res.closure.h.push_back(Rational::from_double(res.theta(s * s + i)));
    res.closure.rounded = false;
    return res;
}

DualPairOperator close_operator(const DualPairOperator& op, const ClosureProblem& problem, AdmmResult* report) {
    AdmmResult r = admm_solve(problem);
    DualPairOperator out = op;
    out.interior = problem.interior;
    r.closure.validate();
    out.closure = r.closure;
    if (report) *report = std::move(r);
    return out;
}

DualPairOperator close_operator(const DualPairOperator& op, AdmmResult* report) {
    const auto problem =
        build_problem(op.interior, default_block_size(op.interior), default_boundary_order(op.interior));
    return close_operator(op, problem, report);
}

void write_history_csv(std::ostream& os, const AdmmResult& r) {
    const auto old = os.precision(12);
    os << "iter,primal,dual,lambda_max,accuracy_residual\n";
    for (const auto& h : r.history)
        os << h.iter << ',' << h.primal << ',' << h.dual << ',' << h.lambda_max << ',' << h.accuracy << '\n';
    os.precision(old);
}

}  // namespace drpsbp

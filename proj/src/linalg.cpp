#include "drpsbp/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <vector>

namespace drpsbp {

Eigen::VectorXd lsq_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double ridge) {
    if (ridge < 0) throw std::invalid_argument("lsq_solve: ridge weight must be nonnegative");
    if (a.rows() != b.size()) throw std::invalid_argument("lsq_solve: row count mismatch");
    const Eigen::Index n = a.cols();
    if (ridge == 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        qr.setThreshold(1e-12);
        if (qr.rank() < n) {
            std::ostringstream msg;
            msg << "lsq_solve: rank-deficient system (rank " << qr.rank() << " < " << n
                << " columns) with zero ridge";
            throw std::invalid_argument(msg.str());
        }
        return qr.solve(b);
    }
    Eigen::MatrixXd normal = a.transpose() * a;
    normal.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(normal);
    Eigen::VectorXd x = llt.solve(a.transpose() * b);
    // one refinement step on the normal equations
    Eigen::VectorXd r = a.transpose() * b - normal * x;
    x += llt.solve(r);
    return x;
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol) {
    const Eigen::Index n = a.cols();
    if (a.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = rel_tol * (sv.size() ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter) {
    const Eigen::Index n = a.cols();
    if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 10);
    const double tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()) * std::max<Eigen::Index>(n, 1);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<size_t>(n), false);
    auto solve_passive = [&]() {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < n; ++j)
            if (passive[j]) idx.push_back(j);
        Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
        for (size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
        const Eigen::VectorXd zp = ap.completeOrthogonalDecomposition().solve(b);
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
        for (size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(static_cast<Eigen::Index>(k));
        return z;
    };
    for (int outer = 0; outer < max_iter; ++outer) {
        const Eigen::VectorXd w = a.transpose() * (b - a * x);
        Eigen::Index best = -1;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!passive[j] && w(j) > tol && (best < 0 || w(j) > w(best))) best = j;
        if (best < 0) break;
        passive[best] = true;
        for (int inner = 0; inner < max_iter; ++inner) {
            const Eigen::VectorXd z = solve_passive();
            double alpha = 1.0;
            bool clipped = false;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[j] && z(j) <= 0) {
                    alpha = std::min(alpha, x(j) / (x(j) - z(j)));
                    clipped = true;
                }
            if (!clipped) {
                x = z;
                break;
            }
            x += alpha * (z - x);
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[j] && x(j) <= tol) {
                    passive[j] = false;
                    x(j) = 0;
                }
        }
    }
    return x;
}

std::optional<Eigen::VectorXd> least_distance(const Eigen::MatrixXd& g, const Eigen::VectorXd& d) {
    const Eigen::Index m = g.rows(), n = g.cols();
    if ((d.array() <= 0).all()) return Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd e(n + 1, m);
    e.topRows(n) = g.transpose();
    e.row(n) = d.transpose();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n + 1);
    f(n) = 1.0;
    const Eigen::VectorXd u = nnls(e, f);
    const Eigen::VectorXd r = e * u - f;
    if (r.norm() < 1e-12 || r(n) >= -1e-14) return std::nullopt;
    return Eigen::VectorXd(-r.head(n) / r(n));
}

}  // namespace drpsbp

#pragma once

#include <Eigen/Dense>

#include <optional>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace drpsbp {

template <class Scalar> struct EigenDecomposition {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;               // ascending
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // column k pairs with values(k)
};

template <class Derived>
typename Derived::Scalar max_asymmetry(const Eigen::MatrixBase<Derived>& a) {
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

// Cyclic Jacobi rotations. Rejects non-square input and input whose asymmetry
// exceeds 1e-12 relative to its largest entry.
template <class Derived>
EigenDecomposition<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& input) {
    using Scalar = typename Derived::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (input.rows() != input.cols()) {
        std::ostringstream msg;
        msg << "sym_eig: matrix is " << input.rows() << "x" << input.cols() << ", not square";
        throw std::invalid_argument(msg.str());
    }
    const Eigen::Index n = input.rows();
    EigenDecomposition<Scalar> out;
    if (n == 0) return out;
    const Scalar scale = input.cwiseAbs().maxCoeff();
    const Scalar asym = max_asymmetry(input);
    if (asym > Scalar(1e-12) * std::max(scale, Scalar(1))) {
        std::ostringstream msg;
        msg << "sym_eig: asymmetry " << asym << " exceeds tolerance";
        throw std::invalid_argument(msg.str());
    }

    Mat a = (input + input.transpose()) / Scalar(2);
    Mat v = Mat::Identity(n, n);
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    for (int sweep = 0; sweep < 100; ++sweep) {
        Scalar off = 0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off <= eps * eps * a.squaredNorm() || off == Scalar(0)) break;

        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Scalar apq = a(p, q);
                if (apq == Scalar(0)) continue;
                const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
                const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                                 (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
                const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
                const Scalar s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = Scalar(0);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = a(order[k], order[k]);
        out.vectors.col(k) = v.col(order[k]);
    }
    return out;
}

template <class Derived> typename Derived::Scalar max_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
    return sym_eig(a).values.maxCoeff();
}

// Frobenius-nearest symmetric matrix with every eigenvalue <= -margin.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
project_nsd(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar margin = 0) {
    auto eig = sym_eig(m);
    auto clipped = eig.values.cwiseMin(-margin);
    return eig.vectors * clipped.asDiagonal() * eig.vectors.transpose();
}

// argmin |Ax - b|^2 + ridge |x|^2. ridge = 0 requires full column rank.
Eigen::VectorXd lsq_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double ridge);

// Orthonormal basis of ker(A); columns span the null space.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol = 1e-10);

// Lawson-Hanson: argmin |Ax - b| subject to x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter = 0);

// Least-distance problem argmin |z| subject to G z >= d, via nnls. Empty optional when infeasible.
std::optional<Eigen::VectorXd> least_distance(const Eigen::MatrixXd& g, const Eigen::VectorXd& d);

}  // namespace drpsbp

#include "drpsbp/operator.hpp"

#include "drpsbp/linalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace drpsbp {

using nlohmann::json;

void BoundaryClosure::validate() const {
    if (q.rows() == 0) throw std::invalid_argument("closure block is empty");
    if (q.cols() < q.rows())
        throw std::invalid_argument("closure block must have at least as many columns as rows");
    if (static_cast<Eigen::Index>(h.size()) != q.rows())
        throw std::invalid_argument("closure has " + std::to_string(h.size()) + " weights for block size " +
                                    std::to_string(q.rows()));
    for (const auto& w : h)
        if (w.sign() <= 0) throw std::invalid_argument("closure weight " + w.str() + " is not positive");
}

int DualPairOperator::minimum_n() const {
    // boundary rows keep their full band without reaching the opposite block
    const int s = closure ? static_cast<int>(closure->q.cols()) : 0;
    return 2 * s + std::max(interior.left, interior.right);
}

template <class T> Matrix<T> assemble_qbar(const DualPairOperator& op, int n) {
    if (!op.closure) throw std::invalid_argument("operator '" + op.name + "' has no boundary closure");
    if (n < op.minimum_n())
        throw std::invalid_argument("grid size " + std::to_string(n) + " is below the minimum " +
                                    std::to_string(op.minimum_n()) + " for operator '" + op.name + "'");
    const auto& st = op.interior;
    Matrix<T> qb = Matrix<T>::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int l = -st.left; l <= st.right; ++l)
            if (int j = i + l; j >= 0 && j < n) qb(i, j) = scalar_cast<T>(st[l]);
    const MatrixR& q = op.closure->q;
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            const T v = scalar_cast<T>(q(i, j));
            qb(i, j) = v;
            qb(n - 1 - j, n - 1 - i) = v;
        }
    return qb;
}

template <class T> Assembly<T> assemble(const DualPairOperator& op, int n, const T& length) {
    Assembly<T> a;
    a.Qbar = assemble_qbar<T>(op, n);
    a.h = length / T(n - 1);
    const auto& hw = op.closure->h;
    const int s = op.closure->s();
    a.hdiag = Vector<T>::Constant(n, a.h);
    for (int i = 0; i < s; ++i) {
        a.hdiag(i) = a.h * scalar_cast<T>(hw[static_cast<size_t>(i)]);
        a.hdiag(n - 1 - i) = a.hdiag(i);
    }
    a.B = Matrix<T>::Zero(n, n);
    a.B(0, 0) = T(-1);
    a.B(n - 1, n - 1) = T(1);
    a.Qp = a.Qbar + a.B / T(2);
    a.Qm = a.B - a.Qp.transpose();
    a.Dp = a.Qp;
    a.Dm = a.Qm;
    for (int i = 0; i < n; ++i) {
        a.Dp.row(i) /= a.hdiag(i);
        a.Dm.row(i) /= a.hdiag(i);
    }
    return a;
}

template Assembly<double> assemble<double>(const DualPairOperator&, int, const double&);
template Assembly<Rational> assemble<Rational>(const DualPairOperator&, int, const Rational&);
template Matrix<double> assemble_qbar<double>(const DualPairOperator&, int);
template Matrix<Rational> assemble_qbar<Rational>(const DualPairOperator&, int);

double verify_sbp(const DualPairOperator& op, int n) {
    const auto a = assemble<double>(op, n);
    const Eigen::MatrixXd hd = a.hdiag.asDiagonal() * a.Dp;
    const Eigen::MatrixXd hm = a.hdiag.asDiagonal() * a.Dm;
    return (hd.transpose() + hm - a.B).cwiseAbs().maxCoeff();
}

Rational verify_sbp_exact(const DualPairOperator& op, int n) {
    const auto a = assemble<Rational>(op, n);
    Rational worst(0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Rational r = a.hdiag(j) * a.Dp(j, i) + a.hdiag(i) * a.Dm(i, j) - a.B(i, j);
            worst = std::max(worst, abs(r));
        }
    return worst;
}

double verify_upwind(const DualPairOperator& op, int n) {
    const Eigen::MatrixXd qb = assemble_qbar<double>(op, n);
    return max_eigenvalue(Eigen::MatrixXd((qb + qb.transpose()) / 2.0));
}

namespace {

// Rows of Q (unit spacing) applied to (x - x_i)^m, compared with w_i * m * 0^(m-1).
// Returns the worst residual relative to the row's magnitude, exact zero when exact.
double row_defect(const MatrixR& Q, const std::vector<Rational>& w, int i, int m) {
    Rational res(0);
    double scale = 0;
    for (Eigen::Index j = 0; j < Q.cols(); ++j) {
        if (Q(i, j).is_zero()) continue;
        const Rational term = Q(i, j) * pow(Rational(static_cast<long long>(j - i)), m);
        res += term;
        scale += std::abs(term.to_double());
    }
    if (m == 1) {
        res -= w[static_cast<size_t>(i)];
        scale += std::abs(w[static_cast<size_t>(i)].to_double());
    }
    if (res.is_zero()) return 0.0;
    return std::abs(res.to_double()) / std::max(scale, 1e-300);
}

}  // namespace

AccuracyOrders verify_accuracy(const DualPairOperator& op, int n, double boundary_tol, int max_degree) {
    const MatrixR qb = assemble_qbar<Rational>(op, n);
    MatrixR qp = qb;
    qp(0, 0) -= Rational(1, 2);
    qp(n - 1, n - 1) += Rational(1, 2);
    MatrixR qm = -qp.transpose();
    qm(0, 0) -= Rational(1);
    qm(n - 1, n - 1) += Rational(1);

    const int s = static_cast<int>(op.closure->q.cols());
    std::vector<Rational> w(static_cast<size_t>(n), Rational(1));
    for (int i = 0; i < op.closure->s(); ++i)
        w[static_cast<size_t>(i)] = w[static_cast<size_t>(n - 1 - i)] = op.closure->h[static_cast<size_t>(i)];

    auto order_of = [&](bool boundary) {
        for (int m = 0; m <= max_degree; ++m) {
            for (int i = 0; i < n; ++i) {
                const bool is_boundary = i < s || i >= n - s;
                if (is_boundary != boundary) continue;
                const double tol = boundary ? boundary_tol : 0.0;
                if (row_defect(qp, w, i, m) > tol || row_defect(qm, w, i, m) > tol) return m - 1;
            }
        }
        return max_degree;
    };
    return {order_of(false), order_of(true)};
}

std::vector<double> rowsum_budget(const DualPairOperator& op, int n) {
    std::vector<double> budget(static_cast<size_t>(n), 0.0);
    if (!op.closure || !op.closure->rounded) return budget;
    auto half_ulp = [](const Rational& r) {
        if (!r.is_decimal()) return 0.0;
        const std::string d = r.decimal_str();
        const auto dot = d.find('.');
        const int digits = dot == std::string::npos ? 0 : static_cast<int>(d.size() - dot - 1);
        return 0.5 * std::pow(10.0, -digits);
    };
    const MatrixR& q = op.closure->q;
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            const double u = half_ulp(q(i, j));
            budget[static_cast<size_t>(i)] += u;          // top rows
            budget[static_cast<size_t>(n - 1 - j)] += u;  // mirrored rows carry column sums
        }
    return budget;
}

namespace {

std::string rational_text(const Rational& r, bool rounded) {
    if (rounded && r.is_decimal()) return r.decimal_str();
    return r.str();
}

bool looks_decimal(const std::string& s) { return s.find_first_of(".eE") != std::string::npos; }

Rational read_number(const json& v, bool& saw_decimal) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        saw_decimal = saw_decimal || looks_decimal(s);
        return Rational::parse(s);
    }
    if (v.is_number_integer()) return Rational(v.get<long long>());
    // bare JSON floats are read through their shortest decimal text
    saw_decimal = true;
    return Rational::parse(v.dump());
}

}  // namespace

std::string to_json(const DualPairOperator& op) {
    json j;
    j["name"] = op.name;
    j["order"] = op.declared_order;
    json offs = json::array(), coeffs = json::array();
    for (int l = -op.interior.left; l <= op.interior.right; ++l) {
        offs.push_back(l);
        coeffs.push_back(op.interior[l].str());
    }
    j["interior"] = {{"offsets", offs}, {"coeffs", coeffs}};
    if (op.closure) {
        const auto& c = *op.closure;
        json q = json::array();
        for (Eigen::Index r = 0; r < c.q.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index k = 0; k < c.q.cols(); ++k) row.push_back(rational_text(c.q(r, k), c.rounded));
            q.push_back(row);
        }
        json h = json::array();
        for (const auto& w : c.h) h.push_back(rational_text(w, c.rounded));
        j["closure"] = {{"s", c.s()}, {"q", q}, {"h", h}};
    } else {
        j["closure"] = nullptr;
    }
    j["minimum_n"] = op.minimum_n();
    return j.dump(2) + "\n";
}

DualPairOperator from_json(const std::string& text) {
    const json j = json::parse(text);
    DualPairOperator op;
    op.name = j.at("name").get<std::string>();
    op.declared_order = j.at("order").get<int>();
    const auto& in = j.at("interior");
    const auto offsets = in.at("offsets").get<std::vector<int>>();
    const auto& cj = in.at("coeffs");
    if (offsets.empty() || offsets.size() != cj.size())
        throw std::invalid_argument("interior offsets and coeffs must be non-empty and equal length");
    for (size_t k = 1; k < offsets.size(); ++k)
        if (offsets[k] != offsets[k - 1] + 1) throw std::invalid_argument("interior offsets must be consecutive");
    std::vector<Rational> coeffs;
    bool dummy = false;
    for (const auto& v : cj) coeffs.push_back(read_number(v, dummy));
    op.interior = InteriorStencil(offsets.front(), std::move(coeffs), op.declared_order);

    if (j.contains("closure") && !j.at("closure").is_null()) {
        const auto& c = j.at("closure");
        BoundaryClosure bc;
        bool dec = false;
        const auto& q = c.at("q");
        const auto rows = static_cast<Eigen::Index>(q.size());
        const auto cols = rows ? static_cast<Eigen::Index>(q.at(0).size()) : 0;
        bc.q.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (static_cast<Eigen::Index>(q.at(r).size()) != cols) throw std::invalid_argument("ragged closure block");
            for (Eigen::Index k = 0; k < cols; ++k) bc.q(r, k) = read_number(q.at(r).at(k), dec);
        }
        for (const auto& v : c.at("h")) bc.h.push_back(read_number(v, dec));
        bc.rounded = dec;
        if (c.contains("s") && c.at("s").get<int>() != bc.s())
            throw std::invalid_argument("closure field s disagrees with the block size");
        bc.validate();
        op.closure = std::move(bc);
    }
    if (j.contains("minimum_n") && j.at("minimum_n").get<int>() < op.minimum_n())
        throw std::invalid_argument("minimum_n " + std::to_string(j.at("minimum_n").get<int>()) +
                                    " is smaller than the non-overlap bound " + std::to_string(op.minimum_n()));
    return op;
}

DualPairOperator load_operator(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open operator file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void save_operator(const DualPairOperator& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write operator file '" + path + "'");
    out << to_json(op);
}

}  // namespace drpsbp

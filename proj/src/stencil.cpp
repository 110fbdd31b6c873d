#include "drpsbp/stencil.hpp"

#include <stdexcept>
#include <string>

namespace drpsbp {

namespace {

InteriorStencil from_strings(int first, std::initializer_list<const char*> values, int order) {
    std::vector<Rational> c;
    for (const char* v : values) c.push_back(Rational::parse(v));
    return InteriorStencil(first, std::move(c), order);
}

}  // namespace

InteriorStencil::InteriorStencil(int first_offset, std::vector<Rational> c, int order)
    : left(-first_offset), right(first_offset + static_cast<int>(c.size()) - 1), coeffs(std::move(c)),
      declared_order(order) {
    if (coeffs.empty()) throw std::invalid_argument("empty stencil");
    if (first_offset > 0 || right < 0)
        throw std::invalid_argument("stencil band must contain offset 0");
}

Rational InteriorStencil::operator[](int l) const {
    if (l < -left || l > right) return Rational(0);
    return coeffs[static_cast<size_t>(l + left)];
}

Rational InteriorStencil::moment(int m) const {
    Rational s(0);
    for (int l = -left; l <= right; ++l) s += (*this)[l] * pow(Rational(l), m);
    return s;
}

int InteriorStencil::exact_order() const {
    // D x^m at x = 0 must equal m * 0^(m-1): 1 for m = 1, else 0
    int m = 0;
    for (;; ++m) {
        const Rational want = (m == 1) ? Rational(1) : Rational(0);
        if (moment(m) != want) return m - 1;
        if (m > width() + 1) return m;  // polynomial identity cannot extend further
    }
}

InteriorStencil CentralStencil::as_interior() const {
    const int r = reach();
    std::vector<Rational> c(static_cast<size_t>(2 * r + 1));
    for (int j = 1; j <= r; ++j) {
        c[static_cast<size_t>(r + j)] = gamma[static_cast<size_t>(j - 1)];
        c[static_cast<size_t>(r - j)] = -gamma[static_cast<size_t>(j - 1)];
    }
    return InteriorStencil(-r, std::move(c), declared_order);
}

bool CentralStencil::consistent() const {
    Rational s(0);
    for (int j = 1; j <= reach(); ++j) s += Rational(2 * j) * gamma[static_cast<size_t>(j - 1)];
    return s == Rational(1);
}

InteriorStencil build_upwind_interior(int order, bool verbatim_table) {
    switch (order) {
        case 2: return from_strings(0, {"-3/2", "2", "-1/2"}, 2);
        case 3: return from_strings(-1, {"-1/3", "-1/2", "1", "-1/6"}, 3);
        case 4: return from_strings(-1, {"-1/4", "-5/6", "3/2", "-1/2", "1/12"}, 4);
        case 5: return from_strings(-2, {"1/20", "-1/2", "-1/3", "1", "-1/4", "1/30"}, 5);
        case 6: return from_strings(-2, {"1/30", "-2/5", "-7/12", "4/3", "-1/2", "2/15", "-1/60"}, 6);
        case 7:
            return from_strings(-3, {"-1/105", "1/10", "-3/5", "-1/4", "1", "-3/10", "1/15", "-1/140"}, 7);
        case 8:
            // the published table lists +1/28 at offset 4, which breaks both consistency sums
            return from_strings(-3,
                                {"-1/168", "1/14", "-1/2", "-9/20", "5/4", "-1/2", "1/6",
                                 verbatim_table ? "1/28" : "-1/28", "1/280"},
                                8);
        case 9:
            // published value at offset 3 is 20/21; 2/21 restores sum = 0 and sum l = 1
            return from_strings(-4,
                                {"1/504", "-1/42", "1/7", "-2/3", "-1/5", "1", "-1/3",
                                 verbatim_table ? "20/21" : "2/21", "-1/56", "1/630"},
                                9);
        default:
            throw std::invalid_argument("upwind interior order " + std::to_string(order) +
                                        " unsupported (2..9)");
    }
}

InteriorStencil build_drp_interior(int order) {
    switch (order) {
        case 4: return from_strings(-2, {"-5/48", "29/360", "-401/360", "7/5", "-187/720", "-1/360"}, 4);
        case 5:
            return from_strings(-3,
                                {"13/525", "-109/1050", "-17/175", "-127/140", "31/21", "-167/350",
                                 "47/525", "-11/2100"},
                                5);
        case 6:
            return from_strings(-4,
                                {"-1/168", "149/3150", "-199/1575", "-8/75", "-8/9", "67/45", "-37/75",
                                 "124/1575", "139/12600", "-1/210"},
                                6);
        case 7:
            return from_strings(-4,
                                {"-43/7056", "4859/117600", "-107/1225", "-841/4200", "-1111/1400",
                                 "119/80", "-617/1050", "5113/29400", "-587/19600", "737/352800"},
                                7);
        default:
            throw std::invalid_argument("DRP interior order " + std::to_string(order) +
                                        " unsupported (4..7)");
    }
}

CentralStencil build_central_interior(int order) {
    if (order < 2 || order % 2 != 0)
        throw std::invalid_argument("central interior order must be even and >= 2, got " +
                                    std::to_string(order));
    // exactness on odd monomials: sum_j 2 gamma_j j^(2i-1) = [i == 1], i = 1..r
    const int r = order / 2;
    MatrixR a(r, r);
    VectorR b = VectorR::Constant(r, Rational(0));
    b(0) = Rational(1);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) a(i, j) = Rational(2) * pow(Rational(j + 1), 2 * i + 1);
    VectorR g = solve_exact(a, b);
    CentralStencil out;
    out.declared_order = order;
    for (int j = 0; j < r; ++j) out.gamma.push_back(g(j));
    return out;
}

InteriorStencil minus_stencil(const InteriorStencil& plus) {
    std::vector<Rational> c;
    for (int l = -plus.right; l <= plus.left; ++l) c.push_back(-plus[-l]);
    return InteriorStencil(-plus.right, std::move(c), plus.declared_order);
}

VectorR solve_exact(MatrixR a, VectorR b) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_exact: shape mismatch");
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index piv = col;
        while (piv < n && a(piv, col).is_zero()) ++piv;
        if (piv == n) throw std::invalid_argument("solve_exact: singular system");
        if (piv != col) {
            a.row(piv).swap(a.row(col));
            std::swap(b(piv), b(col));
        }
        for (Eigen::Index r = col + 1; r < n; ++r) {
            if (a(r, col).is_zero()) continue;
            const Rational f = a(r, col) / a(col, col);
            for (Eigen::Index k = col; k < n; ++k) a(r, k) -= f * a(col, k);
            b(r) -= f * b(col);
        }
    }
    VectorR x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        Rational s = b(i);
        for (Eigen::Index k = i + 1; k < n; ++k) s -= a(i, k) * x(k);
        x(i) = s / a(i, i);
    }
    return x;
}

}  // namespace drpsbp

#pragma once

#include "drpsbp/rational.hpp"
#include "drpsbp/stencil.hpp"

#include <optional>
#include <string>
#include <vector>

namespace drpsbp {

// Top-left boundary block of Qbar_+ and its quadrature weights. q is s x c with c >= s;
// columns past s overwrite the interior band.
struct BoundaryClosure {
    MatrixR q;
    std::vector<Rational> h;
    // Entries are rounded decimals (e.g. tabulated to six digits) rather than exact values.
    bool rounded = false;

    int s() const { return static_cast<int>(q.rows()); }
    void validate() const;
};

struct DualPairOperator {
    std::string name;
    int declared_order = 0;
    InteriorStencil interior;
    std::optional<BoundaryClosure> closure;

    int block_size() const { return closure ? closure->s() : 0; }
    int minimum_n() const;
};

template <class T> struct Assembly {
    T h{};           // grid spacing
    Vector<T> hdiag;  // diagonal of H
    Matrix<T> Qbar;  // Q_+ - B/2
    Matrix<T> Qp, Qm, B, Dp, Dm;

    Matrix<T> H() const { return hdiag.asDiagonal(); }
    Matrix<T> S() const { return (Qbar + Qbar.transpose()) / T(2); }
};

// Dense assembly on n points spanning [0, length]. Requires a closure and n >= minimum_n().
template <class T> Assembly<T> assemble(const DualPairOperator& op, int n, const T& length = T(1));

// Assembled matrices without H scaling, spacing 1: Qbar_+ only.
template <class T> Matrix<T> assemble_qbar(const DualPairOperator& op, int n);

double verify_sbp(const DualPairOperator& op, int n);
Rational verify_sbp_exact(const DualPairOperator& op, int n);
double verify_upwind(const DualPairOperator& op, int n);

struct AccuracyOrders {
    int interior = -1;
    int boundary = -1;
};

// Largest degree m such that D+ and D- reproduce every polynomial of degree <= m,
// tested on interior rows exactly and on boundary rows (first and last s) to a
// relative tolerance. Monomials are centred on the row being tested.
AccuracyOrders verify_accuracy(const DualPairOperator& op, int n, double boundary_tol = 1e-4,
                               int max_degree = 12);

// Per-row bound on |Q_+ 1| implied by half a unit in the last printed digit of each
// closure entry; zero for exact data.
std::vector<double> rowsum_budget(const DualPairOperator& op, int n);

// JSON operator files.
std::string to_json(const DualPairOperator& op);
DualPairOperator from_json(const std::string& text);
DualPairOperator load_operator(const std::string& path);
void save_operator(const DualPairOperator& op, const std::string& path);

// Builtin names: drp4..drp7, up2..up9, central2..central8.
std::vector<std::string> builtin_names();
DualPairOperator builtin_operator(const std::string& name, bool verbatim_table = false);
// Builtin name or path to a JSON file.
DualPairOperator resolve_operator(const std::string& name_or_path);

extern template Assembly<double> assemble<double>(const DualPairOperator&, int, const double&);
extern template Assembly<Rational> assemble<Rational>(const DualPairOperator&, int, const Rational&);
extern template Matrix<double> assemble_qbar<double>(const DualPairOperator&, int);
extern template Matrix<Rational> assemble_qbar<Rational>(const DualPairOperator&, int);

}  // namespace drpsbp

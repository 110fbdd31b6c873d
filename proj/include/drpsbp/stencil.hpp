#pragma once

#include "drpsbp/rational.hpp"

#include <string>
#include <vector>

namespace drpsbp {

// One-row difference stencil: (D u)_i = sum_{l=-left}^{right} coeff(l) u_{i+l}, for h = 1.
struct InteriorStencil {
    int left = 0;   // reach to the left (r1 >= 0)
    int right = 0;  // reach to the right (r2 >= 0)
    std::vector<Rational> coeffs;  // coeffs[l + left]
    int declared_order = 0;

    InteriorStencil() = default;
    InteriorStencil(int first_offset, std::vector<Rational> c, int order);

    int first_offset() const { return -left; }
    int last_offset() const { return right; }
    int width() const { return left + right + 1; }
    // coefficient at offset l, zero outside the band
    Rational operator[](int l) const;
    double at(int l) const { return (*this)[l].to_double(); }

    // sum_l coeff(l) * l^m
    Rational moment(int m) const;
    bool consistent() const { return moment(0).is_zero() && moment(1) == Rational(1); }
    // Largest m such that monomials of degree <= m are differentiated exactly.
    int exact_order() const;

    friend bool operator==(const InteriorStencil&, const InteriorStencil&) = default;
};

// Antisymmetric stencil stored by its right half: gamma_j for j = 1..r, gamma_{-j} = -gamma_j.
struct CentralStencil {
    std::vector<Rational> gamma;
    int declared_order = 0;

    int reach() const { return static_cast<int>(gamma.size()); }
    InteriorStencil as_interior() const;
    bool consistent() const;  // sum 2 j gamma_j = 1
};

InteriorStencil build_upwind_interior(int order, bool verbatim_table = false);
InteriorStencil build_drp_interior(int order);
CentralStencil build_central_interior(int order);
// beta_l = -alpha_{-l}
InteriorStencil minus_stencil(const InteriorStencil& plus);

// Solve A x = b exactly; throws on a singular system.
VectorR solve_exact(MatrixR a, VectorR b);

}  // namespace drpsbp

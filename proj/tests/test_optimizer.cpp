#include "drpsbp/dispersion.hpp"
#include "drpsbp/optimizer.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace drpsbp;

namespace {

// |g1 w1 + g2 w2|^2 = g1^2 + g1 g2 cos k + g2^2 cos 2k against the target 1 + cos 2k
GramTensor toy_gram() {
    GramTensor g;
    g.gram = {Eigen::MatrixXd{{1, 0}, {0, 0}}, Eigen::MatrixXd{{0, 0.5}, {0.5, 0}}, Eigen::MatrixXd{{0, 0}, {0, 1}}};
    return g;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("target coefficients are the cosine series of k^2") {
    const auto beta = target_coeffs(6);
    const double pi = std::numbers::pi;
    for (int l = 0; l <= 6; ++l) {
        // (1/pi) int_{-pi}^{pi} k^2 cos(lk) dk, halved for l = 0, by midpoint rule
        const int m = 100000;
        double s = 0;
        for (int i = 0; i < m; ++i) {
            const double k = -pi + (i + 0.5) * 2 * pi / m;
            s += k * k * std::cos(l * k);
        }
        s *= 2 * pi / m / pi;
        if (l == 0) s /= 2;
        CHECK(std::abs(beta(l) - s) < 1e-6);
    }
}

TEST_CASE("uniform weight gives the identity weight matrix") {
    const auto w = weight_matrix(WeightSpec::uniform(), 10);
    CHECK((w - Eigen::MatrixXd::Identity(11, 11)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS(weight_matrix(WeightSpec{"neg", {-1.0}}, 4));
}

TEST_CASE("weight strings parse") {
    CHECK(WeightSpec::parse("uniform", 9).cos_coeffs.empty());
    const auto e = WeightSpec::parse("expquad:0.3", 9);
    REQUIRE(e.cos_coeffs.size() == 9);
    // cosine coefficients of exp(0.3 k^2) on [0, pi] by midpoint quadrature
    const double pi = std::numbers::pi;
    for (int j = 0; j < 9; ++j) {
        const int m = 200000;
        double s = 0;
        for (int i = 0; i < m; ++i) {
            const double k = (i + 0.5) * pi / m;
            s += std::exp(0.3 * k * k) * std::cos(j * k);
        }
        s *= (j == 0 ? 1.0 : 2.0) / m;
        CHECK(std::abs(e.cos_coeffs[j] - s) < 1e-6);
    }
    CHECK_THROWS(WeightSpec::parse("bogus", 9));
}

TEST_CASE("Gram tensor of a family matches direct products of symbols") {
    FamilySpec spec;
    spec.a = 4;
    spec.b = 6;
    const auto fam = build_family(spec);
    REQUIRE(fam.basis.size() == 3);
    const double k = 1.3;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const auto wi = symbol(fam.basis[i])(k), wj = symbol(fam.basis[j])(k);
            const double direct = std::real(wi * std::conj(wj));
            double series = 0;
            for (size_t l = 0; l < fam.gram.gram.size(); ++l) series += fam.gram.gram[l](i, j) * std::cos(l * k);
            CHECK(std::abs(series - direct) < 1e-12);
        }
}

TEST_CASE("family bounds are validated") {
    FamilySpec bad;
    bad.a = 5;
    bad.b = 4;
    CHECK_THROWS(build_family(bad));
    bad.a = 2;
    bad.b = 9;
    bad.j_max = 3;
    CHECK_THROWS(build_family(bad));
}

TEST_CASE("two-minimum toy problem: both vertices found by multistart") {
    const auto g = toy_gram();
    Eigen::VectorXd beta(3);
    beta << 1, 0, 1;
    const auto sol = minimize_gamma(g, beta, Eigen::MatrixXd::Identity(3, 3));
    bool found10 = false, found01 = false;
    for (const auto& s : sol.starts) {
        if ((s.gamma - Eigen::Vector2d(1, 0)).norm() < 1e-6 && std::abs(s.value - 1) < 1e-9) found10 = true;
        if ((s.gamma - Eigen::Vector2d(0, 1)).norm() < 1e-6 && std::abs(s.value - 1) < 1e-9) found01 = true;
    }
    CHECK(found10);
    CHECK(found01);
    CHECK(sol.value <= 1 + 1e-9);
}

TEST_CASE("a one-member family returns that member") {
    FamilySpec spec;
    spec.a = 4;
    spec.b = 4;
    const auto r = optimize(spec);
    CHECK(r.gamma.size() == 1);
    CHECK(r.gamma(0) == doctest::Approx(1.0));
    CHECK(r.stencil == build_upwind_interior(4));
}

TEST_CASE("family (4,9) beats the tabulated order-4 DRP stencil") {
    FamilySpec spec;
    const auto r = optimize(spec);
    const double ref = error_report(dispersion_upwind(build_drp_interior(4))).eps_inf;
    CHECK(r.eps_inf <= 1.1 * ref);
    CHECK(r.stencil.consistent());
    CHECK(std::abs(r.gamma.sum() - 1) < 1e-12);
    Rational sum = 0;
    for (const auto& g : r.gamma_exact) sum += g;
    CHECK(sum == Rational(1));
}

TEST_CASE("continued-fraction rationalization") {
    CHECK(rationalize(0.75, 100) == Rational(3, 4));
    CHECK(rationalize(std::numbers::pi, 1000) == Rational(355, 113));
    CHECK(rationalize(-0.5, 10) == Rational(-1, 2));
}

}

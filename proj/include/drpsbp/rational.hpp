#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace drpsbp {

using BigInt = boost::multiprecision::cpp_int;

// Exact fraction in lowest terms with a positive denominator.
class Rational {
public:
    Rational() = default;
    Rational(long long v) : value_(v) {}  // NOLINT: implicit from integers is intended
    Rational(const BigInt& num, const BigInt& den);

    // Accepts "p", "p/q", and plain or exponent decimals ("0.407206", "-1.5e-3").
    // A leading U+2212 minus sign is treated as '-'.
    static Rational parse(std::string_view text);
    // Exact value of a finite double (a dyadic fraction).
    static Rational from_double(double x);

    BigInt numerator() const { return boost::multiprecision::numerator(value_); }
    BigInt denominator() const { return boost::multiprecision::denominator(value_); }

    double to_double() const { return value_.convert_to<double>(); }
    bool is_zero() const { return value_ == 0; }
    int sign() const { return value_.sign(); }

    // "p/q", or "p" when the denominator is 1.
    std::string str() const;
    // True when the value has a terminating decimal expansion.
    bool is_decimal() const;
    // Exact decimal expansion; throws if !is_decimal().
    std::string decimal_str() const;

    Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
    Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
    Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { Rational r; r.value_ = -a.value_; return r; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        int c = a.value_.compare(b.value_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r);

private:
    using Value = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                                boost::multiprecision::et_off>;
    Value value_{0};
};

Rational abs(const Rational& r);
Rational pow(const Rational& base, int exponent);

// Conversion used by the templated assembly routines.
template <class T> T scalar_cast(const Rational& r);
template <> inline Rational scalar_cast<Rational>(const Rational& r) { return r; }
template <> inline double scalar_cast<double>(const Rational& r) { return r.to_double(); }

}  // namespace drpsbp

namespace Eigen {

template <> struct NumTraits<drpsbp::Rational> : GenericNumTraits<drpsbp::Rational> {
    using Real = drpsbp::Rational;
    using NonInteger = drpsbp::Rational;
    using Nested = drpsbp::Rational;
    using Literal = drpsbp::Rational;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 10,
        AddCost = 50,
        MulCost = 50
    };
    static inline Real epsilon() { return Real(0); }
    static inline Real dummy_precision() { return Real(0); }
    static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace drpsbp {

template <class T> using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T> using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
using MatrixR = Matrix<Rational>;
using VectorR = Vector<Rational>;

MatrixR parse_matrix(const std::vector<std::vector<std::string>>& rows);

}  // namespace drpsbp

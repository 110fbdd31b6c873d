#include "drpsbp/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace drpsbp {

namespace {

BigInt pow10(unsigned e) {
    BigInt r = 1;
    for (unsigned i = 0; i < e; ++i) r *= 10;
    return r;
}

std::string strip_unicode_minus(std::string_view text) {
    // U+2212 in UTF-8
    static constexpr std::string_view kMinus = "\xE2\x88\x92";
    std::string out(text);
    for (auto pos = out.find(kMinus); pos != std::string::npos; pos = out.find(kMinus))
        out.replace(pos, kMinus.size(), "-");
    auto notspace = [](unsigned char c) { return !std::isspace(c); };
    out.erase(out.begin(), std::find_if(out.begin(), out.end(), notspace));
    out.erase(std::find_if(out.rbegin(), out.rend(), notspace).base(), out.end());
    return out;
}

BigInt parse_integer(const std::string& s, std::string_view whole) {
    if (s.empty()) throw std::invalid_argument("malformed number: '" + std::string(whole) + "'");
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw std::invalid_argument("malformed number: '" + std::string(whole) + "'");
    for (size_t k = i; k < s.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(s[k])))
            throw std::invalid_argument("malformed number: '" + std::string(whole) + "'");
    // cpp_int reads a leading 0 as an octal prefix
    const size_t first = std::min(s.find_first_not_of('0', i), s.size() - 1);
    BigInt v(s.substr(first));
    return s[0] == '-' ? BigInt(-v) : v;
}

}  // namespace

Rational::Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    // boost wants a positive denominator
    value_ = den < 0 ? Value(BigInt(-num), BigInt(-den)) : Value(num, den);
}

Rational Rational::parse(std::string_view text) {
    const std::string s = strip_unicode_minus(text);
    if (auto slash = s.find('/'); slash != std::string::npos) {
        BigInt num = parse_integer(s.substr(0, slash), text);
        BigInt den = parse_integer(s.substr(slash + 1), text);
        if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        return Rational(num, den);
    }
    std::string mant = s;
    long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        mant = s.substr(0, e);
        exp10 = std::stol(s.substr(e + 1));
    }
    unsigned frac_digits = 0;
    if (auto dot = mant.find('.'); dot != std::string::npos) {
        frac_digits = static_cast<unsigned>(mant.size() - dot - 1);
        mant.erase(dot, 1);
        if (mant.empty() || mant == "-" || mant == "+")
            throw std::invalid_argument("malformed number: '" + std::string(text) + "'");
    }
    BigInt num = parse_integer(mant, text);
    long scale = exp10 - static_cast<long>(frac_digits);
    if (scale >= 0) return Rational(num * pow10(static_cast<unsigned>(scale)), 1);
    return Rational(num, pow10(static_cast<unsigned>(-scale)));
}

Rational Rational::from_double(double x) {
    if (!std::isfinite(x)) throw std::domain_error("cannot convert a non-finite double to a rational");
    if (x == 0) return Rational(0);
    int e = 0;
    const double f = std::frexp(x, &e);
    Rational r(static_cast<long long>(std::ldexp(f, 53)));
    e -= 53;
    const Rational two(2);
    return e >= 0 ? r * pow(two, e) : r / pow(two, -e);
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("rational division by zero");
    value_ /= o.value_;
    return *this;
}

std::string Rational::str() const {
    const BigInt den = denominator();
    if (den == 1) return numerator().str();
    return numerator().str() + "/" + den.str();
}

bool Rational::is_decimal() const {
    BigInt d = denominator();
    while (d % 2 == 0) d /= 2;
    while (d % 5 == 0) d /= 5;
    return d == 1;
}

std::string Rational::decimal_str() const {
    if (!is_decimal()) throw std::domain_error(str() + " has no terminating decimal expansion");
    BigInt num = numerator();
    const bool neg = num < 0;
    if (neg) num = -num;
    BigInt den = denominator();
    unsigned digits = 0;
    while (den != 1) {
        // multiply up to a power of ten
        if (den % 10 == 0) den /= 10;
        else if (den % 2 == 0) { den /= 2; num *= 5; }
        else { den /= 5; num *= 2; }
        ++digits;
    }
    std::string s = num.str();
    if (digits > 0) {
        if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
        s.insert(s.size() - digits, ".");
    }
    return neg ? "-" + s : s;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

Rational pow(const Rational& base, int exponent) {
    if (exponent < 0) return Rational(1) / pow(base, -exponent);
    Rational r(1);
    for (int i = 0; i < exponent; ++i) r *= base;
    return r;
}

MatrixR parse_matrix(const std::vector<std::vector<std::string>>& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = n ? static_cast<Eigen::Index>(rows.front().size()) : 0;
    MatrixR out(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != m)
            throw std::invalid_argument("ragged matrix rows");
        for (Eigen::Index j = 0; j < m; ++j) out(i, j) = Rational::parse(rows[i][j]);
    }
    return out;
}

}  // namespace drpsbp

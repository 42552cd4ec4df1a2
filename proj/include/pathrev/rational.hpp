#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathrev {

/// Exact reduced fraction with arbitrary-precision numerator and denominator.
using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational make_rational(long num, long den = 1)
{
    if (den == 0) {
        throw std::domain_error("make_rational: zero denominator");
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& r) { return r.get_str(); }

/// "p/q", an integer, or an exact decimal such as "-0.125".
inline Rational parse_rational(const std::string& text)
{
    Rational r;
    const auto dot = text.find('.');
    if (dot != std::string::npos && text.find('/') == std::string::npos) {
        const std::string frac = text.substr(dot + 1);
        std::string digits = text.substr(0, dot) + frac;
        if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos || digits == "-" ||
            digits.empty()) {
            throw std::invalid_argument("parse_rational: malformed '" + text + "'");
        }
        BigInt num;
        if (num.set_str(digits, 10) != 0) {
            throw std::invalid_argument("parse_rational: malformed '" + text + "'");
        }
        BigInt den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
        r = Rational(num, den);
        r.canonicalize();
        return r;
    }
    if (r.set_str(text, 10) != 0) {
        throw std::invalid_argument("parse_rational: malformed '" + text + "'");
    }
    if (r.get_den() == 0) {
        throw std::domain_error("parse_rational: zero denominator");
    }
    r.canonicalize();
    return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

/// H_m and H_m^{(2)}.
struct HarmonicPair {
    Rational h;
    Rational h2;
};

inline HarmonicPair harmonic(std::size_t m)
{
    HarmonicPair out{Rational(0), Rational(0)};
    for (std::size_t i = 1; i <= m; ++i) {
        const BigInt ii(static_cast<unsigned long>(i));
        out.h += Rational(BigInt(1), ii);
        out.h2 += Rational(BigInt(1), ii * ii);
    }
    return out;
}

/// Dense univariate polynomial, coefficient i multiplies z^i.
template <typename T>
class Polynomial {
public:
    Polynomial() : coeffs_{T(0)} {}
    explicit Polynomial(std::vector<T> coeffs) : coeffs_(std::move(coeffs))
    {
        if (coeffs_.empty()) {
            coeffs_.push_back(T(0));
        }
    }

    [[nodiscard]] std::size_t degree() const noexcept { return coeffs_.size() - 1; }
    [[nodiscard]] const std::vector<T>& coefficients() const noexcept { return coeffs_; }
    [[nodiscard]] const T& operator[](std::size_t i) const { return coeffs_.at(i); }

    /// Multiplies in place by (a + b z).
    Polynomial& mul_linear(const T& a, const T& b)
    {
        std::vector<T> out(coeffs_.size() + 1, T(0));
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            out[i] += a * coeffs_[i];
            out[i + 1] += b * coeffs_[i];
        }
        coeffs_ = std::move(out);
        return *this;
    }

    [[nodiscard]] T eval(const T& z) const
    {
        T acc(0);
        for (std::size_t i = coeffs_.size(); i-- > 0;) {
            acc = acc * z + coeffs_[i];
        }
        return acc;
    }

    [[nodiscard]] Polynomial derivative() const
    {
        if (coeffs_.size() == 1) {
            return Polynomial();
        }
        std::vector<T> out(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i) {
            out[i - 1] = coeffs_[i] * T(static_cast<unsigned long>(i));
        }
        return Polynomial(std::move(out));
    }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::vector<T> coeffs_;
};

} // namespace pathrev

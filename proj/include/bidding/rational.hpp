#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "bidding/errors.hpp"

namespace bidding {

/// Exact rational number over 128-bit integers.
///
/// Budgets, weights and probabilities are exact end-to-end in the domain
/// model; solvers convert to double at their boundary. Operations reduce by
/// gcd before cross-multiplying, so intermediates stay within 128 bits for
/// far longer than naive num/den arithmetic would. When a result would still
/// not fit, the operation throws RationalOverflow instead of wrapping.
class Rational {
public:
    using Int = __int128;

    Rational() = default;
    Rational(long long value) : num_(value), den_(1) {} // NOLINT(google-explicit-constructor)
    Rational(Int num, Int den);

    /// Parses "7", "-3/4", "0.125" (plain decimal, no exponent).
    static Rational parse(std::string_view text);

    /// Exact conversion of a finite double (every double is dyadic).
    static Rational from_double(double value);

    Int num() const { return num_; }
    Int den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }

    double to_double() const;
    std::string to_string() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& rhs) { return *this = *this + rhs; }
    Rational& operator-=(const Rational& rhs) { return *this = *this - rhs; }
    Rational& operator*=(const Rational& rhs) { return *this = *this * rhs; }
    Rational& operator/=(const Rational& rhs) { return *this = *this / rhs; }

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    /// Exact order comparison; never overflows (continued-fraction descent).
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    Int num_ = 0;
    Int den_ = 1; // > 0, coprime with num_
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

Rational abs(const Rational& r);

} // namespace bidding

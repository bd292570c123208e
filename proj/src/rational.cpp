#include "bidding/rational.hpp"

#include <cctype>
#include <cmath>
#include <ostream>

namespace bidding {

namespace {

using Int = Rational::Int;
using UInt = unsigned __int128;

UInt umag(Int x) { return x < 0 ? UInt(0) - UInt(x) : UInt(x); }

UInt ugcd(UInt a, UInt b) {
    while (b != 0) {
        UInt t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Int gcd(Int a, Int b) {
    UInt g = ugcd(umag(a), umag(b));
    return Int(g);
}

Int checked_mul(Int a, Int b) {
    Int out;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw RationalOverflow("rational multiply exceeds 128 bits");
    }
    return out;
}

Int checked_add(Int a, Int b) {
    Int out;
    if (__builtin_add_overflow(a, b, &out)) {
        throw RationalOverflow("rational add exceeds 128 bits");
    }
    return out;
}

std::string int_to_string(Int x) {
    if (x == 0) return "0";
    bool neg = x < 0;
    UInt m = umag(x);
    std::string digits;
    while (m != 0) {
        digits.push_back(char('0' + int(m % 10)));
        m /= 10;
    }
    if (neg) digits.push_back('-');
    return {digits.rbegin(), digits.rend()};
}

// Compares a/b < c/d for non-negative fractions without cross-multiplying.
std::strong_ordering compare_nonneg(Int a, Int b, Int c, Int d) {
    for (;;) {
        Int q1 = a / b;
        Int q2 = c / d;
        if (q1 != q2) return q1 <=> q2;
        a -= q1 * b;
        c -= q2 * d;
        if (a == 0 || c == 0) return (a != 0) <=> (c != 0);
        // both fractional parts in (0,1): a/b vs c/d  ==  d/c vs b/a
        Int na = d, nb = c, nc = b, nd = a;
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
}

} // namespace

Rational::Rational(Int num, Int den) {
    if (den == 0) throw ValidationError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Int g = gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    num_ = num;
    den_ = den;
}

Rational Rational::parse(std::string_view text) {
    auto fail = [&] { throw ValidationError("cannot parse rational: '" + std::string(text) + "'"); };

    size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    skip_ws();
    bool neg = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        neg = text[pos] == '-';
        ++pos;
    }

    Int int_part = 0;
    bool any_digit = false;
    auto read_digits = [&](Int& target) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            target = checked_add(checked_mul(target, 10), text[pos] - '0');
            any_digit = true;
            ++pos;
        }
    };
    read_digits(int_part);

    Int num = int_part;
    Int den = 1;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            num = checked_add(checked_mul(num, 10), text[pos] - '0');
            den = checked_mul(den, 10);
            any_digit = true;
            ++pos;
        }
    } else if (pos < text.size() && text[pos] == '/') {
        ++pos;
        Int d = 0;
        bool saved = any_digit;
        any_digit = false;
        read_digits(d);
        if (!any_digit || d == 0) fail();
        any_digit = saved;
        den = d;
    }
    skip_ws();
    if (!any_digit || pos != text.size()) fail();
    return Rational(neg ? -num : num, den);
}

Rational Rational::from_double(double value) {
    if (!std::isfinite(value)) throw ValidationError("non-finite value has no rational form");
    if (value == 0.0) return Rational();
    int exp = 0;
    double mant = std::frexp(value, &exp); // value = mant * 2^exp, |mant| in [0.5, 1)
    auto scaled = Int(std::ldexp(mant, 53)); // exact: 53-bit integer
    exp -= 53;
    Int num = scaled;
    Int den = 1;
    while (exp > 0) {
        num = checked_mul(num, 2);
        --exp;
    }
    while (exp < 0) {
        if (num % 2 == 0) {
            num /= 2;
        } else {
            den = checked_mul(den, 2);
        }
        ++exp;
    }
    return Rational(num, den);
}

double Rational::to_double() const {
    return double(static_cast<long double>(num_) / static_cast<long double>(den_));
}

std::string Rational::to_string() const {
    if (den_ == 1) return int_to_string(num_);
    return int_to_string(num_) + "/" + int_to_string(den_);
}

Rational Rational::operator-() const {
    Rational out;
    out.num_ = -num_;
    out.den_ = den_;
    return out;
}

Rational operator+(const Rational& a, const Rational& b) {
    // Knuth 4.5.1: reduce by gcd of denominators before combining.
    Int g1 = gcd(a.den_, b.den_);
    Int b1 = a.den_ / g1;
    Int d1 = b.den_ / g1;
    Int t = checked_add(checked_mul(a.num_, d1), checked_mul(b.num_, b1));
    Int g2 = gcd(t, g1);
    Rational out;
    out.num_ = t / g2;
    out.den_ = checked_mul(b1, b.den_ / g2);
    return out;
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    Int g1 = gcd(a.num_, b.den_);
    Int g2 = gcd(b.num_, a.den_);
    Rational out;
    out.num_ = checked_mul(a.num_ / g1, b.num_ / g2);
    out.den_ = checked_mul(a.den_ / g2, b.den_ / g1);
    return out;
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ValidationError("rational division by zero");
    Int g1 = gcd(a.num_, b.num_);
    Int g2 = gcd(b.den_, a.den_);
    Rational out;
    Int num = checked_mul(a.num_ / g1, b.den_ / g2);
    Int den = checked_mul(a.den_ / g2, b.num_ / g1);
    if (den < 0) {
        num = -num;
        den = -den;
    }
    out.num_ = num;
    out.den_ = den;
    return out;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    bool an = a.num_ < 0;
    bool bn = b.num_ < 0;
    if (an != bn) return an ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.num_ == 0 || b.num_ == 0) return a.num_ <=> b.num_;
    if (an) return compare_nonneg(-b.num_, b.den_, -a.num_, a.den_);
    return compare_nonneg(a.num_, a.den_, b.num_, b.den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

Rational abs(const Rational& r) { return r.is_negative() ? -r : r; }

} // namespace bidding

#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qnnv {

using BigInt = mpz_class;

/// Exact signed rational kept in canonical form (positive denominator, coprime parts).
class Rational {
public:
    Rational() = default;
    Rational(int v) : value_(v) {}  // NOLINT(google-explicit-constructor)
    Rational(long v) : value_(v) {}  // NOLINT(google-explicit-constructor)
    Rational(long long v) : value_(BigInt(std::to_string(v))) {}  // NOLINT
    explicit Rational(const BigInt& n) : value_(n) {}
    Rational(const BigInt& num, const BigInt& den);
    explicit Rational(const mpq_class& q) : value_(q) { value_.canonicalize(); }

    /// Accepts `p/q`, `-p/q`, plain integers and finite decimals such as `0.25`.
    static Rational parse(std::string_view text);
    static Rational pow2(long exponent);

    BigInt numerator() const { return value_.get_num(); }
    BigInt denominator() const { return value_.get_den(); }
    const mpq_class& raw() const { return value_; }

    bool is_zero() const { return sgn(value_) == 0; }
    bool is_integer() const { return value_.get_den() == 1; }
    int sign() const { return sgn(value_); }

    BigInt floor() const;
    BigInt ceil() const;
    Rational abs() const { return Rational(mpq_class(::abs(value_))); }
    /// Multiplication by 2^k, k of either sign.
    Rational scaled_pow2(long k) const;

    std::string to_string() const;

    Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
    Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
    Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r);

private:
    mpq_class value_;
};

using RationalVector = std::vector<Rational>;

std::string to_string(const RationalVector& v, std::string_view sep = " ");

/// Floor division on big integers (rounds toward negative infinity).
BigInt floor_div(const BigInt& a, const BigInt& b);
/// Non-negative remainder, 0 <= r < |b|.
BigInt mod_floor(const BigInt& a, const BigInt& b);

}  // namespace qnnv

template <>
struct std::hash<qnnv::Rational> {
    std::size_t operator()(const qnnv::Rational& r) const noexcept {
        return std::hash<std::string>{}(r.to_string());
    }
};

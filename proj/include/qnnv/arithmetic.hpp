#pragma once

#include "qnnv/rational.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qnnv {

enum class RoundingMode {
    TowardNegative,  ///< floor onto the grid
    TowardZero,      ///< truncate
    NearestHalfUp,   ///< nearest grid point, exact halves go toward +infinity
};

enum class OverflowMode { Saturate, Wrap };

/// Signed two's complement fixed point: values n / 2^f with -2^(b-1) <= n < 2^(b-1).
struct FixedFormat {
    int total_bits = 8;
    int frac_bits = 0;
    RoundingMode rounding = RoundingMode::NearestHalfUp;
    OverflowMode overflow = OverflowMode::Saturate;

    /// Throws InvalidArgument unless b >= 1 and 0 <= f <= b.
    void validate() const;

    Rational ulp() const { return Rational::pow2(-frac_bits); }
    Rational min_value() const;
    Rational max_value() const;
    BigInt min_scaled() const;
    BigInt max_scaled() const;
    std::size_t word_length() const { return static_cast<std::size_t>(total_bits); }

    friend bool operator==(const FixedFormat&, const FixedFormat&) = default;
};

/// Normalised binary floating point with p mantissa bits and e exponent bits.
/// Exponents range over [-(2^(e-1)-2), 2^(e-1)-1] with bias 2^(e-1)-1; the
/// all-zero exponent field encodes zero, the all-ones field is unused.
struct FloatFormat {
    int mantissa_bits = 3;
    int exponent_bits = 2;
    RoundingMode rounding = RoundingMode::NearestHalfUp;

    void validate() const;

    long bias() const { return (1L << (exponent_bits - 1)) - 1; }
    long min_exponent() const { return -((1L << (exponent_bits - 1)) - 2); }
    long max_exponent() const { return (1L << (exponent_bits - 1)) - 1; }
    Rational min_normal() const { return Rational::pow2(min_exponent()); }
    Rational max_value() const;
    std::size_t word_length() const {
        return static_cast<std::size_t>(1 + exponent_bits + mantissa_bits);
    }

    friend bool operator==(const FloatFormat&, const FloatFormat&) = default;
};

using ArithmeticFormat = std::variant<FixedFormat, FloatFormat>;

/// `fix:b=<int>,f=<int>,round=<floor|trunc|nearest>,ovf=<sat|wrap>` or
/// `float:m=<int>,e=<int>,round=<floor|trunc|nearest>`.
ArithmeticFormat parse_format(std::string_view descriptor);
std::string to_string(const ArithmeticFormat& fmt);
std::string to_string(RoundingMode mode);
std::string to_string(OverflowMode mode);

std::size_t word_length(const ArithmeticFormat& fmt);
bool is_fixed(const ArithmeticFormat& fmt);

/// Rounds onto the format's unbounded grid (no range handling).
Rational round(const Rational& x, const ArithmeticFormat& fmt);
/// Requires x on the 2^-f grid.
Rational overflow(const Rational& x, const FixedFormat& fmt);
/// Floating-point range handling: flush to zero below the smallest normal,
/// saturate above the largest finite value.
Rational clamp_range(const Rational& x, const FloatFormat& fmt);
/// The full quantisation map: overflow(round(x)) for fixed point,
/// clamp_range(round(x)) for floating point.
Rational quantize(const Rational& x, const ArithmeticFormat& fmt);

bool is_representable(const Rational& x, const ArithmeticFormat& fmt);
/// Every representable value in ascending order.
std::vector<Rational> representable_values(const ArithmeticFormat& fmt);

enum class ArithOp { Add, Mul, Div };
enum class Comparison { Less, LessEqual, Equal };

Rational fmt_op(ArithOp op, const Rational& x, const Rational& y, const ArithmeticFormat& fmt);
bool fmt_compare(Comparison rel, const Rational& x, const Rational& y, const ArithmeticFormat& fmt);

/// Bits in word order. Fixed point: least significant bit first, two's
/// complement, position i has weight 2^(i-f). Floating point: sign, then the
/// biased exponent field least significant bit first, then mantissa m_1..m_p.
struct BitWord {
    std::vector<std::uint8_t> bits;

    std::size_t size() const { return bits.size(); }
    std::uint8_t operator[](std::size_t i) const { return bits[i]; }
    std::string to_string() const;
    static BitWord parse(std::string_view text);

    friend bool operator==(const BitWord&, const BitWord&) = default;
};

BitWord encode(const Rational& x, const ArithmeticFormat& fmt);
Rational decode(const BitWord& word, const ArithmeticFormat& fmt);

/// Bit of weight 2^t in the two's complement expansion of p/q rounded toward
/// -infinity. Fractional bits come from modular exponentiation, so t may be
/// far below zero without materialising 2^-t.
int getbit_fixed(const BigInt& p, const BigInt& q, long t);

/// Bit at `position` of the floating-point word for p/q (p != 0) using the
/// truncated binary expansion: exponent positions read the biased exponent of
/// floor(log2 |p/q|); an exponent above the range yields the all-ones field
/// with a zero mantissa, one below it yields zero bits.
int getbit_float(const BigInt& p, const BigInt& q, const FloatFormat& fmt, std::size_t position);

/// floor(log2(|p| / q)) for p != 0, q > 0.
long binary_exponent(const BigInt& p, const BigInt& q);

}  // namespace qnnv

#include "doctest.h"
#include "oracles.hpp"

#include "qnnv/arithmetic.hpp"
#include "qnnv/error.hpp"

#include <random>
#include <set>

using namespace qnnv;
using qnnv_test::long_division_bit;
using qnnv_test::modulo_wrap;
using qnnv_test::scan_quantize_fixed;
using qnnv_test::scan_quantize_float;

namespace {

Rational q(long n, long d = 1) { return Rational(BigInt(n), BigInt(d)); }

Rational random_rational(std::mt19937_64& rng, long span = 1 << 10, long den = 1 << 6) {
    std::uniform_int_distribution<long> num(-span, span), dd(1, den);
    return q(num(rng), dd(rng));
}

/// The unbounded fixed-point grid rounding, by floor and a correction step.
Rational grid_round(const Rational& x, const FixedFormat& fmt) {
    const Rational s = x.scaled_pow2(fmt.frac_bits);
    const BigInt lo = s.floor();
    BigInt n = lo;
    if (Rational(lo) != s) {
        switch (fmt.rounding) {
        case RoundingMode::TowardNegative: break;
        case RoundingMode::TowardZero: n = s.sign() < 0 ? lo + 1 : lo; break;
        case RoundingMode::NearestHalfUp: n = s - Rational(lo) >= q(1, 2) ? lo + 1 : lo; break;
        }
    }
    return Rational(n).scaled_pow2(-fmt.frac_bits);
}

const RoundingMode kModes[] = {RoundingMode::TowardNegative, RoundingMode::TowardZero, RoundingMode::NearestHalfUp};

std::vector<ArithmeticFormat> sample_formats() {
    std::vector<ArithmeticFormat> out;
    for (auto m : kModes) {
        out.push_back(FixedFormat{4, 1, m, OverflowMode::Saturate});
        out.push_back(FixedFormat{6, 3, m, OverflowMode::Saturate});
        out.push_back(FixedFormat{5, 0, m, OverflowMode::Wrap});
        out.push_back(FixedFormat{3, 3, m, OverflowMode::Wrap});
        out.push_back(FloatFormat{2, 2, m});
        out.push_back(FloatFormat{3, 3, m});
    }
    return out;
}

}  // namespace

TEST_CASE("fixed-point rounding table, b=4 f=1") {
    // value, floor, trunc, nearest (all within range)
    struct Row {
        Rational x, floor, trunc, nearest;
    };
    const Row rows[] = {
        {q(1, 4), q(0), q(0), q(1, 2)},       {q(3, 4), q(1, 2), q(1, 2), q(1)},
        {q(-1, 4), q(-1, 2), q(0), q(0)},     {q(-3, 4), q(-1), q(-1, 2), q(-1, 2)},
        {q(5, 4), q(1), q(1), q(3, 2)},       {q(1, 3), q(0), q(0), q(1, 2)},
        {q(-5, 4), q(-3, 2), q(-1), q(-1)},   {q(2), q(2), q(2), q(2)},
    };
    for (const auto& r : rows) {
        INFO(r.x);
        const FixedFormat fl{4, 1, RoundingMode::TowardNegative, OverflowMode::Saturate};
        const FixedFormat tr{4, 1, RoundingMode::TowardZero, OverflowMode::Saturate};
        const FixedFormat ne{4, 1, RoundingMode::NearestHalfUp, OverflowMode::Saturate};
        CHECK(quantize(r.x, fl) == r.floor);
        CHECK(quantize(r.x, tr) == r.trunc);
        CHECK(quantize(r.x, ne) == r.nearest);
        CHECK(scan_quantize_fixed(r.x, fl) == r.floor);
        CHECK(scan_quantize_fixed(r.x, tr) == r.trunc);
        CHECK(scan_quantize_fixed(r.x, ne) == r.nearest);
    }
}

TEST_CASE("fixed-point overflow table, b=4 f=1") {
    const FixedFormat sat{4, 1, RoundingMode::NearestHalfUp, OverflowMode::Saturate};
    const FixedFormat wrap{4, 1, RoundingMode::NearestHalfUp, OverflowMode::Wrap};
    CHECK(quantize(q(4), sat) == q(7, 2));
    CHECK(quantize(q(-5), sat) == q(-4));
    CHECK(quantize(q(4), wrap) == q(-4));
    CHECK(quantize(q(9, 2), wrap) == q(-7, 2));
    CHECK(quantize(q(-9, 2), wrap) == q(7, 2));
    CHECK(quantize(q(15, 4), wrap) == q(-4));  // rounds to 4 first
    CHECK(quantize(q(15, 4), sat) == q(7, 2));
}

TEST_CASE("floating-point table, p=2 e=2") {
    // Emin = 0, Emax = 1: values 1, 5/4, 3/2, 7/4, 2, 5/2, 3, 7/2
    const FloatFormat ne{2, 2, RoundingMode::NearestHalfUp};
    const FloatFormat tz{2, 2, RoundingMode::TowardZero};
    const FloatFormat fl{2, 2, RoundingMode::TowardNegative};
    CHECK(representable_values(ne).size() == 17);
    CHECK(quantize(q(9, 8), ne) == q(5, 4));   // tie goes up
    CHECK(quantize(q(-9, 8), ne) == q(-1));    // negative tie goes toward +infinity
    CHECK(quantize(q(9, 8), tz) == q(1));
    CHECK(quantize(q(-9, 8), fl) == q(-5, 4));
    CHECK(quantize(q(1, 2), ne) == q(0));      // below 2^Emin flushes
    CHECK(quantize(q(100), ne) == q(7, 2));    // saturates
    CHECK(quantize(q(-100), ne) == q(-7, 2));
    CHECK(quantize(q(15, 4), ne) == q(7, 2));  // rounds to 4, then saturates
}

TEST_CASE("quantisation matches the grid oracles on random rationals") {
    std::mt19937_64 rng(1);
    for (const auto& fmt : sample_formats()) {
        INFO(to_string(fmt));
        for (int i = 0; i < 600; ++i) {
            const Rational x = random_rational(rng, 1 << 8, 1 << 5);
            if (const auto* f = std::get_if<FixedFormat>(&fmt)) {
                if (f->overflow == OverflowMode::Saturate) {
                    REQUIRE(quantize(x, fmt) == scan_quantize_fixed(x, *f));
                } else {
                    REQUIRE(quantize(x, fmt) == modulo_wrap(grid_round(x, *f), *f));
                }
            } else {
                REQUIRE(quantize(x, fmt) == scan_quantize_float(x, std::get<FloatFormat>(fmt)));
            }
        }
    }
}

TEST_CASE("quantisation is idempotent and monotone") {
    std::mt19937_64 rng(2);
    for (const auto& fmt : sample_formats()) {
        INFO(to_string(fmt));
        const bool wraps = is_fixed(fmt) && std::get<FixedFormat>(fmt).overflow == OverflowMode::Wrap;
        for (int i = 0; i < 10000; ++i) {
            const Rational x = random_rational(rng);
            const Rational y = random_rational(rng);
            const Rational qx = quantize(x, fmt);
            REQUIRE(is_representable(qx, fmt));
            REQUIRE(quantize(qx, fmt) == qx);
            if (!wraps) {
                const Rational qy = quantize(y, fmt);
                REQUIRE((x <= y) <= (qx <= qy));
            }
        }
    }
}

TEST_CASE("representable values and encodings") {
    for (const auto& fmt : sample_formats()) {
        const auto values = representable_values(fmt);
        if (const auto* f = std::get_if<FixedFormat>(&fmt)) {
            CHECK(values.size() == (std::size_t{1} << f->total_bits));
        } else {
            const auto& g = std::get<FloatFormat>(fmt);
            CHECK(values.size() == 1 + 2 * ((std::size_t{1} << g.exponent_bits) - 2) * (std::size_t{1} << g.mantissa_bits));
        }
        for (std::size_t i = 1; i < values.size(); ++i) CHECK(values[i - 1] < values[i]);
        std::set<std::string> words;
        for (const auto& v : values) {
            const BitWord w = encode(v, fmt);
            CHECK(w.size() == word_length(fmt));
            CHECK(decode(w, fmt) == v);
            words.insert(w.to_string());
        }
        CHECK(words.size() == values.size());
    }
    const FixedFormat fx{4, 1, RoundingMode::NearestHalfUp, OverflowMode::Saturate};
    CHECK(encode(q(-1, 2), fx).to_string() == "1111");
    CHECK(encode(q(3, 2), fx).to_string() == "1100");
    const FloatFormat g{2, 2, RoundingMode::NearestHalfUp};
    CHECK(encode(q(5, 2), g).to_string() == "00101");  // sign 0, field 2 LSB first, mantissa 01
    CHECK(encode(q(-1), g).to_string() == "11000");
    CHECK_THROWS_AS(decode(BitWord::parse("10000"), g), Error);  // -0
    CHECK_THROWS_AS(decode(BitWord::parse("01100"), g), Error);  // reserved field
    CHECK_THROWS_AS(encode(q(1, 3), fx), Error);
}

TEST_CASE("getbit_fixed matches long division") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t mag = rng() >> (rng() % 64);
        const __int128 p = (rng() % 2) ? -static_cast<__int128>(mag) : static_cast<__int128>(mag);
        const std::uint64_t den = std::max<std::uint64_t>(1, rng() >> (rng() % 64));
        long t = static_cast<long>(rng() % (1 << 21)) - (1 << 20);
        if (i % 3 == 0) t = static_cast<long>(rng() % 140) - 70;
        BigInt P(std::to_string(mag));
        if (p < 0) P = -P;
        INFO(P.get_str() << " / " << den << " at " << t);
        REQUIRE(getbit_fixed(P, BigInt(std::to_string(den)), t) == long_division_bit(p, den, t));
    }
}

TEST_CASE("getbit_float matches encode on in-range values") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 500; ++i) {
        const FloatFormat fmt{1 + static_cast<int>(rng() % 8), 2 + static_cast<int>(rng() % 3),
                              RoundingMode::TowardZero};
        // |x| in [2^Emin, 2^(Emax+1))
        const long e = fmt.min_exponent() +
                       static_cast<long>(rng() % static_cast<std::uint64_t>(fmt.max_exponent() - fmt.min_exponent() + 1));
        const long den = 1 + static_cast<long>(rng() % 1000);
        const long num = den + static_cast<long>(rng() % static_cast<std::uint64_t>(den));
        Rational x = q(num, den).scaled_pow2(e);
        if (rng() % 2) x = -x;
        const BitWord expect = encode(scan_quantize_float(x, fmt), fmt);
        const std::size_t pos = rng() % fmt.word_length();
        INFO(x << " in " << to_string(ArithmeticFormat(fmt)) << " position " << pos);
        REQUIRE(getbit_float(x.numerator(), x.denominator(), fmt, pos) == expect[pos]);
    }
}

TEST_CASE("getbit_float outside the exponent range") {
    const FloatFormat fmt{2, 2, RoundingMode::NearestHalfUp};
    for (std::size_t pos = 1; pos <= 2; ++pos) CHECK(getbit_float(BigInt(9), BigInt(1), fmt, pos) == 1);
    for (std::size_t pos = 3; pos <= 4; ++pos) CHECK(getbit_float(BigInt(9), BigInt(1), fmt, pos) == 0);
    for (std::size_t pos = 1; pos <= 4; ++pos) CHECK(getbit_float(BigInt(1), BigInt(4), fmt, pos) == 0);
    CHECK(getbit_float(BigInt(-1), BigInt(4), fmt, 0) == 1);
    CHECK_THROWS_AS(getbit_float(BigInt(0), BigInt(1), fmt, 0), Error);
    CHECK_THROWS_AS(getbit_float(BigInt(1), BigInt(1), fmt, 5), Error);
}

TEST_CASE("binary exponent") {
    CHECK(binary_exponent(BigInt(1), BigInt(1)) == 0);
    CHECK(binary_exponent(BigInt(3), BigInt(4)) == -1);
    CHECK(binary_exponent(BigInt(-8), BigInt(1)) == 3);
    CHECK(binary_exponent(BigInt(7), BigInt(1)) == 2);
    CHECK(binary_exponent(BigInt(1), BigInt(1024)) == -10);
}

TEST_CASE("format descriptors") {
    const auto f = parse_format("fix:b=4,f=1,round=nearest,ovf=sat");
    CHECK(to_string(f) == "fix:b=4,f=1,round=nearest,ovf=sat");
    CHECK(parse_format(to_string(f)) == f);
    const auto g = parse_format("float:m=3,e=2,round=trunc");
    CHECK(std::get<FloatFormat>(g).mantissa_bits == 3);
    CHECK(parse_format(to_string(g)) == g);
    CHECK_THROWS_AS(parse_format("fix:b=4,round=nearest,ovf=sat"), Error);
    CHECK_THROWS_AS(parse_format("fix:b=4,f=5,round=nearest,ovf=sat"), Error);
    CHECK_THROWS_AS(parse_format("float:m=3,e=1,round=nearest"), Error);
    CHECK_THROWS_AS(parse_format("fix:b=4,f=1,round=nearest,ovf=sat,x=1"), Error);
    CHECK_THROWS_AS(parse_format("dec:b=4"), Error);
}

TEST_CASE("format operations round once") {
    const FixedFormat fx{4, 1, RoundingMode::TowardNegative, OverflowMode::Saturate};
    CHECK(fmt_op(ArithOp::Mul, q(3, 2), q(3, 2), fx) == q(2));  // 9/4 -> 2
    CHECK(fmt_op(ArithOp::Add, q(7, 2), q(1), fx) == q(7, 2));
    CHECK(fmt_op(ArithOp::Div, q(1), q(3), fx) == q(0));
    CHECK_THROWS_AS(fmt_op(ArithOp::Div, q(1), q(0), fx), Error);
    CHECK(fmt_compare(Comparison::Equal, q(1, 3), q(0), fx));
    CHECK(fmt_compare(Comparison::Less, q(1, 2), q(1), fx));
    CHECK_FALSE(fmt_compare(Comparison::Less, q(10), q(20), fx));  // both saturate
}

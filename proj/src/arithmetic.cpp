#include "qnnv/arithmetic.hpp"

#include "qnnv/error.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace qnnv {

namespace {

BigInt pow2_int(long k) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(k));
    return r;
}

/// Rounds s to an integer under the given mode.
BigInt round_to_integer(const Rational& s, RoundingMode mode) {
    switch (mode) {
    case RoundingMode::TowardNegative:
        return s.floor();
    case RoundingMode::TowardZero:
        return s.sign() < 0 ? s.ceil() : s.floor();
    case RoundingMode::NearestHalfUp:
        return (s + Rational(BigInt(1), BigInt(2))).floor();
    }
    throw Error(ErrorCode::Internal, "unknown rounding mode");
}

RoundingMode parse_rounding(std::string_view v) {
    if (v == "floor") return RoundingMode::TowardNegative;
    if (v == "trunc") return RoundingMode::TowardZero;
    if (v == "nearest") return RoundingMode::NearestHalfUp;
    throw Error(ErrorCode::SyntaxError, "unknown rounding mode '" + std::string(v) + "'");
}

OverflowMode parse_overflow(std::string_view v) {
    if (v == "sat") return OverflowMode::Saturate;
    if (v == "wrap") return OverflowMode::Wrap;
    throw Error(ErrorCode::SyntaxError, "unknown overflow mode '" + std::string(v) + "'");
}

int parse_small_int(std::string_view key, std::string_view v) {
    if (v.empty() || v.size() > 6 ||
        !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw Error(ErrorCode::SyntaxError,
                    "expected a non-negative integer for '" + std::string(key) + "'");
    }
    return std::stoi(std::string(v));
}

}  // namespace

void FixedFormat::validate() const {
    if (total_bits < 1) {
        throw Error(ErrorCode::InvalidArgument, "fixed-point format needs b >= 1");
    }
    if (frac_bits < 0 || frac_bits > total_bits) {
        throw Error(ErrorCode::InvalidArgument, "fixed-point format needs 0 <= f <= b");
    }
}

BigInt FixedFormat::min_scaled() const { return -pow2_int(total_bits - 1); }
BigInt FixedFormat::max_scaled() const { return pow2_int(total_bits - 1) - 1; }
Rational FixedFormat::min_value() const { return Rational(min_scaled()).scaled_pow2(-frac_bits); }
Rational FixedFormat::max_value() const { return Rational(max_scaled()).scaled_pow2(-frac_bits); }

void FloatFormat::validate() const {
    if (mantissa_bits < 1) {
        throw Error(ErrorCode::InvalidArgument, "floating-point format needs m >= 1");
    }
    if (exponent_bits < 2) {
        throw Error(ErrorCode::InvalidArgument,
                    "floating-point format needs e >= 2 (e = 1 has an empty exponent range)");
    }
    if (exponent_bits > 30) {
        throw Error(ErrorCode::InvalidArgument, "exponent width above 30 is not supported");
    }
}

Rational FloatFormat::max_value() const {
    // 2^Emax * (2 - 2^-p)
    return Rational::pow2(max_exponent()) * (Rational(2) - Rational::pow2(-mantissa_bits));
}

std::string to_string(RoundingMode mode) {
    switch (mode) {
    case RoundingMode::TowardNegative: return "floor";
    case RoundingMode::TowardZero: return "trunc";
    case RoundingMode::NearestHalfUp: return "nearest";
    }
    return "?";
}

std::string to_string(OverflowMode mode) {
    return mode == OverflowMode::Saturate ? "sat" : "wrap";
}

ArithmeticFormat parse_format(std::string_view descriptor) {
    const auto colon = descriptor.find(':');
    if (colon == std::string_view::npos) {
        throw Error(ErrorCode::SyntaxError,
                    "arithmetic descriptor '" + std::string(descriptor) + "' lacks a kind prefix");
    }
    const auto kind = descriptor.substr(0, colon);
    std::map<std::string, std::string, std::less<>> fields;
    std::string_view rest = descriptor.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = rest.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw Error(ErrorCode::SyntaxError, "malformed descriptor field '" + std::string(item) + "'");
        }
        if (!fields.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1))).second) {
            throw Error(ErrorCode::SyntaxError, "duplicate descriptor field '" + std::string(item) + "'");
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    auto take = [&](std::string_view key) -> std::string {
        const auto it = fields.find(key);
        if (it == fields.end()) {
            throw Error(ErrorCode::SyntaxError, "descriptor is missing '" + std::string(key) + "'");
        }
        std::string v = it->second;
        fields.erase(it);
        return v;
    };
    ArithmeticFormat out;
    if (kind == "fix") {
        FixedFormat f;
        f.total_bits = parse_small_int("b", take("b"));
        f.frac_bits = parse_small_int("f", take("f"));
        f.rounding = parse_rounding(take("round"));
        f.overflow = parse_overflow(take("ovf"));
        f.validate();
        out = f;
    } else if (kind == "float") {
        FloatFormat f;
        f.mantissa_bits = parse_small_int("m", take("m"));
        f.exponent_bits = parse_small_int("e", take("e"));
        f.rounding = parse_rounding(take("round"));
        f.validate();
        out = f;
    } else {
        throw Error(ErrorCode::SyntaxError, "unknown arithmetic kind '" + std::string(kind) + "'");
    }
    if (!fields.empty()) {
        throw Error(ErrorCode::SyntaxError, "unknown descriptor field '" + fields.begin()->first + "'");
    }
    return out;
}

std::string to_string(const ArithmeticFormat& fmt) {
    std::ostringstream os;
    if (const auto* f = std::get_if<FixedFormat>(&fmt)) {
        os << "fix:b=" << f->total_bits << ",f=" << f->frac_bits << ",round=" << to_string(f->rounding)
           << ",ovf=" << to_string(f->overflow);
    } else {
        const auto& g = std::get<FloatFormat>(fmt);
        os << "float:m=" << g.mantissa_bits << ",e=" << g.exponent_bits
           << ",round=" << to_string(g.rounding);
    }
    return os.str();
}

std::size_t word_length(const ArithmeticFormat& fmt) {
    return std::visit([](const auto& f) { return f.word_length(); }, fmt);
}

bool is_fixed(const ArithmeticFormat& fmt) { return std::holds_alternative<FixedFormat>(fmt); }

long binary_exponent(const BigInt& p, const BigInt& q) {
    const BigInt a = abs(p);
    long v = static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 2)) -
             static_cast<long>(mpz_sizeinbase(q.get_mpz_t(), 2));
    // 2^v <= a/q < 2^(v+1) holds for v or v-1.
    BigInt lhs = a;
    BigInt rhs = q;
    if (v >= 0) {
        rhs <<= static_cast<mp_bitcnt_t>(v);
    } else {
        lhs <<= static_cast<mp_bitcnt_t>(-v);
    }
    if (lhs < rhs) --v;
    return v;
}

Rational round(const Rational& x, const ArithmeticFormat& fmt) {
    if (const auto* f = std::get_if<FixedFormat>(&fmt)) {
        return Rational(round_to_integer(x.scaled_pow2(f->frac_bits), f->rounding))
            .scaled_pow2(-f->frac_bits);
    }
    const auto& g = std::get<FloatFormat>(fmt);
    if (x.is_zero()) return x;
    const long v = binary_exponent(x.numerator(), x.denominator());
    const long shift = g.mantissa_bits - v;  // grid spacing is 2^(v-p)
    return Rational(round_to_integer(x.scaled_pow2(shift), g.rounding)).scaled_pow2(-shift);
}

Rational overflow(const Rational& x, const FixedFormat& fmt) {
    const Rational scaled = x.scaled_pow2(fmt.frac_bits);
    if (!scaled.is_integer()) {
        throw Error(ErrorCode::InvalidArgument,
                    "overflow expects a multiple of 2^-" + std::to_string(fmt.frac_bits) + ", got " +
                        x.to_string());
    }
    BigInt n = scaled.numerator();
    if (fmt.overflow == OverflowMode::Saturate) {
        n = std::clamp(n, fmt.min_scaled(), fmt.max_scaled());
    } else {
        const BigInt modulus = pow2_int(fmt.total_bits);
        n = mod_floor(n, modulus);
        if (n > fmt.max_scaled()) n -= modulus;
    }
    return Rational(n).scaled_pow2(-fmt.frac_bits);
}

Rational clamp_range(const Rational& x, const FloatFormat& fmt) {
    const Rational mag = x.abs();
    if (mag < fmt.min_normal()) return Rational(0);
    if (mag > fmt.max_value()) return x.sign() < 0 ? -fmt.max_value() : fmt.max_value();
    return x;
}

Rational quantize(const Rational& x, const ArithmeticFormat& fmt) {
    if (const auto* f = std::get_if<FixedFormat>(&fmt)) {
        return overflow(round(x, fmt), *f);
    }
    return clamp_range(round(x, fmt), std::get<FloatFormat>(fmt));
}

bool is_representable(const Rational& x, const ArithmeticFormat& fmt) {
    if (const auto* f = std::get_if<FixedFormat>(&fmt)) {
        const Rational s = x.scaled_pow2(f->frac_bits);
        return s.is_integer() && s.numerator() >= f->min_scaled() && s.numerator() <= f->max_scaled();
    }
    const auto& g = std::get<FloatFormat>(fmt);
    if (x.is_zero()) return true;
    const long v = binary_exponent(x.numerator(), x.denominator());
    if (v < g.min_exponent() || v > g.max_exponent()) return false;
    return x.scaled_pow2(g.mantissa_bits - v).is_integer();
}

std::vector<Rational> representable_values(const ArithmeticFormat& fmt) {
    std::vector<Rational> out;
    if (const auto* f = std::get_if<FixedFormat>(&fmt)) {
        for (BigInt n = f->min_scaled(); n <= f->max_scaled(); ++n) {
            out.push_back(Rational(n).scaled_pow2(-f->frac_bits));
        }
        return out;
    }
    const auto& g = std::get<FloatFormat>(fmt);
    const long count = 1L << g.mantissa_bits;
    std::vector<Rational> positive;
    for (long e = g.min_exponent(); e <= g.max_exponent(); ++e) {
        for (long k = 0; k < count; ++k) {
            positive.push_back(Rational(BigInt(count + k)).scaled_pow2(e - g.mantissa_bits));
        }
    }
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) out.push_back(-*it);
    out.emplace_back(0);
    out.insert(out.end(), positive.begin(), positive.end());
    return out;
}

Rational fmt_op(ArithOp op, const Rational& x, const Rational& y, const ArithmeticFormat& fmt) {
    Rational exact;
    switch (op) {
    case ArithOp::Add: exact = x + y; break;
    case ArithOp::Mul: exact = x * y; break;
    case ArithOp::Div: exact = x / y; break;  // throws DivisionByZero
    }
    return quantize(exact, fmt);
}

bool fmt_compare(Comparison rel, const Rational& x, const Rational& y, const ArithmeticFormat& fmt) {
    const Rational a = quantize(x, fmt);
    const Rational b = quantize(y, fmt);
    switch (rel) {
    case Comparison::Less: return a < b;
    case Comparison::LessEqual: return a <= b;
    case Comparison::Equal: return a == b;
    }
    return false;
}

std::string BitWord::to_string() const {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

BitWord BitWord::parse(std::string_view text) {
    BitWord w;
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw Error(ErrorCode::SyntaxError, "bit word contains '" + std::string(1, c) + "'");
        }
        w.bits.push_back(c == '1' ? 1 : 0);
    }
    return w;
}

BitWord encode(const Rational& x, const ArithmeticFormat& fmt) {
    if (!is_representable(x, fmt)) {
        throw Error(ErrorCode::NotRepresentable, x.to_string() + " is not representable in " + to_string(fmt));
    }
    BitWord w;
    if (const auto* f = std::get_if<FixedFormat>(&fmt)) {
        const BigInt n = x.scaled_pow2(f->frac_bits).numerator();
        for (int i = 0; i < f->total_bits; ++i) {
            w.bits.push_back(static_cast<std::uint8_t>(mpz_tstbit(n.get_mpz_t(), static_cast<mp_bitcnt_t>(i))));
        }
        return w;
    }
    const auto& g = std::get<FloatFormat>(fmt);
    w.bits.assign(g.word_length(), 0);
    if (x.is_zero()) return w;
    w.bits[0] = x.sign() < 0 ? 1 : 0;
    const long v = binary_exponent(x.numerator(), x.denominator());
    const long field = v + g.bias();
    for (int i = 0; i < g.exponent_bits; ++i) w.bits[1 + i] = static_cast<std::uint8_t>((field >> i) & 1);
    // Significand as an integer in [2^p, 2^(p+1)).
    const BigInt sig = x.abs().scaled_pow2(g.mantissa_bits - v).numerator();
    for (int j = 1; j <= g.mantissa_bits; ++j) {
        w.bits[g.exponent_bits + j] =
            static_cast<std::uint8_t>(mpz_tstbit(sig.get_mpz_t(), static_cast<mp_bitcnt_t>(g.mantissa_bits - j)));
    }
    return w;
}

Rational decode(const BitWord& word, const ArithmeticFormat& fmt) {
    if (word.size() != word_length(fmt)) {
        throw Error(ErrorCode::WidthMismatch, "word of length " + std::to_string(word.size()) +
                                                  " does not match " + to_string(fmt));
    }
    for (auto b : word.bits) {
        if (b > 1) throw Error(ErrorCode::InvalidArgument, "bit word entries must be 0 or 1");
    }
    if (const auto* f = std::get_if<FixedFormat>(&fmt)) {
        BigInt n = 0;
        for (int i = 0; i < f->total_bits; ++i) {
            if (!word[i]) continue;
            const BigInt weight = pow2_int(i);
            n += (i == f->total_bits - 1) ? BigInt(-weight) : weight;
        }
        return Rational(n).scaled_pow2(-f->frac_bits);
    }
    const auto& g = std::get<FloatFormat>(fmt);
    long field = 0;
    for (int i = 0; i < g.exponent_bits; ++i) field |= static_cast<long>(word[1 + i]) << i;
    BigInt mant = 0;
    for (int j = 1; j <= g.mantissa_bits; ++j) mant = mant * 2 + word[g.exponent_bits + j];
    if (field == 0) {
        if (mant != 0 || word[0]) {
            throw Error(ErrorCode::NotRepresentable,
                        "word " + word.to_string() + " is not a canonical encoding (only +0 uses a zero exponent field)");
        }
        return Rational(0);
    }
    if (field == (1L << g.exponent_bits) - 1) {
        throw Error(ErrorCode::NotRepresentable, "word " + word.to_string() + " uses the reserved exponent field");
    }
    const Rational mag = Rational(BigInt(pow2_int(g.mantissa_bits) + mant)).scaled_pow2(field - g.bias() - g.mantissa_bits);
    return word[0] ? -mag : mag;
}

int getbit_fixed(const BigInt& p, const BigInt& q, long t) {
    if (q <= 0) {
        throw Error(ErrorCode::InvalidArgument, "getbit_fixed needs q > 0");
    }
    if (t >= 0) {
        const BigInt a = floor_div(p, q);
        return mpz_tstbit(a.get_mpz_t(), static_cast<mp_bitcnt_t>(t));
    }
    // Fractional bit i = -t: r = p * 2^(i-1) mod q, bit = [2r >= q].
    const BigInt i_minus_one = BigInt(-(t + 1));
    BigInt power;
    const BigInt two = 2;
    mpz_powm(power.get_mpz_t(), two.get_mpz_t(), i_minus_one.get_mpz_t(), q.get_mpz_t());
    const BigInt r = mod_floor(mod_floor(p, q) * power, q);
    return 2 * r >= q ? 1 : 0;
}

int getbit_float(const BigInt& p, const BigInt& q, const FloatFormat& fmt, std::size_t position) {
    if (p == 0) {
        throw Error(ErrorCode::InvalidArgument, "getbit_float is undefined for zero");
    }
    if (q <= 0) {
        throw Error(ErrorCode::InvalidArgument, "getbit_float needs q > 0");
    }
    if (position >= fmt.word_length()) {
        throw Error(ErrorCode::IndexOutOfRange, "position " + std::to_string(position) + " outside the word");
    }
    if (position == 0) return p < 0 ? 1 : 0;
    const long v = binary_exponent(p, q);
    const bool over = v > fmt.max_exponent();
    const bool under = v < fmt.min_exponent();
    const auto e = static_cast<std::size_t>(fmt.exponent_bits);
    if (position <= e) {
        if (over) return 1;
        if (under) return 0;
        return static_cast<int>(((v + fmt.bias()) >> (position - 1)) & 1);
    }
    if (over || under) return 0;
    const long j = static_cast<long>(position - e);
    return getbit_fixed(abs(p), q, v - j);
}

}  // namespace qnnv

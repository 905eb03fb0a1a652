#pragma once

// Independent reference implementations. None of these call into the
// library routine they are used to check.

#include "qnnv/arithmetic.hpp"
#include "qnnv/bv.hpp"
#include "qnnv/lp.hpp"
#include "qnnv/reduction.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qnnv_test {

using qnnv::Rational;

// ---- Fourier-Motzkin ----

struct FmRow {
    std::vector<Rational> a;
    bool strict;
    Rational b;  // a.x < b or a.x <= b
};

inline bool fm_feasible(const qnnv::LinearProgram& lp) {
    std::vector<FmRow> rows;
    for (const auto& c : lp.constraints()) {
        std::vector<Rational> neg;
        for (const auto& v : c.coeffs) neg.push_back(-v);
        switch (c.rel) {
        case qnnv::Relation::Less: rows.push_back({c.coeffs, true, c.bound}); break;
        case qnnv::Relation::LessEqual: rows.push_back({c.coeffs, false, c.bound}); break;
        case qnnv::Relation::Greater: rows.push_back({neg, true, -c.bound}); break;
        case qnnv::Relation::GreaterEqual: rows.push_back({neg, false, -c.bound}); break;
        case qnnv::Relation::Equal:
            rows.push_back({c.coeffs, false, c.bound});
            rows.push_back({neg, false, -c.bound});
            break;
        }
    }
    for (std::size_t k = 0; k < lp.num_vars(); ++k) {
        std::vector<FmRow> pos, neg, next;
        for (auto& r : rows) {
            const int s = r.a[k].sign();
            (s > 0 ? pos : s < 0 ? neg : next).push_back(std::move(r));
        }
        for (const auto& p : pos) {
            for (const auto& n : neg) {
                const Rational sp = Rational(1) / p.a[k];
                const Rational sn = Rational(-1) / n.a[k];
                FmRow r{std::vector<Rational>(p.a.size()), p.strict || n.strict, p.b * sp + n.b * sn};
                for (std::size_t j = 0; j < r.a.size(); ++j) r.a[j] = p.a[j] * sp + n.a[j] * sn;
                r.a[k] = Rational(0);
                next.push_back(std::move(r));
            }
        }
        rows = std::move(next);
    }
    for (const auto& r : rows) {
        if (r.strict ? !(Rational(0) < r.b) : !(Rational(0) <= r.b)) return false;
    }
    return true;
}

// ---- 3-CNF truth table ----

inline std::optional<std::vector<bool>> truth_table_sat(const qnnv::Cnf3& cnf, std::size_t num_vars) {
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << num_vars); ++m) {
        bool all = true;
        for (const auto& clause : cnf.clauses) {
            bool any = false;
            for (const auto& lit : clause) any = any || (((m >> lit.var) & 1) != 0) == lit.positive;
            all = all && any;
        }
        if (all) {
            std::vector<bool> a(num_vars);
            for (std::size_t v = 0; v < num_vars; ++v) a[v] = (m >> v & 1) != 0;
            return a;
        }
    }
    return std::nullopt;
}

// ---- BV, one bit position at a time ----

inline int naive_term_bit(const qnnv::BvTerm& t, const qnnv::BvAssignment& theta, unsigned pos) {
    using K = qnnv::BvTerm::Kind;
    switch (t.kind) {
    case K::Var: return static_cast<int>(theta.values.at(t.var) >> pos & 1);
    case K::Const: return pos < 64 ? static_cast<int>(t.value >> pos & 1) : 0;
    case K::Not: return naive_term_bit(*t.lhs, theta, pos) ? 0 : 1;
    case K::And: return naive_term_bit(*t.lhs, theta, pos) && naive_term_bit(*t.rhs, theta, pos);
    case K::Or: return naive_term_bit(*t.lhs, theta, pos) || naive_term_bit(*t.rhs, theta, pos);
    case K::Xor: return naive_term_bit(*t.lhs, theta, pos) != naive_term_bit(*t.rhs, theta, pos);
    }
    return 0;
}

inline bool naive_holds(const qnnv::BvNode& n, const qnnv::BvAssignment& theta) {
    using K = qnnv::BvNode::Kind;
    switch (n.kind) {
    case K::Eq:
    case K::Neq: {
        bool same = true;
        for (unsigned pos = 0; pos < theta.width; ++pos) {
            same = same && naive_term_bit(*n.lhs, theta, pos) == naive_term_bit(*n.rhs, theta, pos);
        }
        return same == (n.kind == K::Eq);
    }
    case K::Not: return !naive_holds(*n.children.at(0), theta);
    case K::And:
        for (const auto& c : n.children) {
            if (!naive_holds(*c, theta)) return false;
        }
        return true;
    case K::Or:
        for (const auto& c : n.children) {
            if (naive_holds(*c, theta)) return true;
        }
        return false;
    }
    return false;
}

// ---- bits by long division ----

/// Bit of weight 2^t of floor(p/q) in two's complement, by schoolbook
/// division one binary digit at a time.
inline int long_division_bit(__int128 p, unsigned __int128 q, long t) {
    const bool negative = p < 0;
    const unsigned __int128 a = negative ? static_cast<unsigned __int128>(-p) : static_cast<unsigned __int128>(p);
    unsigned __int128 quotient = a / q;
    unsigned __int128 rem = a % q;
    int last = static_cast<int>(quotient & 1);
    if (t >= 0) {
        // floor(a/q / 2^t) for the magnitude; remainder tracks whether anything was dropped.
        bool dropped = rem != 0;
        for (long i = 0; i < t && quotient != 0; ++i) {
            dropped = dropped || (quotient & 1);
            quotient >>= 1;
        }
        if (t >= 128) quotient = 0;
        if (!negative) return static_cast<int>(quotient & 1);
        // floor(-m) = -(floor m) - [m not integer]
        const unsigned __int128 mag = quotient + (dropped ? 1 : 0);
        return static_cast<int>(mag & 1);  // -mag and mag share the low bit
    }
    for (long i = 0; i < -t; ++i) {
        rem <<= 1;
        last = rem >= q ? 1 : 0;
        if (last) rem -= q;
    }
    if (!negative) return last;
    return (last + (rem != 0 ? 1 : 0)) & 1;
}

// ---- quantisation by scanning the grid ----

/// Quantisation by search over the representable values; saturating fixed
/// point only.
inline Rational scan_quantize_fixed(const Rational& x, const qnnv::FixedFormat& fmt) {
    const auto values = qnnv::representable_values(fmt);
    using qnnv::RoundingMode;
    std::optional<Rational> below, above;  // nearest value <= x and >= x
    for (const auto& v : values) {
        if (v <= x) below = v;
        if (v >= x && !above) above = v;
    }
    if (!below) return values.front();
    if (!above) return values.back();
    switch (fmt.rounding) {
    case RoundingMode::TowardNegative: return *below;
    case RoundingMode::TowardZero: return x.sign() >= 0 ? *below : *above;
    case RoundingMode::NearestHalfUp: return (x - *below) < (*above - x) ? *below : *above;
    }
    return x;
}

/// round() for fixed point, then wrap by repeatedly adding or subtracting 2^(b-f).
inline Rational modulo_wrap(const Rational& rounded, const qnnv::FixedFormat& fmt) {
    const Rational span = Rational::pow2(fmt.total_bits - fmt.frac_bits);
    const Rational lo = -Rational::pow2(fmt.total_bits - fmt.frac_bits - 1);
    const Rational hi = Rational::pow2(fmt.total_bits - fmt.frac_bits - 1);
    Rational v = rounded;
    while (v < lo) v += span;
    while (v >= hi) v -= span;
    return v;
}

/// Rounding onto the grid of mantissa steps in x's binade, found by
/// stepping through the 2^p grid points; then flush and saturation.
inline Rational scan_quantize_float(const Rational& x, const qnnv::FloatFormat& fmt) {
    if (x.is_zero()) return x;
    const Rational mag = x.abs();
    long e = 0;
    while (Rational::pow2(e) > mag) --e;
    while (Rational::pow2(e + 1) <= mag) ++e;
    const Rational step = Rational::pow2(e - fmt.mantissa_bits);
    Rational lo = Rational::pow2(e);
    while (lo + step <= mag) lo += step;
    const Rational hi = lo == mag ? lo : lo + step;
    Rational r;
    using qnnv::RoundingMode;
    switch (fmt.rounding) {
    case RoundingMode::TowardZero: r = lo; break;
    case RoundingMode::TowardNegative: r = x.sign() > 0 ? lo : hi; break;
    case RoundingMode::NearestHalfUp:
        // ties go toward +infinity: up in magnitude for positives, down for negatives
        if (mag - lo < hi - mag) r = lo;
        else if (mag - lo > hi - mag) r = hi;
        else r = x.sign() > 0 ? hi : lo;
        break;
    }
    if (r < fmt.min_normal()) return Rational(0);
    if (r > fmt.max_value()) r = fmt.max_value();
    return x.sign() > 0 ? r : -r;
}

}  // namespace qnnv_test

#include "qnnv/rational.hpp"

#include "qnnv/error.hpp"

#include <cctype>
#include <ostream>
#include <sstream>

namespace qnnv {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

}  // namespace

Rational::Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) {
        throw Error(ErrorCode::DivisionByZero, "rational with zero denominator");
    }
    value_ = mpq_class(num, den);
    value_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    const std::string original(s);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    Rational result;
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const auto num = s.substr(0, slash);
        const auto den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) {
            throw Error(ErrorCode::SyntaxError, "malformed rational '" + original + "'");
        }
        const BigInt d{std::string(den)};
        if (d == 0) {
            throw Error(ErrorCode::DivisionByZero, "rational '" + original + "' has zero denominator");
        }
        result = Rational(BigInt(std::string(num)), d);
    } else if (const auto dot = s.find('.'); dot != std::string_view::npos) {
        const auto whole = s.substr(0, dot);
        const auto frac = s.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac)) {
            throw Error(ErrorCode::SyntaxError, "malformed decimal '" + original + "'");
        }
        BigInt scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        const BigInt w = whole.empty() ? BigInt(0) : BigInt(std::string(whole));
        result = Rational(w * scale + BigInt(std::string(frac)), scale);
    } else {
        if (!all_digits(s)) {
            throw Error(ErrorCode::SyntaxError, "malformed rational '" + original + "'");
        }
        result = Rational(BigInt(std::string(s)));
    }
    return negative ? -result : result;
}

Rational Rational::pow2(long exponent) { return Rational(1).scaled_pow2(exponent); }

BigInt Rational::floor() const { return floor_div(value_.get_num(), value_.get_den()); }

BigInt Rational::ceil() const { return -floor_div(-value_.get_num(), value_.get_den()); }

Rational Rational::scaled_pow2(long k) const {
    mpq_class out;
    if (k >= 0) {
        mpq_mul_2exp(out.get_mpq_t(), value_.get_mpq_t(), static_cast<mp_bitcnt_t>(k));
    } else {
        mpq_div_2exp(out.get_mpq_t(), value_.get_mpq_t(), static_cast<mp_bitcnt_t>(-k));
    }
    return Rational(out);
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) {
        throw Error(ErrorCode::DivisionByZero, "division of " + to_string() + " by zero");
    }
    value_ /= o.value_;
    return *this;
}

std::string Rational::to_string() const { return value_.get_str(); }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

std::string to_string(const RationalVector& v, std::string_view sep) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << sep;
        os << v[i];
    }
    return os.str();
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

BigInt mod_floor(const BigInt& a, const BigInt& b) {
    BigInt r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

}  // namespace qnnv

#include "qnnv/lp.hpp"

#include "qnnv/error.hpp"
#include "qnnv/simplex.hpp"
#include "qnnv/text.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qnnv {

std::string_view to_string(Relation rel) {
    switch (rel) {
    case Relation::Less: return "<";
    case Relation::LessEqual: return "<=";
    case Relation::Equal: return "=";
    case Relation::GreaterEqual: return ">=";
    case Relation::Greater: return ">";
    }
    return "?";
}

void LinearProgram::add(LinearConstraint c) {
    if (c.coeffs.size() != num_vars_) {
        throw Error(ErrorCode::DimensionMismatch, "constraint has " + std::to_string(c.coeffs.size()) +
                                                      " coefficients, program has " + std::to_string(num_vars_) +
                                                      " variables");
    }
    constraints_.push_back(std::move(c));
}

void LinearProgram::append(const LinearProgram& other) {
    if (other.num_vars_ != num_vars_) {
        throw Error(ErrorCode::DimensionMismatch, "cannot conjoin programs over different variable counts");
    }
    constraints_.insert(constraints_.end(), other.constraints_.begin(), other.constraints_.end());
}

namespace {

enum class TokKind { Number, Var, Plus, Minus, Star, Rel, And, End };

struct Token {
    TokKind kind;
    std::string text;
    std::size_t line;
    std::size_t col;
};

class LpLexer {
public:
    explicit LpLexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == '\n') {
                out.push_back({TokKind::And, "\\n", line_, col_});
                advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                out.push_back(number());
            } else if (c == 'x') {
                const auto l = line_, cl = col_;
                advance();
                std::string digits;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    digits.push_back(text_[pos_]);
                    advance();
                }
                if (digits.empty()) fail(l, cl, "variable names are x<index>");
                out.push_back({TokKind::Var, digits, l, cl});
            } else if (c == '+') {
                out.push_back({TokKind::Plus, "+", line_, col_});
                advance();
            } else if (c == '-') {
                out.push_back({TokKind::Minus, "-", line_, col_});
                advance();
            } else if (c == '*') {
                out.push_back({TokKind::Star, "*", line_, col_});
                advance();
            } else if (c == '/' && peek(1) == '\\') {
                out.push_back({TokKind::And, "/\\", line_, col_});
                advance();
                advance();
            } else if (c == '<' || c == '>' || c == '=') {
                const auto l = line_, cl = col_;
                std::string op(1, c);
                advance();
                if (pos_ < text_.size() && text_[pos_] == '=') {
                    op.push_back('=');
                    advance();
                }
                if (op == "==") op = "=";
                out.push_back({TokKind::Rel, op, l, cl});
            } else {
                fail(line_, col_, std::string("unexpected character '") + c + "'");
            }
        }
        out.push_back({TokKind::End, "", line_, col_});
        return out;
    }

    [[noreturn]] static void fail(std::size_t line, std::size_t col, const std::string& msg) {
        throw Error(ErrorCode::SyntaxError, "line " + std::to_string(line) + " col " + std::to_string(col) + ": " + msg);
    }

private:
    char peek(std::size_t ahead) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    Token number() {
        const auto l = line_, cl = col_;
        std::string s;
        auto digits = [&] {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                s.push_back(text_[pos_]);
                advance();
            }
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            s.push_back('.');
            advance();
            digits();
        } else if (pos_ < text_.size() && text_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            s.push_back('/');
            advance();
            digits();
        }
        return {TokKind::Number, s, l, cl};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

struct LinearExpr {
    std::vector<std::pair<std::size_t, Rational>> terms;  // (0-based var, coefficient)
    Rational constant;
};

class LpParser {
public:
    explicit LpParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    struct Raw {
        LinearExpr lhs;
        Relation rel;
        LinearExpr rhs;
    };

    std::vector<Raw> run() {
        std::vector<Raw> out;
        skip_separators();
        while (cur().kind != TokKind::End) {
            Raw r;
            r.lhs = expr();
            if (cur().kind != TokKind::Rel) error("expected a relation (<, <=, =, >=, >)");
            r.rel = relation(cur().text);
            ++pos_;
            r.rhs = expr();
            out.push_back(std::move(r));
            if (cur().kind != TokKind::End && cur().kind != TokKind::And) {
                error("expected '/\\' or end of line after constraint");
            }
            skip_separators();
        }
        return out;
    }

    std::size_t max_var() const { return max_var_; }

private:
    const Token& cur() const { return toks_[pos_]; }

    [[noreturn]] void error(const std::string& msg) const {
        const Token& t = cur();
        LpLexer::fail(t.line, t.col, msg + (t.kind == TokKind::End ? " at end of input" : ", found '" + t.text + "'"));
    }

    void skip_separators() {
        while (cur().kind == TokKind::And) ++pos_;
    }

    static Relation relation(const std::string& s) {
        if (s == "<") return Relation::Less;
        if (s == "<=") return Relation::LessEqual;
        if (s == "=") return Relation::Equal;
        if (s == ">=") return Relation::GreaterEqual;
        return Relation::Greater;
    }

    LinearExpr expr() {
        LinearExpr e;
        bool first = true;
        while (true) {
            Rational sign = 1;
            if (cur().kind == TokKind::Plus || cur().kind == TokKind::Minus) {
                sign = cur().kind == TokKind::Minus ? -1 : 1;
                ++pos_;
            } else if (!first) {
                break;
            }
            term(e, sign);
            first = false;
        }
        return e;
    }

    void term(LinearExpr& e, const Rational& sign) {
        if (cur().kind == TokKind::Number) {
            Rational value;
            try {
                value = Rational::parse(cur().text);
            } catch (const Error&) {
                error("malformed number");
            }
            ++pos_;
            if (cur().kind == TokKind::Star) {
                ++pos_;
                if (cur().kind != TokKind::Var) error("expected a variable after '*'");
            }
            if (cur().kind == TokKind::Var) {
                e.terms.emplace_back(var_index(), sign * value);
                ++pos_;
            } else {
                e.constant += sign * value;
            }
            return;
        }
        if (cur().kind == TokKind::Var) {
            e.terms.emplace_back(var_index(), sign);
            ++pos_;
            return;
        }
        error("expected a number or variable");
    }

    std::size_t var_index() {
        const long idx = std::stol(cur().text);
        if (idx < 1) error("variable indices start at 1");
        max_var_ = std::max(max_var_, static_cast<std::size_t>(idx));
        return static_cast<std::size_t>(idx - 1);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t max_var_ = 0;
};

}  // namespace

LinearProgram parse_lp(std::string_view text, std::optional<std::size_t> num_vars) {
    LpParser parser(LpLexer(text).run());
    const auto raws = parser.run();
    const std::size_t n = num_vars.value_or(parser.max_var());
    if (parser.max_var() > n) {
        throw Error(ErrorCode::SyntaxError, "constraint mentions x" + std::to_string(parser.max_var()) +
                                                " but only " + std::to_string(n) + " variables are bound");
    }
    LinearProgram lp(n);
    for (const auto& r : raws) {
        LinearConstraint c;
        c.coeffs.assign(n, Rational(0));
        for (const auto& [v, a] : r.lhs.terms) c.coeffs[v] += a;
        for (const auto& [v, a] : r.rhs.terms) c.coeffs[v] -= a;
        c.rel = r.rel;
        c.bound = r.rhs.constant - r.lhs.constant;
        lp.add(std::move(c));
    }
    return lp;
}

std::string write_lp(const LinearProgram& lp) {
    std::ostringstream os;
    for (const auto& c : lp.constraints()) {
        bool any = false;
        for (std::size_t j = 0; j < c.coeffs.size(); ++j) {
            const Rational& a = c.coeffs[j];
            if (a.is_zero()) continue;
            const Rational mag = a.abs();
            if (any) {
                os << (a.sign() < 0 ? " - " : " + ");
            } else if (a.sign() < 0) {
                os << '-';
            }
            if (mag != Rational(1)) os << mag << '*';
            os << 'x' << j + 1;
            any = true;
        }
        if (!any) os << '0';
        os << ' ' << to_string(c.rel) << ' ' << c.bound << '\n';
    }
    return os.str();
}

namespace {

Rational lhs_value(const LinearConstraint& c, const RationalVector& x) {
    Rational acc;
    for (std::size_t j = 0; j < c.coeffs.size(); ++j) {
        if (!c.coeffs[j].is_zero()) acc += c.coeffs[j] * x[j];
    }
    return acc;
}

void check_assignment(const LinearProgram& lp, const RationalVector& x) {
    if (x.size() < lp.num_vars()) {
        throw Error(ErrorCode::MissingVariable, "assignment covers " + std::to_string(x.size()) + " of " +
                                                    std::to_string(lp.num_vars()) + " variables");
    }
}

}  // namespace

bool check_lp(const LinearProgram& lp, const RationalVector& assignment) {
    check_assignment(lp, assignment);
    for (const auto& c : lp.constraints()) {
        const Rational v = lhs_value(c, assignment);
        bool ok = false;
        switch (c.rel) {
        case Relation::Less: ok = v < c.bound; break;
        case Relation::LessEqual: ok = v <= c.bound; break;
        case Relation::Equal: ok = v == c.bound; break;
        case Relation::GreaterEqual: ok = v >= c.bound; break;
        case Relation::Greater: ok = v > c.bound; break;
        }
        if (!ok) return false;
    }
    return true;
}

LinearProgram quantise_lp(const LinearProgram& lp, const ArithmeticFormat& fmt) {
    LinearProgram out(lp.num_vars());
    for (const auto& c : lp.constraints()) {
        LinearConstraint q = c;
        for (auto& a : q.coeffs) a = quantize(a, fmt);
        q.bound = quantize(q.bound, fmt);
        out.add(std::move(q));
    }
    return out;
}

bool check_lp_quantised(const LinearProgram& lp, const RationalVector& assignment, const ArithmeticFormat& fmt) {
    check_assignment(lp, assignment);
    for (const auto& c : lp.constraints()) {
        const Rational v = lhs_value(c, assignment);
        bool ok = false;
        switch (c.rel) {
        case Relation::Less: ok = fmt_compare(Comparison::Less, v, c.bound, fmt); break;
        case Relation::LessEqual: ok = fmt_compare(Comparison::LessEqual, v, c.bound, fmt); break;
        case Relation::Equal: ok = fmt_compare(Comparison::Equal, v, c.bound, fmt); break;
        case Relation::GreaterEqual: ok = fmt_compare(Comparison::LessEqual, c.bound, v, fmt); break;
        case Relation::Greater: ok = fmt_compare(Comparison::Less, c.bound, v, fmt); break;
        }
        if (!ok) return false;
    }
    return true;
}

std::optional<RationalVector> feasible(const LinearProgram& lp) {
    const std::size_t n = lp.num_vars();
    const bool strict = std::any_of(lp.constraints().begin(), lp.constraints().end(), [](const auto& c) {
        return c.rel == Relation::Less || c.rel == Relation::Greater;
    });
    // Columns: u (n), v (n) with x = u - v, then delta when strict rows exist.
    const std::size_t cols = 2 * n + (strict ? 1 : 0);
    std::vector<LpRow> rows;
    rows.reserve(lp.constraints().size() + 1);
    for (const auto& c : lp.constraints()) {
        LpRow row;
        row.coeffs.assign(cols, Rational(0));
        for (std::size_t j = 0; j < n; ++j) {
            row.coeffs[j] = c.coeffs[j];
            row.coeffs[n + j] = -c.coeffs[j];
        }
        row.rhs = c.bound;
        switch (c.rel) {
        case Relation::Less:
            row.coeffs[2 * n] = 1;
            row.sense = RowSense::LessEqual;
            break;
        case Relation::LessEqual: row.sense = RowSense::LessEqual; break;
        case Relation::Equal: row.sense = RowSense::Equal; break;
        case Relation::GreaterEqual: row.sense = RowSense::GreaterEqual; break;
        case Relation::Greater:
            row.coeffs[2 * n] = -1;
            row.sense = RowSense::GreaterEqual;
            break;
        }
        rows.push_back(std::move(row));
    }
    RationalVector objective(cols, Rational(0));
    if (strict) {
        LpRow cap;
        cap.coeffs.assign(cols, Rational(0));
        cap.coeffs[2 * n] = 1;
        cap.rhs = 1;
        rows.push_back(std::move(cap));
        objective[2 * n] = 1;
    }
    const SimplexResult res = maximize(cols, rows, objective);
    if (res.status == SimplexStatus::Infeasible) return std::nullopt;
    if (res.status == SimplexStatus::Unbounded) {
        throw Error(ErrorCode::Internal, "bounded slack objective reported unbounded");
    }
    if (strict && res.objective.sign() <= 0) return std::nullopt;
    RationalVector x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = res.point[j] - res.point[n + j];
    return x;
}

LpSpec parse_lp_spec(std::string_view text, std::size_t input_dim, std::size_t output_dim) {
    std::string in_text;
    std::string out_text;
    std::string* target = nullptr;
    bool seen_in = false;
    bool seen_out = false;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        const std::string raw(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        ++number;
        const std::string t = trim(raw.substr(0, raw.find('#')));
        if (t == "format=1" && target == nullptr) {
            // version header
        } else if (t == "@in") {
            if (seen_in) throw Error(ErrorCode::SyntaxError, "line " + std::to_string(number) + ": duplicate @in");
            seen_in = true;
            target = &in_text;
        } else if (t == "@out") {
            if (seen_out) throw Error(ErrorCode::SyntaxError, "line " + std::to_string(number) + ": duplicate @out");
            seen_out = true;
            target = &out_text;
        } else if (!t.empty()) {
            if (target == nullptr) {
                throw Error(ErrorCode::SyntaxError,
                            "line " + std::to_string(number) + ": constraint outside an @in/@out section");
            }
        }
        // Keep line numbering intact inside each section for error messages.
        for (std::string* s : {&in_text, &out_text}) {
            if (s == target && t != "@in" && t != "@out") {
                *s += raw;
            }
            *s += '\n';
        }
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    LpSpec spec;
    spec.input = parse_lp(in_text, input_dim);
    spec.output = parse_lp(out_text, output_dim);
    return spec;
}

std::string write_lp_spec(const LpSpec& spec) {
    return "format=1\n@in\n" + write_lp(spec.input) + "@out\n" + write_lp(spec.output);
}

}  // namespace qnnv

#include "qnnv/bv.hpp"

#include "qnnv/error.hpp"
#include "qnnv/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace qnnv {

BvTermPtr BvTerm::variable(std::size_t index) {
    auto t = std::make_shared<BvTerm>();
    t->kind = Kind::Var;
    t->var = index;
    return t;
}

BvTermPtr BvTerm::constant(std::uint64_t value) {
    auto t = std::make_shared<BvTerm>();
    t->kind = Kind::Const;
    t->value = value;
    return t;
}

BvTermPtr BvTerm::negate(BvTermPtr a) {
    auto t = std::make_shared<BvTerm>();
    t->kind = Kind::Not;
    t->lhs = std::move(a);
    return t;
}

BvTermPtr BvTerm::binary(Kind kind, BvTermPtr a, BvTermPtr b) {
    auto t = std::make_shared<BvTerm>();
    t->kind = kind;
    t->lhs = std::move(a);
    t->rhs = std::move(b);
    return t;
}

BvNodePtr BvNode::atom(bool equal, BvTermPtr a, BvTermPtr b) {
    auto n = std::make_shared<BvNode>();
    n->kind = equal ? Kind::Eq : Kind::Neq;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

BvNodePtr BvNode::negate(BvNodePtr a) {
    auto n = std::make_shared<BvNode>();
    n->kind = Kind::Not;
    n->children.push_back(std::move(a));
    return n;
}

BvNodePtr BvNode::junction(Kind kind, std::vector<BvNodePtr> children) {
    auto n = std::make_shared<BvNode>();
    n->kind = kind;
    n->children = std::move(children);
    return n;
}

namespace {

enum class Tok { Ident, Number, Tilde, Bang, Amp, Pipe, Caret, Eq, Neq, LParen, RParen, Conj, Disj, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t col;
};

[[noreturn]] void syntax(std::size_t line, std::size_t col, const std::string& msg) {
    throw Error(ErrorCode::SyntaxError, "line " + std::to_string(line) + " col " + std::to_string(col) + ": " + msg);
}

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto push = [&](Tok k, std::size_t len) {
        out.push_back({k, std::string(s.substr(i, len)), line, col});
        i += len;
        col += len;
    };
    while (i < s.size()) {
        const char c = s[i];
        const char n = i + 1 < s.size() ? s[i + 1] : '\0';
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
        } else if (c == '#') {
            while (i < s.size() && s[i] != '\n') ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            ++col;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            push(Tok::Ident, j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j]))) ++j;
            push(Tok::Number, j - i);
        } else if (c == '/' && n == '\\') {
            push(Tok::Conj, 2);
        } else if (c == '\\' && n == '/') {
            push(Tok::Disj, 2);
        } else if (c == '&' && n == '&') {
            push(Tok::Conj, 2);
        } else if (c == '|' && n == '|') {
            push(Tok::Disj, 2);
        } else if (c == '!' && n == '=') {
            push(Tok::Neq, 2);
        } else if (c == '=' && n == '=') {
            push(Tok::Eq, 2);
        } else {
            switch (c) {
            case '~': push(Tok::Tilde, 1); break;
            case '!': push(Tok::Bang, 1); break;
            case '&': push(Tok::Amp, 1); break;
            case '|': push(Tok::Pipe, 1); break;
            case '^': push(Tok::Caret, 1); break;
            case '=': push(Tok::Eq, 1); break;
            case '(': push(Tok::LParen, 1); break;
            case ')': push(Tok::RParen, 1); break;
            default: syntax(line, col, std::string("unexpected character '") + c + "'");
            }
        }
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

std::uint64_t parse_constant(const Token& t, unsigned width) {
    const std::string& s = t.text;
    int base = 10;
    std::size_t start = 0;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B')) {
        base = 2;
        start = 2;
    } else if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        base = 16;
        start = 2;
    }
    bool overflow = false;
    std::uint64_t v = 0;
    for (std::size_t i = start; i < s.size(); ++i) {
        const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
        int d;
        if (c >= '0' && c <= '9') {
            d = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            d = c - 'a' + 10;
        } else {
            d = 99;
        }
        if (d >= base) syntax(t.line, t.col, "malformed constant '" + s + "'");
        if (v > (~std::uint64_t{0} - static_cast<std::uint64_t>(d)) / static_cast<std::uint64_t>(base)) overflow = true;
        v = v * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(d);
    }
    if (overflow || (width < 64 && (v >> width) != 0)) {
        throw Error(ErrorCode::ConstantTooWide, "line " + std::to_string(t.line) + " col " + std::to_string(t.col) +
                                                    ": constant " + s + " does not fit in " + std::to_string(width) +
                                                    " bits");
    }
    return v;
}

class Parser {
public:
    Parser(std::vector<Token> toks, unsigned width, std::optional<std::vector<std::string>> vars)
        : toks_(std::move(toks)), width_(width), declared_(vars.has_value()) {
        if (vars) {
            names_ = std::move(*vars);
            for (std::size_t i = 0; i < names_.size(); ++i) index_[names_[i]] = i;
        }
    }

    BvNodePtr run() {
        if (cur().kind == Tok::End) return BvNode::junction(BvNode::Kind::And, {});
        BvNodePtr f = disjunction();
        if (cur().kind != Tok::End) fail("unexpected token");
        return f;
    }

    std::vector<std::string> names() const { return names_; }

private:
    struct Failure {
        std::size_t pos;
        std::string message;
    };

    const Token& cur() const { return toks_[pos_]; }

    [[noreturn]] void fail(const std::string& msg) {
        const Token& t = cur();
        const std::string full = msg + (t.kind == Tok::End ? " at end of input" : ", found '" + t.text + "'");
        if (!furthest_ || pos_ >= furthest_->pos) furthest_ = Failure{pos_, "line " + std::to_string(t.line) + " col " +
                                                                            std::to_string(t.col) + ": " + full};
        throw Error(ErrorCode::SyntaxError, furthest_->message);
    }

    void expect(Tok k, const char* what) {
        if (cur().kind != k) fail(std::string("expected ") + what);
        ++pos_;
    }

    BvNodePtr disjunction() {
        std::vector<BvNodePtr> parts{conjunction()};
        while (cur().kind == Tok::Disj) {
            ++pos_;
            parts.push_back(conjunction());
        }
        return parts.size() == 1 ? parts[0] : BvNode::junction(BvNode::Kind::Or, std::move(parts));
    }

    BvNodePtr conjunction() {
        std::vector<BvNodePtr> parts{unary()};
        while (cur().kind == Tok::Conj) {
            ++pos_;
            parts.push_back(unary());
        }
        return parts.size() == 1 ? parts[0] : BvNode::junction(BvNode::Kind::And, std::move(parts));
    }

    BvNodePtr unary() {
        if (cur().kind == Tok::Ident && (cur().text == "true" || cur().text == "false") && !index_.count(cur().text)) {
            const bool value = cur().text == "true";
            ++pos_;
            return BvNode::junction(value ? BvNode::Kind::And : BvNode::Kind::Or, {});
        }
        if (cur().kind == Tok::Bang) {
            ++pos_;
            return BvNode::negate(unary());
        }
        if (cur().kind == Tok::Tilde || cur().kind == Tok::LParen) {
            // Either a term (~x = y, (x & y) = z) or a formula (~(x = y), (x = y)).
            const std::size_t save = pos_;
            try {
                return atom();
            } catch (const Error& e) {
                if (e.code() != ErrorCode::SyntaxError) throw;
            }
            pos_ = save;
            if (cur().kind == Tok::Tilde) {
                ++pos_;
                return BvNode::negate(unary());
            }
            ++pos_;
            BvNodePtr f = disjunction();
            expect(Tok::RParen, "')'");
            return f;
        }
        return atom();
    }

    BvNodePtr atom() {
        BvTermPtr a = term_or();
        bool equal;
        if (cur().kind == Tok::Eq) {
            equal = true;
        } else if (cur().kind == Tok::Neq) {
            equal = false;
        } else {
            fail("expected '=' or '!='");
        }
        ++pos_;
        BvTermPtr b = term_or();
        return BvNode::atom(equal, std::move(a), std::move(b));
    }

    BvTermPtr term_or() {
        BvTermPtr t = term_xor();
        while (cur().kind == Tok::Pipe) {
            ++pos_;
            t = BvTerm::binary(BvTerm::Kind::Or, t, term_xor());
        }
        return t;
    }

    BvTermPtr term_xor() {
        BvTermPtr t = term_and();
        while (cur().kind == Tok::Caret) {
            ++pos_;
            t = BvTerm::binary(BvTerm::Kind::Xor, t, term_and());
        }
        return t;
    }

    BvTermPtr term_and() {
        BvTermPtr t = term_unary();
        while (cur().kind == Tok::Amp) {
            ++pos_;
            t = BvTerm::binary(BvTerm::Kind::And, t, term_unary());
        }
        return t;
    }

    BvTermPtr term_unary() {
        switch (cur().kind) {
        case Tok::Tilde:
            ++pos_;
            return BvTerm::negate(term_unary());
        case Tok::LParen: {
            ++pos_;
            BvTermPtr t = term_or();
            expect(Tok::RParen, "')'");
            return t;
        }
        case Tok::Number: {
            const auto v = parse_constant(cur(), width_);
            ++pos_;
            return BvTerm::constant(v);
        }
        case Tok::Ident: {
            const std::string& name = cur().text;
            auto it = index_.find(name);
            if (it == index_.end() && (name == "true" || name == "false")) fail("expected a term");
            if (it == index_.end()) {
                if (declared_) {
                    throw Error(ErrorCode::UnboundVariable, "line " + std::to_string(cur().line) + " col " +
                                                                std::to_string(cur().col) + ": variable '" + name +
                                                                "' is not declared");
                }
                it = index_.emplace(name, names_.size()).first;
                names_.push_back(name);
            }
            ++pos_;
            return BvTerm::variable(it->second);
        }
        default: fail("expected a term");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    unsigned width_;
    bool declared_;
    std::vector<std::string> names_;
    std::map<std::string, std::size_t> index_;
    std::optional<Failure> furthest_;
};

void check_width(unsigned width) {
    if (width == 0 || width > 64) {
        throw Error(ErrorCode::InvalidArgument, "bit-vector width must be in 1..64, got " + std::to_string(width));
    }
}

}  // namespace

BvFormula parse_bv(std::string_view text, unsigned width, std::optional<std::vector<std::string>> vars) {
    check_width(width);
    Parser p(lex(text), width, std::move(vars));
    BvFormula phi;
    phi.width = width;
    phi.root = p.run();
    phi.vars = p.names();
    return phi;
}

namespace {

void print_term(std::ostream& os, const BvFormula& phi, const BvTerm& t) {
    switch (t.kind) {
    case BvTerm::Kind::Var: os << phi.vars.at(t.var); return;
    case BvTerm::Kind::Const: os << t.value; return;
    case BvTerm::Kind::Not:
        os << '~';
        print_term(os, phi, *t.lhs);
        return;
    default: break;
    }
    const char op = t.kind == BvTerm::Kind::And ? '&' : t.kind == BvTerm::Kind::Or ? '|' : '^';
    os << '(';
    print_term(os, phi, *t.lhs);
    os << ' ' << op << ' ';
    print_term(os, phi, *t.rhs);
    os << ')';
}

void print_node(std::ostream& os, const BvFormula& phi, const BvNode& n) {
    switch (n.kind) {
    case BvNode::Kind::Eq:
    case BvNode::Kind::Neq:
        print_term(os, phi, *n.lhs);
        os << (n.kind == BvNode::Kind::Eq ? " = " : " != ");
        print_term(os, phi, *n.rhs);
        return;
    case BvNode::Kind::Not:
        os << "!(";
        print_node(os, phi, *n.children[0]);
        os << ')';
        return;
    case BvNode::Kind::And:
    case BvNode::Kind::Or:
        if (n.children.empty()) {
            os << (n.kind == BvNode::Kind::And ? "true" : "false");
            return;
        }
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i) os << (n.kind == BvNode::Kind::And ? " /\\ " : " \\/ ");
            os << '(';
            print_node(os, phi, *n.children[i]);
            os << ')';
        }
        return;
    }
}

}  // namespace

std::string to_string(const BvFormula& phi, const BvTermPtr& t) {
    std::ostringstream os;
    print_term(os, phi, *t);
    return os.str();
}

std::string to_string(const BvFormula& phi) {
    std::ostringstream os;
    print_node(os, phi, *phi.root);
    return os.str();
}

std::uint64_t eval_term(const BvTerm& t, const BvAssignment& theta, std::uint64_t mask) {
    switch (t.kind) {
    case BvTerm::Kind::Var: return theta.values[t.var] & mask;
    case BvTerm::Kind::Const: return t.value & mask;
    case BvTerm::Kind::Not: return ~eval_term(*t.lhs, theta, mask) & mask;
    case BvTerm::Kind::And: return eval_term(*t.lhs, theta, mask) & eval_term(*t.rhs, theta, mask);
    case BvTerm::Kind::Or: return eval_term(*t.lhs, theta, mask) | eval_term(*t.rhs, theta, mask);
    case BvTerm::Kind::Xor: return eval_term(*t.lhs, theta, mask) ^ eval_term(*t.rhs, theta, mask);
    }
    return 0;
}

namespace {

bool eval_node(const BvNode& n, const BvAssignment& theta, std::uint64_t mask) {
    switch (n.kind) {
    case BvNode::Kind::Eq: return eval_term(*n.lhs, theta, mask) == eval_term(*n.rhs, theta, mask);
    case BvNode::Kind::Neq: return eval_term(*n.lhs, theta, mask) != eval_term(*n.rhs, theta, mask);
    case BvNode::Kind::Not: return !eval_node(*n.children[0], theta, mask);
    case BvNode::Kind::And:
        return std::all_of(n.children.begin(), n.children.end(),
                           [&](const BvNodePtr& c) { return eval_node(*c, theta, mask); });
    case BvNode::Kind::Or:
        return std::any_of(n.children.begin(), n.children.end(),
                           [&](const BvNodePtr& c) { return eval_node(*c, theta, mask); });
    }
    return false;
}

BvNodePtr nnf(const BvNodePtr& n, bool negated) {
    switch (n->kind) {
    case BvNode::Kind::Eq:
    case BvNode::Kind::Neq: {
        const bool eq = (n->kind == BvNode::Kind::Eq) != negated;
        return BvNode::atom(eq, n->lhs, n->rhs);
    }
    case BvNode::Kind::Not: return nnf(n->children[0], !negated);
    case BvNode::Kind::And:
    case BvNode::Kind::Or: {
        std::vector<BvNodePtr> parts;
        for (const auto& c : n->children) parts.push_back(nnf(c, negated));
        const bool is_and = (n->kind == BvNode::Kind::And) != negated;
        return BvNode::junction(is_and ? BvNode::Kind::And : BvNode::Kind::Or, std::move(parts));
    }
    }
    return n;
}

BvTermPtr strip_xor(const BvTermPtr& t) {
    switch (t->kind) {
    case BvTerm::Kind::Var:
    case BvTerm::Kind::Const: return t;
    case BvTerm::Kind::Not: return BvTerm::negate(strip_xor(t->lhs));
    case BvTerm::Kind::Xor: {
        auto a = strip_xor(t->lhs);
        auto b = strip_xor(t->rhs);
        return BvTerm::binary(BvTerm::Kind::And, BvTerm::binary(BvTerm::Kind::Or, a, b),
                              BvTerm::negate(BvTerm::binary(BvTerm::Kind::And, a, b)));
    }
    default: return BvTerm::binary(t->kind, strip_xor(t->lhs), strip_xor(t->rhs));
    }
}

BvNodePtr strip_xor(const BvNodePtr& n) {
    switch (n->kind) {
    case BvNode::Kind::Eq:
    case BvNode::Kind::Neq: return BvNode::atom(n->kind == BvNode::Kind::Eq, strip_xor(n->lhs), strip_xor(n->rhs));
    default: {
        std::vector<BvNodePtr> parts;
        for (const auto& c : n->children) parts.push_back(strip_xor(c));
        if (n->kind == BvNode::Kind::Not) return BvNode::negate(parts[0]);
        return BvNode::junction(n->kind, std::move(parts));
    }
    }
}

}  // namespace

bool model_check(const BvFormula& phi, const BvAssignment& theta) {
    if (theta.width != phi.width) {
        throw Error(ErrorCode::WidthMismatch, "assignment width " + std::to_string(theta.width) +
                                                  " differs from formula width " + std::to_string(phi.width));
    }
    if (theta.values.size() < phi.num_vars()) {
        throw Error(ErrorCode::UnboundVariable, "variable '" + phi.vars[theta.values.size()] + "' is not assigned");
    }
    for (const auto v : theta.values) {
        if ((v & ~phi.mask()) != 0) {
            throw Error(ErrorCode::WidthMismatch, "assigned value " + std::to_string(v) + " does not fit in " +
                                                      std::to_string(phi.width) + " bits");
        }
    }
    return eval_node(*phi.root, theta, phi.mask());
}

BvFormula to_nnf(const BvFormula& phi) {
    BvFormula out = phi;
    out.root = nnf(phi.root, false);
    return out;
}

BvFormula desugar_xor(const BvFormula& phi) {
    BvFormula out = phi;
    out.root = strip_xor(phi.root);
    return out;
}

std::optional<BvAssignment> sat_bruteforce(const BvFormula& phi, std::uint64_t max_assignments) {
    const std::uint64_t bits = static_cast<std::uint64_t>(phi.num_vars()) * phi.width;
    if (bits >= 63 || (std::uint64_t{1} << bits) > max_assignments) {
        throw Error(ErrorCode::SearchSpaceTooLarge, std::to_string(phi.num_vars()) + " variables of width " +
                                                        std::to_string(phi.width) + " exceed the enumeration cap");
    }
    BvAssignment theta{phi.width, std::vector<std::uint64_t>(phi.num_vars(), 0)};
    const std::uint64_t total = std::uint64_t{1} << bits;
    const std::uint64_t mask = phi.mask();
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t rest = code;
        for (auto& v : theta.values) {
            v = rest & mask;
            rest >>= phi.width;
        }
        if (eval_node(*phi.root, theta, mask)) return theta;
    }
    return std::nullopt;
}

namespace {

std::vector<std::string> parse_vars_decl(const std::vector<std::string>& parts, const std::string& where) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto& p = parts[i];
        const auto dots = p.find("..");
        if (dots == std::string::npos) {
            out.push_back(p);
            continue;
        }
        // x1..x4 expands to x1 x2 x3 x4.
        const std::string lo = p.substr(0, dots);
        const std::string hi = p.substr(dots + 2);
        auto split_index = [&](const std::string& s) {
            std::size_t k = s.size();
            while (k > 0 && std::isdigit(static_cast<unsigned char>(s[k - 1]))) --k;
            if (k == s.size() || k == 0) throw Error(ErrorCode::SyntaxError, where + "malformed range '" + p + "'");
            return std::make_pair(s.substr(0, k), parse_count(s.substr(k), where));
        };
        const auto [pa, a] = split_index(lo);
        const auto [pb, b] = split_index(hi);
        if (pa != pb || a > b) throw Error(ErrorCode::SyntaxError, where + "malformed range '" + p + "'");
        for (auto k = a; k <= b; ++k) out.push_back(pa + std::to_string(k));
    }
    return out;
}

BvFormula section_formula(const std::string& body, std::optional<std::vector<std::string>> vars, std::size_t dim,
                          unsigned width, const char* name) {
    if (!vars) {
        vars.emplace();
        for (std::size_t i = 0; i < dim; ++i) vars->push_back("x" + std::to_string(i + 1));
    }
    if (vars->size() != dim) {
        throw Error(ErrorCode::DimensionMismatch, std::string(name) + " section declares " +
                                                      std::to_string(vars->size()) + " variables, expected " +
                                                      std::to_string(dim));
    }
    return parse_bv(body, width, std::move(vars));
}

}  // namespace

BvSpec parse_bv_spec(std::string_view text, std::size_t input_dim, std::size_t output_dim) {
    std::optional<unsigned> width;
    std::string bodies[2];
    std::optional<std::vector<std::string>> vars[2];
    int section = -1;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        const std::string raw(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        ++number;
        const std::string where = "line " + std::to_string(number) + ": ";
        const std::string t = trim(raw.substr(0, raw.find('#')));
        const auto parts = split_ws(t);
        if (t.empty()) {
            // blank
        } else if (t == "format=1" && section < 0 && !width) {
        } else if (parts[0] == "width" && section < 0) {
            if (parts.size() != 2 || width) throw Error(ErrorCode::SyntaxError, where + "malformed width header");
            const auto w = parse_count(parts[1], where);
            if (w < 1 || w > 64) throw Error(ErrorCode::SyntaxError, where + "width must be in 1..64");
            width = static_cast<unsigned>(w);
        } else if (t == "@in" || t == "@out") {
            const int s = t == "@in" ? 0 : 1;
            if (s <= section) throw Error(ErrorCode::SyntaxError, where + "sections must appear once, @in first");
            section = s;
        } else if (section < 0) {
            throw Error(ErrorCode::SyntaxError, where + "content outside an @in/@out section");
        } else if (parts[0] == "vars") {
            if (vars[section] || !bodies[section].empty()) {
                throw Error(ErrorCode::SyntaxError, where + "vars must be declared once, before the formula");
            }
            vars[section] = parse_vars_decl(parts, where);
        } else {
            bodies[section] += raw.substr(0, raw.find('#'));
            bodies[section] += ' ';
        }
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    if (!width) throw Error(ErrorCode::SyntaxError, "BV spec lacks a width header");
    BvSpec spec;
    spec.width = *width;
    spec.input = section_formula(bodies[0], vars[0], input_dim, *width, "@in");
    spec.output = section_formula(bodies[1], vars[1], output_dim, *width, "@out");
    return spec;
}

std::string write_bv_spec(const BvSpec& spec) {
    std::ostringstream os;
    os << "format=1\nwidth " << spec.width << '\n';
    for (int s = 0; s < 2; ++s) {
        const BvFormula& phi = s == 0 ? spec.input : spec.output;
        os << (s == 0 ? "@in\n" : "@out\n") << "vars";
        for (const auto& v : phi.vars) os << ' ' << v;
        os << '\n' << to_string(phi) << '\n';
    }
    return os.str();
}

}  // namespace qnnv

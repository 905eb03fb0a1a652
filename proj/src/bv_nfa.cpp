#include "qnnv/bv_nfa.hpp"

#include "qnnv/error.hpp"

namespace qnnv {

int eval_slice(const BvTerm& t, std::size_t j, Symbol sigma) {
    switch (t.kind) {
    case BvTerm::Kind::Var: return static_cast<int>(sigma >> t.var & 1);
    case BvTerm::Kind::Const: return j < 64 ? static_cast<int>(t.value >> j & 1) : 0;
    case BvTerm::Kind::Not: return 1 - eval_slice(*t.lhs, j, sigma);
    case BvTerm::Kind::And: return eval_slice(*t.lhs, j, sigma) & eval_slice(*t.rhs, j, sigma);
    case BvTerm::Kind::Or: return eval_slice(*t.lhs, j, sigma) | eval_slice(*t.rhs, j, sigma);
    case BvTerm::Kind::Xor: return eval_slice(*t.lhs, j, sigma) ^ eval_slice(*t.rhs, j, sigma);
    }
    return 0;
}

namespace {

/// State (j, f_eq); f_eq only ever drops from 1 to 0.
class AtomNfa : public SuccinctNfa {
public:
    AtomNfa(BvTermPtr lhs, BvTermPtr rhs, bool equal, std::size_t vars, unsigned width)
        : lhs_(std::move(lhs)), rhs_(std::move(rhs)), equal_(equal), vars_(vars), width_(width) {}

    std::size_t symbol_width() const override { return vars_; }
    std::size_t word_length() const override { return width_; }
    std::size_t state_size() const override { return 2; }

    std::vector<StateCode> initial_states() const override { return {code(0, true)}; }

    bool is_final(const StateCode& q) const override {
        return j(q) == width_ && feq(q) == equal_;
    }

    std::vector<StateCode> succ(const StateCode& q, Symbol s) const override {
        if (j(q) >= width_) return {};
        return {code(j(q) + 1, feq(q) && agree(j(q), s))};
    }

    bool trans(const StateCode& q, Symbol s, const StateCode& next) const override {
        if (j(q) >= width_ || j(next) != j(q) + 1) return false;
        const bool f = feq(next);
        return feq(q) ? f == agree(j(q), s) : !f;
    }

private:
    static StateCode code(std::size_t pos, bool f) {
        return {static_cast<char>(pos), static_cast<char>(f ? 1 : 0)};
    }
    static std::size_t j(const StateCode& q) { return static_cast<unsigned char>(q[0]); }
    static bool feq(const StateCode& q) { return q[1] != 0; }

    bool agree(std::size_t pos, Symbol s) const { return eval_slice(*lhs_, pos, s) == eval_slice(*rhs_, pos, s); }

    BvTermPtr lhs_;
    BvTermPtr rhs_;
    bool equal_;
    std::size_t vars_;
    std::size_t width_;
};

NfaPtr build(const BvNode& n, std::size_t vars, unsigned width) {
    switch (n.kind) {
    case BvNode::Kind::Eq:
    case BvNode::Kind::Neq:
        return std::make_shared<AtomNfa>(n.lhs, n.rhs, n.kind == BvNode::Kind::Eq, vars, width);
    case BvNode::Kind::And:
    case BvNode::Kind::Or: {
        if (n.children.empty()) {
            if (n.kind == BvNode::Kind::And) return universal_nfa(vars, width);
            return std::make_shared<ExplicitNfa>(vars, width);
        }
        std::vector<NfaPtr> parts;
        for (const auto& c : n.children) parts.push_back(build(*c, vars, width));
        return n.kind == BvNode::Kind::And ? intersect_all(parts) : unite_all(parts);
    }
    case BvNode::Kind::Not: break;
    }
    throw Error(ErrorCode::Internal, "negation left after NNF conversion");
}

}  // namespace

NfaPtr build_bv_nfa(const BvFormula& phi) {
    if (phi.num_vars() > 63) throw Error(ErrorCode::InvalidArgument, "too many variables for one symbol");
    const BvFormula nnf = to_nnf(phi);
    return build(*nnf.root, phi.num_vars(), phi.width);
}

BvAssignment word_to_assignment(const Word& word, std::size_t num_vars, unsigned width) {
    if (word.size() != width) throw Error(ErrorCode::WidthMismatch, "word length differs from the BV width");
    BvAssignment theta{width, std::vector<std::uint64_t>(num_vars, 0)};
    for (std::size_t j = 0; j < word.size(); ++j) {
        for (std::size_t v = 0; v < num_vars; ++v) theta.values[v] |= (word[j] >> v & 1) << j;
    }
    return theta;
}

Word assignment_to_word(const BvAssignment& theta, std::size_t num_vars) {
    Word w(theta.width, 0);
    for (std::size_t j = 0; j < theta.width; ++j) {
        for (std::size_t v = 0; v < num_vars; ++v) w[j] |= (theta.values[v] >> j & 1) << v;
    }
    return w;
}

}  // namespace qnnv

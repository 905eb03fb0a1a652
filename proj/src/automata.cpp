#include "qnnv/automata.hpp"

#include "qnnv/error.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

namespace qnnv {

bool SuccinctNfa::trans(const StateCode& q, Symbol s, const StateCode& next) const {
    const auto all = succ(q, s);
    return std::find(all.begin(), all.end(), next) != all.end();
}

std::vector<std::pair<Symbol, StateCode>> SuccinctNfa::outgoing(const StateCode& q) const {
    std::vector<std::pair<Symbol, StateCode>> out;
    for (Symbol s = 0; s < symbol_count(); ++s) {
        for (auto& n : succ(q, s)) out.emplace_back(s, std::move(n));
    }
    return out;
}

StateCode ExplicitNfa::code(std::uint32_t q) {
    StateCode c(4, '\0');
    for (int i = 0; i < 4; ++i) c[static_cast<std::size_t>(i)] = static_cast<char>((q >> (8 * i)) & 0xff);
    return c;
}

std::uint32_t ExplicitNfa::state(const StateCode& code) {
    std::uint32_t q = 0;
    for (int i = 0; i < 4; ++i) q |= static_cast<std::uint32_t>(static_cast<unsigned char>(code[static_cast<std::size_t>(i)])) << (8 * i);
    return q;
}

std::vector<StateCode> ExplicitNfa::initial_states() const {
    std::set<std::uint32_t> uniq(initial_.begin(), initial_.end());
    std::vector<StateCode> out;
    for (auto q : uniq) out.push_back(code(q));
    return out;
}

bool ExplicitNfa::is_final(const StateCode& q) const {
    return std::find(final_.begin(), final_.end(), state(q)) != final_.end();
}

std::vector<StateCode> ExplicitNfa::succ(const StateCode& q, Symbol s) const {
    const auto from = state(q);
    std::set<std::uint32_t> uniq;
    for (const auto& e : edges_) {
        if (e.from == from && e.symbol == s) uniq.insert(e.to);
    }
    std::vector<StateCode> out;
    for (auto t : uniq) out.push_back(code(t));
    return out;
}

bool ExplicitNfa::trans(const StateCode& q, Symbol s, const StateCode& next) const {
    const auto from = state(q);
    const auto to = state(next);
    return std::any_of(edges_.begin(), edges_.end(),
                       [&](const Edge& e) { return e.from == from && e.symbol == s && e.to == to; });
}

std::shared_ptr<ExplicitNfa> universal_nfa(std::size_t symbol_width, std::size_t word_length) {
    auto a = std::make_shared<ExplicitNfa>(symbol_width, word_length);
    a->add_initial(0);
    a->add_final(0);
    for (Symbol s = 0; s < (Symbol{1} << symbol_width); ++s) a->add_transition(0, s, 0);
    return a;
}

namespace {

void check_compatible(const SuccinctNfa& a, const SuccinctNfa& b) {
    if (a.symbol_width() != b.symbol_width() || a.word_length() != b.word_length()) {
        throw Error(ErrorCode::AlphabetMismatch,
                    "automata disagree on alphabet or word length (" + std::to_string(a.symbol_width()) + "/" +
                        std::to_string(a.word_length()) + " vs " + std::to_string(b.symbol_width()) + "/" +
                        std::to_string(b.word_length()) + ")");
    }
}

class ProductNfa : public SuccinctNfa {
public:
    ProductNfa(NfaPtr a, NfaPtr b) : a_(std::move(a)), b_(std::move(b)) { check_compatible(*a_, *b_); }

    std::size_t symbol_width() const override { return a_->symbol_width(); }
    std::size_t word_length() const override { return a_->word_length(); }
    std::size_t state_size() const override { return a_->state_size() + b_->state_size(); }

    std::vector<StateCode> initial_states() const override {
        std::vector<StateCode> out;
        const auto ib = b_->initial_states();
        for (const auto& qa : a_->initial_states()) {
            for (const auto& qb : ib) out.push_back(qa + qb);
        }
        return out;
    }

    bool is_final(const StateCode& q) const override { return a_->is_final(left(q)) && b_->is_final(right(q)); }

    std::vector<StateCode> succ(const StateCode& q, Symbol s) const override {
        std::vector<StateCode> out;
        const auto sa = a_->succ(left(q), s);
        if (sa.empty()) return out;
        const auto sb = b_->succ(right(q), s);
        for (const auto& x : sa) {
            for (const auto& y : sb) out.push_back(x + y);
        }
        return out;
    }

    bool trans(const StateCode& q, Symbol s, const StateCode& next) const override {
        return a_->trans(left(q), s, left(next)) && b_->trans(right(q), s, right(next));
    }

    std::vector<std::pair<Symbol, StateCode>> outgoing(const StateCode& q) const override {
        std::vector<std::pair<Symbol, StateCode>> out;
        const StateCode qb = right(q);
        // Successors of b are shared by all a-moves on the same symbol.
        std::map<Symbol, std::vector<StateCode>> cache;
        for (const auto& [s, x] : a_->outgoing(left(q))) {
            auto it = cache.find(s);
            if (it == cache.end()) it = cache.emplace(s, b_->succ(qb, s)).first;
            for (const auto& y : it->second) out.emplace_back(s, x + y);
        }
        return out;
    }

private:
    StateCode left(const StateCode& q) const { return q.substr(0, a_->state_size()); }
    StateCode right(const StateCode& q) const { return q.substr(a_->state_size()); }

    NfaPtr a_;
    NfaPtr b_;
};

/// Tuple of both component states, each prefixed by a liveness byte; a
/// component that has no run left is parked as a dead, zero-filled slot.
class UnionNfa : public SuccinctNfa {
public:
    UnionNfa(NfaPtr a, NfaPtr b) : a_(std::move(a)), b_(std::move(b)) { check_compatible(*a_, *b_); }

    std::size_t symbol_width() const override { return a_->symbol_width(); }
    std::size_t word_length() const override { return a_->word_length(); }
    std::size_t state_size() const override { return a_->state_size() + b_->state_size() + 2; }

    std::vector<StateCode> initial_states() const override {
        return combine(a_->initial_states(), b_->initial_states());
    }

    bool is_final(const StateCode& q) const override {
        const auto [la, qa, lb, qb] = split(q);
        return (la && a_->is_final(qa)) || (lb && b_->is_final(qb));
    }

    std::vector<StateCode> succ(const StateCode& q, Symbol s) const override {
        const auto [la, qa, lb, qb] = split(q);
        return combine(la ? a_->succ(qa, s) : std::vector<StateCode>{}, lb ? b_->succ(qb, s) : std::vector<StateCode>{});
    }

    bool trans(const StateCode& q, Symbol s, const StateCode& next) const override {
        const auto [la, qa, lb, qb] = split(q);
        const auto [na, xa, nb, xb] = split(next);
        if (!na && !nb) return false;
        // A slot is dead in the successor exactly when it had no move.
        const bool ok_a = na ? la && a_->trans(qa, s, xa) : !la || a_->succ(qa, s).empty();
        const bool ok_b = nb ? lb && b_->trans(qb, s, xb) : !lb || b_->succ(qb, s).empty();
        return ok_a && ok_b;
    }

    std::vector<std::pair<Symbol, StateCode>> outgoing(const StateCode& q) const override {
        const auto [la, qa, lb, qb] = split(q);
        std::map<Symbol, std::pair<std::vector<StateCode>, std::vector<StateCode>>> by_symbol;
        if (la) {
            for (auto& [s, x] : a_->outgoing(qa)) by_symbol[s].first.push_back(std::move(x));
        }
        if (lb) {
            for (auto& [s, y] : b_->outgoing(qb)) by_symbol[s].second.push_back(std::move(y));
        }
        std::vector<std::pair<Symbol, StateCode>> out;
        for (const auto& [s, parts] : by_symbol) {
            for (auto& c : combine(parts.first, parts.second)) out.emplace_back(s, std::move(c));
        }
        return out;
    }

private:
    struct Parts {
        bool live_a;
        StateCode a;
        bool live_b;
        StateCode b;
    };

    Parts split(const StateCode& q) const {
        const std::size_t na = a_->state_size();
        return {q[0] != 0, q.substr(1, na), q[na + 1] != 0, q.substr(na + 2)};
    }

    std::vector<StateCode> combine(const std::vector<StateCode>& sa, const std::vector<StateCode>& sb) const {
        std::vector<StateCode> out;
        if (sa.empty() && sb.empty()) return out;
        const StateCode dead_a = std::string(1, '\0') + std::string(a_->state_size(), '\0');
        const StateCode dead_b = std::string(1, '\0') + std::string(b_->state_size(), '\0');
        std::vector<StateCode> ca, cb;
        for (const auto& x : sa) ca.push_back(std::string(1, '\1') + x);
        for (const auto& y : sb) cb.push_back(std::string(1, '\1') + y);
        if (ca.empty()) ca.push_back(dead_a);
        if (cb.empty()) cb.push_back(dead_b);
        std::set<StateCode> uniq;
        for (const auto& x : ca) {
            for (const auto& y : cb) uniq.insert(x + y);
        }
        return {uniq.begin(), uniq.end()};
    }

    NfaPtr a_;
    NfaPtr b_;
};

class LiftedNfa : public SuccinctNfa {
public:
    LiftedNfa(NfaPtr inner, std::vector<std::size_t> tracks, std::size_t joint_width)
        : inner_(std::move(inner)), tracks_(std::move(tracks)), width_(joint_width) {
        if (tracks_.size() != inner_->symbol_width()) {
            throw Error(ErrorCode::AlphabetMismatch, "lift needs one joint track per inner track");
        }
        Symbol used = 0;
        for (auto t : tracks_) {
            if (t >= width_ || (used >> t & 1)) throw Error(ErrorCode::AlphabetMismatch, "invalid lift track map");
            used |= Symbol{1} << t;
        }
        for (std::size_t i = 0; i < width_; ++i) {
            if (!(used >> i & 1)) free_.push_back(i);
        }
    }

    std::size_t symbol_width() const override { return width_; }
    std::size_t word_length() const override { return inner_->word_length(); }
    std::size_t state_size() const override { return inner_->state_size(); }
    std::vector<StateCode> initial_states() const override { return inner_->initial_states(); }
    bool is_final(const StateCode& q) const override { return inner_->is_final(q); }
    std::vector<StateCode> succ(const StateCode& q, Symbol s) const override { return inner_->succ(q, project(s)); }
    bool trans(const StateCode& q, Symbol s, const StateCode& next) const override {
        return inner_->trans(q, project(s), next);
    }

    std::vector<std::pair<Symbol, StateCode>> outgoing(const StateCode& q) const override {
        std::vector<std::pair<Symbol, StateCode>> out;
        for (const auto& [t, next] : inner_->outgoing(q)) {
            Symbol base = 0;
            for (std::size_t i = 0; i < tracks_.size(); ++i) base |= (t >> i & 1) << tracks_[i];
            for (Symbol fill = 0; fill < (Symbol{1} << free_.size()); ++fill) {
                Symbol s = base;
                for (std::size_t i = 0; i < free_.size(); ++i) s |= (fill >> i & 1) << free_[i];
                out.emplace_back(s, next);
            }
        }
        return out;
    }

private:
    Symbol project(Symbol s) const {
        Symbol t = 0;
        for (std::size_t i = 0; i < tracks_.size(); ++i) t |= (s >> tracks_[i] & 1) << i;
        return t;
    }

    NfaPtr inner_;
    std::vector<std::size_t> tracks_;
    std::size_t width_;
    std::vector<std::size_t> free_;
};

}  // namespace

NfaPtr intersect(NfaPtr a, NfaPtr b) { return std::make_shared<ProductNfa>(std::move(a), std::move(b)); }

NfaPtr intersect_all(const std::vector<NfaPtr>& parts) {
    if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "intersect_all needs at least one automaton");
    NfaPtr acc = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) acc = intersect(acc, parts[i]);
    return acc;
}

NfaPtr unite(NfaPtr a, NfaPtr b) { return std::make_shared<UnionNfa>(std::move(a), std::move(b)); }

NfaPtr unite_all(const std::vector<NfaPtr>& parts) {
    if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "unite_all needs at least one automaton");
    NfaPtr acc = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) acc = unite(acc, parts[i]);
    return acc;
}

NfaPtr lift(NfaPtr inner, std::vector<std::size_t> tracks, std::size_t joint_width) {
    return std::make_shared<LiftedNfa>(std::move(inner), std::move(tracks), joint_width);
}

bool accepts(const SuccinctNfa& nfa, const Word& word) {
    if (word.size() != nfa.word_length()) return false;
    std::set<StateCode> cur;
    for (const auto& q : nfa.initial_states()) cur.insert(q);
    for (const Symbol s : word) {
        if (s >= nfa.symbol_count()) return false;
        std::set<StateCode> next;
        for (const auto& q : cur) {
            for (const auto& n : nfa.succ(q, s)) {
                if (!nfa.trans(q, s, n)) {
                    throw Error(ErrorCode::Internal, "successor enumerator disagrees with the transition oracle");
                }
                next.insert(n);
            }
        }
        cur = std::move(next);
        if (cur.empty()) return false;
    }
    return std::any_of(cur.begin(), cur.end(), [&](const StateCode& q) { return nfa.is_final(q); });
}

EmptinessResult is_empty(const SuccinctNfa& nfa, const ExploreBudget& budget) {
    struct Node {
        StateCode code;
        std::size_t parent;
        Symbol symbol;
    };
    const auto started = std::chrono::steady_clock::now();
    std::mt19937_64 rng(budget.shuffle_seed);
    EmptinessResult result;
    std::vector<Node> nodes;
    std::vector<std::size_t> level;
    const std::size_t size = nfa.state_size();

    auto admit = [&](StateCode code, std::size_t parent, Symbol s) {
        if (code.size() != size) {
            throw Error(ErrorCode::Internal, "state code of " + std::to_string(code.size()) +
                                                 " bytes exceeds the declared " + std::to_string(size));
        }
        nodes.push_back({std::move(code), parent, s});
        return nodes.size() - 1;
    };
    auto out_of_budget = [&]() -> bool {
        if (nodes.size() > budget.max_states) {
            result.budget_reason = "explored more than " + std::to_string(budget.max_states) + " states";
            return true;
        }
        if (budget.max_seconds > 0) {
            const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - started;
            if (spent.count() > budget.max_seconds) {
                result.budget_reason = "exceeded " + std::to_string(budget.max_seconds) + " seconds";
                return true;
            }
        }
        return false;
    };

    {
        std::unordered_set<StateCode> seen;
        for (auto& q : nfa.initial_states()) {
            if (seen.insert(q).second) level.push_back(admit(std::move(q), SIZE_MAX, 0));
        }
    }
    for (std::size_t depth = 0; depth < nfa.word_length() && !level.empty(); ++depth) {
        std::unordered_set<StateCode> seen;
        std::vector<std::size_t> next;
        for (const std::size_t idx : level) {
            auto moves = nfa.outgoing(nodes[idx].code);
            if (budget.shuffle_seed != 0) std::shuffle(moves.begin(), moves.end(), rng);
            for (auto& [s, q] : moves) {
                if (seen.insert(q).second) next.push_back(admit(std::move(q), idx, s));
            }
            if (out_of_budget()) {
                result.status = EmptinessResult::Status::Budget;
                result.explored = nodes.size();
                return result;
            }
        }
        level = std::move(next);
    }
    result.explored = nodes.size();
    for (const std::size_t idx : level) {
        if (!nfa.is_final(nodes[idx].code)) continue;
        Word w;
        for (std::size_t i = idx; nodes[i].parent != SIZE_MAX; i = nodes[i].parent) w.push_back(nodes[i].symbol);
        std::reverse(w.begin(), w.end());
        if (!accepts(nfa, w)) throw Error(ErrorCode::Internal, "reconstructed witness is rejected by the automaton");
        result.status = EmptinessResult::Status::NonEmpty;
        result.witness = std::move(w);
        return result;
    }
    result.status = EmptinessResult::Status::Empty;
    return result;
}

namespace {

void enumerate_from(const SuccinctNfa& nfa, const std::set<StateCode>& states, Word& prefix, std::vector<Word>& out,
                    std::uint64_t max_words) {
    if (prefix.size() == nfa.word_length()) {
        if (std::any_of(states.begin(), states.end(), [&](const StateCode& q) { return nfa.is_final(q); })) {
            if (out.size() >= max_words) {
                throw Error(ErrorCode::SearchSpaceTooLarge, "language has more than " + std::to_string(max_words) +
                                                                " words");
            }
            out.push_back(prefix);
        }
        return;
    }
    std::map<Symbol, std::set<StateCode>> by_symbol;
    for (const auto& q : states) {
        for (auto& [s, n] : nfa.outgoing(q)) by_symbol[s].insert(std::move(n));
    }
    for (const auto& [s, next] : by_symbol) {
        prefix.push_back(s);
        enumerate_from(nfa, next, prefix, out, max_words);
        prefix.pop_back();
    }
}

}  // namespace

std::vector<Word> enumerate_language(const SuccinctNfa& nfa, std::uint64_t max_words) {
    std::vector<Word> out;
    const auto init = nfa.initial_states();
    std::set<StateCode> states(init.begin(), init.end());
    if (states.empty()) return out;
    Word prefix;
    enumerate_from(nfa, states, prefix, out, max_words);
    return out;
}

Word pack_tracks(const std::vector<std::vector<std::uint8_t>>& tracks) {
    if (tracks.empty()) return {};
    const std::size_t len = tracks[0].size();
    Word w(len, 0);
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (tracks[i].size() != len) throw Error(ErrorCode::DimensionMismatch, "tracks have different lengths");
        for (std::size_t t = 0; t < len; ++t) w[t] |= Symbol{tracks[i][t] != 0} << i;
    }
    return w;
}

std::vector<std::vector<std::uint8_t>> unpack_tracks(const Word& word, std::size_t width) {
    std::vector<std::vector<std::uint8_t>> tracks(width, std::vector<std::uint8_t>(word.size(), 0));
    for (std::size_t t = 0; t < word.size(); ++t) {
        for (std::size_t i = 0; i < width; ++i) tracks[i][t] = static_cast<std::uint8_t>(word[t] >> i & 1);
    }
    return tracks;
}

}  // namespace qnnv

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qnnv {

/// States are opaque fixed-size byte strings; symbols are bit tuples packed
/// into an integer (bit i = track i).
using StateCode = std::string;
using Symbol = std::uint64_t;
using Word = std::vector<Symbol>;

/// An automaton given by oracles. Every accepted word has exactly
/// word_length() symbols.
class SuccinctNfa {
public:
    virtual ~SuccinctNfa() = default;

    virtual std::size_t symbol_width() const = 0;
    virtual std::size_t word_length() const = 0;
    /// Size in bytes of every state code.
    virtual std::size_t state_size() const = 0;

    virtual std::vector<StateCode> initial_states() const = 0;
    virtual bool is_final(const StateCode& q) const = 0;
    virtual std::vector<StateCode> succ(const StateCode& q, Symbol s) const = 0;
    /// Defaults to membership in succ().
    virtual bool trans(const StateCode& q, Symbol s, const StateCode& next) const;
    /// All (symbol, successor) pairs. The default loops over every symbol.
    virtual std::vector<std::pair<Symbol, StateCode>> outgoing(const StateCode& q) const;

    std::uint64_t symbol_count() const { return std::uint64_t{1} << symbol_width(); }
};

using NfaPtr = std::shared_ptr<const SuccinctNfa>;

/// Table-driven automaton, mostly for tests.
class ExplicitNfa : public SuccinctNfa {
public:
    ExplicitNfa(std::size_t symbol_width, std::size_t word_length) : width_(symbol_width), length_(word_length) {}

    void add_initial(std::uint32_t q) { initial_.push_back(q); }
    void add_final(std::uint32_t q) { final_.push_back(q); }
    void add_transition(std::uint32_t from, Symbol s, std::uint32_t to) { edges_.push_back({from, s, to}); }

    static StateCode code(std::uint32_t q);
    static std::uint32_t state(const StateCode& code);

    std::size_t symbol_width() const override { return width_; }
    std::size_t word_length() const override { return length_; }
    std::size_t state_size() const override { return 4; }
    std::vector<StateCode> initial_states() const override;
    bool is_final(const StateCode& q) const override;
    std::vector<StateCode> succ(const StateCode& q, Symbol s) const override;
    bool trans(const StateCode& q, Symbol s, const StateCode& next) const override;

    struct Edge {
        std::uint32_t from;
        Symbol symbol;
        std::uint32_t to;
    };
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::uint32_t>& initial() const { return initial_; }
    const std::vector<std::uint32_t>& finals() const { return final_; }

private:
    std::size_t width_;
    std::size_t length_;
    std::vector<std::uint32_t> initial_;
    std::vector<std::uint32_t> final_;
    std::vector<Edge> edges_;
};

/// One state that loops on every symbol; accepts every word of the length.
std::shared_ptr<ExplicitNfa> universal_nfa(std::size_t symbol_width, std::size_t word_length);

/// Throws AlphabetMismatch unless widths and word lengths agree.
NfaPtr intersect(NfaPtr a, NfaPtr b);
NfaPtr intersect_all(const std::vector<NfaPtr>& parts);
NfaPtr unite(NfaPtr a, NfaPtr b);
NfaPtr unite_all(const std::vector<NfaPtr>& parts);

/// Reads joint symbols of `joint_width` bits; track i of the inner automaton
/// is joint bit tracks[i].
NfaPtr lift(NfaPtr inner, std::vector<std::size_t> tracks, std::size_t joint_width);

struct ExploreBudget {
    std::uint64_t max_states = std::uint64_t{1} << 24;
    double max_seconds = 0;  // 0 = unlimited
    /// Nonzero: successors are expanded in a seeded shuffled order.
    std::uint64_t shuffle_seed = 0;
};

struct EmptinessResult {
    enum class Status { Empty, NonEmpty, Budget };
    Status status = Status::Empty;
    std::optional<Word> witness;
    std::uint64_t explored = 0;
    std::string budget_reason;
};

/// Breadth-first exploration for exactly word_length() steps, deduplicating
/// states per depth. A witness is rebuilt from parent links and re-validated
/// with trans() before being returned.
EmptinessResult is_empty(const SuccinctNfa& nfa, const ExploreBudget& budget = {});

/// Subset simulation over succ(); each successor is confirmed with trans().
bool accepts(const SuccinctNfa& nfa, const Word& word);

/// All accepted words in lexicographic symbol order. Throws
/// SearchSpaceTooLarge past `max_words`.
std::vector<Word> enumerate_language(const SuccinctNfa& nfa, std::uint64_t max_words = std::uint64_t{1} << 20);

/// Packs per-track bit strings (track i gives the bits of symbol track i over
/// time) into a word, and back.
Word pack_tracks(const std::vector<std::vector<std::uint8_t>>& tracks);
std::vector<std::vector<std::uint8_t>> unpack_tracks(const Word& word, std::size_t width);

}  // namespace qnnv

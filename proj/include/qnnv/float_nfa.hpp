#pragma once

#include "qnnv/arithmetic.hpp"
#include "qnnv/automata.hpp"
#include "qnnv/network.hpp"

#include <cstdint>
#include <vector>

namespace qnnv {

/// Automaton over symbols (input bit per input dimension, then output bit per
/// output dimension) reading floating-point words in encode() order: sign,
/// exponent field, mantissa most significant first. Accepts exactly the pairs
/// (encode(x), encode(eval_quantised(net, x, fmt))).
///
/// Sign and exponent fields are stored while they are read. Once all fields
/// are known each neuron's residual z - y is fixed up to the mantissa bits,
/// and R <- 2R + h accumulates them most significant first, in integers
/// scaled by 2^K. R is clamped once its sign relative to the final window is
/// decided. Hidden neurons guess their exponent field up front and their
/// mantissa bits step by step.
///
/// Needs nearest rounding, depth <= 2, ReLU on the last layer and
/// exponent_bits <= exponent_cap.
class FloatFnnNfa : public SuccinctNfa {
public:
    FloatFnnNfa(const Network& net, const FloatFormat& fmt, int exponent_cap = 3);

    std::size_t symbol_width() const override { return in_dim_ + out_dim_; }
    std::size_t word_length() const override { return static_cast<std::size_t>(1 + e_ + p_); }
    std::size_t state_size() const override { return 1 + 3 * tracks_ + 8 * neurons_.size(); }

    std::vector<StateCode> initial_states() const override;
    bool is_final(const StateCode& q) const override;
    std::vector<StateCode> succ(const StateCode& q, Symbol s) const override;
    std::vector<std::pair<Symbol, StateCode>> outgoing(const StateCode& q) const override;

    /// log2 of the integer scale applied to residuals.
    int scale_exponent() const { return k_; }

private:
    struct Track {
        std::uint8_t sign = 0;
        std::uint8_t field = 0;
        bool mant_nonzero = false;
        bool mant_all_ones = true;
    };
    struct State {
        std::size_t t = 0;
        std::vector<Track> tracks;  // inputs, hidden neurons, outputs
        std::vector<std::int64_t> residual;
    };
    struct Neuron {
        std::size_t layer;
        std::vector<std::size_t> in_tracks;
        std::size_t out_track;
        bool hidden;
        // Per input and exponent field: 2^K * w * 2^E (0 for field 0).
        std::vector<std::vector<std::int64_t>> scaled_input;
        std::int64_t scaled_bias;
        std::int64_t clamp;
    };

    State decode(const StateCode& q) const;
    StateCode encode(const State& s) const;
    bool step(State& s, Symbol inputs, std::uint64_t hidden, Symbol outputs) const;
    /// Whether some completion of the mantissas can still land each residual
    /// in its acceptance window.
    bool viable(const State& s) const;
    std::int64_t power(std::uint8_t field) const;  // 2^K * 2^E for a nonzero field
    std::size_t hidden_nonzero(const State& s) const;

    int p_;
    int e_;
    int k_;
    std::size_t in_dim_;
    std::size_t out_dim_;
    std::size_t hidden_count_;
    std::size_t tracks_;
    std::vector<Neuron> neurons_;
    std::vector<std::size_t> layer_sizes_;
    std::int64_t zero_threshold_;  // 2^K * 2^Emin * (1 - 2^(-p-2))
};

NfaPtr build_float_nfa(const Network& net, const FloatFormat& fmt, int exponent_cap = 3);

}  // namespace qnnv

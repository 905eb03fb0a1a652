#pragma once

#include "qnnv/arithmetic.hpp"
#include "qnnv/automata.hpp"
#include "qnnv/network.hpp"

#include <cstdint>
#include <vector>

namespace qnnv {

/// Per-neuron guess made in the initial state.
enum class NeuronCase : std::uint8_t {
    Identity,  ///< ReLU active (or no ReLU), output = rounded sum in range
    Zero,      ///< ReLU inactive, output 0
    PosOverflow,
    NegOverflow,
};

struct FixedNeuronState {
    NeuronCase kase = NeuronCase::Identity;
    bool c_init = false;      ///< rounding increment, set once the tail is complete
    std::int64_t carry = 0;   ///< serial adder carry, weight 2^t
    std::int64_t tail = 0;    ///< low f bits of the scaled sum (Identity only); see full_tail
    bool ge = true;           ///< low emitted bits >= threshold low bits so far
    bool nonzero = false;     ///< some output bit seen was 1
};

struct FixedNfaState {
    std::size_t t = 0;
    std::vector<FixedNeuronState> neurons;  // layer-major
};

/// Automaton over symbols (input bit per input dimension, then output bit per
/// output dimension) reading the fixed-point words LSB first, word length b.
/// Accepts exactly the pairs (encode(x), encode(eval_quantised(net, x, fmt))).
/// Needs a quantised net, saturating overflow and floor or nearest rounding.
class FixedFnnNfa : public SuccinctNfa {
public:
    /// With full_tail the state keeps every low bit of the scaled sum;
    /// otherwise only bit f-1, which is all the rounding check reads.
    FixedFnnNfa(const Network& net, const FixedFormat& fmt, bool full_tail = false);

    std::size_t symbol_width() const override { return in_dim_ + out_dim_; }
    std::size_t word_length() const override { return static_cast<std::size_t>(b_); }
    std::size_t state_size() const override;

    std::vector<StateCode> initial_states() const override;
    bool is_final(const StateCode& q) const override;
    std::vector<StateCode> succ(const StateCode& q, Symbol s) const override;
    std::vector<std::pair<Symbol, StateCode>> outgoing(const StateCode& q) const override;

    FixedNfaState decode_state(const StateCode& q) const;
    StateCode encode_state(const FixedNfaState& s) const;

    std::int64_t carry_bound() const { return carry_bound_; }
    std::size_t input_dim() const { return in_dim_; }
    std::size_t output_dim() const { return out_dim_; }

private:
    struct Neuron {
        std::size_t layer;
        std::vector<std::int64_t> weights;   // scaled by 2^f
        std::vector<std::uint8_t> bias_bits; // bits 0..b-1 of B * 2^f
        std::int64_t bias_high;              // floor(B * 2^f / 2^b)
        bool relu;
        bool output;
        // Thresholds for Zero, PosOverflow, NegOverflow: low b bits and high part.
        std::vector<std::uint8_t> thr_bits[3];
        std::int64_t thr_high[3];
        std::vector<NeuronCase> cases;  // guesses not ruled out by interval bounds
        std::vector<std::int64_t> bias_rest;  // floor(B * 2^f / 2^t) for t = 0..b
        std::vector<std::int64_t> thr_rest[3];
    };

    bool final_ok(const Neuron& n, const FixedNeuronState& s) const;
    /// Some assignment of the remaining input bits completes the run. Exact;
    /// skipped (true) when the remaining input bits exceed kViableBits.
    bool viable(const FixedNfaState& s) const;
    static constexpr std::size_t kViableBits = 14;
    /// One step; `hidden` supplies guessed bits for hidden Identity neurons in
    /// order, `outputs` the output bits of the symbol.
    bool step(FixedNfaState& s, Symbol inputs, std::uint64_t hidden, Symbol outputs) const;
    std::size_t hidden_identity_count(const FixedNfaState& s) const;

    int b_;
    int f_;
    bool nearest_;
    bool full_tail_;
    std::size_t in_dim_;
    std::size_t out_dim_;
    std::vector<std::size_t> layer_sizes_;
    std::vector<Neuron> neurons_;
    std::int64_t carry_bound_ = 0;
};

NfaPtr build_fixed_nfa(const Network& net, const FixedFormat& fmt);

/// Bit t (t < b) of the scaled integer 2^f * w for weight `input_index` of
/// neuron `neuron` in layer `layer`. input_index == cols selects the bias,
/// which enters the sum as 2^(2f) * bias.
int weight_bit(const Network& net, const FixedFormat& fmt, std::size_t layer, std::size_t neuron,
               std::size_t input_index, long t);

}  // namespace qnnv

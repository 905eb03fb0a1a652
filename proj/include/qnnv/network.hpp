#pragma once

#include "qnnv/arithmetic.hpp"
#include "qnnv/rational.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qnnv {

/// One affine layer: rows x cols weight matrix (row-major) and a bias per row.
struct Layer {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Rational> weights;
    std::vector<Rational> bias;

    const Rational& weight(std::size_t r, std::size_t c) const { return weights[r * cols + c]; }
    Rational& weight(std::size_t r, std::size_t c) { return weights[r * cols + c]; }

    friend bool operator==(const Layer&, const Layer&) = default;
};

/// How quantised evaluation rounds inside a neuron.
enum class QuantSemantics {
    PerNeuron,     ///< exact affine sum, rounded and overflowed once
    PerOperation,  ///< every product and every partial sum rounded
};

/// Feedforward ReLU network. ReLU follows every layer; the last one can be
/// switched off for instances that need raw affine outputs.
class Network {
public:
    Network() = default;
    /// Validates chaining (rows of layer i == cols of layer i+1) and non-empty dimensions.
    explicit Network(std::vector<Layer> layers, bool final_relu = true);

    std::size_t input_dim() const { return layers_.front().cols; }
    std::size_t output_dim() const { return layers_.back().rows; }
    std::size_t depth() const { return layers_.size(); }
    bool final_relu() const { return final_relu_; }
    const std::vector<Layer>& layers() const { return layers_; }
    const Layer& layer(std::size_t i) const { return layers_[i]; }

    /// Number of ReLU nodes (all neurons, minus the last layer when its ReLU is off).
    std::size_t relu_count() const;
    bool has_relu(std::size_t layer_index) const {
        return final_relu_ || layer_index + 1 < layers_.size();
    }

    friend bool operator==(const Network&, const Network&) = default;

private:
    std::vector<Layer> layers_;
    bool final_relu_ = true;
};

/// One bit per ReLU node, layer-major.
struct ActivationPattern {
    std::vector<std::uint8_t> bits;
    friend bool operator==(const ActivationPattern&, const ActivationPattern&) = default;
};

RationalVector eval_rational(const Network& net, const RationalVector& x);

/// Throws UnquantisedNetwork / UnrepresentableInput when parameters or inputs
/// are off the format.
RationalVector eval_quantised(const Network& net, const RationalVector& x, const ArithmeticFormat& fmt,
                              QuantSemantics semantics = QuantSemantics::PerNeuron);

Network quantise(const Network& net, const ArithmeticFormat& fmt);
bool is_quantised(const Network& net, const ArithmeticFormat& fmt);

struct PatternEvaluation {
    RationalVector output;
    bool consistent = true;
};

/// Evaluates with each ReLU replaced by identity (bit 1) or zero (bit 0);
/// consistent iff every pre-activation sign agrees (>= 0 for 1, <= 0 for 0).
PatternEvaluation eval_with_pattern(const Network& net, const RationalVector& x, const ActivationPattern& w);

/// The pattern whose bit is 1 exactly where the pre-activation is >= 0.
ActivationPattern induced_pattern(const Network& net, const RationalVector& x);

/// Text format:
///   format=1
///   fnn k=<depth> dims=<n1,...,n_{k+1}> [final_relu=0|1]
/// then per layer `layer <i>`, one line per matrix row, one `bias` line.
/// Comments start with '#'.
Network parse_network(std::string_view text);
std::string write_network(const Network& net);

}  // namespace qnnv

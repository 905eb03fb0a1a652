#pragma once

#include "qnnv/arithmetic.hpp"
#include "qnnv/lp.hpp"
#include "qnnv/network.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace qnnv {

struct Literal {
    std::size_t var = 0;  // 0-based
    bool positive = true;

    friend bool operator==(const Literal&, const Literal&) = default;
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

using Clause3 = std::array<Literal, 3>;

struct Cnf3 {
    std::size_t num_vars = 0;
    std::vector<Clause3> clauses;

    friend bool operator==(const Cnf3&, const Cnf3&) = default;
};

/// Clauses with one or two literals are padded by repeating the last literal.
Cnf3 parse_dimacs(std::string_view text);
std::string write_dimacs(const Cnf3& cnf);

enum class BinarityGadget {
    Corrected,  // relu(1/2 - relu(x - 1/2) - relu(1/2 - x)), zero exactly on {0, 1}
    AsPrinted,  // relu(2 relu(1/2 - x) - 1/2), nonzero at x = 0
};

struct ReductionInstance {
    Network network;
    LinearProgram input;   // 0 <= x_j <= 1
    LinearProgram output;  // conjunction output = 1, binarity outputs = 0
};

/// Four ReLU layers: literal gadgets, clause sums, clause outputs, conjunction.
/// Output 1 is the conjunction gadget; outputs 2..v+1 are the binarity gadgets.
ReductionInstance reduce(const Cnf3& cnf, BinarityGadget gadget = BinarityGadget::Corrected);

struct QuantisedReduction {
    ReductionInstance instance;
    FixedFormat format;
};

/// Same instance with a fixed-point format of ceil(log2(n+1)) + 2 integer bits
/// and `frac_bits` fractional bits (n = clause count).
QuantisedReduction reduce_quantised(const Cnf3& cnf, unsigned frac_bits,
                                    BinarityGadget gadget = BinarityGadget::Corrected);

}  // namespace qnnv

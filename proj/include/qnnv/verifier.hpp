#pragma once

#include "qnnv/arithmetic.hpp"
#include "qnnv/bv.hpp"
#include "qnnv/lp.hpp"
#include "qnnv/network.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qnnv {

enum class Problem { ReachQLp, ReachFLp, ReachLp, ReachFBv, ReachBv };
enum class Backend { PatternLp, Brute, Automata };
enum class Outcome { Valid, Invalid, Resource };

std::string_view to_string(Problem p);
std::string_view to_string(Backend b);
std::string_view to_string(Outcome o);
Problem parse_problem(std::string_view s);
Backend parse_backend(std::string_view s);

/// Enumeration caps. Exceeding one gives Outcome::Resource.
struct Caps {
    std::uint64_t max_inputs = std::uint64_t{1} << 22;
    std::uint64_t max_patterns = std::uint64_t{1} << 20;
    std::uint64_t max_states = std::uint64_t{1} << 24;
    double max_seconds = 0;  // automaton exploration; 0 = unlimited
    int float_exponent_cap = 3;

    /// Defaults overridden by QNNV_MAX_INPUTS, QNNV_MAX_PATTERNS, QNNV_MAX_STATES.
    static Caps from_env();
};

struct Verdict {
    Problem problem = Problem::ReachFLp;
    Backend backend = Backend::Brute;
    std::optional<ArithmeticFormat> format;
    Outcome outcome = Outcome::Invalid;
    std::string reason;  // resource verdicts and early exits
    std::optional<RationalVector> input;
    std::optional<RationalVector> output;
    std::optional<ActivationPattern> pattern;
    std::vector<std::pair<std::string, std::uint64_t>> stats;  // in insertion order

    bool valid() const { return outcome == Outcome::Valid; }
    std::uint64_t stat(std::string_view key) const;
};

/// Record schema, one field per line:
///   format=1
///   verdict <problem> <backend>
///   arith <descriptor>            (when a format applies)
///   result valid|invalid|resource
///   reason <text>                 (optional)
///   input <rationals>             (valid only)
///   output <rationals>            (valid only)
///   pattern <bits>                (pattern_lp witnesses)
///   stat <name> <count>           (repeated)
///   end
std::string write_verdict(const Verdict& v);
Verdict parse_verdict(std::string_view text);

/// Exact rational reachability by activation patterns. Patterns are explored
/// depth first, neuron by neuron, and a branch is cut as soon as its LP is
/// infeasible. Neurons whose sign is fixed by interval bounds over the L1
/// box are not branched on.
Verdict reach_q_lp(const Network& net, const LinearProgram& l1, const LinearProgram& l2, const Caps& caps = {});

/// Brute force over the input grid of a quantised network.
Verdict reach_f_lp(const Network& net_q, const LinearProgram& l1, const LinearProgram& l2,
                   const ArithmeticFormat& fmt, const Caps& caps = {});

/// Quantises the network and both programs, then reach_f_lp.
Verdict reach_lp(const Network& net, const LinearProgram& l1, const LinearProgram& l2, const ArithmeticFormat& fmt,
                 const Caps& caps = {});

/// Brute force; phi1 has one variable per input, phi2 one per output, both of
/// the format's word length.
Verdict reach_f_bv(const Network& net_q, const BvFormula& phi1, const BvFormula& phi2, const ArithmeticFormat& fmt,
                   const Caps& caps = {});

/// Quantises the network, then brute force or automata emptiness. Throws
/// BackendUnavailable when the automaton construction does not cover the
/// format or network.
Verdict reach_bv(const Network& net, const BvFormula& phi1, const BvFormula& phi2, const ArithmeticFormat& fmt,
                 Backend backend, const Caps& caps = {});

/// BV assignment for a vector of representable values (one variable per coordinate).
BvAssignment to_assignment(const RationalVector& v, const ArithmeticFormat& fmt);

}  // namespace qnnv

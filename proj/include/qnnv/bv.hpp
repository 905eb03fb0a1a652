#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qnnv {

struct BvTerm;
using BvTermPtr = std::shared_ptr<const BvTerm>;

struct BvTerm {
    enum class Kind { Var, Const, Not, And, Or, Xor };
    Kind kind;
    std::size_t var = 0;     // Var
    std::uint64_t value = 0; // Const
    BvTermPtr lhs;           // Not uses lhs only
    BvTermPtr rhs;

    static BvTermPtr variable(std::size_t index);
    static BvTermPtr constant(std::uint64_t value);
    static BvTermPtr negate(BvTermPtr a);
    static BvTermPtr binary(Kind kind, BvTermPtr a, BvTermPtr b);
};

struct BvNode;
using BvNodePtr = std::shared_ptr<const BvNode>;

/// Eq / Neq compare two terms. And / Or are n-ary; empty And is true and
/// empty Or is false.
struct BvNode {
    enum class Kind { Eq, Neq, Not, And, Or };
    Kind kind;
    BvTermPtr lhs;
    BvTermPtr rhs;
    std::vector<BvNodePtr> children;

    static BvNodePtr atom(bool equal, BvTermPtr a, BvTermPtr b);
    static BvNodePtr negate(BvNodePtr a);
    static BvNodePtr junction(Kind kind, std::vector<BvNodePtr> children);
};

/// A formula together with its width and variable set.
struct BvFormula {
    unsigned width = 1;
    std::vector<std::string> vars;
    BvNodePtr root;

    std::size_t num_vars() const { return vars.size(); }
    std::uint64_t mask() const { return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1; }
};

struct BvAssignment {
    unsigned width = 1;
    std::vector<std::uint64_t> values;

    friend bool operator==(const BvAssignment&, const BvAssignment&) = default;
};

/// Operators: `~` (bitwise not, also formula negation), `&`, `^`, `|` on
/// terms (tightest first); `=`, `!=` atoms; `!`/`~` negation, `/\` and `\/`
/// on formulas. Constants are decimal, `0b...` or `0x...`. When `vars` is
/// given every identifier must be declared; otherwise variables are numbered
/// by first occurrence.
BvFormula parse_bv(std::string_view text, unsigned width,
                   std::optional<std::vector<std::string>> vars = std::nullopt);
std::string to_string(const BvFormula& phi);
std::string to_string(const BvFormula& phi, const BvTermPtr& t);

std::uint64_t eval_term(const BvTerm& t, const BvAssignment& theta, std::uint64_t mask);
bool model_check(const BvFormula& phi, const BvAssignment& theta);

/// Negation pushed to the atoms; the result uses only Eq, Neq, And and Or.
BvFormula to_nnf(const BvFormula& phi);
/// Rewrites a ^ b as (a | b) & ~(a & b).
BvFormula desugar_xor(const BvFormula& phi);

/// Exhaustive search over all assignments; throws SearchSpaceTooLarge when
/// 2^(|vars| * width) exceeds `max_assignments`.
std::optional<BvAssignment> sat_bruteforce(const BvFormula& phi, std::uint64_t max_assignments = std::uint64_t{1} << 22);

/// Input/output formulas as stored in BV spec files.
struct BvSpec {
    unsigned width = 1;
    BvFormula input;
    BvFormula output;
};

BvSpec parse_bv_spec(std::string_view text, std::size_t input_dim, std::size_t output_dim);
std::string write_bv_spec(const BvSpec& spec);

}  // namespace qnnv

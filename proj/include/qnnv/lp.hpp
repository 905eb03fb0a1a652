#pragma once

#include "qnnv/arithmetic.hpp"
#include "qnnv/rational.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qnnv {

enum class Relation { Less, LessEqual, Equal, GreaterEqual, Greater };

std::string_view to_string(Relation rel);

/// coeffs . x  rel  bound, dense over the program's variables.
struct LinearConstraint {
    RationalVector coeffs;
    Relation rel = Relation::LessEqual;
    Rational bound;

    friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

/// A conjunction of linear constraints over variables x1..xn.
class LinearProgram {
public:
    LinearProgram() = default;
    explicit LinearProgram(std::size_t num_vars) : num_vars_(num_vars) {}

    std::size_t num_vars() const { return num_vars_; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }
    bool empty() const { return constraints_.empty(); }

    /// Throws DimensionMismatch if the coefficient vector has the wrong length.
    void add(LinearConstraint c);
    void add(RationalVector coeffs, Relation rel, Rational bound) { add({std::move(coeffs), rel, std::move(bound)}); }
    /// Conjunction of both programs (same variable count required).
    void append(const LinearProgram& other);

    friend bool operator==(const LinearProgram&, const LinearProgram&) = default;

private:
    std::size_t num_vars_ = 0;
    std::vector<LinearConstraint> constraints_;
};

/// Grammar: constraints separated by newlines or `/\`; each is
/// `expr rel expr` with rel in {<, <=, =, >=, >}; expressions are sums of
/// `[rational [*]] x<i>` and rational terms. With `num_vars` unset the
/// variable count is the largest index used.
LinearProgram parse_lp(std::string_view text, std::optional<std::size_t> num_vars = std::nullopt);
/// One constraint per line in normal form (`x1 + 2*x2 <= 3/2`).
std::string write_lp(const LinearProgram& lp);

/// Exact evaluation; throws MissingVariable when the assignment is short.
bool check_lp(const LinearProgram& lp, const RationalVector& assignment);

/// Rounds every coefficient and bound into the format.
LinearProgram quantise_lp(const LinearProgram& lp, const ArithmeticFormat& fmt);
/// Satisfaction of a quantised program: the left-hand side is evaluated
/// exactly, then compared with the bound through fmt_compare.
bool check_lp_quantised(const LinearProgram& lp, const RationalVector& assignment, const ArithmeticFormat& fmt);

/// Exact rational feasibility including strict constraints. Strict rows get a
/// shared slack delta in [0, 1] that is maximised; strict feasibility holds iff
/// the optimum is positive. Returns a witness satisfying every constraint.
std::optional<RationalVector> feasible(const LinearProgram& lp);

/// Input/output pair of programs, as stored in files with `@in` / `@out`
/// sections. Variables in each section bind positionally to network inputs
/// or outputs respectively.
struct LpSpec {
    LinearProgram input;
    LinearProgram output;
};

LpSpec parse_lp_spec(std::string_view text, std::size_t input_dim, std::size_t output_dim);
std::string write_lp_spec(const LpSpec& spec);

}  // namespace qnnv

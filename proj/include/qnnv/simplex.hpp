#pragma once

#include "qnnv/rational.hpp"

#include <vector>

namespace qnnv {

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct LpRow {
    RationalVector coeffs;
    RowSense sense = RowSense::LessEqual;
    Rational rhs;
};

enum class SimplexStatus { Infeasible, Unbounded, Optimal };

struct SimplexResult {
    SimplexStatus status = SimplexStatus::Infeasible;
    Rational objective;
    RationalVector point;  // valid when Optimal
    std::size_t pivots = 0;
};

/// Maximises objective . z over z >= 0 subject to the rows, in exact
/// arithmetic. Two-phase tableau simplex with Bland's smallest-index rule, so
/// it terminates on degenerate problems.
SimplexResult maximize(std::size_t num_vars, const std::vector<LpRow>& rows, const RationalVector& objective);

}  // namespace qnnv

#include "qnnv/simplex.hpp"

#include "qnnv/error.hpp"

#include <optional>

namespace qnnv {

namespace {

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, RationalVector(cols + 1)), basis_(rows, 0) {}

    Rational& at(std::size_t r, std::size_t c) { return rows_[r][c]; }
    Rational& rhs(std::size_t r) { return rows_[r][cols_]; }
    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }
    std::size_t& basis(std::size_t r) { return basis_[r]; }

    void pivot(std::size_t pr, std::size_t pc, RationalVector& objective_row) {
        RationalVector& prow = rows_[pr];
        const Rational inv = Rational(1) / prow[pc];
        for (auto& v : prow) {
            if (!v.is_zero()) v *= inv;
        }
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (r == pr) continue;
            eliminate(rows_[r], prow, pc);
        }
        eliminate(objective_row, prow, pc);
        basis_[pr] = pc;
    }

    void erase_row(std::size_t r) {
        rows_.erase(rows_.begin() + static_cast<long>(r));
        basis_.erase(basis_.begin() + static_cast<long>(r));
    }

    /// Runs Bland-rule iterations; columns at or beyond `allowed` never enter.
    /// Returns false when the objective is unbounded.
    bool optimise(RationalVector& obj, std::size_t allowed, std::size_t& pivots) {
        while (true) {
            std::optional<std::size_t> enter;
            for (std::size_t c = 0; c < allowed; ++c) {
                if (obj[c].sign() < 0) {
                    enter = c;
                    break;
                }
            }
            if (!enter) return true;
            std::optional<std::size_t> leave;
            Rational best;
            for (std::size_t r = 0; r < rows_.size(); ++r) {
                const Rational& a = rows_[r][*enter];
                if (a.sign() <= 0) continue;
                const Rational ratio = rows_[r][cols_] / a;
                if (!leave || ratio < best || (ratio == best && basis_[r] < basis_[*leave])) {
                    leave = r;
                    best = ratio;
                }
            }
            if (!leave) return false;
            pivot(*leave, *enter, obj);
            ++pivots;
        }
    }

private:
    static void eliminate(RationalVector& row, const RationalVector& prow, std::size_t pc) {
        if (row[pc].is_zero()) return;
        const Rational factor = row[pc];
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!prow[c].is_zero()) row[c] -= factor * prow[c];
        }
    }

    std::size_t cols_;
    std::vector<RationalVector> rows_;
    std::vector<std::size_t> basis_;
};

}  // namespace

SimplexResult maximize(std::size_t num_vars, const std::vector<LpRow>& rows, const RationalVector& objective) {
    if (objective.size() != num_vars) {
        throw Error(ErrorCode::DimensionMismatch, "objective length does not match variable count");
    }
    for (const auto& row : rows) {
        if (row.coeffs.size() != num_vars) {
            throw Error(ErrorCode::DimensionMismatch, "constraint row length does not match variable count");
        }
    }
    // Normalise to non-negative right-hand sides.
    std::vector<LpRow> norm = rows;
    for (auto& row : norm) {
        if (row.rhs.sign() < 0) {
            for (auto& a : row.coeffs) a = -a;
            row.rhs = -row.rhs;
            if (row.sense == RowSense::LessEqual) {
                row.sense = RowSense::GreaterEqual;
            } else if (row.sense == RowSense::GreaterEqual) {
                row.sense = RowSense::LessEqual;
            }
        }
    }
    std::size_t slack_count = 0;
    std::size_t artificial_count = 0;
    for (const auto& row : norm) {
        if (row.sense != RowSense::Equal) ++slack_count;
        if (row.sense != RowSense::LessEqual) ++artificial_count;
    }
    const std::size_t first_slack = num_vars;
    const std::size_t first_art = num_vars + slack_count;
    const std::size_t cols = first_art + artificial_count;

    Tableau t(norm.size(), cols);
    std::size_t next_slack = first_slack;
    std::size_t next_art = first_art;
    for (std::size_t r = 0; r < norm.size(); ++r) {
        for (std::size_t c = 0; c < num_vars; ++c) t.at(r, c) = norm[r].coeffs[c];
        t.rhs(r) = norm[r].rhs;
        switch (norm[r].sense) {
        case RowSense::LessEqual:
            t.at(r, next_slack) = 1;
            t.basis(r) = next_slack++;
            break;
        case RowSense::GreaterEqual:
            t.at(r, next_slack++) = -1;
            t.at(r, next_art) = 1;
            t.basis(r) = next_art++;
            break;
        case RowSense::Equal:
            t.at(r, next_art) = 1;
            t.basis(r) = next_art++;
            break;
        }
    }

    SimplexResult result;
    // Phase I: maximise -(sum of artificials).
    if (artificial_count > 0) {
        RationalVector obj(cols + 1);
        for (std::size_t c = first_art; c < cols; ++c) obj[c] = 1;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            if (t.basis(r) >= first_art) {
                for (std::size_t c = 0; c <= cols; ++c) obj[c] -= t.at(r, c);
            }
        }
        t.optimise(obj, cols, result.pivots);
        if (obj[cols].sign() != 0) {
            result.status = SimplexStatus::Infeasible;
            return result;
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        for (std::size_t r = 0; r < t.rows();) {
            if (t.basis(r) < first_art) {
                ++r;
                continue;
            }
            std::optional<std::size_t> col;
            for (std::size_t c = 0; c < first_art; ++c) {
                if (!t.at(r, c).is_zero()) {
                    col = c;
                    break;
                }
            }
            if (col) {
                RationalVector dummy(cols + 1);
                t.pivot(r, *col, dummy);
                ++result.pivots;
                ++r;
            } else {
                t.erase_row(r);
            }
        }
    }

    // Phase II on the original objective; artificial columns stay out.
    RationalVector obj(cols + 1);
    for (std::size_t c = 0; c < num_vars; ++c) obj[c] = -objective[c];
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const std::size_t b = t.basis(r);
        if (b < num_vars && !objective[b].is_zero()) {
            for (std::size_t c = 0; c <= cols; ++c) {
                if (!t.at(r, c).is_zero()) obj[c] += objective[b] * t.at(r, c);
            }
        }
    }
    if (!t.optimise(obj, first_art, result.pivots)) {
        result.status = SimplexStatus::Unbounded;
        return result;
    }
    result.status = SimplexStatus::Optimal;
    result.objective = obj[cols];
    result.point.assign(num_vars, Rational(0));
    for (std::size_t r = 0; r < t.rows(); ++r) {
        if (t.basis(r) < num_vars) result.point[t.basis(r)] = t.rhs(r);
    }
    return result;
}

}  // namespace qnnv

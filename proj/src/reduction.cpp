#include "qnnv/reduction.hpp"

#include "qnnv/error.hpp"
#include "qnnv/text.hpp"

#include <sstream>

namespace qnnv {

Cnf3 parse_dimacs(std::string_view text) {
    Cnf3 cnf;
    bool header = false;
    std::vector<Literal> pending;
    std::size_t pending_line = 0;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        const std::string raw(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        ++number;
        const std::string where = "line " + std::to_string(number) + ": ";
        const std::string t = trim(raw);
        if (end == std::string_view::npos) start = text.size() + 1;
        else start = end + 1;
        if (t.empty() || t[0] == 'c' || t[0] == '%') continue;
        if (t == "format=1" && !header) continue;
        const auto parts = split_ws(t);
        if (parts[0] == "p") {
            if (header || parts.size() != 4 || parts[1] != "cnf") {
                throw Error(ErrorCode::SyntaxError, where + "expected a single 'p cnf <vars> <clauses>' header");
            }
            cnf.num_vars = static_cast<std::size_t>(parse_count(parts[2], where));
            parse_count(parts[3], where);
            header = true;
            continue;
        }
        if (!header) throw Error(ErrorCode::SyntaxError, where + "clause before the 'p cnf' header");
        for (const auto& tok : parts) {
            long lit;
            try {
                std::size_t used = 0;
                lit = std::stol(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw Error(ErrorCode::SyntaxError, where + "malformed literal '" + tok + "'");
            }
            if (pending.empty()) pending_line = number;
            if (lit == 0) {
                if (pending.empty()) throw Error(ErrorCode::EmptyClause, where + "empty clause");
                if (pending.size() > 3) {
                    throw Error(ErrorCode::ClauseTooWide, "line " + std::to_string(pending_line) + ": clause has " +
                                                              std::to_string(pending.size()) + " literals");
                }
                Clause3 c;
                for (std::size_t i = 0; i < 3; ++i) c[i] = pending[std::min(i, pending.size() - 1)];
                cnf.clauses.push_back(c);
                pending.clear();
                continue;
            }
            const auto v = static_cast<std::size_t>(lit < 0 ? -lit : lit);
            if (v > cnf.num_vars) {
                throw Error(ErrorCode::SyntaxError, where + "literal " + tok + " exceeds the declared variable count");
            }
            pending.push_back({v - 1, lit > 0});
        }
    }
    if (!header) throw Error(ErrorCode::SyntaxError, "missing 'p cnf' header");
    if (!pending.empty()) {
        throw Error(ErrorCode::SyntaxError, "line " + std::to_string(pending_line) + ": clause not terminated by 0");
    }
    return cnf;
}

std::string write_dimacs(const Cnf3& cnf) {
    std::ostringstream os;
    os << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
    for (const auto& c : cnf.clauses) {
        for (const auto& l : c) os << (l.positive ? "" : "-") << l.var + 1 << ' ';
        os << "0\n";
    }
    return os.str();
}

namespace {

class LayerBuilder {
public:
    explicit LayerBuilder(std::size_t cols) : cols_(cols) {}

    /// Adds a neuron; returns its index in this layer.
    std::size_t neuron(std::vector<std::pair<std::size_t, Rational>> terms, Rational bias) {
        RationalVector row(cols_, Rational(0));
        for (auto& [c, w] : terms) row[c] += w;
        rows_.push_back(std::move(row));
        bias_.push_back(std::move(bias));
        return rows_.size() - 1;
    }

    Layer build() const {
        Layer l;
        l.rows = rows_.size();
        l.cols = cols_;
        for (const auto& r : rows_) l.weights.insert(l.weights.end(), r.begin(), r.end());
        l.bias = bias_;
        return l;
    }

private:
    std::size_t cols_;
    std::vector<RationalVector> rows_;
    RationalVector bias_;
};

}  // namespace

ReductionInstance reduce(const Cnf3& cnf, BinarityGadget gadget) {
    if (cnf.num_vars == 0) throw Error(ErrorCode::InvalidArgument, "formula needs at least one variable");
    if (cnf.clauses.empty()) throw Error(ErrorCode::InvalidArgument, "formula needs at least one clause");
    const std::size_t v = cnf.num_vars;
    const std::size_t n = cnf.clauses.size();
    for (const auto& c : cnf.clauses) {
        for (const auto& l : c) {
            if (l.var >= v) throw Error(ErrorCode::IndexOutOfRange, "literal variable out of range");
        }
    }
    const Rational half(1, 2);

    LayerBuilder l1(v);
    std::vector<std::size_t> pos(v), neg(v), up(v), down(v);
    for (std::size_t j = 0; j < v; ++j) {
        pos[j] = l1.neuron({{j, 1}}, 0);
        neg[j] = l1.neuron({{j, -1}}, 1);
        up[j] = l1.neuron({{j, 1}}, -half);
        down[j] = l1.neuron({{j, -1}}, half);
    }

    LayerBuilder l2(4 * v);
    std::vector<std::size_t> sum(n), excess(n), bin2(v);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<std::size_t, Rational>> lits;
        for (const auto& l : cnf.clauses[i]) lits.emplace_back(l.positive ? pos[l.var] : neg[l.var], 1);
        sum[i] = l2.neuron(lits, 0);
        excess[i] = l2.neuron(lits, -1);
    }
    for (std::size_t j = 0; j < v; ++j) {
        if (gadget == BinarityGadget::Corrected) {
            bin2[j] = l2.neuron({{up[j], -1}, {down[j], -1}}, half);
        } else {
            bin2[j] = l2.neuron({{down[j], 1}, {down[j], 1}}, -half);
        }
    }

    LayerBuilder l3(2 * n + v);
    std::vector<std::size_t> clause(n), bin3(v);
    for (std::size_t i = 0; i < n; ++i) clause[i] = l3.neuron({{sum[i], 1}, {excess[i], -1}}, 0);
    for (std::size_t j = 0; j < v; ++j) bin3[j] = l3.neuron({{bin2[j], 1}}, 0);

    LayerBuilder l4(n + v);
    std::vector<std::pair<std::size_t, Rational>> all;
    for (std::size_t i = 0; i < n; ++i) all.emplace_back(clause[i], 1);
    l4.neuron(all, -Rational(static_cast<long>(n) - 1));
    for (std::size_t j = 0; j < v; ++j) l4.neuron({{bin3[j], 1}}, 0);

    ReductionInstance inst{Network({l1.build(), l2.build(), l3.build(), l4.build()}, true), LinearProgram(v),
                           LinearProgram(1 + v)};
    for (std::size_t j = 0; j < v; ++j) {
        RationalVector e(v, Rational(0));
        e[j] = 1;
        inst.input.add(e, Relation::GreaterEqual, 0);
        inst.input.add(e, Relation::LessEqual, 1);
    }
    for (std::size_t k = 0; k <= v; ++k) {
        RationalVector e(1 + v, Rational(0));
        e[k] = 1;
        inst.output.add(e, Relation::Equal, k == 0 ? 1 : 0);
    }
    return inst;
}

QuantisedReduction reduce_quantised(const Cnf3& cnf, unsigned frac_bits, BinarityGadget gadget) {
    if (frac_bits < 1) throw Error(ErrorCode::InvalidArgument, "reduce_quantised needs at least one fractional bit");
    QuantisedReduction out{reduce(cnf, gadget), {}};
    int log = 0;
    while ((std::size_t{1} << log) < cnf.clauses.size() + 1) ++log;
    out.format.frac_bits = static_cast<int>(frac_bits);
    out.format.total_bits = log + 2 + static_cast<int>(frac_bits);
    out.format.rounding = RoundingMode::NearestHalfUp;
    out.format.overflow = OverflowMode::Saturate;
    out.format.validate();
    return out;
}

}  // namespace qnnv

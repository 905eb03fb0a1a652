#include "qnnv/verifier.hpp"

#include "qnnv/automata.hpp"
#include "qnnv/bv_nfa.hpp"
#include "qnnv/error.hpp"
#include "qnnv/fixed_nfa.hpp"
#include "qnnv/float_nfa.hpp"
#include "qnnv/text.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace qnnv {

namespace {

constexpr std::pair<Problem, std::string_view> kProblems[] = {
    {Problem::ReachQLp, "reach-q-lp"}, {Problem::ReachFLp, "reach-f-lp"}, {Problem::ReachLp, "reach-lp"},
    {Problem::ReachFBv, "reach-f-bv"}, {Problem::ReachBv, "reach-bv"},
};
constexpr std::pair<Backend, std::string_view> kBackends[] = {
    {Backend::PatternLp, "pattern_lp"}, {Backend::Brute, "brute"}, {Backend::Automata, "automata"},
};
constexpr std::pair<Outcome, std::string_view> kOutcomes[] = {
    {Outcome::Valid, "valid"}, {Outcome::Invalid, "invalid"}, {Outcome::Resource, "resource"},
};

template <typename E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E e) {
    for (const auto& [k, v] : table) {
        if (k == e) return v;
    }
    return "?";
}

template <typename E, std::size_t N>
E lookup(const std::pair<E, std::string_view> (&table)[N], std::string_view s, const char* what) {
    for (const auto& [k, v] : table) {
        if (v == s) return k;
    }
    throw Error(ErrorCode::InvalidArgument, std::string("unknown ") + what + " '" + std::string(s) + "'");
}

std::uint64_t env_cap(const char* name, std::uint64_t fallback) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return fallback;
    try {
        std::size_t used = 0;
        const auto n = std::stoull(v, &used);
        if (used != std::string_view(v).size() || n == 0) throw std::invalid_argument("");
        return n;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be a positive integer");
    }
}

void require_dims(const Network& net, std::size_t in_vars, std::size_t out_vars, const char* what) {
    if (in_vars != net.input_dim() || out_vars != net.output_dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + " has " + std::to_string(in_vars) + "/" + std::to_string(out_vars) +
                        " variables, network has " + std::to_string(net.input_dim()) + " inputs and " +
                        std::to_string(net.output_dim()) + " outputs");
    }
}

/// |values|^dim, saturating at limit + 1.
std::uint64_t grid_size(std::size_t values, std::size_t dim, std::uint64_t limit) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) {
        if (total > (limit + 1) / values) return limit + 1;
        total *= values;
    }
    return total;
}

/// Odometer over value indices, first coordinate fastest.
class Grid {
public:
    Grid(std::vector<Rational> values, std::size_t dim) : values_(std::move(values)), pick_(dim, 0) {}

    RationalVector current() const {
        RationalVector x;
        x.reserve(pick_.size());
        for (auto i : pick_) x.push_back(values_[i]);
        return x;
    }
    bool advance() {
        std::size_t i = 0;
        while (i < pick_.size() && ++pick_[i] == values_.size()) pick_[i++] = 0;
        return i < pick_.size();
    }

private:
    std::vector<Rational> values_;
    std::vector<std::size_t> pick_;
};

// ---- activation patterns ----

struct Affine {
    RationalVector coeffs;  // over the inputs
    Rational constant;

    Rational at(const RationalVector& x) const {
        Rational v = constant;
        for (std::size_t j = 0; j < coeffs.size(); ++j) v += coeffs[j] * x[j];
        return v;
    }
};

struct Interval {
    std::optional<Rational> lo, hi;
};

/// Box read off the single-variable constraints of the program.
std::vector<Interval> input_box(const LinearProgram& lp) {
    std::vector<Interval> box(lp.num_vars());
    for (const auto& c : lp.constraints()) {
        std::size_t nz = 0, at = 0;
        for (std::size_t j = 0; j < c.coeffs.size(); ++j) {
            if (!c.coeffs[j].is_zero()) ++nz, at = j;
        }
        if (nz != 1) continue;
        const Rational v = c.bound / c.coeffs[at];
        const bool flip = c.coeffs[at].sign() < 0;
        const bool upper = (c.rel == Relation::Less || c.rel == Relation::LessEqual) != flip;
        auto tighten = [&](bool is_upper) {
            auto& slot = is_upper ? box[at].hi : box[at].lo;
            if (!slot || (is_upper ? v < *slot : v > *slot)) slot = v;
        };
        if (c.rel == Relation::Equal) {
            tighten(true);
            tighten(false);
        } else {
            tighten(upper);
        }
    }
    return box;
}

Interval affine_range(const Affine& a, const std::vector<Interval>& box) {
    Interval r{a.constant, a.constant};
    for (std::size_t j = 0; j < a.coeffs.size(); ++j) {
        const Rational& c = a.coeffs[j];
        if (c.is_zero()) continue;
        const auto& lo_src = c.sign() > 0 ? box[j].lo : box[j].hi;
        const auto& hi_src = c.sign() > 0 ? box[j].hi : box[j].lo;
        if (r.lo) r.lo = lo_src ? std::optional(*r.lo + c * *lo_src) : std::nullopt;
        if (r.hi) r.hi = hi_src ? std::optional(*r.hi + c * *hi_src) : std::nullopt;
    }
    return r;
}

/// Interval bounds of every pre-activation over the input box.
std::vector<std::vector<Interval>> pre_activation_ranges(const Network& net, const std::vector<Interval>& box) {
    std::vector<std::vector<Interval>> out;
    std::vector<Interval> cur = box;
    for (std::size_t i = 0; i < net.depth(); ++i) {
        const Layer& l = net.layer(i);
        std::vector<Interval> pre(l.rows), post(l.rows);
        for (std::size_t r = 0; r < l.rows; ++r) {
            Affine a{RationalVector(l.weights.begin() + static_cast<long>(r * l.cols),
                                    l.weights.begin() + static_cast<long>((r + 1) * l.cols)),
                     l.bias[r]};
            pre[r] = affine_range(a, cur);
            post[r] = pre[r];
            if (net.has_relu(i)) {
                post[r].lo = pre[r].lo ? std::max(*pre[r].lo, Rational(0)) : Rational(0);
                if (post[r].hi) post[r].hi = std::max(*post[r].hi, Rational(0));
            }
        }
        out.push_back(std::move(pre));
        cur = std::move(post);
    }
    return out;
}

LinearConstraint sign_constraint(const Affine& a, bool nonneg) {
    // a.x + c >= 0  <=>  a.x >= -c ;  a.x + c <= 0  <=>  a.x <= -c
    return {a.coeffs, nonneg ? Relation::GreaterEqual : Relation::LessEqual, -a.constant};
}

class PatternSearch {
public:
    PatternSearch(const Network& net, const LinearProgram& l1, const LinearProgram& l2, const Caps& caps)
        : net_(net), l2_(l2), caps_(caps), box_(input_box(l1)), ranges_(pre_activation_ranges(net, box_)) {}

    /// Returns the satisfying input and pattern, if any.
    std::optional<std::pair<RationalVector, ActivationPattern>> run(const LinearProgram& l1) {
        ++lp_calls;
        auto x = feasible(l1);
        if (!x) return std::nullopt;
        std::vector<Affine> inputs;
        const std::size_t d = net_.input_dim();
        for (std::size_t j = 0; j < d; ++j) {
            Affine a{RationalVector(d, Rational(0)), Rational(0)};
            a.coeffs[j] = Rational(1);
            inputs.push_back(std::move(a));
        }
        return visit(0, 0, inputs, {}, l1, *x);
    }

    std::uint64_t nodes = 0;
    std::uint64_t lp_calls = 0;
    std::uint64_t patterns = 0;
    bool exhausted = false;

private:
    using Result = std::optional<std::pair<RationalVector, ActivationPattern>>;

    Result visit(std::size_t layer, std::size_t row, const std::vector<Affine>& in, std::vector<Affine> out,
                 const LinearProgram& lp, const RationalVector& wit) {
        ++nodes;
        if (layer == net_.depth()) return leaf(in, lp, wit);
        const Layer& l = net_.layer(layer);
        if (row == l.rows) return visit(layer + 1, 0, out, {}, lp, wit);

        Affine pre{RationalVector(net_.input_dim(), Rational(0)), l.bias[row]};
        for (std::size_t c = 0; c < l.cols; ++c) {
            const Rational& w = l.weight(row, c);
            if (w.is_zero()) continue;
            for (std::size_t j = 0; j < pre.coeffs.size(); ++j) pre.coeffs[j] += w * in[c].coeffs[j];
            pre.constant += w * in[c].constant;
        }
        if (!net_.has_relu(layer)) {
            out.push_back(std::move(pre));
            return visit(layer, row + 1, in, std::move(out), lp, wit);
        }
        Interval range = affine_range(pre, box_);
        const Interval& layered = ranges_[layer][row];
        if (layered.lo && (!range.lo || *layered.lo > *range.lo)) range.lo = layered.lo;
        if (layered.hi && (!range.hi || *layered.hi < *range.hi)) range.hi = layered.hi;
        const bool always_active = range.lo && range.lo->sign() >= 0;
        const bool never_active = !always_active && range.hi && range.hi->sign() <= 0;
        for (const bool active : {true, false}) {
            if ((always_active && !active) || (never_active && active)) continue;
            const bool split = !always_active && !never_active;
            LinearProgram next_lp = lp;
            RationalVector next_wit = wit;
            if (split) {
                next_lp.add(sign_constraint(pre, active));
                // Points with pre = 0 belong to the active branch, so the
                // inactive one is explored only if pre < 0 is attainable.
                const int s = pre.at(wit).sign();
                if (active ? s < 0 : s >= 0) {
                    LinearProgram probe = lp;
                    LinearConstraint c = sign_constraint(pre, active);
                    if (!active) c.rel = Relation::Less;
                    probe.add(std::move(c));
                    ++lp_calls;
                    auto x = feasible(probe);
                    if (!x) continue;
                    next_wit = std::move(*x);
                }
            }
            std::vector<Affine> next_out = out;
            next_out.push_back(active ? pre : Affine{RationalVector(net_.input_dim(), Rational(0)), Rational(0)});
            bits_.push_back(active ? 1 : 0);
            auto r = visit(layer, row + 1, in, std::move(next_out), next_lp, next_wit);
            bits_.pop_back();
            if (r || exhausted) return r;
        }
        return std::nullopt;
    }

    Result leaf(const std::vector<Affine>& outputs, const LinearProgram& lp, const RationalVector& wit) {
        if (++patterns > caps_.max_patterns) {
            exhausted = true;
            return std::nullopt;
        }
        LinearProgram full = lp;
        bool holds = true;
        for (const auto& c : l2_.constraints()) {
            LinearConstraint g{RationalVector(net_.input_dim(), Rational(0)), c.rel, c.bound};
            for (std::size_t k = 0; k < outputs.size(); ++k) {
                if (c.coeffs[k].is_zero()) continue;
                for (std::size_t j = 0; j < g.coeffs.size(); ++j) g.coeffs[j] += c.coeffs[k] * outputs[k].coeffs[j];
                g.bound -= c.coeffs[k] * outputs[k].constant;
            }
            LinearProgram one(net_.input_dim());
            one.add(g);
            holds = holds && check_lp(one, wit);
            full.add(std::move(g));
        }
        if (holds) return std::pair{wit, ActivationPattern{bits_}};
        ++lp_calls;
        auto x = feasible(full);
        if (!x) return std::nullopt;
        return std::pair{std::move(*x), ActivationPattern{bits_}};
    }

    const Network& net_;
    const LinearProgram& l2_;
    const Caps& caps_;
    std::vector<Interval> box_;
    std::vector<std::vector<Interval>> ranges_;
    std::vector<std::uint8_t> bits_;
};

// ---- BV helpers ----

void require_bv(const BvFormula& phi, std::size_t vars, std::size_t width, const char* what) {
    if (phi.width != width) {
        throw Error(ErrorCode::WidthMismatch, std::string(what) + " has width " + std::to_string(phi.width) +
                                                  ", the format's word length is " + std::to_string(width));
    }
    if (phi.num_vars() != vars) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has " + std::to_string(phi.num_vars()) +
                                                      " variables, expected " + std::to_string(vars));
    }
}

void recheck_bv_witness(const Network& net_q, const BvFormula& phi1, const BvFormula& phi2,
                        const ArithmeticFormat& fmt, const RationalVector& x, const RationalVector& y) {
    const bool ok = eval_quantised(net_q, x, fmt) == y && model_check(phi1, to_assignment(x, fmt)) &&
                    model_check(phi2, to_assignment(y, fmt));
    if (!ok) throw Error(ErrorCode::Internal, "witness failed re-validation");
}

std::string budget_reason(const EmptinessResult& r) {
    return r.budget_reason.rfind("exceeded", 0) == 0 ? "time_budget_exceeded" : "state_space_too_large";
}

NfaPtr network_automaton(const Network& net_q, const ArithmeticFormat& fmt, int exponent_cap) {
    try {
        if (const auto* fx = std::get_if<FixedFormat>(&fmt)) return build_fixed_nfa(net_q, *fx);
        return build_float_nfa(net_q, std::get<FloatFormat>(fmt), exponent_cap);
    } catch (const Error& e) {
        switch (e.code()) {
        case ErrorCode::UnsupportedRounding:
        case ErrorCode::UnsupportedOverflow:
        case ErrorCode::UnsupportedNetwork:
        case ErrorCode::UnsupportedDepth:
        case ErrorCode::ExponentWidthTooLarge:
        case ErrorCode::InvalidArgument:
            throw Error(ErrorCode::BackendUnavailable, std::string("automata backend: ") + e.what());
        default: throw;
        }
    }
}

}  // namespace

std::string_view to_string(Problem p) { return name_of(kProblems, p); }
std::string_view to_string(Backend b) { return name_of(kBackends, b); }
std::string_view to_string(Outcome o) { return name_of(kOutcomes, o); }
Problem parse_problem(std::string_view s) { return lookup(kProblems, s, "problem"); }
Backend parse_backend(std::string_view s) { return lookup(kBackends, s, "backend"); }

Caps Caps::from_env() {
    Caps c;
    c.max_inputs = env_cap("QNNV_MAX_INPUTS", c.max_inputs);
    c.max_patterns = env_cap("QNNV_MAX_PATTERNS", c.max_patterns);
    c.max_states = env_cap("QNNV_MAX_STATES", c.max_states);
    return c;
}

std::uint64_t Verdict::stat(std::string_view key) const {
    for (const auto& [k, v] : stats) {
        if (k == key) return v;
    }
    return 0;
}

std::string write_verdict(const Verdict& v) {
    std::ostringstream os;
    os << "format=1\n";
    os << "verdict " << to_string(v.problem) << ' ' << to_string(v.backend) << '\n';
    if (v.format) os << "arith " << to_string(*v.format) << '\n';
    os << "result " << to_string(v.outcome) << '\n';
    if (!v.reason.empty()) os << "reason " << v.reason << '\n';
    if (v.input) os << "input " << to_string(*v.input) << '\n';
    if (v.output) os << "output " << to_string(*v.output) << '\n';
    if (v.pattern) {
        os << "pattern";
        for (auto b : v.pattern->bits) os << ' ' << int(b);
        os << '\n';
    }
    for (const auto& [k, n] : v.stats) os << "stat " << k << ' ' << n << '\n';
    os << "end\n";
    return os.str();
}

Verdict parse_verdict(std::string_view text) {
    LineReader reader(text);
    Verdict v;
    bool seen_header = false, seen_result = false, seen_end = false;
    while (auto line = reader.next()) {
        if (seen_end) throw Error(ErrorCode::SyntaxError, reader.where(*line) + "content after 'end'");
        const auto& s = line->text;
        if (s == "format=1") continue;
        const auto sp = s.find(' ');
        const std::string key = s.substr(0, sp);
        const std::string rest = sp == std::string::npos ? "" : trim(s.substr(sp + 1));
        try {
            if (key == "verdict") {
                const auto parts = split_ws(rest);
                if (parts.size() != 2) throw Error(ErrorCode::SyntaxError, "expected problem and backend");
                v.problem = parse_problem(parts[0]);
                v.backend = parse_backend(parts[1]);
                seen_header = true;
            } else if (key == "arith") {
                v.format = parse_format(rest);
            } else if (key == "result") {
                v.outcome = lookup(kOutcomes, rest, "result");
                seen_result = true;
            } else if (key == "reason") {
                v.reason = rest;
            } else if (key == "input") {
                v.input = parse_rational_list(rest);
            } else if (key == "output") {
                v.output = parse_rational_list(rest);
            } else if (key == "pattern") {
                ActivationPattern w;
                for (const auto& b : split_ws(rest)) {
                    if (b != "0" && b != "1") throw Error(ErrorCode::SyntaxError, "pattern bits are 0 or 1");
                    w.bits.push_back(b == "1" ? 1 : 0);
                }
                v.pattern = std::move(w);
            } else if (key == "stat") {
                const auto parts = split_ws(rest);
                if (parts.size() != 2) throw Error(ErrorCode::SyntaxError, "expected 'stat <name> <count>'");
                v.stats.emplace_back(parts[0], static_cast<std::uint64_t>(parse_count(parts[1], "stat")));
            } else if (key == "end") {
                seen_end = true;
            } else {
                throw Error(ErrorCode::SyntaxError, "unknown field '" + key + "'");
            }
        } catch (const Error& e) {
            throw Error(e.code(), reader.where(*line) + e.what());
        }
    }
    if (!seen_header || !seen_result || !seen_end) {
        throw Error(ErrorCode::SyntaxError, "verdict record needs 'verdict', 'result' and 'end' lines");
    }
    return v;
}

BvAssignment to_assignment(const RationalVector& v, const ArithmeticFormat& fmt) {
    const std::size_t width = word_length(fmt);
    if (width > 64) throw Error(ErrorCode::InvalidArgument, "word length above 64 bits");
    BvAssignment theta{static_cast<unsigned>(width), {}};
    for (const auto& x : v) {
        const BitWord w = encode(x, fmt);
        std::uint64_t value = 0;
        for (std::size_t i = 0; i < w.size(); ++i) value |= std::uint64_t{w[i]} << i;
        theta.values.push_back(value);
    }
    return theta;
}

Verdict reach_q_lp(const Network& net, const LinearProgram& l1, const LinearProgram& l2, const Caps& caps) {
    require_dims(net, l1.num_vars(), l2.num_vars(), "specification");
    Verdict v;
    v.problem = Problem::ReachQLp;
    v.backend = Backend::PatternLp;
    PatternSearch search(net, l1, l2, caps);
    const auto found = search.run(l1);
    v.stats = {{"patterns", search.patterns}, {"nodes", search.nodes}, {"lp_calls", search.lp_calls}};
    if (found) {
        const auto& [x, w] = *found;
        const RationalVector y = eval_rational(net, x);
        const auto pe = eval_with_pattern(net, x, w);
        if (!check_lp(l1, x) || !check_lp(l2, y) || !pe.consistent || pe.output != y) {
            throw Error(ErrorCode::Internal, "pattern witness failed re-validation");
        }
        v.outcome = Outcome::Valid;
        v.input = x;
        v.output = y;
        v.pattern = w;
    } else if (search.exhausted) {
        v.outcome = Outcome::Resource;
        v.reason = "pattern_space_too_large";
    } else {
        v.outcome = Outcome::Invalid;
    }
    return v;
}

Verdict reach_f_lp(const Network& net_q, const LinearProgram& l1, const LinearProgram& l2,
                   const ArithmeticFormat& fmt, const Caps& caps) {
    require_dims(net_q, l1.num_vars(), l2.num_vars(), "specification");
    if (!is_quantised(net_q, fmt)) {
        throw Error(ErrorCode::UnquantisedNetwork, "network parameters are not representable in " + to_string(fmt));
    }
    Verdict v;
    v.problem = Problem::ReachFLp;
    v.backend = Backend::Brute;
    v.format = fmt;
    auto values = representable_values(fmt);
    const std::uint64_t total = grid_size(values.size(), net_q.input_dim(), caps.max_inputs);
    if (total > caps.max_inputs) {
        v.outcome = Outcome::Resource;
        v.reason = "input_space_too_large";
        return v;
    }
    std::uint64_t seen = 0, admitted = 0;
    Grid grid(std::move(values), net_q.input_dim());
    do {
        ++seen;
        const RationalVector x = grid.current();
        if (!check_lp_quantised(l1, x, fmt)) continue;
        ++admitted;
        RationalVector y = eval_quantised(net_q, x, fmt);
        if (!check_lp_quantised(l2, y, fmt)) continue;
        v.outcome = Outcome::Valid;
        v.input = x;
        v.output = std::move(y);
        break;
    } while (grid.advance());
    v.stats = {{"inputs", seen}, {"admitted", admitted}};
    return v;
}

Verdict reach_lp(const Network& net, const LinearProgram& l1, const LinearProgram& l2, const ArithmeticFormat& fmt,
                 const Caps& caps) {
    Verdict v = reach_f_lp(quantise(net, fmt), quantise_lp(l1, fmt), quantise_lp(l2, fmt), fmt, caps);
    v.problem = Problem::ReachLp;
    return v;
}

Verdict reach_f_bv(const Network& net_q, const BvFormula& phi1, const BvFormula& phi2, const ArithmeticFormat& fmt,
                   const Caps& caps) {
    const std::size_t width = word_length(fmt);
    require_bv(phi1, net_q.input_dim(), width, "input formula");
    require_bv(phi2, net_q.output_dim(), width, "output formula");
    if (!is_quantised(net_q, fmt)) {
        throw Error(ErrorCode::UnquantisedNetwork, "network parameters are not representable in " + to_string(fmt));
    }
    Verdict v;
    v.problem = Problem::ReachFBv;
    v.backend = Backend::Brute;
    v.format = fmt;
    auto values = representable_values(fmt);
    if (grid_size(values.size(), net_q.input_dim(), caps.max_inputs) > caps.max_inputs) {
        v.outcome = Outcome::Resource;
        v.reason = "input_space_too_large";
        return v;
    }
    std::uint64_t seen = 0, admitted = 0;
    Grid grid(std::move(values), net_q.input_dim());
    do {
        ++seen;
        const RationalVector x = grid.current();
        if (!model_check(phi1, to_assignment(x, fmt))) continue;
        ++admitted;
        RationalVector y = eval_quantised(net_q, x, fmt);
        if (!model_check(phi2, to_assignment(y, fmt))) continue;
        recheck_bv_witness(net_q, phi1, phi2, fmt, x, y);
        v.outcome = Outcome::Valid;
        v.input = x;
        v.output = std::move(y);
        break;
    } while (grid.advance());
    v.stats = {{"inputs", seen}, {"admitted", admitted}};
    return v;
}

Verdict reach_bv(const Network& net, const BvFormula& phi1, const BvFormula& phi2, const ArithmeticFormat& fmt,
                 Backend backend, const Caps& caps) {
    const Network net_q = quantise(net, fmt);
    if (backend == Backend::Brute) {
        Verdict v = reach_f_bv(net_q, phi1, phi2, fmt, caps);
        v.problem = Problem::ReachBv;
        return v;
    }
    if (backend != Backend::Automata) {
        throw Error(ErrorCode::BackendUnavailable, "reach-bv runs on the brute or automata backend");
    }
    const std::size_t width = word_length(fmt);
    const std::size_t d = net_q.input_dim();
    const std::size_t m = net_q.output_dim();
    require_bv(phi1, d, width, "input formula");
    require_bv(phi2, m, width, "output formula");

    Verdict v;
    v.problem = Problem::ReachBv;
    v.backend = Backend::Automata;
    v.format = fmt;
    const ExploreBudget budget{caps.max_states, caps.max_seconds, 0};
    const NfaPtr spec_in = build_bv_nfa(phi1);
    const NfaPtr spec_out = build_bv_nfa(phi2);
    std::uint64_t explored = 0;
    for (const auto& [part, label] : {std::pair{spec_in, "input_formula_unsat"}, {spec_out, "output_formula_unsat"}}) {
        const auto r = is_empty(*part, budget);
        explored += r.explored;
        if (r.status == EmptinessResult::Status::Budget) {
            v.outcome = Outcome::Resource;
            v.reason = budget_reason(r);
            v.stats = {{"explored", explored}};
            return v;
        }
        if (r.status == EmptinessResult::Status::Empty) {
            v.outcome = Outcome::Invalid;
            v.reason = label;
            v.stats = {{"explored", explored}};
            return v;
        }
    }

    std::vector<std::size_t> in_tracks(d), out_tracks(m);
    for (std::size_t j = 0; j < d; ++j) in_tracks[j] = j;
    for (std::size_t k = 0; k < m; ++k) out_tracks[k] = d + k;
    const NfaPtr product = intersect_all({network_automaton(net_q, fmt, caps.float_exponent_cap), lift(spec_in, in_tracks, d + m),
                                          lift(spec_out, out_tracks, d + m)});
    const auto r = is_empty(*product, budget);
    explored += r.explored;
    v.stats = {{"explored", explored}};
    if (r.status == EmptinessResult::Status::Budget) {
        v.outcome = Outcome::Resource;
        v.reason = budget_reason(r);
        return v;
    }
    if (r.status == EmptinessResult::Status::Empty) {
        v.outcome = Outcome::Invalid;
        return v;
    }
    const auto tracks = unpack_tracks(*r.witness, d + m);
    RationalVector x, y;
    for (std::size_t i = 0; i < d + m; ++i) {
        const BitWord word{tracks[i]};
        const Rational value = decode(word, fmt);
        if (encode(value, fmt) != word) throw Error(ErrorCode::Internal, "witness track is not a canonical word");
        (i < d ? x : y).push_back(value);
    }
    recheck_bv_witness(net_q, phi1, phi2, fmt, x, y);
    v.outcome = Outcome::Valid;
    v.input = std::move(x);
    v.output = std::move(y);
    return v;
}

}  // namespace qnnv

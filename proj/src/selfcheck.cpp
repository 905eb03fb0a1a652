#include "qnnv/selfcheck.hpp"

#include "qnnv/error.hpp"
#include "qnnv/reduction.hpp"
#include "qnnv/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <sstream>
#include <thread>

namespace qnnv {

namespace {

using Rng = std::mt19937_64;

std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

Network random_net(Rng& rng, const FixedFormat& fmt) {
    const auto values = representable_values(fmt);
    const std::size_t depth = 1 + below(rng, 2);
    std::size_t cols = 1 + below(rng, 2);
    std::vector<Layer> layers;
    for (std::size_t i = 0; i < depth; ++i) {
        Layer l;
        l.cols = cols;
        l.rows = 1 + below(rng, 3);
        for (std::size_t k = 0; k < l.rows * l.cols; ++k) l.weights.push_back(values[below(rng, values.size())]);
        for (std::size_t k = 0; k < l.rows; ++k) l.bias.push_back(values[below(rng, values.size())]);
        cols = l.rows;
        layers.push_back(std::move(l));
    }
    return Network(std::move(layers), below(rng, 4) != 0);
}

BvTermPtr random_term(Rng& rng, std::size_t vars, std::uint64_t mask, int depth) {
    const std::size_t pick = below(rng, depth > 0 ? 5 : 2);
    if (pick == 0) return BvTerm::variable(below(rng, vars));
    if (pick == 1) return BvTerm::constant(rng() & mask);
    if (pick == 2) return BvTerm::negate(random_term(rng, vars, mask, depth - 1));
    const auto kind = pick == 3 ? BvTerm::Kind::And : (rng() % 2 ? BvTerm::Kind::Or : BvTerm::Kind::Xor);
    auto a = random_term(rng, vars, mask, depth - 1);
    return BvTerm::binary(kind, std::move(a), random_term(rng, vars, mask, depth - 1));
}

BvFormula random_formula(Rng& rng, std::size_t vars, unsigned width) {
    BvFormula phi;
    phi.width = width;
    for (std::size_t i = 0; i < vars; ++i) phi.vars.push_back("x" + std::to_string(i + 1));
    std::vector<BvNodePtr> atoms;
    const std::size_t n = below(rng, 3);
    for (std::size_t i = 0; i < n; ++i) {
        atoms.push_back(BvNode::atom(rng() % 2 == 0, random_term(rng, vars, phi.mask(), 2),
                                     random_term(rng, vars, phi.mask(), 1)));
    }
    phi.root = BvNode::junction(rng() % 3 ? BvNode::Kind::And : BvNode::Kind::Or, std::move(atoms));
    return phi;
}

bool cnf_satisfiable(const Cnf3& cnf) {
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << cnf.num_vars); ++m) {
        const bool all = std::all_of(cnf.clauses.begin(), cnf.clauses.end(), [&](const Clause3& c) {
            return std::any_of(c.begin(), c.end(), [&](const Literal& l) { return ((m >> l.var & 1) != 0) == l.positive; });
        });
        if (all) return true;
    }
    return false;
}

std::string verdict_word(const Verdict& v) { return std::string(to_string(v.outcome)); }

SelfcheckCase bv_case(std::uint64_t seed, std::size_t index) {
    Rng rng(seed * 1000003 + index);
    const int b = 2 + static_cast<int>(below(rng, 4));
    const int f = static_cast<int>(below(rng, static_cast<std::size_t>(b) + 1));
    const FixedFormat fmt{b, f, rng() % 2 ? RoundingMode::NearestHalfUp : RoundingMode::TowardNegative,
                          OverflowMode::Saturate};
    const Network net = random_net(rng, fmt);
    const auto phi1 = random_formula(rng, net.input_dim(), static_cast<unsigned>(b));
    const auto phi2 = random_formula(rng, net.output_dim(), static_cast<unsigned>(b));
    SelfcheckCase c;
    c.name = "reach-bv#" + std::to_string(index) + " " + to_string(ArithmeticFormat(fmt));
    const Verdict brute = reach_bv(net, phi1, phi2, fmt, Backend::Brute);
    const Verdict aut = reach_bv(net, phi1, phi2, fmt, Backend::Automata);
    c.agree = brute.outcome == aut.outcome;
    c.detail = "brute=" + verdict_word(brute) + " automata=" + verdict_word(aut);
    return c;
}

SelfcheckCase cnf_case(std::uint64_t seed, std::size_t index) {
    Rng rng(seed * 2000003 + index);
    Cnf3 cnf;
    cnf.num_vars = 1 + below(rng, 3);
    const std::size_t clauses = 1 + below(rng, 4);
    for (std::size_t i = 0; i < clauses; ++i) {
        Clause3 cl;
        for (auto& lit : cl) lit = {below(rng, cnf.num_vars), rng() % 2 == 0};
        cnf.clauses.push_back(cl);
    }
    SelfcheckCase c;
    c.name = "3cnf#" + std::to_string(index) + " vars=" + std::to_string(cnf.num_vars) +
             " clauses=" + std::to_string(clauses);
    const bool truth = cnf_satisfiable(cnf);
    const auto inst = reduce(cnf);
    const Verdict lp = reach_q_lp(inst.network, inst.input, inst.output);
    const auto q = reduce_quantised(cnf, 1);
    const Verdict brute = reach_f_lp(q.instance.network, q.instance.input, q.instance.output, q.format);
    c.agree = lp.outcome == (truth ? Outcome::Valid : Outcome::Invalid) && brute.outcome == lp.outcome;
    c.detail = std::string("truth=") + (truth ? "sat" : "unsat") + " pattern_lp=" + verdict_word(lp) +
               " brute=" + verdict_word(brute);
    return c;
}

}  // namespace

std::size_t SelfcheckReport::disagreements() const {
    return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const auto& c) { return !c.agree; }));
}

SelfcheckReport run_selfcheck(const SelfcheckOptions& opts) {
    const std::size_t total = opts.bv_instances + opts.cnf_instances;
    SelfcheckReport report;
    report.cases.resize(total);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                report.cases[i] = i < opts.bv_instances ? bv_case(opts.seed, i)
                                                        : cnf_case(opts.seed, i - opts.bv_instances);
            } catch (const Error& e) {
                report.cases[i] = {"instance#" + std::to_string(i), false, e.what()};
            }
        }
    };
    const unsigned jobs = std::max(1u, opts.jobs);
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return report;
}

}  // namespace qnnv

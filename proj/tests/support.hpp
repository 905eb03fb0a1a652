#pragma once

#include "qnnv/arithmetic.hpp"
#include "qnnv/automata.hpp"
#include "qnnv/network.hpp"

#include <cstdint>
#include <random>
#include <set>
#include <vector>

namespace qnnv_test {

/// Every input vector over the format's value set, in odometer order.
inline std::vector<qnnv::RationalVector> all_inputs(const qnnv::ArithmeticFormat& fmt, std::size_t dim) {
    const auto values = qnnv::representable_values(fmt);
    std::vector<qnnv::RationalVector> out;
    std::vector<std::size_t> pick(dim, 0);
    while (true) {
        qnnv::RationalVector x;
        for (auto i : pick) x.push_back(values[i]);
        out.push_back(x);
        std::size_t i = 0;
        while (i < dim && ++pick[i] == values.size()) pick[i++] = 0;
        if (i == dim) break;
    }
    return out;
}

/// Words (encode(x), encode(N(x))) with input tracks first.
inline std::set<qnnv::Word> relation_words(const qnnv::Network& net, const qnnv::ArithmeticFormat& fmt) {
    std::set<qnnv::Word> out;
    for (const auto& x : all_inputs(fmt, net.input_dim())) {
        const auto y = qnnv::eval_quantised(net, x, fmt);
        std::vector<std::vector<std::uint8_t>> tracks;
        for (const auto& v : x) tracks.push_back(qnnv::encode(v, fmt).bits);
        for (const auto& v : y) tracks.push_back(qnnv::encode(v, fmt).bits);
        out.insert(qnnv::pack_tracks(tracks));
    }
    return out;
}

}  // namespace qnnv_test

namespace qnnv_test {

struct NetShape {
    std::size_t max_inputs = 2;
    std::size_t max_layers = 2;
    std::size_t max_width = 3;
    std::size_t max_outputs = 3;
};

/// Random network with parameters drawn from the format's value set.
inline qnnv::Network random_network(std::mt19937_64& rng, const qnnv::ArithmeticFormat& fmt, const NetShape& shape,
                                    bool final_relu = true) {
    const auto values = qnnv::representable_values(fmt);
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    const std::size_t depth = pick(1, shape.max_layers);
    std::size_t cols = pick(1, shape.max_inputs);
    std::vector<qnnv::Layer> layers;
    for (std::size_t i = 0; i < depth; ++i) {
        qnnv::Layer l;
        l.cols = cols;
        l.rows = pick(1, i + 1 == depth ? shape.max_outputs : shape.max_width);
        for (std::size_t k = 0; k < l.rows * l.cols; ++k) l.weights.push_back(values[pick(0, values.size() - 1)]);
        for (std::size_t k = 0; k < l.rows; ++k) l.bias.push_back(values[pick(0, values.size() - 1)]);
        cols = l.rows;
        layers.push_back(std::move(l));
    }
    return qnnv::Network(std::move(layers), final_relu);
}

}  // namespace qnnv_test

#include "qnnv/bv.hpp"

namespace qnnv_test {

inline qnnv::BvTermPtr random_term(std::mt19937_64& rng, std::size_t vars, unsigned width, int depth) {
    using qnnv::BvTerm;
    std::uniform_int_distribution<int> kind(0, depth > 0 ? 5 : 1);
    const std::uint64_t mask = width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
    switch (kind(rng)) {
    case 0: return BvTerm::variable(std::uniform_int_distribution<std::size_t>(0, vars - 1)(rng));
    case 1: return BvTerm::constant(rng() & mask);
    case 2: return BvTerm::negate(random_term(rng, vars, width, depth - 1));
    case 3: return BvTerm::binary(BvTerm::Kind::And, random_term(rng, vars, width, depth - 1), random_term(rng, vars, width, depth - 1));
    case 4: return BvTerm::binary(BvTerm::Kind::Or, random_term(rng, vars, width, depth - 1), random_term(rng, vars, width, depth - 1));
    default: return BvTerm::binary(BvTerm::Kind::Xor, random_term(rng, vars, width, depth - 1), random_term(rng, vars, width, depth - 1));
    }
}

inline qnnv::BvNodePtr random_node(std::mt19937_64& rng, std::size_t vars, unsigned width, int depth) {
    using qnnv::BvNode;
    std::uniform_int_distribution<int> kind(0, depth > 0 ? 4 : 1);
    switch (kind(rng)) {
    case 0:
    case 1: return BvNode::atom(kind(rng) % 2 == 0, random_term(rng, vars, width, 2), random_term(rng, vars, width, 2));
    case 2: return BvNode::negate(random_node(rng, vars, width, depth - 1));
    default: {
        std::vector<qnnv::BvNodePtr> kids;
        const int n = std::uniform_int_distribution<int>(0, 3)(rng);
        for (int i = 0; i < n; ++i) kids.push_back(random_node(rng, vars, width, depth - 1));
        return BvNode::junction(rng() % 2 ? BvNode::Kind::And : BvNode::Kind::Or, std::move(kids));
    }
    }
}

/// Formula over x1..x<vars>.
inline qnnv::BvFormula random_formula(std::mt19937_64& rng, std::size_t vars, unsigned width, int depth = 2) {
    qnnv::BvFormula phi;
    phi.width = width;
    for (std::size_t i = 0; i < vars; ++i) phi.vars.push_back("x" + std::to_string(i + 1));
    phi.root = random_node(rng, vars, width, depth);
    return phi;
}

}  // namespace qnnv_test

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "qnnv/bv.hpp"
#include "qnnv/error.hpp"

using namespace qnnv;

namespace {

BvAssignment random_assignment(std::mt19937_64& rng, const BvFormula& phi) {
    BvAssignment theta{phi.width, {}};
    for (std::size_t i = 0; i < phi.num_vars(); ++i) theta.values.push_back(rng() & phi.mask());
    return theta;
}

bool uses_only(const BvNode& n, bool allow_not) {
    if (n.kind == BvNode::Kind::Not) return allow_not;
    for (const auto& c : n.children) {
        if (!uses_only(*c, allow_not)) return false;
    }
    return true;
}

bool term_has_xor(const BvTermPtr& t) {
    return t && (t->kind == BvTerm::Kind::Xor || term_has_xor(t->lhs) || term_has_xor(t->rhs));
}

bool node_has_xor(const BvNode& n) {
    if (term_has_xor(n.lhs) || term_has_xor(n.rhs)) return true;
    for (const auto& c : n.children) {
        if (node_has_xor(*c)) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("model checking against bit-by-bit evaluation") {
    std::mt19937_64 rng(31);
    int holds = 0;
    for (int round = 0; round < 1000; ++round) {
        const unsigned width = 1 + static_cast<unsigned>(rng() % 8);
        const auto phi = qnnv_test::random_formula(rng, 1 + rng() % 3, width, 3);
        const auto theta = random_assignment(rng, phi);
        const bool expect = qnnv_test::naive_holds(*phi.root, theta);
        REQUIRE(model_check(phi, theta) == expect);
        holds += expect;
    }
    CHECK(holds > 100);
    CHECK(holds < 900);
}

TEST_CASE("printing and parsing preserve meaning") {
    std::mt19937_64 rng(32);
    for (int round = 0; round < 300; ++round) {
        const unsigned width = 1 + static_cast<unsigned>(rng() % 8);
        const auto phi = qnnv_test::random_formula(rng, 1 + rng() % 3, width, 3);
        const auto back = parse_bv(to_string(phi), width, phi.vars);
        // printing may drop one-child junctions, after that it is a fixpoint
        const std::string text = to_string(back);
        REQUIRE(to_string(parse_bv(text, width, phi.vars)) == text);
        for (int k = 0; k < 10; ++k) {
            const auto theta = random_assignment(rng, phi);
            REQUIRE(model_check(back, theta) == model_check(phi, theta));
        }
    }
}

TEST_CASE("normal forms preserve meaning") {
    std::mt19937_64 rng(33);
    for (int round = 0; round < 300; ++round) {
        const unsigned width = 1 + static_cast<unsigned>(rng() % 6);
        const auto phi = qnnv_test::random_formula(rng, 1 + rng() % 3, width, 3);
        const auto nnf = to_nnf(phi);
        const auto plain = desugar_xor(phi);
        CHECK(uses_only(*nnf.root, false));
        CHECK_FALSE(node_has_xor(*plain.root));
        for (int k = 0; k < 10; ++k) {
            const auto theta = random_assignment(rng, phi);
            const bool expect = qnnv_test::naive_holds(*phi.root, theta);
            REQUIRE(model_check(nnf, theta) == expect);
            REQUIRE(model_check(plain, theta) == expect);
        }
    }
}

TEST_CASE("parser details") {
    const auto phi = parse_bv("~(a & 0b101) ^ b = 0x3 \\/ !(a != b) /\\ a | b = 7", 3);
    REQUIRE(phi.vars == std::vector<std::string>{"a", "b"});
    // ~(0 & 5) ^ 4 = 3
    CHECK(model_check(phi, {3, {0, 4}}));
    CHECK(model_check(phi, {3, {7, 7}}));
    // ~(1 & 5) ^ 1 = 7, and a | b = 1
    CHECK_FALSE(model_check(phi, {3, {1, 1}}));
    CHECK(model_check(parse_bv("x == 2", 3), {3, {2}}));
    CHECK(model_check(parse_bv("x = x", 4), {4, {9}}));
    CHECK(model_check(parse_bv("(true) /\\ !(false) /\\ x = 1", 2, std::vector<std::string>{"x"}), {2, {1}}));
    CHECK(eval_term(*parse_bv("~x = 0", 4).root->lhs, {4, {9}}, 0xF) == 6);

    auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Internal;
    };
    CHECK(code([] { parse_bv("x = 8", 3); }) == ErrorCode::ConstantTooWide);
    CHECK(code([] { parse_bv("x = y", 3, std::vector<std::string>{"x"}); }) == ErrorCode::UnboundVariable);
    CHECK(code([] { model_check(parse_bv("x = 1", 3), {4, {1}}); }) == ErrorCode::WidthMismatch);
    CHECK(code([] { model_check(parse_bv("x = 1", 3), {3, {9}}); }) == ErrorCode::WidthMismatch);
    CHECK(code([] { model_check(parse_bv("x = y", 3), {3, {1}}); }) == ErrorCode::UnboundVariable);
    CHECK(code([] { parse_bv("x = ", 3); }) == ErrorCode::SyntaxError);
    CHECK(code([] { parse_bv("x = 1 /\\", 3); }) == ErrorCode::SyntaxError);
    CHECK(code([] { parse_bv("x = 1", 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("brute-force satisfiability") {
    const auto phi = parse_bv("x & y = 5 /\\ x ^ y = 2", 3);
    const auto sol = sat_bruteforce(phi);
    REQUIRE(sol);
    CHECK(model_check(phi, *sol));
    CHECK_FALSE(sat_bruteforce(parse_bv("x = 1 /\\ x = 2", 3)));
    CHECK_THROWS_AS(sat_bruteforce(parse_bv("x = y", 16), 1000), Error);
}

TEST_CASE("spec files") {
    std::mt19937_64 rng(34);
    for (int round = 0; round < 100; ++round) {
        const unsigned width = 1 + static_cast<unsigned>(rng() % 8);
        BvSpec spec{width, qnnv_test::random_formula(rng, 2, width), qnnv_test::random_formula(rng, 1, width)};
        const auto back = parse_bv_spec(write_bv_spec(spec), 2, 1);
        REQUIRE(back.width == width);
        REQUIRE(write_bv_spec(parse_bv_spec(write_bv_spec(back), 2, 1)) == write_bv_spec(back));
        for (int k = 0; k < 5; ++k) {
            const auto theta = random_assignment(rng, spec.input);
            REQUIRE(model_check(back.input, theta) == model_check(spec.input, theta));
        }
    }
    const auto spec = parse_bv_spec("format=1\nwidth 4\n@in\nvars a b\na = b\n@out\n# default names\nx1 != 0\n", 2, 1);
    CHECK(spec.input.vars == std::vector<std::string>{"a", "b"});
    CHECK(spec.output.vars == std::vector<std::string>{"x1"});
    CHECK(parse_bv_spec("width 2\n@in\nvars y1..y3\ny1 = y3\n@out\n", 3, 1).input.num_vars() == 3);
    CHECK_THROWS_AS(parse_bv_spec("@in\nx1 = 0\n@out\n", 1, 1), Error);
    CHECK_THROWS_AS(parse_bv_spec("width 2\n@out\n@in\n", 1, 1), Error);
    CHECK_THROWS_AS(parse_bv_spec("width 2\n@in\nvars a\n@out\n", 2, 1), Error);
    CHECK_THROWS_AS(parse_bv_spec("width 2\nx1 = 0\n", 1, 1), Error);
}

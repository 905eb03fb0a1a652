#include "doctest.h"
#include "oracles.hpp"

#include "qnnv/error.hpp"
#include "qnnv/lp.hpp"
#include "qnnv/simplex.hpp"

#include <random>

using namespace qnnv;

namespace {

Rational q(long n, long d = 1) { return Rational(BigInt(n), BigInt(d)); }

LinearProgram random_lp(std::mt19937_64& rng, std::size_t vars, std::size_t rows) {
    LinearProgram lp(vars);
    std::uniform_int_distribution<int> coef(-3, 3), rel(0, 4), den(1, 3);
    for (std::size_t i = 0; i < rows; ++i) {
        RationalVector a(vars);
        for (auto& v : a) v = q(coef(rng));
        lp.add(std::move(a), static_cast<Relation>(rel(rng)), q(coef(rng), den(rng)));
    }
    return lp;
}

}  // namespace

TEST_CASE("feasibility agrees with Fourier-Motzkin") {
    std::mt19937_64 rng(2024);
    int sat = 0;
    for (int round = 0; round < 300; ++round) {
        const std::size_t vars = 1 + rng() % 4;
        const auto lp = random_lp(rng, vars, rng() % 7);
        const auto w = feasible(lp);
        REQUIRE(w.has_value() == qnnv_test::fm_feasible(lp));
        if (w) {
            ++sat;
            REQUIRE(w->size() == vars);
            REQUIRE(check_lp(lp, *w));
        }
    }
    CHECK(sat > 30);
    CHECK(sat < 270);
}

TEST_CASE("strict constraints") {
    const auto open = parse_lp("x1 > 0 /\\ x1 < 1");
    const auto w = feasible(open);
    REQUIRE(w);
    CHECK((*w)[0] > q(0));
    CHECK((*w)[0] < q(1));
    CHECK_FALSE(feasible(parse_lp("x1 > 0 /\\ x1 <= 0")));
    CHECK_FALSE(feasible(parse_lp("x1 + x2 < 1 /\\ x1 >= 1/2 /\\ x2 >= 1/2")));
    CHECK(feasible(parse_lp("x1 + x2 <= 1 /\\ x1 >= 1/2 /\\ x2 >= 1/2")));
    CHECK(feasible(LinearProgram(3)));
}

TEST_CASE("parsing") {
    const auto lp = parse_lp("2*x1 - x2 + 3 <= x3\n1/2 x2 = -1 # note\nx1 > 0.5 /\\ 0 >= x2", 4);
    REQUIRE(lp.num_vars() == 4);
    REQUIRE(lp.constraints().size() == 4);
    CHECK(check_lp(lp, {q(1), q(-2), q(7), q(0)}));
    CHECK_FALSE(check_lp(lp, {q(1), q(-2), q(6), q(0)}));
    CHECK_FALSE(check_lp(lp, {q(1, 2), q(-2), q(7), q(0)}));
    CHECK_THROWS_AS(check_lp(lp, {q(1)}), Error);
    CHECK(parse_lp("x3 <= 1").num_vars() == 3);

    CHECK_THROWS_WITH_AS(parse_lp("x1 <= 1\nx1 <= $"), doctest::Contains("line 2 col 7"), Error);
    CHECK_THROWS_WITH_AS(parse_lp("x1 <="), doctest::Contains("line 1"), Error);
    CHECK_THROWS_AS(parse_lp("x1 <= 1/0"), Error);
    CHECK_THROWS_AS(parse_lp("x0 <= 1"), Error);
    CHECK_THROWS_AS(parse_lp("x1 x2 <= 1"), Error);
    CHECK_THROWS_AS(parse_lp("x3 <= 1", 2), Error);
    LinearProgram two(2);
    CHECK_THROWS_AS(two.add({q(1)}, Relation::Less, q(0)), Error);
    CHECK_THROWS_AS(two.append(LinearProgram(3)), Error);
}

TEST_CASE("text round-trips") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 100; ++round) {
        const std::size_t vars = 1 + rng() % 4;
        const auto lp = random_lp(rng, vars, rng() % 5);
        const auto back = parse_lp(write_lp(lp), vars);
        REQUIRE(write_lp(back) == write_lp(lp));
        // same solution set on a sample grid
        for (int k = 0; k < 20; ++k) {
            RationalVector x(vars);
            for (auto& v : x) v = q(static_cast<long>(rng() % 9) - 4, 2);
            REQUIRE(check_lp(back, x) == check_lp(lp, x));
        }
        LpSpec spec{lp, random_lp(rng, 2, rng() % 3)};
        const auto again = parse_lp_spec(write_lp_spec(spec), vars, 2);
        REQUIRE(write_lp_spec(again) == write_lp_spec(spec));
    }
    const auto spec = parse_lp_spec("format=1\n@in\nx1 >= 0\n\n@out\n# none\nx2 < x1\n", 1, 2);
    CHECK(spec.input.constraints().size() == 1);
    CHECK(spec.output.num_vars() == 2);
    CHECK_THROWS_AS(parse_lp_spec("x1 >= 0\n", 1, 1), Error);
    CHECK_THROWS_AS(parse_lp_spec("@in\n@in\n", 1, 1), Error);
    CHECK_THROWS_WITH_AS(parse_lp_spec("@in\nx1 >= 0\n@out\nx1 >= ?\n", 1, 1), doctest::Contains("line 4"), Error);
}

TEST_CASE("quantised programs") {
    const ArithmeticFormat fmt = FixedFormat{4, 1, RoundingMode::TowardNegative, OverflowMode::Saturate};
    LinearProgram lp(1);
    lp.add({q(3, 4)}, Relation::LessEqual, q(9));
    const auto ql = quantise_lp(lp, fmt);
    CHECK(ql.constraints()[0].coeffs[0] == q(1, 2));
    CHECK(ql.constraints()[0].bound == q(7, 2));
    for (const auto& c : ql.constraints()) {
        for (const auto& a : c.coeffs) CHECK(quantize(a, fmt) == a);
    }
    // 1/2 * 3 = 3/2 <= 7/2
    CHECK(check_lp_quantised(ql, {q(3)}, fmt));
    LinearProgram big(1);
    big.add({q(1)}, Relation::LessEqual, q(3));
    // the left side 7/2 is exact; the comparison happens on the grid
    CHECK_FALSE(check_lp_quantised(big, {q(7, 2)}, fmt));
}

TEST_CASE("simplex optimum and status") {
    // max x + y s.t. x + 2y <= 4, 3x + y <= 6
    const auto r = maximize(2, {{{q(1), q(2)}, RowSense::LessEqual, q(4)}, {{q(3), q(1)}, RowSense::LessEqual, q(6)}},
                            {q(1), q(1)});
    REQUIRE(r.status == SimplexStatus::Optimal);
    CHECK(r.objective == q(14, 5));
    CHECK(r.point == RationalVector{q(8, 5), q(6, 5)});
    CHECK(maximize(1, {{{q(1)}, RowSense::GreaterEqual, q(1)}}, {q(1)}).status == SimplexStatus::Unbounded);
    CHECK(maximize(1, {{{q(1)}, RowSense::LessEqual, q(-1)}}, {q(1)}).status == SimplexStatus::Infeasible);
    const auto eq = maximize(2, {{{q(1), q(1)}, RowSense::Equal, q(2)}}, {q(-1), q(0)});
    REQUIRE(eq.status == SimplexStatus::Optimal);
    CHECK(eq.objective == q(0));
    // degenerate vertex, several tight rows through the origin
    const auto deg = maximize(2,
                              {{{q(1), q(-1)}, RowSense::LessEqual, q(0)},
                               {{q(-1), q(1)}, RowSense::LessEqual, q(0)},
                               {{q(1), q(1)}, RowSense::LessEqual, q(2)},
                               {{q(2), q(2)}, RowSense::LessEqual, q(4)}},
                              {q(1), q(0)});
    REQUIRE(deg.status == SimplexStatus::Optimal);
    CHECK(deg.objective == q(1));
}

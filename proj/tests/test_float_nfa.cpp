#include "doctest.h"
#include "support.hpp"

#include "qnnv/error.hpp"
#include "qnnv/float_nfa.hpp"

#include <set>

using namespace qnnv;
using qnnv_test::relation_words;

namespace {

std::set<Word> language(const SuccinctNfa& nfa) {
    const auto words = enumerate_language(nfa);
    return {words.begin(), words.end()};
}

}  // namespace

TEST_CASE("single identity neuron, p=2 e=2") {
    Network net({Layer{1, 1, {Rational(1)}, {Rational(0)}}});
    FloatFormat fmt{2, 2, RoundingMode::NearestHalfUp};
    FloatFnnNfa nfa(net, fmt);
    CHECK(language(nfa) == relation_words(net, fmt));
}

TEST_CASE("random family matches the evaluated relation") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 80; ++round) {
        FloatFormat fmt{1 + round % 3, 2, RoundingMode::NearestHalfUp};
        const auto net = qnnv_test::random_network(rng, fmt, {});
        FloatFnnNfa nfa(net, fmt);
        INFO("round " << round << "\n" << write_network(net) << to_string(ArithmeticFormat(fmt)));
        CHECK(language(nfa) == relation_words(net, fmt));
    }
}

#pragma once

#include "qnnv/automata.hpp"
#include "qnnv/bv.hpp"

namespace qnnv {

/// Bit j of term t, given the j-th bit of every variable packed in sigma.
int eval_slice(const BvTerm& t, std::size_t j, Symbol sigma);

/// Automaton over bit slices (track i = variable i, position j = bit j of the
/// word, least significant first) accepting exactly the models of phi.
/// Atoms track (j, f_eq); the formula's NNF tree becomes products and unions.
NfaPtr build_bv_nfa(const BvFormula& phi);

/// Decodes an accepted word back into an assignment.
BvAssignment word_to_assignment(const Word& word, std::size_t num_vars, unsigned width);
Word assignment_to_word(const BvAssignment& theta, std::size_t num_vars);

}  // namespace qnnv

// LTL to nondeterministic Büchi automata via the classic tableau (expand)
// construction, plus the per-state language emptiness analysis the monitor
// construction relies on.

#pragma once

#include <string>
#include <vector>

#include "stratmon/formula.hpp"

namespace stratmon {

// Explicit-alphabet NBA. Letters are bitmasks over `atoms` (sorted basis):
// bit i set means atoms[i] holds in the event.
struct BuchiAutomaton {
    std::vector<std::string> atoms;
    std::vector<std::vector<std::vector<int>>> next; // state -> letter -> successors (sorted)
    std::vector<int> initial;                        // sorted
    std::vector<char> accepting;

    size_t state_count() const { return accepting.size(); }
    size_t letter_count() const { return size_t{1} << atoms.size(); }
};

// Builds an NBA with L(A) = [[f]]. Input must be LTL in NNF over literals.
// The optional basis fixes the alphabet (must cover the formula's atoms).
BuchiAutomaton ltl_to_buchi(const FormulaPtr& f);
BuchiAutomaton ltl_to_buchi(const FormulaPtr& f, std::vector<std::string> atom_basis);

// live[q] = some accepting run exists from q (nonempty language).
// Accepting SCC analysis, one pass for all states.
std::vector<char> live_states(const BuchiAutomaton& a);

// Acceptance of the ultimately periodic word stem . loop^w (letters as
// bitmask indices). Exact: repeated-product closure over loop iterations.
bool accepts_lasso(const BuchiAutomaton& a, const std::vector<int>& stem,
                   const std::vector<int>& loop);

// Letter index for an event, projecting onto the automaton's atom basis.
int letter_of_event(const std::vector<std::string>& basis_atoms,
                    const std::vector<std::string>& event);

} // namespace stratmon

// Perfect-information ATL model checking via controllable-predecessor
// fixpoints, and the sub-formula labelling pass over candidate sub-models.

#pragma once

#include <string>
#include <vector>

#include "stratmon/formula.hpp"
#include "stratmon/icgs.hpp"
#include "stratmon/submodel.hpp"

namespace stratmon {

using StateSet = std::vector<char>; // indexed by state

// { s | some coalition action tuple enabled at s forces every enabled
//   completion into `targets` }. Requires perfect information.
StateSet coalition_pre(const Icgs& m, const std::vector<int>& coalition, const StateSet& targets);

// Exact satisfaction set of an ATL-fragment formula on a perfect-information
// model. <<G>>(a U b) is a least fixpoint, <<G>>(a R b) a greatest fixpoint,
// <<G>>X one pre-image; [[G]] uses the dual pre-image. Literals (!q) are
// evaluated by complement. Throws FragmentError outside the fragment.
StateSet check_atl(const Icgs& m, const FormulaPtr& f);

// One labelled claim from the static pass. Tag 'n' entries certify truth in
// the full model (negative sub-model), the absence of a 'p' entry at a core
// state certifies falsity (positive sub-model).
struct CheckEntry {
    int state; // parent model state index
    FormulaPtr sub;
    char tag; // 'n' or 'p'
    std::string atom;
};

struct CheckedSub {
    FormulaPtr sub;
    char tag;
    std::string atom;
    std::vector<int> sat_core; // parent state indices where the check succeeded
};

struct CheckResult {
    std::vector<int> core; // parent state indices of the candidate's core
    std::vector<CheckEntry> entries;
    std::vector<CheckedSub> checked;

    std::vector<std::string> atoms_at(int parent_state) const;
    bool empty() const { return entries.empty(); }
};

// Deterministic fresh-atom name for a (subformula, tag) pair.
std::string check_atom_name(const FormulaPtr& sub, char tag);

// Algorithm 1's static pass: checks every strategic ATL-fragment subformula of
// f bottom-up on both sub-models, replacing already-checked subformulas by
// their atoms before checking enclosing ones. Subformulas outside the
// fragment produce no entries.
CheckResult check_subformulas(const SubmodelPair& pair, const FormulaPtr& f);

} // namespace stratmon

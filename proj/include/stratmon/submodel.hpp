// Perfect-information sub-model extraction: the negative/positive pair over a
// core state subset, and the candidate enumeration used by the pipeline.

#pragma once

#include <vector>

#include "stratmon/formula.hpp"
#include "stratmon/icgs.hpp"

namespace stratmon {

struct SubmodelPair {
    std::vector<int> core;   // parent state indices, sorted, contains the initial state
    Icgs negative;           // states = core then the all-false sink (last index)
    Icgs positive;           // states = core then the all-true sink (last index)

    int sink_index() const { return static_cast<int>(core.size()); }
    // submodel state index -> parent state index (sink has none)
    int to_parent(int sub_state) const { return core[sub_state]; }
};

// Negative sub-model M_n over core: transitions leaving the core are
// redirected to an absorbing sink labelled with no atoms. The initial state
// must be in the core.
Icgs build_negative(const Icgs& m, const std::vector<int>& core);

// Positive sub-model M_p: as above with the sink labelled with every atom.
Icgs build_positive(const Icgs& m, const std::vector<int>& core);

// Enumerates perfect-information candidate cores and builds both sub-models
// for each. Cores contain the initial state, grow by reachability, include at
// most one representative per nontrivial equivalence class, and are maximal
// for the chosen representatives. Deterministic; at most `limit` candidates.
// A perfect-information model yields exactly one candidate covering every
// reachable state.
std::vector<SubmodelPair> find_submodels(const Icgs& m, const FormulaPtr& f, size_t limit);

// Core enumeration without building the models (exposed for tests).
std::vector<std::vector<int>> enumerate_cores(const Icgs& m, size_t limit);

} // namespace stratmon
